#include "crossrt/rf_grid.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace crt
{

RFGrid rf_build(const RFGridData& grid, float threshold)
{
  if (grid.dims.x < 1 || grid.dims.y < 1 || grid.dims.z < 1)
    throw std::invalid_argument("rf_build: grid needs at least one cell per axis");
  const size_t expect = size_t(grid.dims.x) * size_t(grid.dims.y) * size_t(grid.dims.z);
  if (grid.cells.size() != expect)
    throw std::invalid_argument("rf_build: cell count does not match dims");

  RFGrid rf;
  rf.dims = grid.dims;
  rf.threshold = threshold;

  // lattice scan order (x fastest) so voxel ordinals rise with the linear
  // lattice index -- the ordinal then doubles as the Morton tie-break
  for (int z = 0; z < grid.dims.z; z++)
    for (int y = 0; y < grid.dims.y; y++)
      for (int x = 0; x < grid.dims.x; x++)
      {
        const float4& c = grid.cells[size_t(x) + size_t(grid.dims.x) *
                                     (size_t(y) + size_t(grid.dims.y) * size_t(z))];
        if (c.x > threshold)
          rf.voxels.push_back(RFVoxel{uint3{uint32_t(x), uint32_t(y), uint32_t(z)},
                                      c.x, float3{c.y, c.z, c.w}});
      }
  if (rf.voxels.empty())
    throw std::invalid_argument("rf_build: empty field (no voxel above threshold)");

  std::vector<AABB> boxes(rf.voxels.size());
  for (size_t i = 0; i < rf.voxels.size(); i++)
  {
    const uint3 p = rf.voxels[i].pos;
    AABB b;
    b.boxMin = float3{float(p.x), float(p.y), float(p.z)};
    b.boxMax = b.boxMin + float3{1, 1, 1};
    boxes[i] = b;
  }

  AABB domain;
  domain.boxMin = float3{0, 0, 0};
  domain.boxMax = float3{float(grid.dims.x), float(grid.dims.y), float(grid.dims.z)};

  // 64-bit keys (morton << 32 | ordinal) keep every voxel in its own leaf
  const std::vector<MortonPair> sorted = bitonic_sort_pairs(compute_morton_codes(boxes, domain));
  std::vector<uint64_t> keys(sorted.size());
  std::vector<BVHNode> leaves(sorted.size());
  rf.bvh.primIndices.resize(sorted.size());
  for (size_t i = 0; i < sorted.size(); i++)
  {
    keys[i] = packed_key(sorted[i]);
    BVHNode leaf;
    leaf.bounds = boxes[sorted[i].index];
    leaf.firstPrim = uint32_t(i);
    leaf.primCount = 1;
    leaves[i] = leaf;
    rf.bvh.primIndices[i] = sorted[i].index;
  }
  LBVHTree tree = build_hierarchy_karras(keys, leaves);
  tree.primIndices = std::move(rf.bvh.primIndices);
  refit(tree, 64);  // 64-bit keys allow radix trees deeper than 32 levels
  rf.bvh = std::move(tree);
  return rf;
}

RFSample rf_render_ray(const RFGrid& rf, const Ray& ray)
{
  const float3 origin = to_float3(ray.posAndNear);
  const float3 dir    = to_float3(ray.dirAndFar);
  const float tNear = ray.posAndNear.w, tFar = ray.dirAndFar.w;
  const bool finite = std::isfinite(origin.x) && std::isfinite(origin.y) && std::isfinite(origin.z) &&
                      std::isfinite(dir.x) && std::isfinite(dir.y) && std::isfinite(dir.z);
  if (!finite || length(dir) == 0.0f || !(tNear >= 0.0f) || !(tNear < tFar))
    throw std::invalid_argument("rf_render_ray: invalid ray");

  const float3 invDir = safe_inverse(dir);

  struct Segment
  {
    float    t0, t1;
    uint32_t voxel;
  };
  std::vector<Segment> segments;

  // gather every leaf overlap; no early-out, compositing wants all of them
  uint32_t stack[64];
  int sp = 0;
  uint32_t cur = rf.bvh.root;
  const std::vector<BVHNode>& nodes = rf.bvh.nodes;
  while (true)
  {
    const BVHNode& node = nodes[cur];
    if (node.is_leaf())
    {
      for (uint32_t k = node.firstPrim; k < node.firstPrim + node.primCount; k++)
      {
        const uint32_t voxelId = rf.bvh.primIndices[k];
        const uint3 p = rf.voxels[voxelId].pos;
        const float3 bmin{float(p.x), float(p.y), float(p.z)};
        const float2 t = ray_box_interval(origin, invDir, bmin, bmin + float3{1, 1, 1},
                                          tNear, tFar);
        if (t.x <= t.y)
          segments.push_back(Segment{t.x, t.y, voxelId});
      }
      if (sp == 0)
        break;
      cur = stack[--sp];
      continue;
    }
    const bool hitL = ray_box_hit(origin, invDir, nodes[node.left].bounds, tNear, tFar);
    const bool hitR = ray_box_hit(origin, invDir, nodes[node.right].bounds, tNear, tFar);
    if (hitL && hitR)
    {
      if (sp >= 64)
        throw std::runtime_error("rf_render_ray: traversal stack overflow");
      stack[sp++] = node.right;
      cur = node.left;
    }
    else if (hitL)
      cur = node.left;
    else if (hitR)
      cur = node.right;
    else
    {
      if (sp == 0)
        break;
      cur = stack[--sp];
    }
  }

  std::sort(segments.begin(), segments.end(), [](const Segment& a, const Segment& b) {
    return std::tie(a.t0, a.voxel) < std::tie(b.t0, b.voxel);
  });

  const float dirLen = length(dir);
  RFSample out;
  out.color = float3{0, 0, 0};
  out.transmittance = 1.0f;
  for (const Segment& seg : segments)
  {
    const RFVoxel& v = rf.voxels[seg.voxel];
    const float len = (seg.t1 - seg.t0) * dirLen;
    const float att = std::exp(-v.density * len);
    out.color += out.transmittance * (1.0f - att) * v.color;
    out.transmittance *= att;
    if (out.transmittance < 1e-4f)
      break;
  }
  return out;
}

} // namespace crt
