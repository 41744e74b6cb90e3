#pragma once

#include "crossrt/image.h"
#include "crossrt/lbvh.h"
#include "crossrt/parallel.h"
#include "crossrt/rf_grid.h"
#include "crossrt/rng.h"
#include "crossrt/scene.h"
#include "crossrt/sdf.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

// Shared generators and sequential oracles. Every check_* helper returns an
// empty string on success and a description of the first violation otherwise,
// so both the doctest suite and the acceptance binary can consume them.

namespace crt
{
inline bool operator==(const int3& a, const int3& b)
{
  return a.x == b.x && a.y == b.y && a.z == b.z;
}
} // namespace crt

namespace tu
{

using namespace crt;

// ---- exec-mode scope guard ----------------------------------------------

struct ExecGuard
{
  ExecMode saved;
  explicit ExecGuard(ExecMode m) : saved(exec_mode()) { set_exec_mode(m); }
  ~ExecGuard() { set_exec_mode(saved); }
};

// ---- deterministic data -------------------------------------------------

inline float urand(uint64_t seed, uint64_t item, uint32_t dim)
{
  return rng_float(rng_base(seed, uint32_t(item & 0xFFFFFFFFu), uint32_t(item >> 32)), dim);
}

inline std::vector<AABB> random_boxes(size_t n, uint64_t seed, float halfExtent = 0.01f)
{
  std::vector<AABB> boxes(n);
  for (size_t i = 0; i < n; i++)
  {
    const float3 c{urand(seed, i, 0), urand(seed, i, 1), urand(seed, i, 2)};
    const float3 h{halfExtent * (0.2f + urand(seed, i, 3)),
                   halfExtent * (0.2f + urand(seed, i, 4)),
                   halfExtent * (0.2f + urand(seed, i, 5))};
    boxes[i].include(c - h);
    boxes[i].include(c + h);
  }
  return boxes;
}

inline TriangleMesh random_soup(size_t nTris, uint64_t seed, float size = 0.08f)
{
  TriangleMesh mesh;
  mesh.vertices.reserve(3 * nTris);
  mesh.indices.reserve(3 * nTris);
  for (size_t i = 0; i < nTris; i++)
  {
    const float3 c{urand(seed, i, 0), urand(seed, i, 1), urand(seed, i, 2)};
    for (int k = 0; k < 3; k++)
    {
      const float3 off{size * (urand(seed, i, 3 + 3 * k) - 0.5f),
                       size * (urand(seed, i, 4 + 3 * k) - 0.5f),
                       size * (urand(seed, i, 5 + 3 * k) - 0.5f)};
      mesh.vertices.push_back(c + off);
      mesh.indices.push_back(uint32_t(mesh.vertices.size() - 1));
    }
  }
  return mesh;
}

// UV-sphere triangulation; poles are degenerate-free fans.
inline TriangleMesh make_sphere_mesh(int stacks, int slices, const float3& c, float r)
{
  TriangleMesh mesh;
  for (int i = 0; i <= stacks; i++)
  {
    const float v = float(i) / float(stacks);
    const float phi = v * float(M_PI);
    for (int j = 0; j <= slices; j++)
    {
      const float u = float(j) / float(slices);
      const float theta = u * 2.0f * float(M_PI);
      mesh.vertices.push_back(c + float3{r * std::sin(phi) * std::cos(theta),
                                         r * std::cos(phi),
                                         r * std::sin(phi) * std::sin(theta)});
    }
  }
  const auto vid = [&](int i, int j) { return uint32_t(i * (slices + 1) + j); };
  for (int i = 0; i < stacks; i++)
    for (int j = 0; j < slices; j++)
    {
      if (i != 0)
        mesh.indices.insert(mesh.indices.end(), {vid(i, j), vid(i + 1, j), vid(i, j + 1)});
      if (i != stacks - 1)
        mesh.indices.insert(mesh.indices.end(), {vid(i, j + 1), vid(i + 1, j), vid(i + 1, j + 1)});
    }
  return mesh;
}

// Axis-aligned box as 12 triangles.
inline TriangleMesh make_box_mesh(const float3& mn, const float3& mx)
{
  TriangleMesh mesh;
  const float3 v[8] = {
      {mn.x, mn.y, mn.z}, {mx.x, mn.y, mn.z}, {mx.x, mx.y, mn.z}, {mn.x, mx.y, mn.z},
      {mn.x, mn.y, mx.z}, {mx.x, mn.y, mx.z}, {mx.x, mx.y, mx.z}, {mn.x, mx.y, mx.z}};
  mesh.vertices.assign(v, v + 8);
  const uint32_t f[36] = {0, 1, 2, 0, 2, 3,  4, 6, 5, 4, 7, 6,  0, 4, 5, 0, 5, 1,
                          3, 2, 6, 3, 6, 7,  0, 3, 7, 0, 7, 4,  1, 5, 6, 1, 6, 2};
  mesh.indices.assign(f, f + 36);
  return mesh;
}

// ---- Morton / LBVH oracles ----------------------------------------------

inline uint32_t ref_morton3d(uint32_t x, uint32_t y, uint32_t z)
{
  uint32_t code = 0;
  for (int b = 0; b < 10; b++)
  {
    code |= ((x >> b) & 1u) << (3 * b + 0);
    code |= ((y >> b) & 1u) << (3 * b + 1);
    code |= ((z >> b) & 1u) << (3 * b + 2);
  }
  return code;
}

// Structural invariants: canonical layout, child links, primitive bijection.
inline std::string check_tree_invariants(const LBVHTree& tree, size_t primCount)
{
  std::ostringstream err;
  const size_t nodeCount = tree.nodes.size();
  const uint32_t L = tree.leaf_count();
  if (nodeCount != 2 * size_t(L) - 1)
    return "node count is not 2L-1";
  if (tree.root != 0)
    return "root is not node 0";
  if (tree.primIndices.size() != primCount)
    return "primIndices size mismatch";

  const uint32_t leafOffset = L - 1;
  std::vector<uint32_t> parents(nodeCount, 0);
  for (uint32_t i = 0; i < leafOffset; i++)
  {
    const BVHNode& n = tree.nodes[i];
    if (n.is_leaf())
      return "internal range contains a leaf";
    if (n.left >= nodeCount || n.right >= nodeCount)
      return "child index out of range";
    parents[n.left]++;
    parents[n.right]++;
  }
  for (uint32_t i = leafOffset; i < nodeCount; i++)
    if (!tree.nodes[i].is_leaf())
      return "leaf range contains an internal node";
  for (uint32_t i = 0; i < nodeCount; i++)
  {
    const uint32_t expect = (i == tree.root) ? 0u : 1u;
    if (parents[i] != expect)
    {
      err << "node " << i << " has " << parents[i] << " parents";
      return err.str();
    }
  }

  // leaf ranges partition [0, primCount); primIndices is a permutation
  std::vector<uint8_t> seenSlot(primCount, 0), seenPrim(primCount, 0);
  for (uint32_t i = leafOffset; i < nodeCount; i++)
  {
    const BVHNode& n = tree.nodes[i];
    if (n.primCount == 0)
      return "empty leaf";
    for (uint32_t k = n.firstPrim; k < n.firstPrim + n.primCount; k++)
    {
      if (k >= primCount || seenSlot[k])
        return "leaf ranges overlap or overflow";
      seenSlot[k] = 1;
    }
  }
  for (uint32_t p : tree.primIndices)
  {
    if (p >= primCount || seenPrim[p])
      return "primIndices is not a permutation";
    seenPrim[p] = 1;
  }
  return {};
}

// Bounds oracle: recomputes every internal box by recursion and demands
// exact equality with the refit result.
inline std::string check_refit_oracle(const LBVHTree& tree)
{
  std::string fail;
  const auto rec = [&](auto&& self, uint32_t idx) -> AABB {
    const BVHNode& n = tree.nodes[idx];
    if (n.is_leaf())
      return n.bounds;
    const AABB expect = merge(self(self, n.left), self(self, n.right));
    if (!(expect == n.bounds) && fail.empty())
      fail = "internal node bounds differ from the recursive merge";
    return expect;
  };
  if (!tree.nodes.empty())
    rec(rec, tree.root);
  return fail;
}

// Topology oracle: recursive prefix split over the sorted unique keys. The
// split index inside [lo, hi] is found by a linear scan, independently of
// the builder's binary searches; node indices follow the radix-tree rule
// (internal node k covers the range whose split sits at k / k+1).
template <typename K>
inline std::string check_topology_oracle(const LBVHTree& tree, const std::vector<K>& keys)
{
  const int64_t L = int64_t(keys.size());
  if (L == 0)
    return tree.nodes.empty() ? std::string{} : "nodes for an empty key set";
  if (L == 1)
    return (tree.nodes.size() == 1) ? std::string{} : "single key must give a single node";
  const int64_t leafOffset = L - 1;
  constexpr int kBits = int(sizeof(K) * 8);

  const auto clz = [&](K x) { return (x == 0) ? kBits : std::countl_zero(x); };

  std::string fail;
  const auto rec = [&](auto&& self, int64_t nodeIdx, int64_t lo, int64_t hi) -> void {
    if (!fail.empty())
      return;
    const BVHNode& node = tree.nodes[nodeIdx];
    const int deltaNode = clz(keys[lo] ^ keys[hi]);
    int64_t split = lo;
    for (int64_t k = lo; k < hi; k++)
      if (clz(keys[lo] ^ keys[k]) > deltaNode)
        split = k;

    const int64_t expectL = (split == lo) ? leafOffset + split : split;
    const int64_t expectR = (split + 1 == hi) ? leafOffset + split + 1 : split + 1;
    if (int64_t(node.left) != expectL || int64_t(node.right) != expectR)
    {
      std::ostringstream err;
      err << "node " << nodeIdx << " links (" << node.left << "," << node.right
          << ") expected (" << expectL << "," << expectR << ")";
      fail = err.str();
      return;
    }
    if (split > lo)
      self(self, split, lo, split);
    if (split + 1 < hi)
      self(self, split + 1, split + 1, hi);
  };
  rec(rec, 0, 0, L - 1);
  return fail;
}

// ---- brute-force mesh traversal oracle ----------------------------------

struct RefInstance
{
  const TriangleMesh* mesh = nullptr;
  float4x4 worldFromObject;
  float4x4 objectFromWorld;
  uint32_t geomId = 0;
};

// Exhaustive nearest hit with the same per-triangle arithmetic and the same
// tie-break as the library, so agreement is exact.
inline CRT_Hit brute_force_hit(const std::vector<RefInstance>& instances, const Ray& ray)
{
  const float3 ow = to_float3(ray.posAndNear);
  const float3 dw = to_float3(ray.dirAndFar);
  const float tNear = ray.posAndNear.w;
  CRT_Hit best = make_miss(ray.dirAndFar.w);

  for (uint32_t instId = 0; instId < instances.size(); instId++)
  {
    const RefInstance& inst = instances[instId];
    const float3 o = mul_point(inst.objectFromWorld, ow);
    const float3 d = mul_dir(inst.objectFromWorld, dw);
    const TriangleMesh& mesh = *inst.mesh;
    for (uint32_t tri = 0; tri < mesh.triangle_count(); tri++)
    {
      const float3& v0 = mesh.vertices[mesh.indices[3 * tri + 0]];
      const float3& v1 = mesh.vertices[mesh.indices[3 * tri + 1]];
      const float3& v2 = mesh.vertices[mesh.indices[3 * tri + 2]];
      const float3 e1 = v1 - v0, e2 = v2 - v0;
      const float3 pv = cross(d, e2);
      const float det = dot(e1, pv);
      if (det == 0.0f)
        continue;
      const float inv = 1.0f / det;
      const float3 tv = o - v0;
      const float u = dot(tv, pv) * inv;
      if (u < 0.0f || u > 1.0f)
        continue;
      const float3 qv = cross(tv, e1);
      const float v = dot(d, qv) * inv;
      if (v < 0.0f || u + v > 1.0f)
        continue;
      const float t = dot(e2, qv) * inv;
      if (t < tNear)
        continue;
      if (hit_improves(t, instId, inst.geomId, tri, best))
      {
        best.t = t;
        best.primId = tri;
        best.geomId = inst.geomId;
        best.instId = instId;
        best.coords[0] = u;
        best.coords[1] = v;
      }
    }
  }
  return best;
}

inline bool same_hit(const CRT_Hit& a, const CRT_Hit& b)
{
  return std::memcmp(&a, &b, sizeof(CRT_Hit)) == 0;
}

inline bool same_image(const Image& a, const Image& b)
{
  return a.width == b.width && a.height == b.height &&
         std::memcmp(a.pixels.data(), b.pixels.data(), a.pixels.size() * sizeof(float3)) == 0;
}

// ---- SDF helpers ---------------------------------------------------------

inline SdfGrid sphere_grid(int n, const float3& c, float r)
{
  SdfGrid grid;
  grid.dims = int3{n, n, n};
  grid.values.resize(size_t(n) * n * n);
  for (int z = 0; z < n; z++)
    for (int y = 0; y < n; y++)
      for (int x = 0; x < n; x++)
      {
        const float3 p{float(x) / float(n - 1), float(y) / float(n - 1), float(z) / float(n - 1)};
        grid.values[size_t(x) + size_t(n) * (size_t(y) + size_t(n) * size_t(z))] =
            length(p - c) - r;
      }
  return grid;
}

// Analytic sphere intersection; returns (t0, t1) with t0 > t1 on a miss.
inline float2 ray_sphere(const float3& o, const float3& d, const float3& c, float r)
{
  const float3 oc = o - c;
  const float a = dot(d, d);
  const float b = 2.0f * dot(oc, d);
  const float cc = dot(oc, oc) - r * r;
  const float disc = b * b - 4.0f * a * cc;
  if (disc < 0.0f)
    return float2{1.0f, 0.0f};
  const float sq = std::sqrt(disc);
  return float2{(-b - sq) / (2.0f * a), (-b + sq) / (2.0f * a)};
}

// ---- radiance-field oracle ----------------------------------------------

inline RFGridData random_rf(const int3& dims, uint64_t seed, float threshold)
{
  RFGridData data;
  data.dims = dims;
  data.threshold = threshold;
  data.cells.resize(size_t(dims.x) * dims.y * dims.z);
  for (size_t i = 0; i < data.cells.size(); i++)
    data.cells[i] = float4{2.0f * urand(seed, i, 0) - 0.5f,  // density, some below threshold
                           urand(seed, i, 1), urand(seed, i, 2), urand(seed, i, 3)};
  return data;
}

// Brute-force gather (every voxel, no BVH) + the same sort key and the same
// compositing arithmetic; must match rf_render_ray bit-exactly.
inline RFSample rf_oracle_sample(const RFGrid& rf, const Ray& ray)
{
  const float3 origin = to_float3(ray.posAndNear);
  const float3 dir = to_float3(ray.dirAndFar);
  const float tNear = ray.posAndNear.w, tFar = ray.dirAndFar.w;
  const float3 invDir = safe_inverse(dir);

  struct Segment
  {
    float t0, t1;
    uint32_t voxel;
  };
  std::vector<Segment> segments;
  for (uint32_t i = 0; i < rf.voxels.size(); i++)
  {
    const uint3 p = rf.voxels[i].pos;
    const float3 bmin{float(p.x), float(p.y), float(p.z)};
    const float2 t = ray_box_interval(origin, invDir, bmin, bmin + float3{1, 1, 1}, tNear, tFar);
    if (t.x <= t.y)
      segments.push_back(Segment{t.x, t.y, i});
  }
  std::sort(segments.begin(), segments.end(), [](const Segment& a, const Segment& b) {
    return std::tie(a.t0, a.voxel) < std::tie(b.t0, b.voxel);
  });

  const float dirLen = length(dir);
  RFSample out;
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

// ---- filesystem ----------------------------------------------------------

inline std::string temp_path(const std::string& name)
{
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "crossrt_tests";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

inline std::string read_file_bytes(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file_bytes(const std::string& path, const std::string& bytes)
{
  std::ofstream out(path, std::ios::binary);
  out.write(bytes.data(), std::streamsize(bytes.size()));
}

} // namespace tu
