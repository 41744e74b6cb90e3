#include "crossrt/scene.h"

#include "scene_detail.h"

#include <cmath>
#include <stdexcept>

namespace crt
{

static constexpr int kMaxStack = 64;

// ---- per-type leaf intersectors -----------------------------------------
// All dispatch levels funnel into these; every candidate runs through
// hit_improves so the result is independent of visit order.

static void isect_triangles(const TriView& g, const LBVHTree& blas, const CRT_LeafInfo& info,
                            const float3& o, const float3& d, float tNear, CRT_Hit& best)
{
  const BVHNode& leaf = blas.nodes[info.aabbId];
  for (uint32_t k = leaf.firstPrim; k < leaf.firstPrim + leaf.primCount; k++)
  {
    const uint32_t tri = blas.primIndices[k];
    const float3& v0 = g.vertices[g.indices[3 * tri + 0]];
    const float3& v1 = g.vertices[g.indices[3 * tri + 1]];
    const float3& v2 = g.vertices[g.indices[3 * tri + 2]];

    // double-sided Moeller-Trumbore with inclusive edges; shared-edge double
    // hits land on the same t and resolve through the id tie-break
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
    if (hit_improves(t, info.instId, info.geomId, tri, best))
    {
      best.t = t;
      best.primId = tri;
      best.geomId = info.geomId;
      best.instId = info.instId;
      best.coords[0] = u;
      best.coords[1] = v;
    }
  }
}

// Shared cell-root helper: entry point mapped into the cell, Newton on the
// cubic, candidate emitted with the analytic trilinear-gradient normal.
static bool cell_newton_candidate(const float corners[8], const float3& cellMin,
                                  const float3& cellSize, const float3& o, const float3& d,
                                  float tEntry, float tExit, const CRT_LeafInfo& info,
                                  uint32_t primId, CRT_Hit& best)
{
  float mn = corners[0], mx = corners[0];
  for (int i = 1; i < 8; i++)
  {
    mn = std::min(mn, corners[i]);
    mx = std::max(mx, corners[i]);
  }
  if (mn > 0.0f || mx < 0.0f)  // multilinear extrema sit on corners: no root inside
    return false;

  const float3 entry = o + d * tEntry;
  const float3 lo = (entry - cellMin) / cellSize;
  const float3 ld = d / cellSize;
  double s = 0.0;
  if (!newton_intersect_cell(corners, lo, ld, tExit - tEntry, s))
    return false;

  const float t = float(double(tEntry) + s);
  if (hit_improves(t, info.instId, info.geomId, primId, best))
  {
    const float3 atRoot = lo + ld * float(s);
    const float3 g = trilinear_gradient(corners, atRoot);
    const float2 enc = encode_normal(normalize(g / cellSize));
    best.t = t;
    best.primId = primId;
    best.geomId = info.geomId;
    best.instId = info.instId;
    best.coords[0] = enc.x;
    best.coords[1] = enc.y;
  }
  return true;  // a root this close ends the front-to-back walk either way
}

static void isect_sdf_grid(const GridView& g, const CRT_LeafInfo& info, const float3& o,
                           const float3& d, float tNear, CRT_Hit& best)
{
  const int3 cells{g.dims.x - 1, g.dims.y - 1, g.dims.z - 1};
  const float3 cellSize{1.0f / float(cells.x), 1.0f / float(cells.y), 1.0f / float(cells.z)};
  const float3 invD = safe_inverse(d);
  const float2 iv = ray_box_interval(o, invD, float3{0, 0, 0}, float3{1, 1, 1}, tNear, best.t);
  if (iv.x > iv.y)
    return;

  dda_walk(o, d, float3{0, 0, 0}, cellSize, cells, iv.x, iv.y,
           [&](const int3& ic, float t0, float t1) {
             float corners[8];
             for (int i = 0; i < 8; i++)
             {
               const int3 off = corner_offset(i);
               corners[i] = g.values[size_t(ic.x + off.x) +
                                     size_t(g.dims.x) * (size_t(ic.y + off.y) +
                                                         size_t(g.dims.y) * size_t(ic.z + off.z))];
             }
             const float3 cellMin{ic.x * cellSize.x, ic.y * cellSize.y, ic.z * cellSize.z};
             const uint32_t primId =
                 uint32_t(ic.x + cells.x * (ic.y + cells.y * ic.z));
             return cell_newton_candidate(corners, cellMin, cellSize, o, d, t0, t1, info,
                                          primId, best);
           });
}

static void isect_octree(const OctView& g, const LBVHTree& blas, const CRT_LeafInfo& info,
                         const float3& o, const float3& d, float tNear, CRT_Hit& best)
{
  const BVHNode& leaf = blas.nodes[info.aabbId];
  const float3 invD = safe_inverse(d);
  for (uint32_t k = leaf.firstPrim; k < leaf.firstPrim + leaf.primCount; k++)
  {
    const uint32_t cellId = blas.primIndices[k];
    const OctSurfaceLeaf& ref = g.surfaceLeaves[cellId];
    const float3 size{ref.cellSize, ref.cellSize, ref.cellSize};
    const float2 iv = ray_box_interval(o, invD, ref.cellMin, ref.cellMin + size, tNear, best.t);
    if (iv.x > iv.y)
      continue;
    cell_newton_candidate(g.nodes[ref.nodeIndex].values, ref.cellMin, size, o, d, iv.x, iv.y,
                          info, cellId, best);
  }
}

static void isect_svs(const SvsView& g, const LBVHTree& blas, const CRT_LeafInfo& info,
                      const float3& o, const float3& d, float tNear, CRT_Hit& best)
{
  const BVHNode& leaf = blas.nodes[info.aabbId];
  const float3 invD = safe_inverse(d);
  for (uint32_t k = leaf.firstPrim; k < leaf.firstPrim + leaf.primCount; k++)
  {
    const uint32_t voxelId = blas.primIndices[k];
    const SdfSVSNode& n = g.nodes[voxelId];
    const float h = 1.0f / float(n.voxelSize);
    const float3 bmin{n.posX * h, n.posY * h, n.posZ * h};
    const float3 size{h, h, h};
    const float2 iv = ray_box_interval(o, invD, bmin, bmin + size, tNear, best.t);
    if (iv.x > iv.y)
      continue;
    float corners[8];
    for (int i = 0; i < 8; i++)
      corners[i] = svs_dequantize(n.values[i], h);
    cell_newton_candidate(corners, bmin, size, o, d, iv.x, iv.y, info, voxelId, best);
  }
}

static void isect_sbs(const SbsView& g, const LBVHTree& blas, const CRT_LeafInfo& info,
                      const float3& o, const float3& d, float tNear, CRT_Hit& best)
{
  const BVHNode& leaf = blas.nodes[info.aabbId];
  const float3 invD = safe_inverse(d);
  const float h = 1.0f / float(g.lattice);
  const float brickExt = float(g.brickDim) / float(g.lattice);
  const uint32_t stride1 = g.brickDim + 1;
  const size_t brickStride = size_t(stride1) * stride1 * stride1;

  for (uint32_t k = leaf.firstPrim; k < leaf.firstPrim + leaf.primCount; k++)
  {
    const uint32_t brick = blas.primIndices[k];
    const uint3& bp = g.brickPos[brick];
    const float3 bmin{bp.x * brickExt, bp.y * brickExt, bp.z * brickExt};
    const float2 iv = ray_box_interval(o, invD, bmin,
                                       bmin + float3{brickExt, brickExt, brickExt}, tNear, best.t);
    if (iv.x > iv.y)
      continue;

    const float* vals = g.values.data() + size_t(brick) * brickStride;
    dda_walk(o, d, bmin, float3{h, h, h},
             int3{int(g.brickDim), int(g.brickDim), int(g.brickDim)}, iv.x, iv.y,
             [&](const int3& ic, float t0, float t1) {
               float corners[8];
               for (int i = 0; i < 8; i++)
               {
                 const int3 off = corner_offset(i);
                 corners[i] = vals[size_t(ic.x + off.x) +
                                   size_t(stride1) * (size_t(ic.y + off.y) +
                                                      size_t(stride1) * size_t(ic.z + off.z))];
               }
               const float3 cellMin = bmin + float3{ic.x * h, ic.y * h, ic.z * h};
               return cell_newton_candidate(corners, cellMin, float3{h, h, h}, o, d, t0, t1,
                                            info, brick, best);
             });
  }
}

static void isect_rf(const RfView& g, const LBVHTree& blas, const CRT_LeafInfo& info,
                     const float3& o, const float3& d, float tNear, CRT_Hit& best)
{
  const BVHNode& leaf = blas.nodes[info.aabbId];
  const float3 invD = safe_inverse(d);
  for (uint32_t k = leaf.firstPrim; k < leaf.firstPrim + leaf.primCount; k++)
  {
    const uint32_t voxelId = blas.primIndices[k];
    const uint3 p = g.voxels[voxelId].pos;
    const float3 bmin{float(p.x), float(p.y), float(p.z)};
    const float2 iv = ray_box_interval(o, invD, bmin, bmin + float3{1, 1, 1}, tNear, best.t);
    if (iv.x > iv.y)
      continue;
    // ray-query semantics for a radiance voxel: report the box entry point
    if (hit_improves(iv.x, info.instId, info.geomId, voxelId, best))
    {
      best.t = iv.x;
      best.primId = voxelId;
      best.geomId = info.geomId;
      best.instId = info.instId;
      best.coords[0] = 0.0f;
      best.coords[1] = 0.0f;
    }
  }
}

// ---- dispatch -----------------------------------------------------------

void Scene::leaf_dispatch_typed(GeomType type, const CRT_LeafInfo& info, const float3& o,
                                const float3& d, float tNear, CRT_Hit& best) const
{
  switch (type)
  {
    case GeomType::Triangles:
      isect_triangles(tri_view(info.geomId), m_blas[info.geomId], info, o, d, tNear, best);
      break;
    case GeomType::SdfGrid:
      isect_sdf_grid(grid_view(info.geomId), info, o, d, tNear, best);
      break;
    case GeomType::SdfFrameOctree:
      isect_octree(oct_view(info.geomId), m_blas[info.geomId], info, o, d, tNear, best);
      break;
    case GeomType::SdfSVS:
      isect_svs(svs_view(info.geomId), m_blas[info.geomId], info, o, d, tNear, best);
      break;
    case GeomType::SdfSBS:
      isect_sbs(sbs_view(info.geomId), m_blas[info.geomId], info, o, d, tNear, best);
      break;
    case GeomType::RFGrid:
      isect_rf(rf_view(info.geomId), m_blas[info.geomId], info, o, d, tNear, best);
      break;
  }
}

// level-zero bindings: one direct function per type, chosen once at commit
MonoLeafFn SceneTraversal::mono_fn(GeomType type)
{
  switch (type)
  {
    case GeomType::Triangles:      return &mono_leaf<GeomType::Triangles>;
    case GeomType::SdfGrid:        return &mono_leaf<GeomType::SdfGrid>;
    case GeomType::SdfFrameOctree: return &mono_leaf<GeomType::SdfFrameOctree>;
    case GeomType::SdfSVS:         return &mono_leaf<GeomType::SdfSVS>;
    case GeomType::SdfSBS:         return &mono_leaf<GeomType::SdfSBS>;
    case GeomType::RFGrid:         return &mono_leaf<GeomType::RFGrid>;
  }
  return nullptr;
}

CRT_Hit Scene::IntersectLeaf(const CRT_LeafInfo& info, const Ray& objectRay,
                             const CRT_Hit& bestIn) const
{
  CRT_Hit best = bestIn;
  const float3 o = to_float3(objectRay.posAndNear);
  const float3 d = to_float3(objectRay.dirAndFar);
  const float tNear = objectRay.posAndNear.w;

  switch (m_level)
  {
    case DispatchLevel::Zero:
      m_monoFn(*this, info, o, d, tNear, best);
      break;
    case DispatchLevel::One:
      // one indirection through the uniform record, then the type switch
      leaf_dispatch_typed(GeomType(m_uniform[info.geomId].typeTag), info, o, d, tNear, best);
      break;
    case DispatchLevel::Two:
      leaf_dispatch_typed(m_geomTable[info.geomId].typeTag, info, o, d, tNear, best);
      break;
    case DispatchLevel::Three:
      break;  // unreachable: Commit rejects it
  }
  return best;
}

// ---- two-level while-while walk -----------------------------------------

template <bool kAnyHit>
CRT_Hit Scene::trace_impl(const Ray& ray, TraversalStats* stats, bool* anyFound) const
{
  if (!m_committed)
    throw std::runtime_error("RayQuery: scene not committed");

  const float3 o = to_float3(ray.posAndNear);
  const float3 d = to_float3(ray.dirAndFar);
  const float tNear = ray.posAndNear.w;
  const float tFar  = ray.dirAndFar.w;
  const bool finite = std::isfinite(o.x) && std::isfinite(o.y) && std::isfinite(o.z) &&
                      std::isfinite(d.x) && std::isfinite(d.y) && std::isfinite(d.z);
  if (!finite || length(d) == 0.0f || !(tNear >= 0.0f) || !(tNear < tFar))
    throw std::invalid_argument("RayQuery: invalid ray (zero direction or bad [tNear,tFar])");

  CRT_Hit best = make_miss(tFar);
  if (anyFound)
    *anyFound = false;

  const float3 invW = safe_inverse(d);

  const auto note_stack = [&](int depth) {
    if (stats && uint32_t(depth) > stats->maxStackDepth)
      stats->maxStackDepth = uint32_t(depth);
  };

  // inner walk over one instance's BLAS; returns true to stop everything
  const auto blas_walk = [&](uint32_t instId) -> bool {
    const InstanceRecord& inst = m_instances[instId];
    const float3 oO = mul_point(inst.objectFromWorld, o);
    const float3 dO = mul_dir(inst.objectFromWorld, d);  // unnormalized keeps t world-valued
    const float3 invO = safe_inverse(dO);
    const LBVHTree& tree = m_blas[inst.geomId];
    const Ray objectRay = make_ray(oO, dO, tNear, tFar);

    uint32_t stack[kMaxStack];
    int sp = 0;
    uint32_t cur = tree.root;
    while (true)
    {
      const BVHNode& node = tree.nodes[cur];
      if (stats)
      {
        stats->blasNodesVisited++;
        if (stats->blasVisitLog)
          stats->blasVisitLog->push_back(cur);
      }
      if (node.is_leaf())
      {
        if (stats)
          stats->leavesIntersected++;
        const CRT_LeafInfo li{inst.geomId, instId, cur};
        best = IntersectLeaf(li, objectRay, best);
        if (kAnyHit && !best.is_miss())
          return true;
        if (sp == 0)
          break;
        cur = stack[--sp];
        continue;
      }
      // the active interval shrinks to the best hit; closed compare keeps
      // equal-t candidates reachable for the tie-break
      const float2 tl = ray_box_interval(oO, invO, tree.nodes[node.left].bounds.boxMin,
                                         tree.nodes[node.left].bounds.boxMax, tNear, best.t);
      const float2 tr = ray_box_interval(oO, invO, tree.nodes[node.right].bounds.boxMin,
                                         tree.nodes[node.right].bounds.boxMax, tNear, best.t);
      const bool hitL = tl.x <= tl.y;
      const bool hitR = tr.x <= tr.y;
      if (hitL && hitR)
      {
        if (sp >= kMaxStack)
          throw std::runtime_error("RayQuery: traversal stack overflow (malformed tree)");
        const bool leftFirst = tl.x <= tr.x;
        stack[sp++] = leftFirst ? node.right : node.left;
        note_stack(sp);
        cur = leftFirst ? node.left : node.right;
      }
      else if (hitL || hitR)
        cur = hitL ? node.left : node.right;
      else
      {
        if (sp == 0)
          break;
        cur = stack[--sp];
      }
    }
    return false;
  };

  uint32_t stack[kMaxStack];
  int sp = 0;
  uint32_t cur = m_tlas.root;
  while (true)
  {
    const BVHNode& node = m_tlas.nodes[cur];
    if (stats)
      stats->tlasNodesVisited++;
    if (node.is_leaf())
    {
      bool stop = false;
      for (uint32_t k = node.firstPrim; k < node.firstPrim + node.primCount && !stop; k++)
        stop = blas_walk(m_tlas.primIndices[k]);
      if (stop)
        break;
      if (sp == 0)
        break;
      cur = stack[--sp];
      continue;
    }
    const float2 tl = ray_box_interval(o, invW, m_tlas.nodes[node.left].bounds.boxMin,
                                       m_tlas.nodes[node.left].bounds.boxMax, tNear, best.t);
    const float2 tr = ray_box_interval(o, invW, m_tlas.nodes[node.right].bounds.boxMin,
                                       m_tlas.nodes[node.right].bounds.boxMax, tNear, best.t);
    const bool hitL = tl.x <= tl.y;
    const bool hitR = tr.x <= tr.y;
    if (hitL && hitR)
    {
      if (sp >= kMaxStack)
        throw std::runtime_error("RayQuery: traversal stack overflow (malformed tree)");
      const bool leftFirst = tl.x <= tr.x;
      stack[sp++] = leftFirst ? node.right : node.left;
      note_stack(sp);
      cur = leftFirst ? node.left : node.right;
    }
    else if (hitL || hitR)
      cur = hitL ? node.left : node.right;
    else
    {
      if (sp == 0)
        break;
      cur = stack[--sp];
    }
  }

  if (anyFound)
    *anyFound = !best.is_miss();
  return best;
}

CRT_Hit Scene::RayQuery_NearestHit(const Ray& ray) const
{
  return trace_impl<false>(ray, nullptr, nullptr);
}

CRT_Hit Scene::RayQuery_NearestHit(const Ray& ray, TraversalStats& stats) const
{
  return trace_impl<false>(ray, &stats, nullptr);
}

bool Scene::RayQuery_AnyHit(const Ray& ray) const
{
  bool found = false;
  trace_impl<true>(ray, nullptr, &found);
  return found;
}

} // namespace crt
