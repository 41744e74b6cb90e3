#pragma once

#include "crossrt/geometry.h"
#include "crossrt/lbvh.h"
#include "crossrt/ray.h"

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

// Two-level scene: per-geometry BVHs (BLAS) under a BVH over instances
// (TLAS). Commit freezes the scene under one of the leaf-dispatch
// strategies; ray queries then run stack-based while-while traversal and
// hand BLAS leaves to the per-type intersectors through that strategy.
//
// Dispatch levels:
//   Zero  - monomorphic: exactly one geometry type in the scene, the leaf
//           path binds to that type's intersector at commit (no per-leaf
//           type switch). Mixed scenes are rejected.
//   One   - uniform layout: one fixed-size record per geometry (identical
//           record shape for every type) + a single shared payload blob in
//           geomId order; per-leaf switch over the record's typeTag.
//   Two   - type-sorted: payloads grouped into per-type contiguous regions,
//           addressed by (typeTag, typeLocalIndex); per-leaf switch.
//   Three - callable-shader dispatch; only meaningful on hardware ray
//           tracing pipelines, so commit rejects it with an error.

namespace crt
{

enum class DispatchLevel : uint32_t
{
  Zero  = 0,
  One   = 1,
  Two   = 2,
  Three = 3,
};

struct GeometryRecord
{
  GeomType typeTag        = GeomType::Triangles;
  uint32_t typeLocalIndex = 0;  // index inside the type's region
};

class Scene;

// Leaf intersector signature used by the level-zero monomorphic binding.
using MonoLeafFn = void (*)(const Scene&, const CRT_LeafInfo&, const float3& o,
                            const float3& d, float tNear, CRT_Hit& best);

struct InstanceRecord
{
  uint32_t geomId = 0;
  float4x4 worldFromObject;
  float4x4 objectFromWorld;  // cached inverse
};

// Level-one uniform record: identical fixed-size shape for every geometry;
// streams point into the scene's shared payload blob.
struct UniformGeomRecord
{
  uint32_t typeTag = 0;
  uint32_t streamOffset[3] = {0, 0, 0};  // byte offsets into the blob
  uint32_t streamCount[3]  = {0, 0, 0};  // element counts per stream
  uint32_t dims[3]         = {0, 0, 0};  // type-specific small ints
  float    scalarParam     = 0.0f;       // type-specific scalar
};

// Optional traversal instrumentation.
struct TraversalStats
{
  uint32_t tlasNodesVisited = 0;
  uint32_t blasNodesVisited = 0;
  uint32_t leavesIntersected = 0;
  uint32_t maxStackDepth = 0;
  std::vector<uint32_t>* blasVisitLog = nullptr;  // BLAS node ids, if set
};

// Read-only payload views handed to the leaf intersectors. Levels zero/two
// derive them from the typed regions, level one from the shared blob; the
// bytes are identical either way.
struct TriView
{
  std::span<const float3>   vertices;
  std::span<const uint32_t> indices;
};
struct GridView
{
  int3 dims;
  std::span<const float> values;
};
struct OctView
{
  std::span<const SdfFrameOctreeNode> nodes;
  std::span<const OctSurfaceLeaf>     surfaceLeaves;
};
struct SvsView
{
  std::span<const SdfSVSNode> nodes;
};
struct SbsView
{
  uint32_t brickDim = 0;
  uint32_t lattice  = 0;
  std::span<const uint3> brickPos;
  std::span<const float> values;
};
struct RfView
{
  int3  dims;
  float threshold = 0.0f;
  std::span<const RFVoxel> voxels;
};

class Scene
{
public:
  // Staging; all return the new geometry's geomId. Payloads are validated
  // eagerly; adding after Commit throws.
  uint32_t AddGeometry(TriangleMesh mesh);
  uint32_t AddGeometry(SdfGrid grid);
  uint32_t AddGeometry(SdfFrameOctree oct);
  uint32_t AddGeometry(SdfSVS svs);
  uint32_t AddGeometry(SdfSBS sbs);
  uint32_t AddGeometry(RFGrid rf);
  uint32_t AddInstance(uint32_t geomId, const float4x4& worldFromObject);

  // Build BLAS per geometry, the per-type regions (and level-one blob), and
  // the TLAS over instance world bounds. Throws on an empty scene, on a
  // second commit, on level zero with mixed types, and on level three.
  void Commit(DispatchLevel level);

  bool          committed() const { return m_committed; }
  DispatchLevel dispatch_level() const { return m_level; }

  // Stack-based nearest-hit query; a miss returns t == tFar and kMissId ids.
  CRT_Hit RayQuery_NearestHit(const Ray& ray) const;
  CRT_Hit RayQuery_NearestHit(const Ray& ray, TraversalStats& stats) const;
  // Early-out occlusion query: true iff any hit exists in [tNear, tFar].
  bool RayQuery_AnyHit(const Ray& ray) const;

  // Leaf dispatch entry used by traversal; returns best either unchanged or
  // replaced by a nearer (or tie-winning) candidate from this leaf.
  CRT_Hit IntersectLeaf(const CRT_LeafInfo& info, const Ray& objectRay,
                        const CRT_Hit& best) const;

  // introspection
  size_t geometry_count() const { return m_geomTable.empty() ? m_staging.size() : m_geomTable.size(); }
  size_t instance_count() const { return m_instances.size(); }
  GeometryRecord geometry_record(uint32_t geomId) const;
  GeomType geometry_type(uint32_t geomId) const;
  const InstanceRecord& instance(uint32_t instId) const;
  const LBVHTree& blas(uint32_t geomId) const;
  const LBVHTree& tlas() const;
  AABB geometry_bounds(uint32_t geomId) const;  // object space
  AABB instance_bounds(uint32_t instId) const;  // world space

  // Object-space shading normal for a hit (triangles: geometric normal;
  // SDF: decoded from the hit's octahedral coords).
  float3 shading_normal(const CRT_Hit& hit) const;

private:
  using StagedPayload =
      std::variant<TriangleMesh, SdfGrid, SdfFrameOctree, SdfSVS, SdfSBS, RFGrid>;

  void ensure_open(const char* what) const;
  void build_blas();
  void build_regions();
  void build_uniform_blob();
  void build_tlas();

  TriView  tri_view(uint32_t geomId) const;
  GridView grid_view(uint32_t geomId) const;
  OctView  oct_view(uint32_t geomId) const;
  SvsView  svs_view(uint32_t geomId) const;
  SbsView  sbs_view(uint32_t geomId) const;
  RfView   rf_view(uint32_t geomId) const;

  void leaf_dispatch_typed(GeomType type, const CRT_LeafInfo& info, const float3& o,
                           const float3& d, float tNear, CRT_Hit& best) const;

  template <bool kAnyHit>
  CRT_Hit trace_impl(const Ray& ray, TraversalStats* stats, bool* anyFound) const;

  // staging
  std::vector<StagedPayload> m_staging;
  std::vector<InstanceRecord> m_instances;

  // committed state
  bool          m_committed = false;
  DispatchLevel m_level     = DispatchLevel::Two;
  std::vector<GeometryRecord> m_geomTable;   // geomId -> (typeTag, typeLocalIndex)
  std::vector<LBVHTree>       m_blas;        // per geomId
  std::vector<AABB>           m_geomBounds;  // object-space bounds per geomId
  LBVHTree                    m_tlas;

  // per-type regions (tag enumeration order; geomId order within a region)
  std::vector<TriangleMesh>   m_triRegion;
  std::vector<SdfGrid>        m_gridRegion;
  std::vector<SdfFrameOctree> m_octRegion;
  std::vector<SdfSVS>         m_svsRegion;
  std::vector<SdfSBS>         m_sbsRegion;
  std::vector<RFGrid>         m_rfRegion;
  std::vector<std::vector<OctSurfaceLeaf>> m_octLeaves;  // parallel to m_octRegion

  // level one: uniform records over one shared blob
  std::vector<UniformGeomRecord> m_uniform;
  std::vector<std::byte>         m_blob;

  // level zero: intersector bound at commit, no per-leaf type inspection
  GeomType   m_monoType = GeomType::Triangles;
  MonoLeafFn m_monoFn   = nullptr;

  friend struct SceneTraversal;
};

} // namespace crt
