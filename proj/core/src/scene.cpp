#include "crossrt/scene.h"

#include "scene_detail.h"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace crt
{

const char* geom_type_name(GeomType t)
{
  switch (t)
  {
    case GeomType::Triangles:      return "Triangles";
    case GeomType::SdfGrid:        return "SdfGrid";
    case GeomType::SdfFrameOctree: return "SdfFrameOctree";
    case GeomType::SdfSVS:         return "SdfSVS";
    case GeomType::SdfSBS:         return "SdfSBS";
    case GeomType::RFGrid:         return "RFGrid";
  }
  return "?";
}

// ---- staging ------------------------------------------------------------

void Scene::ensure_open(const char* what) const
{
  if (m_committed)
    throw std::runtime_error(std::string(what) + ": scene already committed");
}

static bool finite3(const float3& v)
{
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

uint32_t Scene::AddGeometry(TriangleMesh mesh)
{
  ensure_open("AddGeometry");
  if (mesh.vertices.empty() || mesh.indices.empty())
    throw std::invalid_argument("AddGeometry: empty triangle mesh");
  if (mesh.indices.size() % 3 != 0)
    throw std::invalid_argument("AddGeometry: index count is not a multiple of 3");
  for (uint32_t idx : mesh.indices)
    if (idx >= mesh.vertices.size())
      throw std::invalid_argument("AddGeometry: triangle index out of range");
  for (const float3& v : mesh.vertices)
    if (!finite3(v))
      throw std::invalid_argument("AddGeometry: non-finite vertex");
  m_staging.emplace_back(std::move(mesh));
  return uint32_t(m_staging.size() - 1);
}

uint32_t Scene::AddGeometry(SdfGrid grid)
{
  ensure_open("AddGeometry");
  if (grid.dims.x < 2 || grid.dims.y < 2 || grid.dims.z < 2)
    throw std::invalid_argument("AddGeometry: SDF grid needs at least 2 samples per axis");
  const size_t expect = size_t(grid.dims.x) * size_t(grid.dims.y) * size_t(grid.dims.z);
  if (grid.values.size() != expect)
    throw std::invalid_argument("AddGeometry: SDF grid value count does not match dims");
  m_staging.emplace_back(std::move(grid));
  return uint32_t(m_staging.size() - 1);
}

uint32_t Scene::AddGeometry(SdfFrameOctree oct)
{
  ensure_open("AddGeometry");
  if (oct.nodes.empty())
    throw std::invalid_argument("AddGeometry: empty octree");
  for (const SdfFrameOctreeNode& n : oct.nodes)
    if (n.firstChild != kNoChild && size_t(n.firstChild) + 8 > oct.nodes.size())
      throw std::invalid_argument("AddGeometry: octree child reference out of range");
  if (collect_surface_leaves(oct).empty())
    throw std::invalid_argument("AddGeometry: octree contains no surface cells");
  m_staging.emplace_back(std::move(oct));
  return uint32_t(m_staging.size() - 1);
}

uint32_t Scene::AddGeometry(SdfSVS svs)
{
  ensure_open("AddGeometry");
  if (svs.nodes.empty())
    throw std::invalid_argument("AddGeometry: empty sparse voxel set");
  for (const SdfSVSNode& n : svs.nodes)
  {
    if (n.voxelSize == 0 || (n.voxelSize & (n.voxelSize - 1)) != 0)
      throw std::invalid_argument("AddGeometry: SVS voxelSize must be a power of two");
    if (n.posX >= n.voxelSize || n.posY >= n.voxelSize || n.posZ >= n.voxelSize)
      throw std::invalid_argument("AddGeometry: SVS voxel position outside its lattice");
  }
  m_staging.emplace_back(std::move(svs));
  return uint32_t(m_staging.size() - 1);
}

uint32_t Scene::AddGeometry(SdfSBS sbs)
{
  ensure_open("AddGeometry");
  if (sbs.brickPos.empty())
    throw std::invalid_argument("AddGeometry: empty sparse brick set");
  if (sbs.brickDim < 1 || sbs.lattice < sbs.brickDim || sbs.lattice % sbs.brickDim != 0)
    throw std::invalid_argument("AddGeometry: SBS brickDim must divide the lattice");
  if (sbs.values.size() != sbs.brickPos.size() * size_t(sbs.brick_stride()))
    throw std::invalid_argument("AddGeometry: SBS value count does not match brick count");
  const uint32_t bricksPerSide = sbs.lattice / sbs.brickDim;
  for (const uint3& p : sbs.brickPos)
    if (p.x >= bricksPerSide || p.y >= bricksPerSide || p.z >= bricksPerSide)
      throw std::invalid_argument("AddGeometry: SBS brick position outside its lattice");
  m_staging.emplace_back(std::move(sbs));
  return uint32_t(m_staging.size() - 1);
}

uint32_t Scene::AddGeometry(RFGrid rf)
{
  ensure_open("AddGeometry");
  if (rf.voxels.empty() || rf.bvh.nodes.empty())
    throw std::invalid_argument("AddGeometry: RF payload is empty (use rf_build)");
  for (const RFVoxel& v : rf.voxels)
    if (int(v.pos.x) >= rf.dims.x || int(v.pos.y) >= rf.dims.y || int(v.pos.z) >= rf.dims.z)
      throw std::invalid_argument("AddGeometry: RF voxel outside the lattice");
  m_staging.emplace_back(std::move(rf));
  return uint32_t(m_staging.size() - 1);
}

uint32_t Scene::AddInstance(uint32_t geomId, const float4x4& worldFromObject)
{
  ensure_open("AddInstance");
  if (geomId >= m_staging.size())
    throw std::out_of_range("AddInstance: invalid geomId");
  InstanceRecord rec;
  rec.geomId = geomId;
  rec.worldFromObject = worldFromObject;
  rec.objectFromWorld = inverse4x4(worldFromObject);  // throws on singular transforms
  m_instances.push_back(rec);
  return uint32_t(m_instances.size() - 1);
}

// ---- commit -------------------------------------------------------------

void Scene::build_regions()
{
  m_geomTable.resize(m_staging.size());
  for (size_t g = 0; g < m_staging.size(); g++)
  {
    StagedPayload& p = m_staging[g];
    const GeomType type = GeomType(p.index());
    GeometryRecord rec;
    rec.typeTag = type;
    switch (type)
    {
      case GeomType::Triangles:
        rec.typeLocalIndex = uint32_t(m_triRegion.size());
        m_triRegion.push_back(std::move(std::get<TriangleMesh>(p)));
        break;
      case GeomType::SdfGrid:
        rec.typeLocalIndex = uint32_t(m_gridRegion.size());
        m_gridRegion.push_back(std::move(std::get<SdfGrid>(p)));
        break;
      case GeomType::SdfFrameOctree:
        rec.typeLocalIndex = uint32_t(m_octRegion.size());
        m_octRegion.push_back(std::move(std::get<SdfFrameOctree>(p)));
        break;
      case GeomType::SdfSVS:
        rec.typeLocalIndex = uint32_t(m_svsRegion.size());
        m_svsRegion.push_back(std::move(std::get<SdfSVS>(p)));
        break;
      case GeomType::SdfSBS:
        rec.typeLocalIndex = uint32_t(m_sbsRegion.size());
        m_sbsRegion.push_back(std::move(std::get<SdfSBS>(p)));
        break;
      case GeomType::RFGrid:
        rec.typeLocalIndex = uint32_t(m_rfRegion.size());
        m_rfRegion.push_back(std::move(std::get<RFGrid>(p)));
        break;
    }
    m_geomTable[g] = rec;
  }
  m_octLeaves.resize(m_octRegion.size());
  for (size_t i = 0; i < m_octRegion.size(); i++)
    m_octLeaves[i] = collect_surface_leaves(m_octRegion[i]);
}

void Scene::build_blas()
{
  m_blas.resize(m_geomTable.size());
  m_geomBounds.resize(m_geomTable.size());
  for (size_t g = 0; g < m_geomTable.size(); g++)
  {
    const GeometryRecord& rec = m_geomTable[g];
    const uint32_t li = rec.typeLocalIndex;
    std::vector<AABB> boxes;
    switch (rec.typeTag)
    {
      case GeomType::Triangles:
      {
        const TriangleMesh& mesh = m_triRegion[li];
        boxes.resize(mesh.triangle_count());
        for (size_t t = 0; t < boxes.size(); t++)
        {
          AABB b;
          b.include(mesh.vertices[mesh.indices[3 * t + 0]]);
          b.include(mesh.vertices[mesh.indices[3 * t + 1]]);
          b.include(mesh.vertices[mesh.indices[3 * t + 2]]);
          boxes[t] = b;
        }
        break;
      }
      case GeomType::SdfGrid:
      {
        AABB b;
        b.boxMin = float3{0, 0, 0};
        b.boxMax = float3{1, 1, 1};
        boxes.push_back(b);
        break;
      }
      case GeomType::SdfFrameOctree:
      {
        const std::vector<OctSurfaceLeaf>& leaves = m_octLeaves[li];
        boxes.resize(leaves.size());
        for (size_t i = 0; i < leaves.size(); i++)
        {
          AABB b;
          b.boxMin = leaves[i].cellMin;
          b.boxMax = leaves[i].cellMin + float3{leaves[i].cellSize, leaves[i].cellSize,
                                                leaves[i].cellSize};
          boxes[i] = b;
        }
        break;
      }
      case GeomType::SdfSVS:
      {
        const SdfSVS& svs = m_svsRegion[li];
        boxes.resize(svs.nodes.size());
        for (size_t i = 0; i < boxes.size(); i++)
        {
          const SdfSVSNode& n = svs.nodes[i];
          const float h = 1.0f / float(n.voxelSize);
          AABB b;
          b.boxMin = float3{n.posX * h, n.posY * h, n.posZ * h};
          b.boxMax = b.boxMin + float3{h, h, h};
          boxes[i] = b;
        }
        break;
      }
      case GeomType::SdfSBS:
      {
        const SdfSBS& sbs = m_sbsRegion[li];
        const float s = float(sbs.brickDim) / float(sbs.lattice);
        boxes.resize(sbs.brickPos.size());
        for (size_t i = 0; i < boxes.size(); i++)
        {
          const uint3& p = sbs.brickPos[i];
          AABB b;
          b.boxMin = float3{p.x * s, p.y * s, p.z * s};
          b.boxMax = b.boxMin + float3{s, s, s};
          boxes[i] = b;
        }
        break;
      }
      case GeomType::RFGrid:
        m_blas[g] = m_rfRegion[li].bvh;  // rf_build already made the one-voxel-per-leaf tree
        m_geomBounds[g] = m_blas[g].nodes[m_blas[g].root].bounds;
        continue;
    }
    m_blas[g] = build_from_boxes(boxes);
    m_geomBounds[g] = m_blas[g].nodes[m_blas[g].root].bounds;
  }
}

static uint32_t blob_append(std::vector<std::byte>& blob, const void* data, size_t bytes)
{
  const size_t off = (blob.size() + 15) & ~size_t(15);
  blob.resize(off + bytes);
  if (bytes > 0)
    std::memcpy(blob.data() + off, data, bytes);
  return uint32_t(off);
}

void Scene::build_uniform_blob()
{
  m_uniform.resize(m_geomTable.size());
  for (size_t g = 0; g < m_geomTable.size(); g++)
  {
    const GeometryRecord& rec = m_geomTable[g];
    const uint32_t li = rec.typeLocalIndex;
    UniformGeomRecord u;
    u.typeTag = uint32_t(rec.typeTag);
    switch (rec.typeTag)
    {
      case GeomType::Triangles:
      {
        const TriangleMesh& m = m_triRegion[li];
        u.streamOffset[0] = blob_append(m_blob, m.vertices.data(), m.vertices.size() * sizeof(float3));
        u.streamCount[0]  = uint32_t(m.vertices.size());
        u.streamOffset[1] = blob_append(m_blob, m.indices.data(), m.indices.size() * sizeof(uint32_t));
        u.streamCount[1]  = uint32_t(m.indices.size());
        break;
      }
      case GeomType::SdfGrid:
      {
        const SdfGrid& grid = m_gridRegion[li];
        u.streamOffset[0] = blob_append(m_blob, grid.values.data(), grid.values.size() * sizeof(float));
        u.streamCount[0]  = uint32_t(grid.values.size());
        u.dims[0] = uint32_t(grid.dims.x);
        u.dims[1] = uint32_t(grid.dims.y);
        u.dims[2] = uint32_t(grid.dims.z);
        break;
      }
      case GeomType::SdfFrameOctree:
      {
        const SdfFrameOctree& oct = m_octRegion[li];
        const std::vector<OctSurfaceLeaf>& leaves = m_octLeaves[li];
        u.streamOffset[0] = blob_append(m_blob, oct.nodes.data(), oct.nodes.size() * sizeof(SdfFrameOctreeNode));
        u.streamCount[0]  = uint32_t(oct.nodes.size());
        u.streamOffset[1] = blob_append(m_blob, leaves.data(), leaves.size() * sizeof(OctSurfaceLeaf));
        u.streamCount[1]  = uint32_t(leaves.size());
        break;
      }
      case GeomType::SdfSVS:
      {
        const SdfSVS& svs = m_svsRegion[li];
        u.streamOffset[0] = blob_append(m_blob, svs.nodes.data(), svs.nodes.size() * sizeof(SdfSVSNode));
        u.streamCount[0]  = uint32_t(svs.nodes.size());
        break;
      }
      case GeomType::SdfSBS:
      {
        const SdfSBS& sbs = m_sbsRegion[li];
        u.streamOffset[0] = blob_append(m_blob, sbs.brickPos.data(), sbs.brickPos.size() * sizeof(uint3));
        u.streamCount[0]  = uint32_t(sbs.brickPos.size());
        u.streamOffset[1] = blob_append(m_blob, sbs.values.data(), sbs.values.size() * sizeof(float));
        u.streamCount[1]  = uint32_t(sbs.values.size());
        u.dims[0] = sbs.brickDim;
        u.dims[1] = sbs.lattice;
        break;
      }
      case GeomType::RFGrid:
      {
        const RFGrid& rf = m_rfRegion[li];
        u.streamOffset[0] = blob_append(m_blob, rf.voxels.data(), rf.voxels.size() * sizeof(RFVoxel));
        u.streamCount[0]  = uint32_t(rf.voxels.size());
        u.dims[0] = uint32_t(rf.dims.x);
        u.dims[1] = uint32_t(rf.dims.y);
        u.dims[2] = uint32_t(rf.dims.z);
        u.scalarParam = rf.threshold;
        break;
      }
    }
    m_uniform[g] = u;
  }
}

void Scene::build_tlas()
{
  std::vector<AABB> boxes(m_instances.size());
  for (size_t i = 0; i < m_instances.size(); i++)
  {
    const InstanceRecord& inst = m_instances[i];
    const AABB& ob = m_geomBounds[inst.geomId];
    AABB wb;
    for (int c = 0; c < 8; c++)
    {
      const float3 corner{(c & 4) ? ob.boxMax.x : ob.boxMin.x,
                          (c & 2) ? ob.boxMax.y : ob.boxMin.y,
                          (c & 1) ? ob.boxMax.z : ob.boxMin.z};
      wb.include(mul_point(inst.worldFromObject, corner));
    }
    boxes[i] = wb;
  }
  m_tlas = build_from_boxes(boxes);
}

void Scene::Commit(DispatchLevel level)
{
  if (m_committed)
    throw std::runtime_error("Commit: scene already committed");
  if (level == DispatchLevel::Three)
    throw std::invalid_argument(
        "Commit: dispatch level three (callable shaders) requires a hardware ray tracing "
        "pipeline and is rejected here");
  if (m_staging.empty() || m_instances.empty())
    throw std::invalid_argument("Commit: empty scene (need at least one geometry and one instance)");

  if (level == DispatchLevel::Zero)
  {
    const size_t firstType = m_staging.front().index();
    for (const StagedPayload& p : m_staging)
      if (p.index() != firstType)
        throw std::invalid_argument("Commit: dispatch level zero requires a single geometry type");
  }

  build_regions();
  build_blas();
  if (level == DispatchLevel::One)
    build_uniform_blob();
  if (level == DispatchLevel::Zero)
  {
    m_monoType = m_geomTable.front().typeTag;
    m_monoFn   = SceneTraversal::mono_fn(m_monoType);
  }
  build_tlas();

  m_level = level;
  m_committed = true;
  m_staging.clear();
  m_staging.shrink_to_fit();
}

// ---- introspection ------------------------------------------------------

GeometryRecord Scene::geometry_record(uint32_t geomId) const
{
  if (!m_committed)
    throw std::runtime_error("geometry_record: scene not committed");
  if (geomId >= m_geomTable.size())
    throw std::out_of_range("geometry_record: invalid geomId");
  return m_geomTable[geomId];
}

GeomType Scene::geometry_type(uint32_t geomId) const
{
  if (m_committed)
    return m_geomTable.at(geomId).typeTag;
  return GeomType(m_staging.at(geomId).index());
}

const InstanceRecord& Scene::instance(uint32_t instId) const
{
  return m_instances.at(instId);
}

const LBVHTree& Scene::blas(uint32_t geomId) const
{
  if (!m_committed)
    throw std::runtime_error("blas: scene not committed");
  return m_blas.at(geomId);
}

const LBVHTree& Scene::tlas() const
{
  if (!m_committed)
    throw std::runtime_error("tlas: scene not committed");
  return m_tlas;
}

AABB Scene::geometry_bounds(uint32_t geomId) const
{
  if (!m_committed)
    throw std::runtime_error("geometry_bounds: scene not committed");
  return m_geomBounds.at(geomId);
}

AABB Scene::instance_bounds(uint32_t instId) const
{
  if (!m_committed)
    throw std::runtime_error("instance_bounds: scene not committed");
  const InstanceRecord& inst = m_instances.at(instId);
  const AABB& ob = m_geomBounds[inst.geomId];
  AABB wb;
  for (int c = 0; c < 8; c++)
  {
    const float3 corner{(c & 4) ? ob.boxMax.x : ob.boxMin.x,
                        (c & 2) ? ob.boxMax.y : ob.boxMin.y,
                        (c & 1) ? ob.boxMax.z : ob.boxMin.z};
    wb.include(mul_point(inst.worldFromObject, corner));
  }
  return wb;
}

// ---- payload views ------------------------------------------------------

template <typename T>
static std::span<const T> blob_span(const std::vector<std::byte>& blob, uint32_t offset,
                                    uint32_t count)
{
  return std::span<const T>(reinterpret_cast<const T*>(blob.data() + offset), count);
}

TriView Scene::tri_view(uint32_t geomId) const
{
  if (m_level == DispatchLevel::One)
  {
    const UniformGeomRecord& u = m_uniform[geomId];
    return TriView{blob_span<float3>(m_blob, u.streamOffset[0], u.streamCount[0]),
                   blob_span<uint32_t>(m_blob, u.streamOffset[1], u.streamCount[1])};
  }
  const TriangleMesh& m = m_triRegion[m_geomTable[geomId].typeLocalIndex];
  return TriView{m.vertices, m.indices};
}

GridView Scene::grid_view(uint32_t geomId) const
{
  if (m_level == DispatchLevel::One)
  {
    const UniformGeomRecord& u = m_uniform[geomId];
    return GridView{int3{int(u.dims[0]), int(u.dims[1]), int(u.dims[2])},
                    blob_span<float>(m_blob, u.streamOffset[0], u.streamCount[0])};
  }
  const SdfGrid& g = m_gridRegion[m_geomTable[geomId].typeLocalIndex];
  return GridView{g.dims, g.values};
}

OctView Scene::oct_view(uint32_t geomId) const
{
  if (m_level == DispatchLevel::One)
  {
    const UniformGeomRecord& u = m_uniform[geomId];
    return OctView{blob_span<SdfFrameOctreeNode>(m_blob, u.streamOffset[0], u.streamCount[0]),
                   blob_span<OctSurfaceLeaf>(m_blob, u.streamOffset[1], u.streamCount[1])};
  }
  const uint32_t li = m_geomTable[geomId].typeLocalIndex;
  return OctView{m_octRegion[li].nodes, m_octLeaves[li]};
}

SvsView Scene::svs_view(uint32_t geomId) const
{
  if (m_level == DispatchLevel::One)
  {
    const UniformGeomRecord& u = m_uniform[geomId];
    return SvsView{blob_span<SdfSVSNode>(m_blob, u.streamOffset[0], u.streamCount[0])};
  }
  return SvsView{m_svsRegion[m_geomTable[geomId].typeLocalIndex].nodes};
}

SbsView Scene::sbs_view(uint32_t geomId) const
{
  if (m_level == DispatchLevel::One)
  {
    const UniformGeomRecord& u = m_uniform[geomId];
    return SbsView{u.dims[0], u.dims[1],
                   blob_span<uint3>(m_blob, u.streamOffset[0], u.streamCount[0]),
                   blob_span<float>(m_blob, u.streamOffset[1], u.streamCount[1])};
  }
  const SdfSBS& s = m_sbsRegion[m_geomTable[geomId].typeLocalIndex];
  return SbsView{s.brickDim, s.lattice, s.brickPos, s.values};
}

RfView Scene::rf_view(uint32_t geomId) const
{
  if (m_level == DispatchLevel::One)
  {
    const UniformGeomRecord& u = m_uniform[geomId];
    return RfView{int3{int(u.dims[0]), int(u.dims[1]), int(u.dims[2])}, u.scalarParam,
                  blob_span<RFVoxel>(m_blob, u.streamOffset[0], u.streamCount[0])};
  }
  const RFGrid& rf = m_rfRegion[m_geomTable[geomId].typeLocalIndex];
  return RfView{rf.dims, rf.threshold, rf.voxels};
}

// ---- shading normal -----------------------------------------------------

float3 Scene::shading_normal(const CRT_Hit& hit) const
{
  if (hit.is_miss())
    return float3{0, 0, 1};
  switch (geometry_type(hit.geomId))
  {
    case GeomType::Triangles:
    {
      const TriView g = tri_view(hit.geomId);
      const uint32_t t = hit.primId;
      const float3& v0 = g.vertices[g.indices[3 * t + 0]];
      const float3& v1 = g.vertices[g.indices[3 * t + 1]];
      const float3& v2 = g.vertices[g.indices[3 * t + 2]];
      return normalize(cross(v1 - v0, v2 - v0));
    }
    case GeomType::SdfGrid:
    case GeomType::SdfFrameOctree:
    case GeomType::SdfSVS:
    case GeomType::SdfSBS:
      return decode_normal(float2{hit.coords[0], hit.coords[1]});
    case GeomType::RFGrid:
      return float3{0, 0, 1};
  }
  return float3{0, 0, 1};
}

} // namespace crt
