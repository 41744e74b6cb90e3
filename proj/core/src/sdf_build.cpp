#include "crossrt/sdf.h"

#include <stdexcept>

namespace crt
{

static void validate_grid(const SdfGrid& grid, const char* who)
{
  if (grid.dims.x < 2 || grid.dims.y < 2 || grid.dims.z < 2)
    throw std::invalid_argument(std::string(who) + ": grid needs at least 2 samples per axis");
  const size_t expect = size_t(grid.dims.x) * size_t(grid.dims.y) * size_t(grid.dims.z);
  if (grid.values.size() != expect)
    throw std::invalid_argument(std::string(who) + ": value count does not match dims");
}

static int max_lattice_depth(const SdfGrid& grid)
{
  const int minCells = std::min(grid.dims.x, std::min(grid.dims.y, grid.dims.z)) - 1;
  int d = 0;
  while ((1 << (d + 1)) <= minCells)
    d++;
  return d;
}

// ---- frame octree -------------------------------------------------------

static void octree_build_into(const SdfGrid& grid, std::vector<SdfFrameOctreeNode>& nodes,
                              uint32_t slot, const float3& cellMin, float size,
                              int depth, int maxDepth, float eps)
{
  float corners[8];
  for (int i = 0; i < 8; i++)
  {
    const int3 o = corner_offset(i);
    corners[i] = sample_field(grid, cellMin + float3{o.x * size, o.y * size, o.z * size});
  }
  for (int i = 0; i < 8; i++)
    nodes[slot].values[i] = corners[i];
  nodes[slot].firstChild = kNoChild;

  if (depth >= maxDepth)
    return;

  // probe the half-step lattice: where the node interpolant strays from the
  // grid field beyond eps the cell subdivides
  float err = 0.0f;
  for (int i = 0; i <= 2; i++)
    for (int j = 0; j <= 2; j++)
      for (int k = 0; k <= 2; k++)
      {
        const float3 local{0.5f * i, 0.5f * j, 0.5f * k};
        const float approx = sample_trilinear(corners, local);
        const float exact  = sample_field(grid, cellMin + local * size);
        err = std::max(err, std::fabs(approx - exact));
      }
  if (err <= eps)
    return;

  const uint32_t base = uint32_t(nodes.size());
  nodes[slot].firstChild = base;
  nodes.resize(nodes.size() + 8);
  const float half = 0.5f * size;
  for (int i = 0; i < 8; i++)
  {
    const int3 o = corner_offset(i);
    octree_build_into(grid, nodes, base + uint32_t(i),
                      cellMin + float3{o.x * half, o.y * half, o.z * half},
                      half, depth + 1, maxDepth, eps);
  }
}

SdfFrameOctree octree_from_grid(const SdfGrid& grid, float eps, int maxDepth)
{
  validate_grid(grid, "octree_from_grid");
  if (maxDepth < 0)
    maxDepth = max_lattice_depth(grid);

  SdfFrameOctree oct;
  oct.nodes.resize(1);
  octree_build_into(grid, oct.nodes, 0, float3{0, 0, 0}, 1.0f, 0, maxDepth, eps);
  return oct;
}

static void collect_rec(const SdfFrameOctree& oct, uint32_t idx, const float3& cellMin,
                        float size, std::vector<OctSurfaceLeaf>& out)
{
  const SdfFrameOctreeNode& node = oct.nodes[idx];
  if (node.firstChild == kNoChild)
  {
    float mn = node.values[0], mx = node.values[0];
    for (int i = 1; i < 8; i++)
    {
      mn = std::min(mn, node.values[i]);
      mx = std::max(mx, node.values[i]);
    }
    if (mn < 0.0f && mx > 0.0f)
      out.push_back(OctSurfaceLeaf{idx, cellMin, size});
    return;
  }
  const float half = 0.5f * size;
  for (int i = 0; i < 8; i++)
  {
    const int3 o = corner_offset(i);
    collect_rec(oct, node.firstChild + uint32_t(i),
                cellMin + float3{o.x * half, o.y * half, o.z * half}, half, out);
  }
}

std::vector<OctSurfaceLeaf> collect_surface_leaves(const SdfFrameOctree& oct)
{
  std::vector<OctSurfaceLeaf> out;
  if (!oct.nodes.empty())
    collect_rec(oct, 0, float3{0, 0, 0}, 1.0f, out);
  return out;
}

// ---- sparse voxel set ---------------------------------------------------

SdfSVS svs_from_grid(const SdfGrid& grid, int depth)
{
  validate_grid(grid, "svs_from_grid");
  if (depth < 0 || depth > max_lattice_depth(grid))
    throw std::invalid_argument("svs_from_grid: lattice depth outresolves the grid");

  const uint32_t vps = 1u << depth;  // voxels per side
  const float h = 1.0f / float(vps);

  SdfSVS svs;
  for (uint32_t z = 0; z < vps; z++)
    for (uint32_t y = 0; y < vps; y++)
      for (uint32_t x = 0; x < vps; x++)
      {
        float corners[8];
        float mn = 0.0f, mx = 0.0f;
        for (int i = 0; i < 8; i++)
        {
          const int3 o = corner_offset(i);
          corners[i] = sample_field(grid, float3{(x + o.x) * h, (y + o.y) * h, (z + o.z) * h});
          mn = (i == 0) ? corners[i] : std::min(mn, corners[i]);
          mx = (i == 0) ? corners[i] : std::max(mx, corners[i]);
        }
        if (!(mn < 0.0f && mx > 0.0f))
          continue;
        SdfSVSNode node;
        node.posX = x; node.posY = y; node.posZ = z;
        node.voxelSize = vps;
        for (int i = 0; i < 8; i++)
          node.values[i] = svs_quantize(corners[i], h);
        svs.nodes.push_back(node);
      }

  if (svs.nodes.empty())
    throw std::invalid_argument("svs_from_grid: empty SDF surface (no sign-crossing voxels)");
  return svs;
}

// ---- sparse brick set ---------------------------------------------------

SdfSBS sbs_from_grid(const SdfGrid& grid, int depth, uint32_t brickDim)
{
  validate_grid(grid, "sbs_from_grid");
  if (depth < 0 || depth > max_lattice_depth(grid))
    throw std::invalid_argument("sbs_from_grid: lattice depth outresolves the grid");
  const uint32_t vps = 1u << depth;
  if (brickDim < 1 || vps % brickDim != 0)
    throw std::invalid_argument("sbs_from_grid: brickDim must divide the lattice");

  const uint32_t bricksPerSide = vps / brickDim;
  const float h = 1.0f / float(vps);
  const uint32_t s = brickDim + 1;

  SdfSBS sbs;
  sbs.brickDim = brickDim;
  sbs.lattice  = vps;

  std::vector<float> corner(size_t(s) * s * s);
  for (uint32_t bz = 0; bz < bricksPerSide; bz++)
    for (uint32_t by = 0; by < bricksPerSide; by++)
      for (uint32_t bx = 0; bx < bricksPerSide; bx++)
      {
        for (uint32_t k = 0; k < s; k++)
          for (uint32_t j = 0; j < s; j++)
            for (uint32_t i = 0; i < s; i++)
              corner[i + s * (j + s * k)] =
                  sample_field(grid, float3{(bx * brickDim + i) * h, (by * brickDim + j) * h,
                                            (bz * brickDim + k) * h});

        bool crossing = false;
        for (uint32_t vz = 0; vz < brickDim && !crossing; vz++)
          for (uint32_t vy = 0; vy < brickDim && !crossing; vy++)
            for (uint32_t vx = 0; vx < brickDim && !crossing; vx++)
            {
              float mn = 0.0f, mx = 0.0f;
              for (int i = 0; i < 8; i++)
              {
                const int3 o = corner_offset(i);
                const float v = corner[(vx + o.x) + s * ((vy + o.y) + s * (vz + o.z))];
                mn = (i == 0) ? v : std::min(mn, v);
                mx = (i == 0) ? v : std::max(mx, v);
              }
              crossing = (mn < 0.0f && mx > 0.0f);
            }
        if (!crossing)
          continue;

        sbs.brickPos.push_back(uint3{bx, by, bz});
        sbs.values.insert(sbs.values.end(), corner.begin(), corner.end());
      }

  if (sbs.brickPos.empty())
    throw std::invalid_argument("sbs_from_grid: empty SDF surface (no sign-crossing bricks)");
  return sbs;
}

} // namespace crt
