#pragma once

#include "crossrt/cr_math.h"

#include <cstdint>
#include <limits>
#include <vector>

// Signed-distance geometry: dense grids, frame octrees, sparse voxel sets
// (SVS) and sparse brick sets (SBS), all over the unit cube [0,1]^3 with a
// trilinear field inside each cell. Ray intersection solves the cubic
// f(o + t*d) = 0 per cell with a bracketed Newton iteration.

namespace crt
{

// Corner convention used everywhere a cell carries 8 values: corner i sits
// at offset ((i>>2)&1, (i>>1)&1, i&1), i.e. bit2 = x, bit1 = y, bit0 = z.
inline int3 corner_offset(int i)
{
  return int3{(i >> 2) & 1, (i >> 1) & 1, i & 1};
}

// Dense SDF grid: vertex-centered samples over [0,1]^3, x-fastest storage,
// every axis needs at least 2 samples. Cell counts are dims - 1 per axis.
struct SdfGrid
{
  int3 dims{0, 0, 0};
  std::vector<float> values;  // dims.x * dims.y * dims.z, values[x + dims.x*(y + dims.y*z)]

  float at(int x, int y, int z) const
  {
    return values[size_t(x) + size_t(dims.x) * (size_t(y) + size_t(dims.y) * size_t(z))];
  }
};

constexpr uint32_t kNoChild = 0xFFFFFFFFu;

// Frame octree over [0,1]^3: every node stores its 8 corner distances;
// children (always all 8, contiguous) subdivide the cell in half.
struct SdfFrameOctreeNode
{
  uint32_t firstChild = kNoChild;  // kNoChild marks a leaf
  float    values[8]  = {};
};

struct SdfFrameOctree
{
  std::vector<SdfFrameOctreeNode> nodes;  // root is node 0
};

// Sparse voxel set: only surface-crossing voxels survive, each with its own
// lattice placement and 8-bit quantized corner distances.
struct SdfSVSNode
{
  uint32_t posX = 0, posY = 0, posZ = 0;  // lattice coords, voxel extent 1/voxelSize
  uint32_t voxelSize = 1;                 // power-of-two lattice resolution
  uint8_t  values[8] = {};                // quantized over [-sqrt(3)*h, +sqrt(3)*h]
};

struct SdfSVS
{
  std::vector<SdfSVSNode> nodes;
};

// Sparse brick set: surface-crossing bricks of brickDim^3 voxels with
// unquantized (brickDim+1)^3 corner distances, x-fastest within a brick.
struct SdfSBS
{
  uint32_t brickDim = 2;       // voxels per brick edge
  uint32_t lattice  = 0;       // voxel lattice resolution; brick extent = brickDim/lattice
  std::vector<uint3> brickPos; // brick lattice coords (units of whole bricks)
  std::vector<float> values;   // (brickDim+1)^3 per brick

  uint32_t brick_stride() const { return (brickDim + 1) * (brickDim + 1) * (brickDim + 1); }
  float brick_value(size_t brick, int x, int y, int z) const
  {
    const uint32_t s = brickDim + 1;
    return values[brick * brick_stride() + size_t(x) + s * (size_t(y) + s * size_t(z))];
  }
};

// ---- trilinear field helpers -------------------------------------------

float  sample_trilinear(const float corners[8], const float3& local);
double sample_trilinear_d(const float corners[8], double lx, double ly, double lz);

// Gradient with respect to the local cell coordinates; divide by the cell
// size per axis to get object-space derivatives.
float3 trilinear_gradient(const float corners[8], const float3& local);

// Field value of the grid at p in [0,1]^3 (clamped outside).
float  sample_field(const SdfGrid& grid, const float3& p);
float3 sample_field_gradient(const SdfGrid& grid, const float3& p);  // object-space units

// Field value of the octree at p (descends to the containing leaf).
float sample_octree(const SdfFrameOctree& oct, const float3& p);

// ---- Newton cell intersection ------------------------------------------

// Along local(s) = o + s*d the trilinear field is a cubic in s. Finds the
// smallest root in [0, sMax]: the interval is split at the derivative's
// critical points, each monotone piece is checked for a sign change, and a
// bracketed Newton iteration (bisection fallback) polishes the root to
// |f| < 1e-9 in double precision. o is the entry point in local cell
// coordinates, d the direction scaled into cell units, so s stays in the
// global ray parameterization. Returns false if f never crosses zero.
bool newton_intersect_cell(const float corners[8], const float3& o, const float3& d,
                           float sMax, double& sOut);

// ---- quantization (SVS) -------------------------------------------------

// 8-bit corner quantization over [-d_max, +d_max] with d_max = sqrt(3)*h.
uint8_t svs_quantize(float v, float h);
float   svs_dequantize(uint8_t q, float h);

// ---- builders -----------------------------------------------------------

// Top-down frame octree: subdivide while the trilinear interpolant of the
// node corners deviates from the grid field by more than eps (checked on a
// half-step probe lattice) and depth < maxDepth. maxDepth < 0 picks the
// deepest level whose cells are no finer than the grid's.
SdfFrameOctree octree_from_grid(const SdfGrid& grid, float eps = 1e-3f, int maxDepth = -1);

// Sparse voxel set at lattice 2^depth: keeps exactly the voxels whose 8
// corner samples change sign (min < 0 < max). Throws std::invalid_argument
// if no voxel crosses the surface or the lattice outresolves the grid.
SdfSVS svs_from_grid(const SdfGrid& grid, int depth);

// Sparse brick set at voxel lattice 2^depth: keeps bricks containing at
// least one sign-crossing voxel. brickDim must divide 2^depth.
SdfSBS sbs_from_grid(const SdfGrid& grid, int depth, uint32_t brickDim);

// Surface leaf cells of an octree (sign-crossing leaves, DFS order); these
// become the geometry's BVH leaf boxes 1:1.
struct OctSurfaceLeaf
{
  uint32_t nodeIndex = 0;
  float3   cellMin;
  float    cellSize = 0.0f;
};
std::vector<OctSurfaceLeaf> collect_surface_leaves(const SdfFrameOctree& oct);

// ---- normals ------------------------------------------------------------

// Octahedral unit-vector encoding; the 2-vector rides in CRT_Hit::coords.
float2 encode_normal(const float3& n);
float3 decode_normal(const float2& e);

// ---- cell walking -------------------------------------------------------

// March the ray through a uniform cell grid (3D DDA) over [t0, t1], calling
// visit(cell, tEntry, tExit) front to back until it returns true. The ray
// must already be clipped to the grid's box.
template <typename Visitor>
bool dda_walk(const float3& o, const float3& d, const float3& boxMin,
              const float3& cellSize, const int3& cells, float t0, float t1,
              Visitor&& visit)
{
  const float kInf = std::numeric_limits<float>::infinity();
  const float3 p = o + d * t0;

  int3 ic;
  int3 step;
  float3 tMax{kInf, kInf, kInf}, tDelta{kInf, kInf, kInf};
  for (int a = 0; a < 3; a++)
  {
    const float fc = (p[a] - boxMin[a]) / cellSize[a];
    ic[a] = std::clamp(int(std::floor(fc)), 0, cells[a] - 1);
    step[a] = (d[a] > 0.0f) ? 1 : ((d[a] < 0.0f) ? -1 : 0);
    if (step[a] != 0)
    {
      const float boundary = boxMin[a] + (float(ic[a]) + (step[a] > 0 ? 1.0f : 0.0f)) * cellSize[a];
      tMax[a]   = (boundary - o[a]) / d[a];
      tDelta[a] = cellSize[a] / std::fabs(d[a]);
    }
  }

  float tCur = t0;
  while (true)
  {
    const float tNext = std::min(std::min(tMax.x, tMax.y), std::min(tMax.z, t1));
    if (visit(ic, tCur, tNext))
      return true;
    if (tNext >= t1)
      return false;
    int axis = 0;
    if (tMax.y < tMax.x) axis = 1;
    if (tMax.z < tMax[axis]) axis = 2;
    ic[axis] += step[axis];
    if (ic[axis] < 0 || ic[axis] >= cells[axis])
      return false;
    tMax[axis] += tDelta[axis];
    tCur = tNext;
  }
}

} // namespace crt
