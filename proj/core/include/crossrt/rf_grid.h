#pragma once

#include "crossrt/lbvh.h"
#include "crossrt/ray.h"

#include <vector>

// ReLU-field radiance grids: a dense lattice of (density, rgb) cells, of
// which only the cells with density above a threshold become renderable
// voxels. Object space is lattice space: voxel (i,j,k) occupies
// [i,i+1]x[j,j+1]x[k,k+1], and the full domain is [0,dims]^3.

namespace crt
{

// Dense source lattice as stored on disk ("RFG1"): x-fastest cells.
struct RFGridData
{
  int3  dims{0, 0, 0};
  float threshold = 0.0f;
  std::vector<float4> cells;  // (density, r, g, b) per cell
};

struct RFVoxel
{
  uint3  pos;           // lattice coords
  float  density = 0.0f;
  float3 color;
};

// Renderable payload: surviving voxels plus a BVH holding exactly one voxel
// per leaf. Leaf separation is enforced by sorting 64-bit keys that append
// the voxel's lattice index below the Morton code, so equal codes can never
// collapse into a shared leaf.
struct RFGrid
{
  int3  dims{0, 0, 0};
  float threshold = 0.0f;
  std::vector<RFVoxel> voxels;
  LBVHTree bvh;
};

// Select cells with density > threshold and build the one-voxel-per-leaf
// BVH. Throws std::invalid_argument when no cell passes (empty field) or
// the lattice data is malformed.
RFGrid rf_build(const RFGridData& grid, float threshold);

struct RFSample
{
  float3 color;                 // composited emission
  float  transmittance = 1.0f;  // remaining T after the march
};

// Emission-absorption compositing along the ray: every intersected voxel
// contributes its color over the overlap length, front to back, stopping
// once transmittance drops below 1e-4.
RFSample rf_render_ray(const RFGrid& rf, const Ray& ray);

} // namespace crt
