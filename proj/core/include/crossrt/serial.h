#pragma once

#include "crossrt/geometry.h"
#include "crossrt/image.h"
#include "crossrt/lbvh.h"
#include "crossrt/ray.h"

#include <string>
#include <vector>

// Little-endian binary containers. Every format opens with a 4-byte magic;
// loaders validate magic and element counts and throw std::runtime_error
// with the offending path on malformed input. save(load(x)) is
// byte-identical for all of them.
//
//   "LBVH"  u32 nodeCount; per node 6*f32 bounds, u32 left/right/firstPrim/
//           primCount (leaf marker 0xFFFFFFFF in left)
//   "SDFG"  3*u32 dims; f32 values, x fastest
//   "SVS1"  u32 count; per node 3*u32 pos, u32 voxelSize, 8*u8 corners
//   "SBS1"  u32 count, u32 brickDim, u32 lattice; per brick 3*u32 pos,
//           (brickDim+1)^3 f32 values
//   "RFG1"  3*u32 dims, f32 threshold; per cell f32 density, 3*f32 rgb
//   "RAYS"  u32 count; per ray 8*f32 (posAndNear, dirAndFar)
//   "HITS"  u32 count; per hit f32 t, u32 primId/geomId/instId, 2*f32 coords
//   "IMG1"  u32 width, u32 height; 3*f32 per pixel, row-major

namespace crt
{

void     save_bvh(const LBVHTree& tree, const std::string& path);
LBVHTree load_bvh(const std::string& path);  // nodes only; primIndices are not stored

void    save_sdf_grid(const SdfGrid& grid, const std::string& path);
SdfGrid load_sdf_grid(const std::string& path);

void   save_svs(const SdfSVS& svs, const std::string& path);
SdfSVS load_svs(const std::string& path);

void   save_sbs(const SdfSBS& sbs, const std::string& path);
SdfSBS load_sbs(const std::string& path);

void       save_rf_grid(const RFGridData& grid, const std::string& path);
RFGridData load_rf_grid(const std::string& path);

void             save_rays(const std::vector<Ray>& rays, const std::string& path);
std::vector<Ray> load_rays(const std::string& path);

void                 save_hits(const std::vector<CRT_Hit>& hits, const std::string& path);
std::vector<CRT_Hit> load_hits(const std::string& path);

void  save_img1(const Image& img, const std::string& path);
Image load_img1(const std::string& path);

// Binary P6 with gamma 2.2 encoding of the linear pixels.
void save_ppm(const Image& img, const std::string& path);

// Magic sniffing for CLI inputs that accept several SDF containers.
std::string read_magic(const std::string& path);

} // namespace crt
