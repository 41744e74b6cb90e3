#pragma once

#include "crossrt/cr_math.h"
#include "crossrt/rf_grid.h"
#include "crossrt/sdf.h"

#include <cstdint>
#include <vector>

namespace crt
{

// Indexed triangle soup; indices come in triples.
struct TriangleMesh
{
  std::vector<float3>   vertices;
  std::vector<uint32_t> indices;

  size_t triangle_count() const { return indices.size() / 3; }
};

// typeTag values; enumeration order fixes the per-type region order.
enum class GeomType : uint32_t
{
  Triangles      = 0,
  SdfGrid        = 1,
  SdfFrameOctree = 2,
  SdfSVS         = 3,
  SdfSBS         = 4,
  RFGrid         = 5,
};

constexpr uint32_t kGeomTypeCount = 6;

const char* geom_type_name(GeomType t);

} // namespace crt
