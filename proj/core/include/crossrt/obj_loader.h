#pragma once

#include "crossrt/geometry.h"

#include <string>

namespace crt
{

// Wavefront OBJ subset: v / f records, index forms i, i/t, i//n, i/t/n,
// negative (relative) indices, polygon faces triangulated as a fan.
// Malformed records throw std::runtime_error with "path:line: message".
TriangleMesh load_obj(const std::string& path);

} // namespace crt
