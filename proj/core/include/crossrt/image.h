#pragma once

#include "crossrt/cr_math.h"

#include <vector>

namespace crt
{

struct Image
{
  int width = 0, height = 0;
  std::vector<float3> pixels;  // row-major, row 0 at the top

  Image() = default;
  Image(int w, int h) : width(w), height(h), pixels(size_t(w) * size_t(h)) {}

  float3&       at(int x, int y)       { return pixels[size_t(y) * width + x]; }
  const float3& at(int x, int y) const { return pixels[size_t(y) * width + x]; }
};

// 10*log10(1/MSE) over channels clamped to [0,1]; identical images return
// +infinity. Throws std::invalid_argument on a resolution mismatch.
double psnr(const Image& a, const Image& b);

} // namespace crt
