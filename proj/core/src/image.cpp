#include "crossrt/image.h"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace crt
{

double psnr(const Image& a, const Image& b)
{
  if (a.width != b.width || a.height != b.height)
    throw std::invalid_argument("psnr: image resolutions differ");
  if (a.pixels.empty())
    throw std::invalid_argument("psnr: empty images");

  double sum = 0.0;
  for (size_t i = 0; i < a.pixels.size(); i++)
    for (int c = 0; c < 3; c++)
    {
      const double x = std::clamp(double(a.pixels[i][c]), 0.0, 1.0);
      const double y = std::clamp(double(b.pixels[i][c]), 0.0, 1.0);
      sum += (x - y) * (x - y);
    }
  const double mse = sum / (double(a.pixels.size()) * 3.0);
  if (mse == 0.0)
    return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

} // namespace crt
