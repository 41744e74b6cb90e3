#include "crossrt/cr_math.h"

#include <stdexcept>

namespace crt
{

// Gauss-Jordan with partial pivoting; good enough for instance transforms.
bool try_inverse4x4(const float4x4& a, float4x4& out)
{
  double aug[4][8];
  for (int i = 0; i < 4; i++)
    for (int j = 0; j < 4; j++)
    {
      aug[i][j]     = a(i, j);
      aug[i][j + 4] = (i == j) ? 1.0 : 0.0;
    }

  for (int col = 0; col < 4; col++)
  {
    int pivot = col;
    for (int r = col + 1; r < 4; r++)
      if (std::fabs(aug[r][col]) > std::fabs(aug[pivot][col]))
        pivot = r;
    if (std::fabs(aug[pivot][col]) < 1e-12)
      return false;
    if (pivot != col)
      for (int j = 0; j < 8; j++)
        std::swap(aug[pivot][j], aug[col][j]);

    const double inv = 1.0 / aug[col][col];
    for (int j = 0; j < 8; j++)
      aug[col][j] *= inv;
    for (int r = 0; r < 4; r++)
    {
      if (r == col)
        continue;
      const double f = aug[r][col];
      for (int j = 0; j < 8; j++)
        aug[r][j] -= f * aug[col][j];
    }
  }

  for (int i = 0; i < 4; i++)
    for (int j = 0; j < 4; j++)
      out(i, j) = float(aug[i][j + 4]);
  return true;
}

float4x4 inverse4x4(const float4x4& a)
{
  float4x4 r;
  if (!try_inverse4x4(a, r))
    throw std::invalid_argument("inverse4x4: matrix is singular");
  return r;
}

} // namespace crt
