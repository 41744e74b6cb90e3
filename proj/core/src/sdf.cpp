#include "crossrt/sdf.h"

namespace crt
{

float sample_trilinear(const float corners[8], const float3& p)
{
  const float x0 = (1.0f - p.y) * ((1.0f - p.z) * corners[0] + p.z * corners[1]) +
                   p.y          * ((1.0f - p.z) * corners[2] + p.z * corners[3]);
  const float x1 = (1.0f - p.y) * ((1.0f - p.z) * corners[4] + p.z * corners[5]) +
                   p.y          * ((1.0f - p.z) * corners[6] + p.z * corners[7]);
  return (1.0f - p.x) * x0 + p.x * x1;
}

double sample_trilinear_d(const float corners[8], double lx, double ly, double lz)
{
  const double c0 = corners[0], c1 = corners[1], c2 = corners[2], c3 = corners[3];
  const double c4 = corners[4], c5 = corners[5], c6 = corners[6], c7 = corners[7];
  const double x0 = (1.0 - ly) * ((1.0 - lz) * c0 + lz * c1) + ly * ((1.0 - lz) * c2 + lz * c3);
  const double x1 = (1.0 - ly) * ((1.0 - lz) * c4 + lz * c5) + ly * ((1.0 - lz) * c6 + lz * c7);
  return (1.0 - lx) * x0 + lx * x1;
}

float3 trilinear_gradient(const float corners[8], const float3& p)
{
  const float c0 = corners[0], c1 = corners[1], c2 = corners[2], c3 = corners[3];
  const float c4 = corners[4], c5 = corners[5], c6 = corners[6], c7 = corners[7];

  const float y0 = (1.0f - p.z) * c0 + p.z * c1;  // x=0, y=0 edge
  const float y1 = (1.0f - p.z) * c2 + p.z * c3;  // x=0, y=1
  const float y2 = (1.0f - p.z) * c4 + p.z * c5;  // x=1, y=0
  const float y3 = (1.0f - p.z) * c6 + p.z * c7;  // x=1, y=1

  float3 g;
  g.x = ((1.0f - p.y) * y2 + p.y * y3) - ((1.0f - p.y) * y0 + p.y * y1);
  g.y = (1.0f - p.x) * (y1 - y0) + p.x * (y3 - y2);
  g.z = (1.0f - p.x) * ((1.0f - p.y) * (c1 - c0) + p.y * (c3 - c2)) +
        p.x          * ((1.0f - p.y) * (c5 - c4) + p.y * (c7 - c6));
  return g;
}

static void grid_locate(const SdfGrid& grid, const float3& p, int3& cell, float3& local)
{
  for (int a = 0; a < 3; a++)
  {
    const int cells = grid.dims[a] - 1;
    const float q = p[a] * float(cells);
    cell[a]  = std::clamp(int(std::floor(q)), 0, cells - 1);
    local[a] = std::clamp(q - float(cell[a]), 0.0f, 1.0f);
  }
}

static void grid_cell_corners(const SdfGrid& grid, const int3& cell, float corners[8])
{
  for (int i = 0; i < 8; i++)
  {
    const int3 o = corner_offset(i);
    corners[i] = grid.at(cell.x + o.x, cell.y + o.y, cell.z + o.z);
  }
}

float sample_field(const SdfGrid& grid, const float3& p)
{
  int3 cell;
  float3 local;
  grid_locate(grid, p, cell, local);
  float corners[8];
  grid_cell_corners(grid, cell, corners);
  return sample_trilinear(corners, local);
}

float3 sample_field_gradient(const SdfGrid& grid, const float3& p)
{
  int3 cell;
  float3 local;
  grid_locate(grid, p, cell, local);
  float corners[8];
  grid_cell_corners(grid, cell, corners);
  const float3 g = trilinear_gradient(corners, local);
  return float3{g.x * float(grid.dims.x - 1), g.y * float(grid.dims.y - 1),
                g.z * float(grid.dims.z - 1)};
}

float sample_octree(const SdfFrameOctree& oct, const float3& p)
{
  float3 cellMin{0, 0, 0};
  float size = 1.0f;
  uint32_t idx = 0;
  while (oct.nodes[idx].firstChild != kNoChild)
  {
    const float half = 0.5f * size;
    const float3 center = cellMin + float3{half, half, half};
    const int bx = p.x >= center.x ? 1 : 0;
    const int by = p.y >= center.y ? 1 : 0;
    const int bz = p.z >= center.z ? 1 : 0;
    idx = oct.nodes[idx].firstChild + uint32_t((bx << 2) | (by << 1) | bz);
    cellMin = cellMin + float3{bx * half, by * half, bz * half};
    size = half;
  }
  const float3 local = (p - cellMin) / size;
  return sample_trilinear(oct.nodes[idx].values,
                          clamp(local, 0.0f, 1.0f));
}

// ---- Newton -------------------------------------------------------------

bool newton_intersect_cell(const float corners[8], const float3& o, const float3& d,
                           float sMax, double& sOut)
{
  if (!(sMax >= 0.0f))
    return false;

  // Expand trilinear(o + s*d) into the cubic c3 s^3 + c2 s^2 + c1 s + c0;
  // the expansion equals minus the field value, which leaves the roots alone.
  const double s000 = corners[0], s001 = corners[1], s010 = corners[2], s011 = corners[3];
  const double s100 = corners[4], s101 = corners[5], s110 = corners[6], s111 = corners[7];
  const double ox = o.x, oy = o.y, oz = o.z;
  const double dx = d.x, dy = d.y, dz = d.z;

  const double k0 = s000;
  const double k1 = s100 - s000;
  const double k2 = s010 - s000;
  const double k3 = s110 - s010 - k1;
  const double a  = s101 - s001;
  const double k4 = k0 - s001;
  const double k5 = k1 - a;
  const double k6 = k2 - (s011 - s001);
  const double k7 = k3 - (s111 - s011 - a);

  const double m0 = ox * oy;
  const double m1 = dx * dy;
  const double m2 = ox * dy + oy * dx;
  const double m3 = k5 * oz - k1;
  const double m4 = k6 * oz - k2;
  const double m5 = k7 * oz - k3;

  const double c0 = (k4 * oz - k0) + ox * m3 + oy * m4 + m0 * m5;
  const double c1 = dx * m3 + dy * m4 + m2 * m5 + dz * (k4 + k5 * ox + k6 * oy + k7 * m0);
  const double c2 = m1 * m5 + dz * (k5 * dx + k6 * dy + k7 * m2);
  const double c3 = k7 * m1 * dz;

  const auto poly  = [&](double s) { return ((c3 * s + c2) * s + c1) * s + c0; };
  const auto dpoly = [&](double s) { return (3.0 * c3 * s + 2.0 * c2) * s + c1; };

  // split [0, sMax] at the derivative's critical points -> monotone pieces
  double bp[4] = {0.0, double(sMax), 0.0, 0.0};
  int nbp = 2;
  const double qa = 3.0 * c3, qb = 2.0 * c2, qc = c1;
  if (std::fabs(qa) > 1e-30)
  {
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc > 0.0)
    {
      const double sq = std::sqrt(disc);
      const double r0 = (-qb - sq) / (2.0 * qa);
      const double r1 = (-qb + sq) / (2.0 * qa);
      if (r0 > 0.0 && r0 < sMax) bp[nbp++] = r0;
      if (r1 > 0.0 && r1 < sMax) bp[nbp++] = r1;
    }
  }
  else if (std::fabs(qb) > 1e-30)
  {
    const double r = -qc / qb;
    if (r > 0.0 && r < sMax) bp[nbp++] = r;
  }
  std::sort(bp, bp + nbp);

  const double eps = 1e-9;
  for (int seg = 0; seg + 1 < nbp; seg++)
  {
    const double lo0 = bp[seg], hi0 = bp[seg + 1];
    const double fa = poly(lo0);
    if (std::fabs(fa) < eps)  // piece starts on the surface
    {
      sOut = lo0;
      return true;
    }
    const double fb = poly(hi0);
    if ((fa < 0.0) == (fb < 0.0))
      continue;  // monotone piece without a crossing

    // Newton from the bracket start, bisection whenever a step escapes
    double lo = lo0, hi = hi0, flo = fa;
    double x = lo0, fx = fa;
    for (int it = 0; it < 32 && std::fabs(fx) > eps; it++)
    {
      const double der = dpoly(x);
      double xn = (der != 0.0) ? (x - fx / der) : 0.5 * (lo + hi);
      if (!(xn > lo && xn < hi))
        xn = 0.5 * (lo + hi);
      const double fn = poly(xn);
      if ((fn < 0.0) == (flo < 0.0))
      {
        lo = xn;
        flo = fn;
      }
      else
        hi = xn;
      x = xn;
      fx = fn;
    }
    sOut = x;
    return true;
  }

  if (std::fabs(poly(double(sMax))) < eps)
  {
    sOut = double(sMax);
    return true;
  }
  return false;
}

// ---- quantization -------------------------------------------------------

uint8_t svs_quantize(float v, float h)
{
  const float dMax = 1.73205081f * h;
  const float t = (v + dMax) * (255.0f / (2.0f * dMax));
  return uint8_t(std::clamp(int(std::lround(t)), 0, 255));
}

float svs_dequantize(uint8_t q, float h)
{
  const float dMax = 1.73205081f * h;
  return -dMax + 2.0f * dMax * (1.0f / 255.0f) * float(q);
}

// ---- octahedral normals -------------------------------------------------

float2 encode_normal(const float3& n)
{
  const float inv = 1.0f / (std::fabs(n.x) + std::fabs(n.y) + std::fabs(n.z));
  float ex = n.x * inv, ey = n.y * inv;
  if (n.z < 0.0f)
  {
    const float ox = ex;
    ex = (1.0f - std::fabs(ey)) * (ox >= 0.0f ? 1.0f : -1.0f);
    ey = (1.0f - std::fabs(ox)) * (ey >= 0.0f ? 1.0f : -1.0f);
  }
  return float2{ex, ey};
}

float3 decode_normal(const float2& e)
{
  float3 n{e.x, e.y, 1.0f - std::fabs(e.x) - std::fabs(e.y)};
  if (n.z < 0.0f)
  {
    const float ox = n.x;
    n.x = (1.0f - std::fabs(n.y)) * (ox >= 0.0f ? 1.0f : -1.0f);
    n.y = (1.0f - std::fabs(ox)) * (n.y >= 0.0f ? 1.0f : -1.0f);
  }
  return normalize(n);
}

} // namespace crt
