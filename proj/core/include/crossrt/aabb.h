#pragma once

#include "crossrt/cr_math.h"

#include <limits>

namespace crt
{

struct AABB
{
  float3 boxMin{+std::numeric_limits<float>::infinity(),
                +std::numeric_limits<float>::infinity(),
                +std::numeric_limits<float>::infinity()};
  float3 boxMax{-std::numeric_limits<float>::infinity(),
                -std::numeric_limits<float>::infinity(),
                -std::numeric_limits<float>::infinity()};

  bool empty() const { return boxMin.x > boxMax.x; }
  float3 center() const { return (boxMin + boxMax) * 0.5f; }
  float3 extent() const { return boxMax - boxMin; }
  float diagonal() const { return empty() ? 0.0f : length(boxMax - boxMin); }

  void include(const float3& p)
  {
    boxMin = min(boxMin, p);
    boxMax = max(boxMax, p);
  }
  void include(const AABB& b)
  {
    boxMin = min(boxMin, b.boxMin);
    boxMax = max(boxMax, b.boxMax);
  }
  bool contains(const AABB& b) const
  {
    return boxMin.x <= b.boxMin.x && boxMin.y <= b.boxMin.y && boxMin.z <= b.boxMin.z &&
           boxMax.x >= b.boxMax.x && boxMax.y >= b.boxMax.y && boxMax.z >= b.boxMax.z;
  }
  bool contains(const float3& p) const
  {
    return boxMin.x <= p.x && boxMin.y <= p.y && boxMin.z <= p.z &&
           boxMax.x >= p.x && boxMax.y >= p.y && boxMax.z >= p.z;
  }
};

inline AABB merge(const AABB& a, const AABB& b)
{
  AABB r = a;
  r.include(b);
  return r;
}

inline bool operator==(const AABB& a, const AABB& b)
{
  return a.boxMin == b.boxMin && a.boxMax == b.boxMax;
}

// Safe reciprocal for the slab test: +/-0 maps to +/-1e30-scale finite values
// so axis-parallel rays still produce valid (possibly infinite-free) slabs.
inline float3 safe_inverse(const float3& d)
{
  const float eps = 1e-30f;
  float3 r;
  r.x = (std::fabs(d.x) > eps) ? 1.0f / d.x : std::copysign(1.0f / eps, d.x);
  r.y = (std::fabs(d.y) > eps) ? 1.0f / d.y : std::copysign(1.0f / eps, d.y);
  r.z = (std::fabs(d.z) > eps) ? 1.0f / d.z : std::copysign(1.0f / eps, d.z);
  return r;
}

// Watertight slab test with precomputed inverse direction. Returns the
// clipped [tNear, tFar] overlap interval; hit iff first <= second.
inline float2 ray_box_interval(const float3& origin, const float3& invDir,
                               const float3& boxMin, const float3& boxMax,
                               float tNear, float tFar)
{
  const float lo_x = (boxMin.x - origin.x) * invDir.x;
  const float hi_x = (boxMax.x - origin.x) * invDir.x;
  const float lo_y = (boxMin.y - origin.y) * invDir.y;
  const float hi_y = (boxMax.y - origin.y) * invDir.y;
  const float lo_z = (boxMin.z - origin.z) * invDir.z;
  const float hi_z = (boxMax.z - origin.z) * invDir.z;

  const float tmin = std::max(std::max(std::min(lo_x, hi_x), std::min(lo_y, hi_y)),
                              std::max(std::min(lo_z, hi_z), tNear));
  const float tmax = std::min(std::min(std::max(lo_x, hi_x), std::max(lo_y, hi_y)),
                              std::min(std::max(lo_z, hi_z), tFar));
  return float2{tmin, tmax};
}

inline bool ray_box_hit(const float3& origin, const float3& invDir,
                        const AABB& box, float tNear, float tFar)
{
  const float2 t = ray_box_interval(origin, invDir, box.boxMin, box.boxMax, tNear, tFar);
  return t.x <= t.y;
}

} // namespace crt
