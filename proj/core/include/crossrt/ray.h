#pragma once

#include "crossrt/cr_math.h"

namespace crt
{

// Ray with the near/far interval packed into the position/direction records.
struct Ray
{
  float4 posAndNear;  // xyz = origin,    w = tNear
  float4 dirAndFar;   // xyz = direction, w = tFar
};

inline Ray make_ray(const float3& origin, const float3& dir, float tNear, float tFar)
{
  return Ray{to_float4(origin, tNear), to_float4(dir, tFar)};
}

constexpr uint32_t kMissId = 0xFFFFFFFFu;

// Fixed hit record shared by every geometry type. A miss carries kMissId in
// all id fields and t == the ray's tFar. coords holds barycentric (u, v) for
// triangles and the octahedral-encoded surface normal for SDF hits.
struct CRT_Hit
{
  float    t      = 0.0f;
  uint32_t primId = kMissId;
  uint32_t geomId = kMissId;
  uint32_t instId = kMissId;
  float    coords[2] = {0.0f, 0.0f};

  bool is_miss() const { return primId == kMissId; }
};

inline CRT_Hit make_miss(float tFar)
{
  CRT_Hit h;
  h.t = tFar;
  return h;
}

// Identifies which BLAS leaf a dispatched intersector services. aabbId is
// the leaf node index inside the geometry's BLAS; the intersector reads the
// primitive range from that node.
struct CRT_LeafInfo
{
  uint32_t geomId = kMissId;
  uint32_t instId = kMissId;
  uint32_t aabbId = kMissId;
};

// Candidate ordering: nearer t wins; exact ties resolve by instance, then
// geometry, then primitive id, so traversal order can never leak into results.
inline bool hit_improves(float t, uint32_t instId, uint32_t geomId, uint32_t primId,
                         const CRT_Hit& best)
{
  if (t < best.t)
    return true;
  if (t > best.t)
    return false;
  if (best.is_miss())
    return true;
  if (instId != best.instId) return instId < best.instId;
  if (geomId != best.geomId) return geomId < best.geomId;
  return primId < best.primId;
}

} // namespace crt
