#pragma once

#include <cmath>
#include <cstdint>
#include <algorithm>

// Small self-contained vector/matrix math for the kernel library. Kept plain
// (no templates, value semantics) so the same code reads naturally next to
// shader-style kernels.

namespace crt
{

struct float2
{
  float x = 0.0f, y = 0.0f;
};

struct float3
{
  float x = 0.0f, y = 0.0f, z = 0.0f;
  float&       operator[](int i)       { return (&x)[i]; }
  const float& operator[](int i) const { return (&x)[i]; }
};

struct float4
{
  float x = 0.0f, y = 0.0f, z = 0.0f, w = 0.0f;
  float&       operator[](int i)       { return (&x)[i]; }
  const float& operator[](int i) const { return (&x)[i]; }
};

struct int3
{
  int x = 0, y = 0, z = 0;
  int&       operator[](int i)       { return (&x)[i]; }
  const int& operator[](int i) const { return (&x)[i]; }
};

struct uint3
{
  uint32_t x = 0, y = 0, z = 0;
  uint32_t&       operator[](int i)       { return (&x)[i]; }
  const uint32_t& operator[](int i) const { return (&x)[i]; }
};

inline float3 make_float3(float x, float y, float z) { return float3{x, y, z}; }
inline float4 make_float4(float x, float y, float z, float w) { return float4{x, y, z, w}; }
inline float4 to_float4(const float3& v, float w) { return float4{v.x, v.y, v.z, w}; }
inline float3 to_float3(const float4& v) { return float3{v.x, v.y, v.z}; }

inline float3 operator+(const float3& a, const float3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline float3 operator-(const float3& a, const float3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline float3 operator*(const float3& a, const float3& b) { return {a.x * b.x, a.y * b.y, a.z * b.z}; }
inline float3 operator/(const float3& a, const float3& b) { return {a.x / b.x, a.y / b.y, a.z / b.z}; }
inline float3 operator*(const float3& a, float s) { return {a.x * s, a.y * s, a.z * s}; }
inline float3 operator*(float s, const float3& a) { return a * s; }
inline float3 operator/(const float3& a, float s) { return {a.x / s, a.y / s, a.z / s}; }
inline float3 operator-(const float3& a) { return {-a.x, -a.y, -a.z}; }
inline float3& operator+=(float3& a, const float3& b) { a = a + b; return a; }
inline float3& operator*=(float3& a, const float3& b) { a = a * b; return a; }
inline float3& operator*=(float3& a, float s) { a = a * s; return a; }
inline bool operator==(const float3& a, const float3& b) { return a.x == b.x && a.y == b.y && a.z == b.z; }

inline float dot(const float3& a, const float3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline float3 cross(const float3& a, const float3& b)
{
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline float length(const float3& v) { return std::sqrt(dot(v, v)); }
inline float3 normalize(const float3& v) { return v / length(v); }

inline float3 min(const float3& a, const float3& b)
{
  return {std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)};
}
inline float3 max(const float3& a, const float3& b)
{
  return {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)};
}
inline float3 clamp(const float3& v, float lo, float hi)
{
  return {std::clamp(v.x, lo, hi), std::clamp(v.y, lo, hi), std::clamp(v.z, lo, hi)};
}
inline float3 abs(const float3& v) { return {std::fabs(v.x), std::fabs(v.y), std::fabs(v.z)}; }
inline float3 lerp(const float3& a, const float3& b, float t) { return a + (b - a) * t; }

// Row-major 4x4; transforms act on column vectors (p' = M * p).
struct float4x4
{
  float m[16] = {1, 0, 0, 0,
                 0, 1, 0, 0,
                 0, 0, 1, 0,
                 0, 0, 0, 1};

  float&       operator()(int row, int col)       { return m[row * 4 + col]; }
  const float& operator()(int row, int col) const { return m[row * 4 + col]; }
};

inline float4x4 operator*(const float4x4& a, const float4x4& b)
{
  float4x4 r;
  for (int i = 0; i < 4; i++)
    for (int j = 0; j < 4; j++)
    {
      float s = 0.0f;
      for (int k = 0; k < 4; k++)
        s += a(i, k) * b(k, j);
      r(i, j) = s;
    }
  return r;
}

// transform a point (w = 1)
inline float3 mul_point(const float4x4& m, const float3& p)
{
  return {m(0, 0) * p.x + m(0, 1) * p.y + m(0, 2) * p.z + m(0, 3),
          m(1, 0) * p.x + m(1, 1) * p.y + m(1, 2) * p.z + m(1, 3),
          m(2, 0) * p.x + m(2, 1) * p.y + m(2, 2) * p.z + m(2, 3)};
}

// transform a direction (w = 0); deliberately unnormalized so ray t keeps meaning
inline float3 mul_dir(const float4x4& m, const float3& d)
{
  return {m(0, 0) * d.x + m(0, 1) * d.y + m(0, 2) * d.z,
          m(1, 0) * d.x + m(1, 1) * d.y + m(1, 2) * d.z,
          m(2, 0) * d.x + m(2, 1) * d.y + m(2, 2) * d.z};
}

inline float4x4 translate4x4(const float3& t)
{
  float4x4 r;
  r(0, 3) = t.x; r(1, 3) = t.y; r(2, 3) = t.z;
  return r;
}

inline float4x4 scale4x4(const float3& s)
{
  float4x4 r;
  r(0, 0) = s.x; r(1, 1) = s.y; r(2, 2) = s.z;
  return r;
}

inline float4x4 rotate_y4x4(float angleRad)
{
  float4x4 r;
  const float c = std::cos(angleRad), s = std::sin(angleRad);
  r(0, 0) = c;  r(0, 2) = s;
  r(2, 0) = -s; r(2, 2) = c;
  return r;
}

inline float4x4 transpose(const float4x4& a)
{
  float4x4 r;
  for (int i = 0; i < 4; i++)
    for (int j = 0; j < 4; j++)
      r(i, j) = a(j, i);
  return r;
}

float4x4 inverse4x4(const float4x4& a);        // throws std::invalid_argument if singular
bool     try_inverse4x4(const float4x4& a, float4x4& out);

} // namespace crt
