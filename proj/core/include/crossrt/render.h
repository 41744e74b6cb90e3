#pragma once

#include "crossrt/image.h"
#include "crossrt/scene.h"

#include <vector>

// Path-tracing renderer over a committed scene in two scheduling modes that
// produce bit-identical images: megakernel (whole path per loop iteration)
// and plain wavefront (generate/extend/shade/compact passes over a ray
// state array, one sample batch at a time). Shading and ray generation are
// shared code; only the scheduling differs.

namespace crt
{

enum class MaterialKind : uint32_t
{
  Lambert = 0,  // cosine-weighted diffuse bounce
  Mirror  = 1,  // perfect specular reflection
};

struct Material
{
  MaterialKind kind = MaterialKind::Lambert;
  float3 albedo{0.8f, 0.8f, 0.8f};
  float3 emission{0, 0, 0};
};

struct Camera
{
  float3 position{0, 0, 0};
  float3 target{0, 0, -1};
  float3 up{0, 1, 0};
  float  vfovDeg = 45.0f;
};

enum class RenderMode : uint32_t
{
  Megakernel = 0,
  Wavefront  = 1,
};

struct RenderConfig
{
  int width = 0, height = 0;
  int spp = 1;
  int maxBounces = 2;        // path segments traced per sample
  uint64_t seed = 0;
  float3 background{0, 0, 0};
  RenderMode mode = RenderMode::Megakernel;
};

// Per-path state marched by the wavefront passes (and, conceptually, by the
// megakernel loop); rngState caches the per-(pixel,sample) RNG base key.
struct RayState
{
  uint32_t pixelId = 0;
  Ray      ray;
  float3   throughput{1, 1, 1};
  float3   accumulated{0, 0, 0};
  uint32_t bounce = 0;
  uint64_t rngState = 0;
  uint8_t  alive = 0;
};

// Renders with cfg.mode; materials are indexed by geomId and must cover
// every geometry. Throws std::invalid_argument on zero resolution, spp < 1,
// maxBounces < 1, or missing materials.
Image render(const Scene& scene, const std::vector<Material>& materials, const Camera& cam,
             const RenderConfig& cfg);

// Explicit entry points for the two schedulers (render() forwards).
Image render_megakernel(const Scene& scene, const std::vector<Material>& materials,
                        const Camera& cam, const RenderConfig& cfg);
Image render_wavefront(const Scene& scene, const std::vector<Material>& materials,
                       const Camera& cam, const RenderConfig& cfg);

} // namespace crt
