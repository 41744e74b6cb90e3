#include "crossrt/render.h"

#include "crossrt/parallel.h"
#include "crossrt/rng.h"

#include <cmath>
#include <stdexcept>

namespace crt
{

static constexpr float kCameraTFar = 1e8f;
static constexpr float kOriginOffset = 1e-4f;

namespace
{

struct CameraBasis
{
  float3 pos, right, upv, fwd;
  float tanHalf = 0.0f, aspect = 1.0f;
  int width = 0, height = 0;
};

} // namespace

static CameraBasis make_basis(const Camera& cam, const RenderConfig& cfg)
{
  CameraBasis b;
  b.pos = cam.position;
  b.fwd = normalize(cam.target - cam.position);
  b.right = normalize(cross(b.fwd, cam.up));
  b.upv = cross(b.right, b.fwd);
  b.tanHalf = std::tan(cam.vfovDeg * float(M_PI) / 360.0f);
  b.aspect = float(cfg.width) / float(cfg.height);
  b.width = cfg.width;
  b.height = cfg.height;
  return b;
}

static RayState generate_state(const CameraBasis& cb, const RenderConfig& cfg,
                               uint32_t pixelId, uint32_t sampleId)
{
  const int x = int(pixelId) % cb.width;
  const int y = int(pixelId) / cb.width;
  const uint64_t base = rng_base(cfg.seed, pixelId, sampleId);
  const float jx = rng_float(base, 0) - 0.5f;
  const float jy = rng_float(base, 1) - 0.5f;
  const float ndcX = ((float(x) + 0.5f + jx) / float(cb.width)) * 2.0f - 1.0f;
  const float ndcY = 1.0f - ((float(y) + 0.5f + jy) / float(cb.height)) * 2.0f;
  const float3 dir = normalize(cb.fwd + cb.right * (ndcX * cb.tanHalf * cb.aspect) +
                               cb.upv * (ndcY * cb.tanHalf));

  RayState st;
  st.pixelId = pixelId;
  st.ray = make_ray(cb.pos, dir, 0.0f, kCameraTFar);
  st.throughput = float3{1, 1, 1};
  st.accumulated = float3{0, 0, 0};
  st.bounce = 0;
  st.rngState = base;
  st.alive = 1;
  return st;
}

// One shading event; shared verbatim by both schedulers so the only thing
// that can differ between modes is scheduling, never arithmetic.
static void shade_step(const Scene& scene, const std::vector<Material>& materials,
                       const RenderConfig& cfg, RayState& st, const CRT_Hit& hit)
{
  if (hit.is_miss())
  {
    st.accumulated += st.throughput * cfg.background;
    st.alive = 0;
    return;
  }

  const Material& mat = materials[hit.geomId];
  st.accumulated += st.throughput * mat.emission;
  st.bounce++;
  if (st.bounce >= uint32_t(cfg.maxBounces))
  {
    st.alive = 0;
    return;
  }

  const float3 d = to_float3(st.ray.dirAndFar);
  const float3 dn = normalize(d);
  const InstanceRecord& inst = scene.instance(hit.instId);
  float3 n = normalize(mul_dir(transpose(inst.objectFromWorld), scene.shading_normal(hit)));
  if (dot(n, dn) > 0.0f)
    n = -n;
  const float3 p = to_float3(st.ray.posAndNear) + d * hit.t;

  float3 newDir;
  if (mat.kind == MaterialKind::Mirror)
    newDir = dn - n * (2.0f * dot(dn, n));
  else
  {
    // cosine-weighted hemisphere; dims 2+2b / 3+2b for path segment b
    const uint32_t b = st.bounce - 1;
    const float u1 = rng_float(st.rngState, 2 + 2 * b);
    const float u2 = rng_float(st.rngState, 3 + 2 * b);
    float3 t;
    if (std::fabs(n.z) < 0.999f)
      t = normalize(cross(float3{0, 0, 1}, n));
    else
      t = float3{1, 0, 0};
    const float3 bv = cross(n, t);
    const float phi = 2.0f * float(M_PI) * u1;
    const float r = std::sqrt(u2);
    newDir = t * (r * std::cos(phi)) + bv * (r * std::sin(phi)) + n * std::sqrt(1.0f - u2);
  }
  st.throughput *= mat.albedo;
  st.ray = make_ray(p + n * kOriginOffset, newDir, 0.0f, kCameraTFar);
}

static void validate(const Scene& scene, const std::vector<Material>& materials,
                     const RenderConfig& cfg)
{
  if (!scene.committed())
    throw std::runtime_error("render: scene not committed");
  if (cfg.width < 1 || cfg.height < 1)
    throw std::invalid_argument("render: zero resolution");
  if (cfg.spp < 1)
    throw std::invalid_argument("render: spp must be at least 1");
  if (cfg.maxBounces < 1)
    throw std::invalid_argument("render: maxBounces must be at least 1");
  if (materials.size() < scene.geometry_count())
    throw std::invalid_argument("render: one material per geometry required");
}

Image render_megakernel(const Scene& scene, const std::vector<Material>& materials,
                        const Camera& cam, const RenderConfig& cfg)
{
  validate(scene, materials, cfg);
  const CameraBasis cb = make_basis(cam, cfg);
  Image img(cfg.width, cfg.height);
  const size_t npix = img.pixels.size();

  parallel_for(0, npix, [&](size_t p) {
    float3 sum{0, 0, 0};
    for (int s = 0; s < cfg.spp; s++)
    {
      RayState st = generate_state(cb, cfg, uint32_t(p), uint32_t(s));
      while (st.alive)
      {
        const CRT_Hit hit = scene.RayQuery_NearestHit(st.ray);
        shade_step(scene, materials, cfg, st, hit);
      }
      sum += st.accumulated;
    }
    img.pixels[p] = sum / float(cfg.spp);
  });
  return img;
}

Image render_wavefront(const Scene& scene, const std::vector<Material>& materials,
                       const Camera& cam, const RenderConfig& cfg)
{
  validate(scene, materials, cfg);
  const CameraBasis cb = make_basis(cam, cfg);
  Image img(cfg.width, cfg.height);
  const size_t npix = img.pixels.size();

  std::vector<RayState> states, next;
  std::vector<CRT_Hit> hits;
  std::vector<uint32_t> flags;

  // one batch per sample: every pixel contributes exactly one state, so all
  // framebuffer writes inside a batch touch distinct pixels
  for (int s = 0; s < cfg.spp; s++)
  {
    states.resize(npix);
    parallel_for(0, npix, [&](size_t p) {
      states[p] = generate_state(cb, cfg, uint32_t(p), uint32_t(s));
    });

    while (!states.empty())
    {
      const size_t n = states.size();
      hits.resize(n);
      parallel_for(0, n, [&](size_t i) {  // extend: trace everything
        hits[i] = scene.RayQuery_NearestHit(states[i].ray);
      });
      parallel_for(0, n, [&](size_t i) {  // shade: may retire the state
        shade_step(scene, materials, cfg, states[i], hits[i]);
        if (!states[i].alive)
          img.pixels[states[i].pixelId] += states[i].accumulated;
      });

      // compact: scan alive flags, scatter the survivors
      flags.resize(n);
      parallel_for(0, n, [&](size_t i) { flags[i] = states[i].alive ? 1u : 0u; });
      const std::vector<uint32_t> offsets = exclusive_scan(flags);
      const size_t alive = offsets.empty() ? 0 : offsets.back() + flags.back();
      next.resize(alive);
      parallel_for(0, n, [&](size_t i) {
        if (flags[i])
          next[offsets[i]] = states[i];
      });
      std::swap(states, next);
    }
  }

  parallel_for(0, npix, [&](size_t p) { img.pixels[p] = img.pixels[p] / float(cfg.spp); });
  return img;
}

Image render(const Scene& scene, const std::vector<Material>& materials, const Camera& cam,
             const RenderConfig& cfg)
{
  return (cfg.mode == RenderMode::Wavefront) ? render_wavefront(scene, materials, cam, cfg)
                                             : render_megakernel(scene, materials, cam, cfg);
}

} // namespace crt
