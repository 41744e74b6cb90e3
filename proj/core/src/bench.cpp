#include "crossrt/bench.h"

#include "crossrt/obj_loader.h"
#include "crossrt/scene.h"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace crt
{

static double median(std::vector<double> v)
{
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

template <typename F>
static double time_ms(F&& f)
{
  const auto t0 = std::chrono::steady_clock::now();
  f();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

std::string run_bench(const BenchConfig& cfg)
{
  if (cfg.reps < 1)
    throw std::invalid_argument("run_bench: reps must be at least 1");

  std::ostringstream csv;
  csv << "scene,primitives,buildMs,traceMs,raysPerSec\n";

  for (const std::string& path : cfg.scenePaths)
  {
    const TriangleMesh mesh = load_obj(path);
    std::vector<AABB> boxes(mesh.triangle_count());
    for (size_t t = 0; t < boxes.size(); t++)
    {
      AABB b;
      b.include(mesh.vertices[mesh.indices[3 * t + 0]]);
      b.include(mesh.vertices[mesh.indices[3 * t + 1]]);
      b.include(mesh.vertices[mesh.indices[3 * t + 2]]);
      boxes[t] = b;
    }

    std::vector<double> buildTimes(cfg.reps);
    for (int r = 0; r < cfg.reps; r++)
      buildTimes[r] = time_ms([&]() { (void)build_from_boxes(boxes); });

    Scene scene;
    scene.AddInstance(scene.AddGeometry(mesh), float4x4{});
    scene.Commit(DispatchLevel::Two);

    // primary rays from an auto-framed viewpoint along the bounds diagonal
    const AABB wb = scene.geometry_bounds(0);
    const float3 center = wb.center();
    const float3 eye = center + wb.extent() * 1.2f + float3{1e-3f, 2e-3f, 3e-3f};
    const float3 fwd = normalize(center - eye);
    const float3 right = normalize(cross(fwd, float3{0, 1, 0}));
    const float3 up = cross(right, fwd);
    const float dist = 2.0f * wb.diagonal();

    const int side = cfg.raysPerSide;
    std::vector<Ray> rays(size_t(side) * side);
    for (int y = 0; y < side; y++)
      for (int x = 0; x < side; x++)
      {
        const float sx = (float(x) + 0.5f) / float(side) * 2.0f - 1.0f;
        const float sy = 1.0f - (float(y) + 0.5f) / float(side) * 2.0f;
        const float3 dir = normalize(fwd + right * (0.5f * sx) + up * (0.5f * sy));
        rays[size_t(y) * side + x] = make_ray(eye, dir, 0.0f, 4.0f * dist);
      }

    std::vector<double> traceTimes(cfg.reps);
    for (int r = 0; r < cfg.reps; r++)
      traceTimes[r] = time_ms([&]() {
        for (const Ray& ray : rays)
          (void)scene.RayQuery_NearestHit(ray);
      });

    const double buildMs = median(buildTimes);
    const double traceMs = median(traceTimes);
    const double raysPerSec = (traceMs > 0.0) ? double(rays.size()) / (traceMs / 1000.0) : 0.0;

    csv << path << "," << mesh.triangle_count() << "," << std::fixed << std::setprecision(3)
        << buildMs << "," << traceMs << "," << std::setprecision(0) << raysPerSec << "\n";
  }
  return csv.str();
}

} // namespace crt
