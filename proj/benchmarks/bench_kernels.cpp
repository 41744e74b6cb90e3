#include <benchmark/benchmark.h>

#include "crossrt/lbvh.h"
#include "crossrt/parallel.h"
#include "crossrt/rng.h"
#include "crossrt/scene.h"
#include "crossrt/sdf.h"

#include <vector>

// Microbenchmarks for the hot kernels: sort, scan, LBVH build, traversal,
// Newton cell intersection. Run ./crossrt_bench; not part of ctest.

namespace
{

using namespace crt;

std::vector<AABB> random_boxes(size_t n)
{
  std::vector<AABB> boxes(n);
  for (size_t i = 0; i < n; i++)
  {
    const float3 c{rng_float(i, 0), rng_float(i, 1), rng_float(i, 2)};
    const float3 h{0.002f, 0.002f, 0.002f};
    boxes[i].include(c - h);
    boxes[i].include(c + h);
  }
  return boxes;
}

void BM_BitonicSort(benchmark::State& state)
{
  const size_t n = size_t(state.range(0));
  std::vector<MortonPair> src(n);
  for (size_t i = 0; i < n; i++)
    src[i] = MortonPair{uint32_t(hash_mix64(i) & 0x3FFFFFFFu), uint32_t(i)};
  for (auto _ : state)
  {
    std::vector<MortonPair> pairs = bitonic_sort_pairs(src);
    benchmark::DoNotOptimize(pairs.data());
  }
  state.SetItemsProcessed(int64_t(state.iterations()) * int64_t(n));
}
BENCHMARK(BM_BitonicSort)->Arg(1 << 12)->Arg(1 << 16)->Arg(1 << 18);

void BM_ExclusiveScan(benchmark::State& state)
{
  const size_t n = size_t(state.range(0));
  std::vector<uint32_t> src(n, 1);
  for (auto _ : state)
  {
    std::vector<uint32_t> sums = exclusive_scan(src);
    benchmark::DoNotOptimize(sums.data());
  }
  state.SetItemsProcessed(int64_t(state.iterations()) * int64_t(n));
}
BENCHMARK(BM_ExclusiveScan)->Arg(1 << 14)->Arg(1 << 20);

void BM_LbvhBuild(benchmark::State& state)
{
  const std::vector<AABB> boxes = random_boxes(size_t(state.range(0)));
  for (auto _ : state)
  {
    const LBVHTree tree = build_from_boxes(boxes);
    benchmark::DoNotOptimize(tree.nodes.data());
  }
  state.SetItemsProcessed(int64_t(state.iterations()) * state.range(0));
}
BENCHMARK(BM_LbvhBuild)->Arg(1 << 12)->Arg(1 << 16)->Arg(1 << 18);

void BM_Traversal(benchmark::State& state)
{
  // grid of tiny triangles; rays shot straight through the slab
  const int side = int(state.range(0));
  TriangleMesh mesh;
  for (int y = 0; y < side; y++)
    for (int x = 0; x < side; x++)
    {
      const float fx = float(x) / float(side), fy = float(y) / float(side);
      const float s = 0.8f / float(side);
      const uint32_t base = uint32_t(mesh.vertices.size());
      mesh.vertices.push_back(float3{fx, fy, 0.5f});
      mesh.vertices.push_back(float3{fx + s, fy, 0.5f});
      mesh.vertices.push_back(float3{fx, fy + s, 0.5f});
      mesh.indices.insert(mesh.indices.end(), {base, base + 1, base + 2});
    }
  Scene scene;
  scene.AddInstance(scene.AddGeometry(std::move(mesh)), float4x4{});
  scene.Commit(DispatchLevel::Two);

  std::vector<Ray> rays(4096);
  for (size_t i = 0; i < rays.size(); i++)
    rays[i] = make_ray(float3{rng_float(i, 0), rng_float(i, 1), -1.0f},
                       float3{0, 0, 1}, 0.0f, 10.0f);

  for (auto _ : state)
    for (const Ray& ray : rays)
    {
      const CRT_Hit hit = scene.RayQuery_NearestHit(ray);
      benchmark::DoNotOptimize(hit.t);
    }
  state.SetItemsProcessed(int64_t(state.iterations()) * int64_t(rays.size()));
}
BENCHMARK(BM_Traversal)->Arg(32)->Arg(128);

void BM_NewtonCell(benchmark::State& state)
{
  // sphere-ish cell: field crosses zero inside
  const float corners[8] = {0.3f, 0.1f, -0.2f, -0.4f, 0.2f, -0.1f, -0.3f, -0.5f};
  const float3 o{0.05f, 0.1f, 0.0f};
  const float3 d{0.57735f, 0.57735f, 0.57735f};
  for (auto _ : state)
  {
    double s = 0.0;
    const bool hit = newton_intersect_cell(corners, o, d, 1.5f, s);
    benchmark::DoNotOptimize(hit);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_NewtonCell);

} // namespace

BENCHMARK_MAIN();
