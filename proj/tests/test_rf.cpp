#include "doctest.h"
#include "test_helpers.h"

using namespace crt;

TEST_CASE("rf_build keeps exactly the cells above the threshold, in lattice order")
{
  const RFGridData data = tu::random_rf(int3{5, 6, 4}, 11, 0.5f);
  const RFGrid rf = rf_build(data, data.threshold);

  std::vector<RFVoxel> expect;
  for (int z = 0; z < data.dims.z; z++)
    for (int y = 0; y < data.dims.y; y++)
      for (int x = 0; x < data.dims.x; x++)
      {
        const float4& c =
            data.cells[size_t(x) + size_t(data.dims.x) * (size_t(y) + size_t(data.dims.y) * z)];
        if (c.x > data.threshold)
          expect.push_back(RFVoxel{uint3{uint32_t(x), uint32_t(y), uint32_t(z)}, c.x,
                                   float3{c.y, c.z, c.w}});
      }
  REQUIRE(rf.voxels.size() == expect.size());
  REQUIRE(!rf.voxels.empty());
  for (size_t i = 0; i < expect.size(); i++)
  {
    CHECK(rf.voxels[i].pos.x == expect[i].pos.x);
    CHECK(rf.voxels[i].pos.y == expect[i].pos.y);
    CHECK(rf.voxels[i].pos.z == expect[i].pos.z);
    CHECK(rf.voxels[i].density == expect[i].density);
    CHECK(rf.voxels[i].color == expect[i].color);
  }
}

TEST_CASE("rf_build puts every voxel in its own leaf")
{
  const RFGridData data = tu::random_rf(int3{8, 8, 8}, 23, 0.5f);
  const RFGrid rf = rf_build(data, data.threshold);

  CHECK(tu::check_tree_invariants(rf.bvh, rf.voxels.size()) == "");
  CHECK(tu::check_refit_oracle(rf.bvh) == "");
  CHECK(size_t(rf.bvh.leaf_count()) == rf.voxels.size());

  const uint32_t leafOffset = rf.bvh.leaf_count() - 1;
  for (uint32_t i = leafOffset; i < rf.bvh.nodes.size(); i++)
  {
    const BVHNode& leaf = rf.bvh.nodes[i];
    CHECK(leaf.primCount == 1);
    const uint3 p = rf.voxels[rf.bvh.primIndices[leaf.firstPrim]].pos;
    CHECK(leaf.bounds.boxMin == float3{float(p.x), float(p.y), float(p.z)});
    CHECK(leaf.bounds.boxMax == float3{float(p.x + 1), float(p.y + 1), float(p.z + 1)});
  }
}

TEST_CASE("rf_build validates its input")
{
  RFGridData data = tu::random_rf(int3{4, 4, 4}, 3, 0.5f);

  SUBCASE("no cell above threshold")
  {
    CHECK_THROWS_WITH_AS(rf_build(data, 100.0f), doctest::Contains("empty field"),
                         std::invalid_argument);
  }
  SUBCASE("cell count mismatch")
  {
    data.cells.pop_back();
    CHECK_THROWS_AS(rf_build(data, 0.5f), std::invalid_argument);
  }
  SUBCASE("degenerate dims")
  {
    data.dims = int3{0, 4, 4};
    CHECK_THROWS_AS(rf_build(data, 0.5f), std::invalid_argument);
  }
}

TEST_CASE("rf_render_ray matches the gather-and-composite oracle bit-exactly")
{
  for (uint64_t seed : {101u, 202u, 303u})
  {
    const RFGridData data = tu::random_rf(int3{16, 16, 16}, seed, 0.5f);
    const RFGrid rf = rf_build(data, data.threshold);

    int nonTrivial = 0;
    for (uint64_t k = 0; k < 400; k++)
    {
      // origins on a shell around the lattice, directions toward random targets
      const float ang = tu::urand(seed + 7, k, 0) * 6.2831853f;
      const float3 o{8.0f + 30.0f * std::cos(ang), 2.0f + 28.0f * tu::urand(seed + 7, k, 1),
                     8.0f + 30.0f * std::sin(ang)};
      const float3 target{16.0f * tu::urand(seed + 7, k, 2), 16.0f * tu::urand(seed + 7, k, 3),
                          16.0f * tu::urand(seed + 7, k, 4)};
      const Ray ray = make_ray(o, normalize(target - o), 0.0f, 1e8f);

      const RFSample got = rf_render_ray(rf, ray);
      const RFSample want = tu::rf_oracle_sample(rf, ray);
      CHECK(got.color == want.color);
      CHECK(got.transmittance == want.transmittance);
      if (got.transmittance < 1.0f)
        nonTrivial++;
    }
    CHECK(nonTrivial > 300);  // the batch must actually traverse voxels
  }
}

TEST_CASE("high-density voxels saturate the march early")
{
  RFGridData data;
  data.dims = int3{4, 1, 1};
  data.threshold = 0.0f;
  data.cells = {float4{200.0f, 1.0f, 0.0f, 0.0f}, float4{200.0f, 0.0f, 1.0f, 0.0f},
                float4{200.0f, 0.0f, 0.0f, 1.0f}, float4{200.0f, 1.0f, 1.0f, 1.0f}};
  const RFGrid rf = rf_build(data, 0.0f);

  const Ray ray = make_ray(float3{-1.0f, 0.5f, 0.5f}, float3{1, 0, 0}, 0.0f, 100.0f);
  const RFSample got = rf_render_ray(rf, ray);
  CHECK(got.transmittance < 1e-4f);
  // the first voxel absorbs essentially everything, so its color dominates
  CHECK(got.color.x == doctest::Approx(1.0f).epsilon(1e-3));
  CHECK(got.color.y == doctest::Approx(0.0f).epsilon(1e-3));
  // and the oracle mirrors the early exit
  const RFSample want = tu::rf_oracle_sample(rf, ray);
  CHECK(got.color == want.color);
  CHECK(got.transmittance == want.transmittance);
}

TEST_CASE("a ray that misses every voxel keeps full transmittance")
{
  const RFGridData data = tu::random_rf(int3{4, 4, 4}, 9, 0.5f);
  const RFGrid rf = rf_build(data, data.threshold);
  const Ray ray = make_ray(float3{-5.0f, -5.0f, 0.5f}, float3{0, 0, 1}, 0.0f, 100.0f);
  const RFSample s = rf_render_ray(rf, ray);
  CHECK(s.transmittance == 1.0f);
  CHECK(s.color == float3{0, 0, 0});
}

TEST_CASE("rf_render_ray rejects invalid rays")
{
  const RFGridData data = tu::random_rf(int3{4, 4, 4}, 9, 0.5f);
  const RFGrid rf = rf_build(data, data.threshold);
  const float nan = std::numeric_limits<float>::quiet_NaN();
  CHECK_THROWS_AS(rf_render_ray(rf, make_ray(float3{0, 0, 0}, float3{0, 0, 0}, 0, 1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(rf_render_ray(rf, make_ray(float3{0, 0, 0}, float3{1, 0, 0}, -1, 1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(rf_render_ray(rf, make_ray(float3{0, 0, 0}, float3{1, 0, 0}, 2, 1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(rf_render_ray(rf, make_ray(float3{nan, 0, 0}, float3{1, 0, 0}, 0, 1)),
                  std::invalid_argument);
}

TEST_CASE("radiance voxels answer ray queries with the box entry point")
{
  const RFGridData data = tu::random_rf(int3{8, 8, 8}, 31, 0.5f);
  const RFGrid rf = rf_build(data, data.threshold);

  Scene scene;
  scene.AddInstance(scene.AddGeometry(rf), float4x4{});
  scene.Commit(DispatchLevel::Two);

  int hits = 0;
  for (uint64_t k = 0; k < 200; k++)
  {
    const float ang = tu::urand(40, k, 0) * 6.2831853f;
    const float3 o{4.0f + 20.0f * std::cos(ang), 8.0f * tu::urand(40, k, 1),
                   4.0f + 20.0f * std::sin(ang)};
    const float3 target{8.0f * tu::urand(40, k, 2), 8.0f * tu::urand(40, k, 3),
                        8.0f * tu::urand(40, k, 4)};
    const float3 d = normalize(target - o);
    const Ray ray = make_ray(o, d, 0.0f, 1e8f);
    const CRT_Hit hit = scene.RayQuery_NearestHit(ray);

    // oracle: nearest box entry over all voxels, smallest voxel id on ties
    const float3 invD = safe_inverse(d);
    CRT_Hit want = make_miss(1e8f);
    for (uint32_t v = 0; v < rf.voxels.size(); v++)
    {
      const uint3 p = rf.voxels[v].pos;
      const float3 bmin{float(p.x), float(p.y), float(p.z)};
      const float2 iv = ray_box_interval(o, invD, bmin, bmin + float3{1, 1, 1}, 0.0f, want.t);
      if (iv.x > iv.y)
        continue;
      if (hit_improves(iv.x, 0, 0, v, want))
      {
        want.t = iv.x;
        want.primId = v;
        want.geomId = 0;
        want.instId = 0;
      }
    }
    if (!hit.is_miss())
      hits++;
    CHECK(hit.primId == want.primId);
    CHECK(hit.t == want.t);
  }
  CHECK(hits > 150);
}
