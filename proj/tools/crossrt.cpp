#include "CLI11.hpp"

#include "crossrt/bench.h"
#include "crossrt/obj_loader.h"
#include "crossrt/parallel.h"
#include "crossrt/render.h"
#include "crossrt/rf_grid.h"
#include "crossrt/scene.h"
#include "crossrt/sdf.h"
#include "crossrt/serial.h"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

// crossrt CLI. Exit codes: 0 success, 1 bad usage, 2 data/runtime errors.

namespace
{

using namespace crt;

struct Resolution
{
  int width = 512, height = 512;
};

Resolution parse_res(const std::string& s)
{
  Resolution r;
  char sep = 0;
  std::istringstream in(s);
  if (!(in >> r.width >> sep >> r.height) || sep != 'x' || r.width < 1 || r.height < 1)
    throw CLI::ValidationError("--res", "expected WxH, e.g. 512x512");
  return r;
}

DispatchLevel parse_level(int level)
{
  switch (level)
  {
    case 0: return DispatchLevel::Zero;
    case 1: return DispatchLevel::One;
    case 2: return DispatchLevel::Two;
    default: throw CLI::ValidationError("--dispatch", "expected 0, 1 or 2");
  }
}

Camera frame_box(const AABB& box)
{
  Camera cam;
  cam.target = box.center();
  cam.position = cam.target + normalize(float3{0.6f, 0.45f, 0.9f}) * (1.4f * box.diagonal());
  return cam;
}

// Pinhole ray through a pixel center, matching the renderer's convention
// (row 0 at the top, vertical fov).
Ray primary_ray(const Camera& cam, int x, int y, int w, int h, float tFar)
{
  const float3 fwd = normalize(cam.target - cam.position);
  const float3 right = normalize(cross(fwd, cam.up));
  const float3 up = cross(right, fwd);
  const float tanF = std::tan(cam.vfovDeg * float(M_PI) / 360.0f);
  const float aspect = float(w) / float(h);
  const float ndcX = (2.0f * (float(x) + 0.5f) / float(w) - 1.0f) * aspect * tanF;
  const float ndcY = (1.0f - 2.0f * (float(y) + 0.5f) / float(h)) * tanF;
  return make_ray(cam.position, normalize(fwd + right * ndcX + up * ndcY), 0.0f, tFar);
}

void write_image(const Image& img, const std::string& path)
{
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".img") == 0)
    save_img1(img, path);
  else
    save_ppm(img, path);
}

void emit_text(const std::string& text, const std::string& outPath)
{
  if (outPath.empty())
  {
    std::cout << text;
    return;
  }
  std::ofstream out(outPath);
  if (!out)
    throw std::runtime_error(outPath + ": cannot open");
  out << text;
}

int cmd_build_bvh(const std::string& scenePath, const std::string& outPath)
{
  const TriangleMesh mesh = load_obj(scenePath);
  std::vector<AABB> boxes(mesh.triangle_count());
  for (size_t t = 0; t < boxes.size(); t++)
  {
    AABB b;
    b.include(mesh.vertices[mesh.indices[3 * t + 0]]);
    b.include(mesh.vertices[mesh.indices[3 * t + 1]]);
    b.include(mesh.vertices[mesh.indices[3 * t + 2]]);
    boxes[t] = b;
  }
  const LBVHTree tree = build_from_boxes(boxes);
  save_bvh(tree, outPath);
  std::cout << "built " << tree.leaf_count() << " leaves over " << boxes.size()
            << " primitives -> " << outPath << "\n";
  return 0;
}

int cmd_trace(const std::string& scenePath, const std::string& raysPath,
              const std::string& outPath, int level)
{
  const DispatchLevel dispatch = parse_level(level);
  Scene scene;
  scene.AddInstance(scene.AddGeometry(load_obj(scenePath)), float4x4{});
  scene.Commit(dispatch);

  const std::vector<Ray> rays = load_rays(raysPath);
  std::vector<CRT_Hit> hits(rays.size());
  parallel_for(0, rays.size(),
               [&](size_t i) { hits[i] = scene.RayQuery_NearestHit(rays[i]); });
  save_hits(hits, outPath);

  size_t hitCount = 0;
  for (const CRT_Hit& h : hits)
    hitCount += h.is_miss() ? 0 : 1;
  std::cout << hitCount << "/" << rays.size() << " rays hit -> " << outPath << "\n";
  return 0;
}

int cmd_render(const std::string& scenePath, const std::string& outPath,
               const std::string& modeName, int spp, const Resolution& res,
               uint64_t seed, int bounces, int level)
{
  RenderConfig cfg;
  cfg.width = res.width;
  cfg.height = res.height;
  cfg.spp = spp;
  cfg.maxBounces = bounces;
  cfg.seed = seed;
  cfg.background = float3{0.7f, 0.8f, 0.9f};
  if (modeName == "mega")
    cfg.mode = RenderMode::Megakernel;
  else if (modeName == "wavefront")
    cfg.mode = RenderMode::Wavefront;
  else
    throw CLI::ValidationError("--mode", "expected 'mega' or 'wavefront'");

  Scene scene;
  scene.AddInstance(scene.AddGeometry(load_obj(scenePath)), float4x4{});
  scene.Commit(parse_level(level));

  const std::vector<Material> materials(1, Material{});
  const Image img = render(scene, materials, frame_box(scene.geometry_bounds(0)), cfg);
  write_image(img, outPath);
  std::cout << "rendered " << res.width << "x" << res.height << " @ " << spp
            << " spp -> " << outPath << "\n";
  return 0;
}

int cmd_sdf_render(const std::string& sdfPath, const std::string& outPath, const Resolution& res)
{
  const std::string magic = read_magic(sdfPath);
  Scene scene;
  if (magic == "SDFG")
    scene.AddInstance(scene.AddGeometry(load_sdf_grid(sdfPath)), float4x4{});
  else if (magic == "SVS1")
    scene.AddInstance(scene.AddGeometry(load_svs(sdfPath)), float4x4{});
  else if (magic == "SBS1")
    scene.AddInstance(scene.AddGeometry(load_sbs(sdfPath)), float4x4{});
  else
    throw std::runtime_error(sdfPath + ": not an SDF container (magic '" + magic + "')");
  scene.Commit(DispatchLevel::Two);

  const Camera cam = frame_box(AABB{float3{0, 0, 0}, float3{1, 1, 1}});
  const float3 lightDir = normalize(float3{-0.4f, -1.0f, -0.3f});

  Image img(res.width, res.height);
  parallel_for(0, size_t(res.width) * size_t(res.height), [&](size_t p) {
    const int x = int(p % size_t(res.width)), y = int(p / size_t(res.width));
    const Ray ray = primary_ray(cam, x, y, res.width, res.height, 1e8f);
    const CRT_Hit hit = scene.RayQuery_NearestHit(ray);
    if (hit.is_miss())
    {
      img.at(x, y) = float3{0.1f, 0.1f, 0.12f};
      return;
    }
    const float3 n = scene.shading_normal(hit);
    const float diffuse = std::max(dot(n, lightDir * -1.0f), 0.0f);
    img.at(x, y) = float3{0.15f, 0.15f, 0.15f} + float3{0.8f, 0.8f, 0.8f} * diffuse;
  });
  write_image(img, outPath);
  std::cout << "rendered " << magic << " field -> " << outPath << "\n";
  return 0;
}

int cmd_rf_render(const std::string& rfPath, const std::string& outPath, const Resolution& res)
{
  const RFGridData data = load_rf_grid(rfPath);
  const RFGrid rf = rf_build(data, data.threshold);

  AABB domain;
  domain.include(float3{0, 0, 0});
  domain.include(float3{float(rf.dims.x), float(rf.dims.y), float(rf.dims.z)});
  const Camera cam = frame_box(domain);
  const float3 bg{0.05f, 0.05f, 0.07f};

  Image img(res.width, res.height);
  parallel_for(0, size_t(res.width) * size_t(res.height), [&](size_t p) {
    const int x = int(p % size_t(res.width)), y = int(p / size_t(res.width));
    const Ray ray = primary_ray(cam, x, y, res.width, res.height, 1e8f);
    const RFSample s = rf_render_ray(rf, ray);
    img.at(x, y) = s.color + bg * s.transmittance;
  });
  write_image(img, outPath);
  std::cout << "rendered radiance field (" << rf.voxels.size() << " voxels) -> "
            << outPath << "\n";
  return 0;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"crossrt: LBVH build, two-level traversal, SDF and radiance-field rendering"};
  app.require_subcommand(1);

  std::string scenePath, outPath, raysPath, sdfPath, rfPath;
  std::string modeName = "mega";
  std::string resText = "512x512";
  std::vector<std::string> benchScenes;
  int spp = 16, bounces = 2, level = 2, reps = 5, raysPerSide = 256;
  uint64_t seed = 0;

  CLI::App* buildCmd = app.add_subcommand("build-bvh", "build an LBVH over an OBJ mesh");
  buildCmd->add_option("--scene", scenePath, "OBJ mesh")->required();
  buildCmd->add_option("--out", outPath, "output LBVH container")->required();

  CLI::App* traceCmd = app.add_subcommand("trace", "trace a ray batch against an OBJ mesh");
  traceCmd->add_option("--scene", scenePath, "OBJ mesh")->required();
  traceCmd->add_option("--rays", raysPath, "RAYS container")->required();
  traceCmd->add_option("--out", outPath, "output HITS container")->required();
  traceCmd->add_option("--dispatch", level, "leaf dispatch level (0, 1 or 2)");

  CLI::App* renderCmd = app.add_subcommand("render", "path-trace an OBJ mesh");
  renderCmd->add_option("--scene", scenePath, "OBJ mesh")->required();
  renderCmd->add_option("--out", outPath, "output image (.ppm or .img)")->required();
  renderCmd->add_option("--mode", modeName, "scheduler: mega or wavefront");
  renderCmd->add_option("--spp", spp, "samples per pixel");
  renderCmd->add_option("--res", resText, "resolution WxH");
  renderCmd->add_option("--seed", seed, "RNG seed");
  renderCmd->add_option("--bounces", bounces, "path segments per sample");
  renderCmd->add_option("--dispatch", level, "leaf dispatch level (0, 1 or 2)");

  CLI::App* sdfCmd = app.add_subcommand("sdf-render", "shade an SDF container (SDFG/SVS1/SBS1)");
  sdfCmd->add_option("--sdf", sdfPath, "SDF container")->required();
  sdfCmd->add_option("--out", outPath, "output image (.ppm or .img)")->required();
  sdfCmd->add_option("--res", resText, "resolution WxH");

  CLI::App* rfCmd = app.add_subcommand("rf-render", "composite a radiance-field grid (RFG1)");
  rfCmd->add_option("--rf", rfPath, "RFG1 container")->required();
  rfCmd->add_option("--out", outPath, "output image (.ppm or .img)")->required();
  rfCmd->add_option("--res", resText, "resolution WxH");

  CLI::App* benchCmd = app.add_subcommand("bench", "build/trace timings as CSV");
  benchCmd->add_option("--scene", benchScenes, "OBJ mesh (repeatable)")->required();
  benchCmd->add_option("--reps", reps, "repetitions per measurement (median)");
  benchCmd->add_option("--rays-per-side", raysPerSide, "primary-ray grid side");
  benchCmd->add_option("--out", outPath, "CSV file (default: stdout)");

  try
  {
    app.parse(argc, argv);

    if (buildCmd->parsed())
      return cmd_build_bvh(scenePath, outPath);
    if (traceCmd->parsed())
      return cmd_trace(scenePath, raysPath, outPath, level);
    if (renderCmd->parsed())
      return cmd_render(scenePath, outPath, modeName, spp, parse_res(resText), seed,
                        bounces, level);
    if (sdfCmd->parsed())
      return cmd_sdf_render(sdfPath, outPath, parse_res(resText));
    if (rfCmd->parsed())
      return cmd_rf_render(rfPath, outPath, parse_res(resText));
    if (benchCmd->parsed())
    {
      BenchConfig cfg;
      cfg.scenePaths = benchScenes;
      cfg.reps = reps;
      cfg.raysPerSide = raysPerSide;
      emit_text(run_bench(cfg), outPath);
      return 0;
    }
    return 1;
  }
  catch (const CLI::ParseError& e)
  {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  catch (const std::exception& e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
