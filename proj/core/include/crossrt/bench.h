#pragma once

#include <string>
#include <vector>

namespace crt
{

struct BenchConfig
{
  std::vector<std::string> scenePaths;  // OBJ files
  int reps = 5;                         // repetitions per measurement (median reported)
  int raysPerSide = 256;                // primary-ray grid is raysPerSide^2
};

// Build + trace timing per scene. Returns CSV text with the header
// "scene,primitives,buildMs,traceMs,raysPerSec"; an empty scene list yields
// just the header. Non-timing columns are deterministic.
std::string run_bench(const BenchConfig& cfg);

} // namespace crt
