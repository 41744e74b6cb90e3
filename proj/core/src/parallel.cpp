#include "crossrt/parallel.h"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace crt
{

static ExecMode g_execMode = ExecMode::Parallel;

void     set_exec_mode(ExecMode mode) { g_execMode = mode; }
ExecMode exec_mode() { return g_execMode; }

int worker_count()
{
  static const int cap = []() {
    if (const char* env = std::getenv("CROSSRT_THREADS"))
    {
      const long n = std::strtol(env, nullptr, 10);
      if (n >= 1)
        return int(n);
    }
    return 0; // no cap
  }();
  const int hw = omp_get_max_threads();
  return (cap > 0) ? std::min(hw, cap) : hw;
}

AABB reduce_aabb(const std::vector<AABB>& boxes)
{
  if (boxes.empty())
    throw std::invalid_argument("reduce_aabb: empty primitive set");

  if (exec_mode() == ExecMode::Sequential)
  {
    AABB total;
    for (const AABB& b : boxes)
      total.include(b);
    return total;
  }

  // fixed chunking -> per-chunk partials -> ordered fold; the grouping does
  // not depend on the worker count, so min/max results are exact either way
  const size_t n = boxes.size();
  const size_t chunk = std::max<size_t>(1024, (n + 63) / 64);
  const size_t numChunks = (n + chunk - 1) / chunk;
  std::vector<AABB> partial(numChunks);
  parallel_for(0, numChunks, [&](size_t c) {
    AABB acc;
    const size_t lo = c * chunk, hi = std::min(n, lo + chunk);
    for (size_t i = lo; i < hi; i++)
      acc.include(boxes[i]);
    partial[c] = acc;
  });
  AABB total;
  for (const AABB& b : partial)
    total.include(b);
  return total;
}

std::vector<uint32_t> exclusive_scan(const std::vector<uint32_t>& in)
{
  std::vector<uint32_t> out(in.size());
  if (in.empty())
    return out;

  if (exec_mode() == ExecMode::Sequential || in.size() < 4096)
  {
    uint32_t run = 0;
    for (size_t i = 0; i < in.size(); i++)
    {
      out[i] = run;
      run += in[i];
    }
    return out;
  }

  // two-pass chunked scan: local sums, scan of chunk totals, local rescan
  const size_t n = in.size();
  const size_t chunk = std::max<size_t>(1024, (n + 63) / 64);
  const size_t numChunks = (n + chunk - 1) / chunk;
  std::vector<uint32_t> chunkSum(numChunks);
  parallel_for(0, numChunks, [&](size_t c) {
    const size_t lo = c * chunk, hi = std::min(n, lo + chunk);
    uint32_t s = 0;
    for (size_t i = lo; i < hi; i++)
      s += in[i];
    chunkSum[c] = s;
  });
  std::vector<uint32_t> chunkBase(numChunks);
  uint32_t run = 0;
  for (size_t c = 0; c < numChunks; c++)
  {
    chunkBase[c] = run;
    run += chunkSum[c];
  }
  parallel_for(0, numChunks, [&](size_t c) {
    const size_t lo = c * chunk, hi = std::min(n, lo + chunk);
    uint32_t s = chunkBase[c];
    for (size_t i = lo; i < hi; i++)
    {
      out[i] = s;
      s += in[i];
    }
  });
  return out;
}

std::vector<MortonPair> bitonic_sort_pairs(std::vector<MortonPair> pairs)
{
  const size_t n = pairs.size();
  if (n <= 1)
    return pairs;

  if (exec_mode() == ExecMode::Sequential)
  {
    std::stable_sort(pairs.begin(), pairs.end(), [](const MortonPair& a, const MortonPair& b) {
      return packed_key(a) < packed_key(b);
    });
    return pairs;
  }

  // pad to a power of two with max-key sentinels; they sink to the tail
  const size_t m = std::bit_ceil(n);
  pairs.resize(m, MortonPair{0xFFFFFFFFu, 0xFFFFFFFFu});

  // classic bitonic network; each (i, i^j) lane pair is touched by exactly
  // one iteration, so writes are disjoint and the schedule is irrelevant
  for (size_t k = 2; k <= m; k <<= 1)
  {
    for (size_t j = k >> 1; j > 0; j >>= 1)
    {
      parallel_for(0, m, [&](size_t i) {
        const size_t l = i ^ j;
        if (l <= i)
          return;
        const bool ascending = (i & k) == 0;
        const uint64_t ki = packed_key(pairs[i]);
        const uint64_t kl = packed_key(pairs[l]);
        if ((ki > kl) == ascending)
          std::swap(pairs[i], pairs[l]);
      });
    }
  }

  pairs.resize(n); // sentinels occupy [n, m)
  return pairs;
}

} // namespace crt
