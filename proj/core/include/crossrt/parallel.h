#pragma once

#include "crossrt/aabb.h"

#include <cstddef>
#include <cstdint>
#include <vector>

#include <omp.h>

// Execution layer for the construction kernels. Every op launches a bulk
// data-parallel body with barrier semantics (the call returns only after all
// iterations finished) and is deterministic for a fixed input regardless of
// worker count: bodies write disjoint slots, reductions/scans fold fixed
// chunks in fixed order, and the sort is a data-independent bitonic network.
//
// The sequential reference path (ExecMode::Sequential) runs the same
// contracts with plain loops and is used as an in-repo oracle by the tests.

namespace crt
{

enum class ExecMode
{
  Parallel,   // OpenMP worker pool, capped by CROSSRT_THREADS if set
  Sequential  // single thread, reference semantics
};

void     set_exec_mode(ExecMode mode);
ExecMode exec_mode();

// Worker count for the parallel path: min(omp_get_max_threads(), CROSSRT_THREADS).
int worker_count();

struct MortonPair
{
  uint32_t code  = 0;  // 30-bit Morton code; 0xFFFFFFFF reserved for padding
  uint32_t index = 0;  // primitive index carried through the sort
};

inline bool operator==(const MortonPair& a, const MortonPair& b)
{
  return a.code == b.code && a.index == b.index;
}

// 64-bit comparison key: code in the high half, index breaks ties.
inline uint64_t packed_key(const MortonPair& p)
{
  return (uint64_t(p.code) << 32) | uint64_t(p.index);
}

template <typename Body>
void parallel_for(size_t begin, size_t end, Body body)
{
  if (begin >= end)
    return;
  if (exec_mode() == ExecMode::Sequential)
  {
    for (size_t i = begin; i < end; i++)
      body(i);
    return;
  }
  const int64_t first = int64_t(begin), last = int64_t(end);
  #pragma omp parallel for num_threads(worker_count()) schedule(static)
  for (int64_t i = first; i < last; i++)
    body(size_t(i));
}

// Bounds of all boxes; throws std::invalid_argument on an empty set.
AABB reduce_aabb(const std::vector<AABB>& boxes);

// Exclusive prefix sum; out[0] = 0, out[i] = sum of in[0..i-1]. Empty -> empty.
std::vector<uint32_t> exclusive_scan(const std::vector<uint32_t>& in);

// Stable key sort of (code, index) pairs by the packed 64-bit key. The
// parallel path pads to the next power of two with (0xFFFFFFFF, 0xFFFFFFFF)
// sentinels, runs a bitonic network, and truncates the sentinels off the
// tail before returning.
std::vector<MortonPair> bitonic_sort_pairs(std::vector<MortonPair> pairs);

} // namespace crt
