#pragma once

#include "crossrt/parallel.h"

#include <vector>

// Parallel LBVH construction: Morton codes over primitive centroids, bitonic
// key sort, run-length leaf grouping (equal codes collapse into one leaf),
// binary radix-tree hierarchy emission, bottom-up bounds refit.

namespace crt
{

constexpr uint32_t kInvalidIndex = 0xFFFFFFFFu;

struct BVHNode
{
  AABB     bounds;
  uint32_t left      = kInvalidIndex;  // kInvalidIndex marks a leaf
  uint32_t right     = kInvalidIndex;
  uint32_t firstPrim = 0;              // leaf: range start in primIndices
  uint32_t primCount = 0;              // leaf: range length; 0 on internals

  bool is_leaf() const { return left == kInvalidIndex; }
};

// Node layout for L leaves: internals occupy [0, L-1), leaves [L-1, 2L-1);
// the root is node 0 (a single-leaf tree is just [leaf], root 0).
struct LBVHTree
{
  std::vector<BVHNode>  nodes;
  std::vector<uint32_t> primIndices;  // sorted primitive order, leaf ranges index here
  uint32_t              root = 0;

  uint32_t leaf_count() const { return uint32_t((nodes.size() + 1) / 2); }
};

// 30-bit Morton code from 10-bit lattice coordinates; x occupies the lowest
// interleave slot: bit pattern ...z2 y2 x2 z1 y1 x1 z0 y0 x0.
uint32_t morton3d(uint32_t x, uint32_t y, uint32_t z);

// Quantize box centroids onto the 1024^3 lattice of sceneBounds and emit
// (code, primitiveIndex) pairs. Degenerate scene axes quantize to slot 0.
std::vector<MortonPair> compute_morton_codes(const std::vector<AABB>& boxes,
                                             const AABB& sceneBounds);

struct LeafBuildResult
{
  std::vector<BVHNode>  leaves;       // one per distinct code, boxes merged
  std::vector<uint32_t> uniqueCodes;  // strictly increasing
  std::vector<uint32_t> primIndices;  // primitive ids in sorted order
};

// Group sorted pairs into leaves: every run of equal codes becomes a single
// leaf whose range covers the run. Each primitive lands in exactly one leaf.
LeafBuildResult build_leaves(const std::vector<MortonPair>& sortedPairs,
                             const std::vector<AABB>& boxes);

// Emit the radix-tree topology over strictly increasing codes (one internal
// node per adjacent leaf pair, split at the highest differing bit) and place
// the given leaves into the canonical layout. Bounds of internal nodes stay
// empty until refit. The 64-bit overload serves build pipelines that append
// tie-break bits below the Morton code.
LBVHTree build_hierarchy_karras(const std::vector<uint32_t>& uniqueCodes,
                                const std::vector<BVHNode>& leaves);
LBVHTree build_hierarchy_karras(const std::vector<uint64_t>& uniqueKeys,
                                const std::vector<BVHNode>& leaves);

// Bottom-up bounds propagation in bulk passes: a node completes once both
// children completed in earlier passes. Early exit when a pass completes
// nothing; throws std::runtime_error if nodes remain after maxPasses.
void refit(LBVHTree& tree, int maxPasses = 32);

// Full pipeline: reduce -> codes -> sort -> leaves -> hierarchy -> refit.
// Throws std::invalid_argument on an empty or non-finite box set.
LBVHTree build_from_boxes(const std::vector<AABB>& boxes);

} // namespace crt
