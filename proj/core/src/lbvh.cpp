#include "crossrt/lbvh.h"

#include <atomic>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace crt
{

static uint32_t spread_bits(uint32_t x)
{
  x &= 0x000003FFu;
  x = (x | (x << 16)) & 0x030000FFu;
  x = (x | (x << 8))  & 0x0300F00Fu;
  x = (x | (x << 4))  & 0x030C30C3u;
  x = (x | (x << 2))  & 0x09249249u;
  return x;
}

uint32_t morton3d(uint32_t x, uint32_t y, uint32_t z)
{
  return spread_bits(x) | (spread_bits(y) << 1) | (spread_bits(z) << 2);
}

std::vector<MortonPair> compute_morton_codes(const std::vector<AABB>& boxes,
                                             const AABB& sceneBounds)
{
  std::vector<MortonPair> pairs(boxes.size());
  const float3 mn = sceneBounds.boxMin;
  const float3 ext = sceneBounds.extent();
  parallel_for(0, boxes.size(), [&](size_t i) {
    const float3 c = boxes[i].center();
    uint32_t q[3];
    for (int a = 0; a < 3; a++)
    {
      const float e = ext[a];
      q[a] = (e > 0.0f) ? std::min(1023u, uint32_t(((c[a] - mn[a]) / e) * 1024.0f)) : 0u;
    }
    pairs[i] = MortonPair{morton3d(q[0], q[1], q[2]), uint32_t(i)};
  });
  return pairs;
}

LeafBuildResult build_leaves(const std::vector<MortonPair>& sortedPairs,
                             const std::vector<AABB>& boxes)
{
  LeafBuildResult out;
  const size_t n = sortedPairs.size();
  if (n == 0)
    return out;

  // flag run starts, scan flags into leaf slots, scatter run offsets
  std::vector<uint32_t> flags(n);
  parallel_for(0, n, [&](size_t i) {
    flags[i] = (i == 0 || sortedPairs[i].code != sortedPairs[i - 1].code) ? 1u : 0u;
  });
  const std::vector<uint32_t> offsets = exclusive_scan(flags);
  const uint32_t leafCount = offsets[n - 1] + flags[n - 1];

  std::vector<uint32_t> leafStart(leafCount);
  out.uniqueCodes.resize(leafCount);
  out.primIndices.resize(n);
  parallel_for(0, n, [&](size_t i) {
    if (flags[i])
    {
      leafStart[offsets[i]]       = uint32_t(i);
      out.uniqueCodes[offsets[i]] = sortedPairs[i].code;
    }
    out.primIndices[i] = sortedPairs[i].index;
  });

  out.leaves.resize(leafCount);
  parallel_for(0, leafCount, [&](size_t j) {
    const uint32_t start = leafStart[j];
    const uint32_t end   = (j + 1 < leafCount) ? leafStart[j + 1] : uint32_t(n);
    AABB bounds;
    for (uint32_t k = start; k < end; k++)
      bounds.include(boxes[out.primIndices[k]]);
    BVHNode node;
    node.bounds    = bounds;
    node.firstPrim = start;
    node.primCount = end - start;
    out.leaves[j] = node;
  });
  return out;
}

// Common-prefix length of keys at i and j; -1 outside the valid range.
// Keys are strictly increasing, so equal keys never occur for i != j.
template <typename K>
static inline int64_t key_delta(const std::vector<K>& keys, int64_t i, int64_t j)
{
  if (j < 0 || j >= int64_t(keys.size()))
    return -1;
  return int64_t(std::countl_zero(keys[size_t(i)] ^ keys[size_t(j)]));
}

template <typename K>
static void emit_radix_links(const std::vector<K>& keys, std::vector<BVHNode>& nodes)
{
  const int64_t L = int64_t((nodes.size() + 1) / 2);
  const int64_t leafOffset = L - 1;
  parallel_for(0, size_t(L - 1), [&](size_t idx) {
    const int64_t i = int64_t(idx);
    const int64_t d = (key_delta(keys, i, i + 1) > key_delta(keys, i, i - 1)) ? 1 : -1;
    const int64_t deltaMin = key_delta(keys, i, i - d);

    int64_t lmax = 2;
    while (key_delta(keys, i, i + lmax * d) > deltaMin)
      lmax <<= 1;

    int64_t l = 0;
    for (int64_t t = lmax >> 1; t >= 1; t >>= 1)
      if (key_delta(keys, i, i + (l + t) * d) > deltaMin)
        l += t;
    const int64_t j = i + l * d;

    const int64_t deltaNode = key_delta(keys, i, j);
    int64_t s = 0;
    int64_t t = l;
    do
    {
      t = (t + 1) >> 1;
      if (key_delta(keys, i, i + (s + t) * d) > deltaNode)
        s += t;
    } while (t > 1);

    const int64_t gamma = i + s * d + std::min<int64_t>(d, 0);
    BVHNode& node = nodes[idx];
    node.left      = uint32_t((std::min(i, j) == gamma)     ? leafOffset + gamma     : gamma);
    node.right     = uint32_t((std::max(i, j) == gamma + 1) ? leafOffset + gamma + 1 : gamma + 1);
    node.firstPrim = 0;
    node.primCount = 0;
    node.bounds    = AABB{};
  });
}

template <typename K>
static LBVHTree build_hierarchy_impl(const std::vector<K>& keys,
                                     const std::vector<BVHNode>& leaves)
{
  if (keys.size() != leaves.size())
    throw std::invalid_argument("build_hierarchy_karras: key/leaf count mismatch");
  for (size_t i = 1; i < keys.size(); i++)
    if (keys[i] <= keys[i - 1])
      throw std::invalid_argument("build_hierarchy_karras: keys must be strictly increasing");

  LBVHTree tree;
  const size_t L = leaves.size();
  if (L == 0)
    return tree;

  tree.nodes.resize(2 * L - 1);
  parallel_for(0, L, [&](size_t i) { tree.nodes[L - 1 + i] = leaves[i]; });
  if (L > 1)
    emit_radix_links(keys, tree.nodes);
  tree.root = 0;
  return tree;
}

LBVHTree build_hierarchy_karras(const std::vector<uint32_t>& uniqueCodes,
                                const std::vector<BVHNode>& leaves)
{
  return build_hierarchy_impl(uniqueCodes, leaves);
}

LBVHTree build_hierarchy_karras(const std::vector<uint64_t>& uniqueKeys,
                                const std::vector<BVHNode>& leaves)
{
  return build_hierarchy_impl(uniqueKeys, leaves);
}

void refit(LBVHTree& tree, int maxPasses)
{
  const uint32_t L = tree.leaf_count();
  if (L <= 1)
    return;
  const uint32_t internals = L - 1;

  // double-buffered done flags: a node closes a pass only from children that
  // finished in strictly earlier passes, which keeps every pass race-free
  // and the pass count equal to the tree height
  std::vector<uint8_t> donePrev(internals, 0), doneNext(internals, 0);
  const auto ready = [&](uint32_t c) { return c >= internals || donePrev[c] != 0; };

  for (int pass = 0; pass < maxPasses; pass++)
  {
    std::atomic<uint32_t> completed{0};
    parallel_for(0, internals, [&](size_t i) {
      if (donePrev[i])
      {
        doneNext[i] = 1;
        return;
      }
      BVHNode& node = tree.nodes[i];
      if (ready(node.left) && ready(node.right))
      {
        node.bounds = merge(tree.nodes[node.left].bounds, tree.nodes[node.right].bounds);
        doneNext[i] = 1;
        completed.fetch_add(1, std::memory_order_relaxed);
      }
      else
        doneNext[i] = 0;
    });
    if (completed.load() == 0)
      break;
    std::swap(donePrev, doneNext);
  }

  for (uint32_t i = 0; i < internals; i++)
    if (!donePrev[i])
      throw std::runtime_error("refit: bounds propagation did not converge (malformed tree)");
}

LBVHTree build_from_boxes(const std::vector<AABB>& boxes)
{
  if (boxes.empty())
    throw std::invalid_argument("build_from_boxes: empty primitive set");
  for (const AABB& b : boxes)
  {
    const bool finite = std::isfinite(b.boxMin.x) && std::isfinite(b.boxMin.y) &&
                        std::isfinite(b.boxMin.z) && std::isfinite(b.boxMax.x) &&
                        std::isfinite(b.boxMax.y) && std::isfinite(b.boxMax.z);
    if (!finite || b.empty())
      throw std::invalid_argument("build_from_boxes: non-finite or inverted box");
  }

  const AABB scene = reduce_aabb(boxes);
  const std::vector<MortonPair> sorted = bitonic_sort_pairs(compute_morton_codes(boxes, scene));
  LeafBuildResult lr = build_leaves(sorted, boxes);
  LBVHTree tree = build_hierarchy_karras(lr.uniqueCodes, lr.leaves);
  tree.primIndices = std::move(lr.primIndices);
  refit(tree);
  return tree;
}

} // namespace crt
