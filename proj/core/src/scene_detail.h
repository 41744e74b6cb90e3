#pragma once

#include "crossrt/scene.h"

// Internal bridge between scene.cpp (staging/commit) and traversal.cpp
// (walk + typed intersectors).

namespace crt
{

struct SceneTraversal
{
  static MonoLeafFn mono_fn(GeomType type);

  template <GeomType kType>
  static void mono_leaf(const Scene& scene, const CRT_LeafInfo& info, const float3& o,
                        const float3& d, float tNear, CRT_Hit& best)
  {
    scene.leaf_dispatch_typed(kType, info, o, d, tNear, best);
  }
};

} // namespace crt
