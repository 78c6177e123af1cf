#include "qdreach/kernels.hpp"

#include <cstdlib>

namespace qdreach::kernels {

#if !defined(QDREACH_HAVE_AVX2_BUILD)
const Ops* avx2_ops() { return nullptr; }
#endif
#if !defined(QDREACH_HAVE_NEON_BUILD)
const Ops* neon_ops() { return nullptr; }
#endif

const Ops& ops() {
  static const Ops& chosen = []() -> const Ops& {
    if (const char* force = std::getenv("QDREACH_FORCE_SCALAR"); force && *force)
      return scalar_ops();
    if (const Ops* o = avx2_ops()) return *o;
    if (const Ops* o = neon_ops()) return *o;
    return scalar_ops();
  }();
  return chosen;
}

}  // namespace qdreach::kernels
