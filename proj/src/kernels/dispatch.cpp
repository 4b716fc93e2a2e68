#include <cstdlib>
#include <string_view>

#include "kernels_impl.hpp"

namespace probesched::kernels {

namespace {

constexpr KernelTable kScalar{"scalar", &set_masses_scalar, &set_terms_scalar};

#if defined(PROBESCHED_BUILD_AVX2)
constexpr KernelTable kAvx2{"avx2", &set_masses_avx2, &set_terms_avx2};
#endif

const KernelTable& select() {
  const KernelTable* best = avx2();
  if (const char* forced = std::getenv("PROBESCHED_KERNEL")) {
    const std::string_view name(forced);
    if (name == "scalar") return kScalar;
    if (name == "avx2" && best != nullptr) return *best;
  }
  return best != nullptr ? *best : kScalar;
}

}  // namespace

const KernelTable& scalar() { return kScalar; }

const KernelTable* avx2() {
#if defined(PROBESCHED_BUILD_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &kAvx2 : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace probesched::kernels
