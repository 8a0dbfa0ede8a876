#include <cstdlib>
#include <string_view>

#include "thts/simd.hpp"

namespace thts::simd {

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", &scalar::is_subset, &scalar::apply,
                                 &scalar::count_missing, &scalar::bandit_indices};
  return table;
}

const KernelTable& avx2_kernels() {
  static const KernelTable table{"avx2", &avx2::is_subset, &avx2::apply,
                                 &avx2::count_missing, &avx2::bandit_indices};
  return table;
}

bool cpu_has_avx2() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("popcnt");
#else
  return false;
#endif
}

namespace {

const KernelTable& resolve() {
  if (const char* forced = std::getenv("THTS_SIMD")) {
    if (std::string_view(forced) == "scalar") return scalar_kernels();
  }
  return cpu_has_avx2() ? avx2_kernels() : scalar_kernels();
}

}  // namespace

const KernelTable& kernels() {
  static const KernelTable& active = resolve();
  return active;
}

}  // namespace thts::simd
