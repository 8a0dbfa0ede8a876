#include <bit>
#include <cmath>

#include "thts/simd.hpp"

namespace thts::simd::scalar {

bool is_subset(const Word* a, const Word* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if ((a[i] & ~b[i]) != 0) return false;
  }
  return true;
}

void apply(const Word* s, const Word* del, const Word* add, Word* out,
           std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = (s[i] & ~del[i]) | add[i];
}

std::size_t count_missing(const Word* goal, const Word* s, std::size_t n) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    count += static_cast<std::size_t>(std::popcount(goal[i] & ~s[i]));
  }
  return count;
}

void bandit_indices(const double* center, const double* spread,
                    const double* pulls, std::size_t n,
                    const IndexParams& params, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double radius =
        spread[i] * std::sqrt(exploration_radicand(params, pulls[i]));
    out[i] = center[i] + params.sign * radius;
  }
}

}  // namespace thts::simd::scalar
