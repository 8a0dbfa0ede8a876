#pragma once

// Data-parallel kernels used on the hot paths of the planner:
//   - fact bitsets (subset test, STRIPS application, missing-goal count)
//   - batched bandit index evaluation over the children of one tree node
//
// Every kernel has a scalar reference in namespace `scalar` and an AVX2
// variant in namespace `avx2`. `kernels()` returns the table selected at
// startup from CPUID; THTS_SIMD=scalar in the environment forces the
// reference path.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace thts::simd {

using Word = std::uint64_t;

/// Shape of the exploration radicand: k * ln T, optionally divided or
/// multiplied by the arm's pull count t.
enum class PullScaling : std::uint8_t { kNone, kDivide, kMultiply };

/// Batched index parameters. For arm i:
///   out[i] = center[i] + sign * (spread[i] * sqrt(r_i))
/// where r_i = coef * log_total, then /t[i] or *t[i] per `scaling`.
struct IndexParams {
  double coef = 2.0;
  double log_total = 0.0;
  double sign = 1.0;
  PullScaling scaling = PullScaling::kDivide;
};

struct KernelTable {
  std::string_view name;
  /// a ⊆ b over n words.
  bool (*is_subset)(const Word* a, const Word* b, std::size_t n);
  /// out = (s & ~del) | add.
  void (*apply)(const Word* s, const Word* del, const Word* add, Word* out,
                std::size_t n);
  /// popcount(goal & ~s).
  std::size_t (*count_missing)(const Word* goal, const Word* s, std::size_t n);
  void (*bandit_indices)(const double* center, const double* spread,
                         const double* pulls, std::size_t n,
                         const IndexParams& params, double* out);
};

namespace scalar {
bool is_subset(const Word* a, const Word* b, std::size_t n);
void apply(const Word* s, const Word* del, const Word* add, Word* out,
           std::size_t n);
std::size_t count_missing(const Word* goal, const Word* s, std::size_t n);
void bandit_indices(const double* center, const double* spread,
                    const double* pulls, std::size_t n,
                    const IndexParams& params, double* out);
}  // namespace scalar

namespace avx2 {
bool is_subset(const Word* a, const Word* b, std::size_t n);
void apply(const Word* s, const Word* del, const Word* add, Word* out,
           std::size_t n);
std::size_t count_missing(const Word* goal, const Word* s, std::size_t n);
void bandit_indices(const double* center, const double* spread,
                    const double* pulls, std::size_t n,
                    const IndexParams& params, double* out);
}  // namespace avx2

const KernelTable& scalar_kernels();
const KernelTable& avx2_kernels();
bool cpu_has_avx2();

/// Active table. Resolved once; thread-safe.
const KernelTable& kernels();

/// Exploration term for one arm, shared by the scalar kernel and the
/// single-arm index functions so they round identically.
inline double exploration_radicand(const IndexParams& p, double pulls) {
  double r = p.coef * p.log_total;
  switch (p.scaling) {
    case PullScaling::kDivide: r = r / pulls; break;
    case PullScaling::kMultiply: r = r * pulls; break;
    case PullScaling::kNone: break;
  }
  return r;
}

}  // namespace thts::simd
