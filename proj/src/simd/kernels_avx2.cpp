#include <bit>

#include "thts/simd.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define THTS_X86 1
#include <immintrin.h>
#else
#define THTS_X86 0
#endif

namespace thts::simd::avx2 {

#if THTS_X86

#define THTS_AVX2 __attribute__((target("avx2,popcnt")))

THTS_AVX2 bool is_subset(const Word* a, const Word* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    // testc(vb, va) == 1 iff (~vb & va) == 0
    if (!_mm256_testc_si256(vb, va)) return false;
  }
  for (; i < n; ++i) {
    if ((a[i] & ~b[i]) != 0) return false;
  }
  return true;
}

THTS_AVX2 void apply(const Word* s, const Word* del, const Word* add, Word* out,
                     std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i vs = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(s + i));
    const __m256i vd = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(del + i));
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(add + i));
    const __m256i r = _mm256_or_si256(_mm256_andnot_si256(vd, vs), va);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), r);
  }
  for (; i < n; ++i) out[i] = (s[i] & ~del[i]) | add[i];
}

THTS_AVX2 std::size_t count_missing(const Word* goal, const Word* s,
                                    std::size_t n) {
  std::size_t count = 0;
  std::size_t i = 0;
  alignas(32) Word lanes[4];
  for (; i + 4 <= n; i += 4) {
    const __m256i vg = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(goal + i));
    const __m256i vs = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(s + i));
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), _mm256_andnot_si256(vs, vg));
    count += static_cast<std::size_t>(_mm_popcnt_u64(lanes[0]) + _mm_popcnt_u64(lanes[1]) +
                                      _mm_popcnt_u64(lanes[2]) + _mm_popcnt_u64(lanes[3]));
  }
  for (; i < n; ++i) {
    count += static_cast<std::size_t>(_mm_popcnt_u64(goal[i] & ~s[i]));
  }
  return count;
}

// Same operation order as the scalar reference: radicand = coef*lnT, then
// scaled by t, sqrt, times spread, times sign, plus center. No FMA.
THTS_AVX2 void bandit_indices(const double* center, const double* spread,
                              const double* pulls, std::size_t n,
                              const IndexParams& params, double* out) {
  const __m256d base = _mm256_set1_pd(params.coef * params.log_total);
  const __m256d sign = _mm256_set1_pd(params.sign);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d r = base;
    const __m256d t = _mm256_loadu_pd(pulls + i);
    if (params.scaling == PullScaling::kDivide) {
      r = _mm256_div_pd(r, t);
    } else if (params.scaling == PullScaling::kMultiply) {
      r = _mm256_mul_pd(r, t);
    }
    const __m256d radius = _mm256_mul_pd(_mm256_loadu_pd(spread + i), _mm256_sqrt_pd(r));
    const __m256d v = _mm256_add_pd(_mm256_loadu_pd(center + i), _mm256_mul_pd(sign, radius));
    _mm256_storeu_pd(out + i, v);
  }
  if (i < n) scalar::bandit_indices(center + i, spread + i, pulls + i, n - i, params, out + i);
}

#undef THTS_AVX2

#else

bool is_subset(const Word* a, const Word* b, std::size_t n) {
  return scalar::is_subset(a, b, n);
}
void apply(const Word* s, const Word* del, const Word* add, Word* out,
           std::size_t n) {
  scalar::apply(s, del, add, out, n);
}
std::size_t count_missing(const Word* goal, const Word* s, std::size_t n) {
  return scalar::count_missing(goal, s, n);
}
void bandit_indices(const double* center, const double* spread,
                    const double* pulls, std::size_t n,
                    const IndexParams& params, double* out) {
  scalar::bandit_indices(center, spread, pulls, n, params, out);
}

#endif

}  // namespace thts::simd::avx2
