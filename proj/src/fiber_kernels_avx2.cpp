#include "nitiflex/fiber_kernels.hpp"

#if NITIFLEX_HAVE_AVX2_KERNEL

#include <immintrin.h>

#include <algorithm>
#include <cmath>

// Compiled for the baseline target; only these functions use AVX2/FMA, and
// the dispatcher calls them after a cpuid check.
#define NITIFLEX_AVX2 __attribute__((target("avx2,fma")))

namespace nitiflex::kernels {

namespace {

NITIFLEX_AVX2 inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

NITIFLEX_AVX2 FiberSums fiber_sums_avx2(const BilinearMaterial& mat, std::span<const double> y,
                                        std::span<const double> area, double kappa, double y0) {
  const std::size_t n = y.size();
  const std::size_t n4 = n & ~std::size_t{3};

  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const __m256d vk = _mm256_set1_pd(kappa);
  const __m256d vy0 = _mm256_set1_pd(y0);
  const __m256d vEn = _mm256_set1_pd(mat.En);
  const __m256d vdE = _mm256_set1_pd(mat.E - mat.En);
  const __m256d vepsl = _mm256_set1_pd(mat.eps_l);
  const __m256d half = _mm256_set1_pd(0.5);

  __m256d acc_n = _mm256_setzero_pd();
  __m256d acc_m = _mm256_setzero_pd();
  __m256d acc_u = _mm256_setzero_pd();

  for (std::size_t i = 0; i < n4; i += 4) {
    const __m256d arm = _mm256_sub_pd(_mm256_loadu_pd(y.data() + i), vy0);
    const __m256d ar = _mm256_loadu_pd(area.data() + i);
    const __m256d eps = _mm256_mul_pd(vk, arm);
    const __m256d a = _mm256_andnot_pd(sign_mask, eps);
    const __m256d m = _mm256_min_pd(a, vepsl);
    const __m256d mag = _mm256_fmadd_pd(vEn, a, _mm256_mul_pd(vdE, m));
    const __m256d sig = _mm256_or_pd(mag, _mm256_and_pd(sign_mask, eps));
    // u = 0.5*En*a*a + dE*(m*a - 0.5*m*m)
    const __m256d ma = _mm256_fnmadd_pd(_mm256_mul_pd(half, m), m, _mm256_mul_pd(m, a));
    const __m256d u = _mm256_fmadd_pd(_mm256_mul_pd(half, vEn), _mm256_mul_pd(a, a),
                                      _mm256_mul_pd(vdE, ma));
    const __m256d sa = _mm256_mul_pd(sig, ar);
    acc_n = _mm256_add_pd(acc_n, sa);
    acc_m = _mm256_fmadd_pd(sa, arm, acc_m);
    acc_u = _mm256_fmadd_pd(u, ar, acc_u);
  }

  FiberSums s{hsum(acc_n), hsum(acc_m), hsum(acc_u)};
  if (n4 < n) {
    const FiberSums tail =
        fiber_sums_scalar(mat, y.subspan(n4), area.subspan(n4), kappa, y0);
    s.axial += tail.axial;
    s.moment += tail.moment;
    s.energy += tail.energy;
  }
  return s;
}

NITIFLEX_AVX2 double axial_sum_avx2(const BilinearMaterial& mat, std::span<const double> y,
                                    std::span<const double> area, double kappa, double y0) {
  const std::size_t n = y.size();
  const std::size_t n4 = n & ~std::size_t{3};

  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const __m256d vk = _mm256_set1_pd(kappa);
  const __m256d vy0 = _mm256_set1_pd(y0);
  const __m256d vEn = _mm256_set1_pd(mat.En);
  const __m256d vdE = _mm256_set1_pd(mat.E - mat.En);
  const __m256d vepsl = _mm256_set1_pd(mat.eps_l);

  __m256d acc = _mm256_setzero_pd();
  for (std::size_t i = 0; i < n4; i += 4) {
    const __m256d eps = _mm256_mul_pd(vk, _mm256_sub_pd(_mm256_loadu_pd(y.data() + i), vy0));
    const __m256d a = _mm256_andnot_pd(sign_mask, eps);
    const __m256d mag = _mm256_fmadd_pd(vEn, a, _mm256_mul_pd(vdE, _mm256_min_pd(a, vepsl)));
    const __m256d sig = _mm256_or_pd(mag, _mm256_and_pd(sign_mask, eps));
    acc = _mm256_fmadd_pd(sig, _mm256_loadu_pd(area.data() + i), acc);
  }
  double total = hsum(acc);
  if (n4 < n) total += axial_sum_scalar(mat, y.subspan(n4), area.subspan(n4), kappa, y0);
  return total;
}

}  // namespace nitiflex::kernels

#endif  // NITIFLEX_HAVE_AVX2_KERNEL
