// SPDX-License-Identifier: Apache-2.0
// AVX2 kernel variants. This translation unit is compiled with -mavx2 and is
// only entered through the dispatch table after a runtime CPU check.
#include "frictionnet/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include <cmath>

namespace frictionnet::kernels {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double sum_avx2(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double tail = 0.0;
  for (; i < n; ++i) tail += x[i];
  return hsum(acc) + tail;
}

void scale_avx2(double* x, std::size_t n, double factor) {
  const __m256d f = _mm256_set1_pd(factor);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), f));
  for (; i < n; ++i) x[i] *= factor;
}

double hellinger_avx2(const double* p, const double* q, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d =
        _mm256_sub_pd(_mm256_sqrt_pd(_mm256_loadu_pd(p + i)), _mm256_sqrt_pd(_mm256_loadu_pd(q + i)));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double tail = 0.0;
  for (; i < n; ++i) {
    const double d = std::sqrt(p[i]) - std::sqrt(q[i]);
    tail += d * d;
  }
  const double h = std::sqrt(0.5 * (hsum(acc) + tail));
  return h > 1.0 ? 1.0 : h;
}

void hellinger_to_delta_avx2(const double* q, double* out, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_sub_pd(one, _mm256_sqrt_pd(_mm256_loadu_pd(q + i)));
    _mm256_storeu_pd(out + i, _mm256_sqrt_pd(_mm256_max_pd(v, zero)));
  }
  for (; i < n; ++i) {
    const double v = 1.0 - std::sqrt(q[i]);
    out[i] = std::sqrt(v > 0.0 ? v : 0.0);
  }
}

// The Wasserstein kernels are dominated by a sequential prefix-sum; the
// scalar versions are reused unchanged.
double wasserstein1_seq(const double* p, const double* q, std::size_t n) {
  double fp = 0.0, fq = 0.0, acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    fp += p[i];
    fq += q[i];
    acc += std::fabs(fp - fq);
  }
  return acc;
}

void wasserstein1_to_delta_seq(const double* q, double* out, std::size_t n) {
  double f = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    f += q[i];
    out[i] = f;
  }
  double suffix = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    suffix += 1.0 - out[i];
    out[i] = suffix;
  }
  double running_f = 0.0, below = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    out[j] += below;
    running_f += q[j];
    below += running_f;
  }
}

}  // namespace

extern const Ops kAvx2Ops;
const Ops kAvx2Ops{sum_avx2,
                   scale_avx2,
                   hellinger_avx2,
                   wasserstein1_seq,
                   hellinger_to_delta_avx2,
                   wasserstein1_to_delta_seq};

}  // namespace frictionnet::kernels

#endif  // x86
