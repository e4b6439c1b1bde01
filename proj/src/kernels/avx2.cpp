// Compiled with -mavx2 -mfma; only called after a runtime cpuid check.

#include <immintrin.h>

#include <cassert>
#include <cstddef>

#include "wateralign/kernels.hpp"

namespace wateralign::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline const double* raw(const cplx* p) { return reinterpret_cast<const double*>(p); }
inline double* raw(cplx* p) { return reinterpret_cast<double*>(p); }

}  // namespace

cplx symmetric_form(std::span<const double> matrix, std::span<const cplx> c) {
  const std::size_t n = c.size();
  assert(matrix.size() == n * n);
  const double* cv = raw(c.data());
  cplx total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* col = matrix.data() + i * n;
    __m256d acc = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 2 <= n; j += 2) {
      // (m_j, m_j, m_j+1, m_j+1) * (re_j, im_j, re_j+1, im_j+1)
      const __m256d mm =
          _mm256_permute4x64_pd(_mm256_castpd128_pd256(_mm_loadu_pd(col + j)), 0x50);
      acc = _mm256_fmadd_pd(mm, _mm256_loadu_pd(cv + 2 * j), acc);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double yr = lanes[0] + lanes[2];
    double yi = lanes[1] + lanes[3];
    for (; j < n; ++j) {
      yr += col[j] * c[j].real();
      yi += col[j] * c[j].imag();
    }
    total += std::conj(c[i]) * cplx(yr, yi);
  }
  return total;
}

cplx hermitian_band_form(std::span<const cplx> matrix, std::span<const BandRange> bands,
                         std::span<const cplx> u) {
  const std::size_t n = u.size();
  assert(matrix.size() == n * n && bands.size() == n);
  const double* uv = raw(u.data());
  cplx total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* col = raw(matrix.data() + i * n);
    // conj(a) * u: re = ar ur + ai ui, im = ar ui - ai ur.
    __m256d p = _mm256_setzero_pd();
    __m256d q = _mm256_setzero_pd();
    std::size_t j = bands[i].begin;
    const std::size_t end = bands[i].end;
    for (; j + 2 <= end; j += 2) {
      const __m256d a = _mm256_loadu_pd(col + 2 * j);
      const __m256d b = _mm256_loadu_pd(uv + 2 * j);
      p = _mm256_fmadd_pd(a, b, p);
      q = _mm256_fmadd_pd(a, _mm256_permute_pd(b, 0b0101), q);
    }
    double yr = hsum(p);
    // q lanes: (ar ui, ai ur, ...); im = even lanes - odd lanes.
    const __m256d q_odd_negated = _mm256_mul_pd(q, _mm256_setr_pd(1.0, -1.0, 1.0, -1.0));
    double yi = hsum(q_odd_negated);
    for (; j < end; ++j) {
      const cplx a = matrix[i * n + j];
      yr += a.real() * u[j].real() + a.imag() * u[j].imag();
      yi += a.real() * u[j].imag() - a.imag() * u[j].real();
    }
    total += std::conj(u[i]) * cplx(yr, yi);
  }
  return total;
}

void rotate(std::span<cplx> v, std::span<const cplx> phases) {
  assert(v.size() == phases.size());
  const std::size_t n = v.size();
  double* vv = raw(v.data());
  const double* pv = raw(phases.data());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d a = _mm256_loadu_pd(vv + 2 * i);
    const __m256d b = _mm256_loadu_pd(pv + 2 * i);
    const __m256d b_re = _mm256_movedup_pd(b);
    const __m256d b_im = _mm256_permute_pd(b, 0b1111);
    const __m256d a_swapped = _mm256_permute_pd(a, 0b0101);
    _mm256_storeu_pd(vv + 2 * i, _mm256_fmaddsub_pd(a, b_re, _mm256_mul_pd(a_swapped, b_im)));
  }
  for (; i < n; ++i) v[i] *= phases[i];
}

}  // namespace wateralign::kernels::avx2
