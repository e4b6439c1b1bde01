#include <cassert>
#include <cstddef>

#include "wateralign/kernels.hpp"

namespace wateralign::kernels::scalar {

cplx symmetric_form(std::span<const double> matrix, std::span<const cplx> c) {
  const std::size_t n = c.size();
  assert(matrix.size() == n * n);
  cplx total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* col = matrix.data() + i * n;
    double yr = 0.0, yi = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
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
  cplx total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // K(i, j) = conj(K(j, i)); column i is contiguous.
    const cplx* col = matrix.data() + i * n;
    double yr = 0.0, yi = 0.0;
    for (std::size_t j = bands[i].begin; j < bands[i].end; ++j) {
      const double ar = col[j].real(), ai = col[j].imag();
      const double ur = u[j].real(), ui = u[j].imag();
      yr += ar * ur + ai * ui;
      yi += ar * ui - ai * ur;
    }
    total += std::conj(u[i]) * cplx(yr, yi);
  }
  return total;
}

void rotate(std::span<cplx> v, std::span<const cplx> phases) {
  assert(v.size() == phases.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= phases[i];
}

}  // namespace wateralign::kernels::scalar
