#pragma once

// Inner loops of the propagation and observable evaluation. Each kernel has a
// scalar reference and, on x86-64, an AVX2/FMA variant. The dispatching entry
// points pick the variant once per process: AVX2 when the CPU reports avx2
// and fma, scalar otherwise or when WATERALIGN_SIMD=scalar is set.
//
// Matrices are dense, column-major (Eigen's default layout) and square.

#include <complex>
#include <cstdint>
#include <span>
#include <string_view>

namespace wateralign::kernels {

using cplx = std::complex<double>;

/// Half-open column range [begin, end) visited for one row.
struct BandRange {
  std::uint32_t begin = 0;
  std::uint32_t end = 0;
};

enum class Isa { Scalar, Avx2 };

/// c^H M c for real symmetric M.
cplx symmetric_form(std::span<const double> matrix, std::span<const cplx> c);

/// u^H K u for Hermitian K, visiting only row i's columns bands[i]. The band
/// pattern must itself be symmetric.
cplx hermitian_band_form(std::span<const cplx> matrix, std::span<const BandRange> bands,
                         std::span<const cplx> u);

/// v[i] *= phases[i].
void rotate(std::span<cplx> v, std::span<const cplx> phases);

Isa active_isa();
bool isa_supported(Isa isa);
std::string_view to_string(Isa isa);

namespace scalar {
cplx symmetric_form(std::span<const double> matrix, std::span<const cplx> c);
cplx hermitian_band_form(std::span<const cplx> matrix, std::span<const BandRange> bands,
                         std::span<const cplx> u);
void rotate(std::span<cplx> v, std::span<const cplx> phases);
}  // namespace scalar

#if defined(WATERALIGN_HAVE_AVX2)
namespace avx2 {
cplx symmetric_form(std::span<const double> matrix, std::span<const cplx> c);
cplx hermitian_band_form(std::span<const cplx> matrix, std::span<const BandRange> bands,
                         std::span<const cplx> u);
void rotate(std::span<cplx> v, std::span<const cplx> phases);
}  // namespace avx2
#endif

}  // namespace wateralign::kernels
