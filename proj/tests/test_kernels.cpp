#include <complex>
#include <cstdlib>
#include <random>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <catch_amalgamated.hpp>

#include "wateralign/kernels.hpp"

using namespace wateralign;
using kernels::BandRange;
using kernels::cplx;

namespace {

struct Case {
  Eigen::MatrixXd sym;
  Eigen::MatrixXcd herm;
  Eigen::VectorXcd vec;
  std::vector<BandRange> bands;
};

Case make_case(int n, int half_width, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Case c;
  c.sym = Eigen::MatrixXd::NullaryExpr(n, n, [&] { return d(rng); });
  c.sym = (c.sym + c.sym.transpose()).eval();
  c.herm = Eigen::MatrixXcd::NullaryExpr(n, n, [&] { return cplx(d(rng), d(rng)); });
  c.herm = (c.herm + c.herm.adjoint()).eval();
  c.vec = Eigen::VectorXcd::NullaryExpr(n, [&] { return std::polar(1.0, 3.0 * d(rng)); });
  for (int i = 0; i < n; ++i) {
    c.bands.push_back({static_cast<std::uint32_t>(std::max(0, i - half_width)),
                       static_cast<std::uint32_t>(std::min(n, i + half_width + 1))});
  }
  return c;
}

cplx reference_band_form(const Case& c) {
  cplx sum = 0.0;
  for (Eigen::Index i = 0; i < c.herm.rows(); ++i)
    for (auto j = c.bands[i].begin; j < c.bands[i].end; ++j) sum += std::conj(c.vec(i)) * c.herm(i, j) * c.vec(j);
  return sum;
}

std::span<const double> span_of(const Eigen::MatrixXd& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }
std::span<const cplx> span_of(const Eigen::MatrixXcd& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }
std::span<const cplx> span_of(const Eigen::VectorXcd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

double tol_for(const Case& c) { return 1e-13 * (1.0 + static_cast<double>(c.vec.size() * c.vec.size())); }

}  // namespace

TEST_CASE("scalar kernels match plain Eigen expressions", "[kernels]") {
  std::mt19937_64 rng(7);
  for (int n : {0, 1, 2, 3, 4, 5, 7, 8, 13, 31, 64, 97}) {
    for (int w : {0, 2, 5, 1000}) {
      const Case c = make_case(n, w, rng);
      const cplx sym_ref = (c.vec.adjoint() * c.sym.cast<cplx>() * c.vec)(0, 0);
      CHECK(std::abs(kernels::scalar::symmetric_form(span_of(c.sym), span_of(c.vec)) - sym_ref) < tol_for(c));
      const cplx band = kernels::scalar::hermitian_band_form(span_of(c.herm), c.bands, span_of(c.vec));
      CHECK(std::abs(band - reference_band_form(c)) < tol_for(c));
      CHECK(std::abs(band.imag()) < tol_for(c));

      Eigen::VectorXcd v = c.vec;
      const Eigen::VectorXcd phases = c.vec.conjugate();
      kernels::scalar::rotate({v.data(), static_cast<std::size_t>(n)}, span_of(phases));
      for (int i = 0; i < n; ++i) CHECK(std::abs(v(i) - c.vec(i) * phases(i)) < 1e-15);
    }
  }
}

#if defined(WATERALIGN_HAVE_AVX2)
TEST_CASE("AVX2 kernels match the scalar reference", "[kernels][avx2]") {
  if (!kernels::isa_supported(kernels::Isa::Avx2)) SKIP("CPU lacks AVX2/FMA");
  std::mt19937_64 rng(11);
  for (int n = 0; n <= 70; ++n) {
    for (int w : {0, 1, 2, 3, 9, 1000}) {
      const Case c = make_case(n, w, rng);
      const cplx s_sym = kernels::scalar::symmetric_form(span_of(c.sym), span_of(c.vec));
      const cplx v_sym = kernels::avx2::symmetric_form(span_of(c.sym), span_of(c.vec));
      CHECK(std::abs(s_sym - v_sym) < tol_for(c));
      const cplx s_band = kernels::scalar::hermitian_band_form(span_of(c.herm), c.bands, span_of(c.vec));
      const cplx v_band = kernels::avx2::hermitian_band_form(span_of(c.herm), c.bands, span_of(c.vec));
      CHECK(std::abs(s_band - v_band) < tol_for(c));

      Eigen::VectorXcd a = c.vec, b = c.vec;
      const Eigen::VectorXcd phases = c.vec.conjugate() * cplx(0.3, -0.8);
      kernels::scalar::rotate({a.data(), static_cast<std::size_t>(n)}, span_of(phases));
      kernels::avx2::rotate({b.data(), static_cast<std::size_t>(n)}, span_of(phases));
      for (int i = 0; i < n; ++i) CHECK(std::abs(a(i) - b(i)) < 1e-15);
    }
  }
}
#endif

TEST_CASE("dispatch honours the override and the CPU", "[kernels][dispatch]") {
  const char* env = std::getenv("WATERALIGN_SIMD");
  if (env != nullptr && std::string_view(env) == "scalar") {
    CHECK(kernels::active_isa() == kernels::Isa::Scalar);
  } else if (kernels::isa_supported(kernels::Isa::Avx2)) {
    CHECK(kernels::active_isa() == kernels::Isa::Avx2);
  } else {
    CHECK(kernels::active_isa() == kernels::Isa::Scalar);
  }
  CHECK(kernels::isa_supported(kernels::Isa::Scalar));
  CHECK(kernels::to_string(kernels::Isa::Scalar) == "scalar");
  CHECK(kernels::to_string(kernels::Isa::Avx2) == "avx2");

  // Dispatched entry points agree with the scalar reference.
  std::mt19937_64 rng(3);
  const Case c = make_case(37, 2, rng);
  CHECK(std::abs(kernels::hermitian_band_form(span_of(c.herm), c.bands, span_of(c.vec)) -
                 kernels::scalar::hermitian_band_form(span_of(c.herm), c.bands, span_of(c.vec))) < tol_for(c));
}
