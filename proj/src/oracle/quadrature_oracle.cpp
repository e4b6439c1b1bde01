#include "wateralign/quadrature_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

namespace wateralign::oracle {

namespace {

double fact(int n) { return std::tgamma(n + 1.0); }

// Int_0^{2pi} exp(i n x) dx by an N-point uniform sum.
std::complex<double> periodic_integral(int frequency, int points) {
  std::complex<double> acc = 0.0;
  const double h = 2.0 * std::numbers::pi / points;
  for (int i = 0; i < points; ++i) acc += std::polar(1.0, frequency * i * h);
  return acc * h;
}

}  // namespace

double wigner_small_d(int j, int mp, int m, double beta) {
  const double c = std::cos(beta / 2.0);
  const double s = std::sin(beta / 2.0);
  const double pre = std::sqrt(fact(j + mp) * fact(j - mp) * fact(j + m) * fact(j - m));
  double sum = 0.0;
  for (int k = std::max(0, m - mp); k <= std::min(j + m, j - mp); ++k) {
    const double den = fact(j + m - k) * fact(k) * fact(mp - m + k) * fact(j - mp - k);
    const double sign = ((mp - m + k) % 2 == 0) ? 1.0 : -1.0;
    sum += sign / den * std::pow(c, 2 * j + m - mp - 2 * k) * std::pow(s, mp - m + 2 * k);
  }
  return pre * sum;
}

double dmatrix_quadrature(const angular::AngularIndices& bra, int s,
                          const angular::AngularIndices& ket) {
  if (bra.j > 6 || ket.j > 6) throw std::invalid_argument("dmatrix_quadrature: J above 6");
  constexpr int kAzimuthalPoints = 32;

  // phi: exp(-i m phi) * 1 * conj(exp(-i m' phi)).
  const std::complex<double> phi_part = periodic_integral(-bra.m + ket.m, kAzimuthalPoints);
  // chi: exp(-i k chi) exp(-i s chi) conj(exp(-i k' chi)).
  const std::complex<double> chi_part =
      periodic_integral(-bra.k - s + ket.k, kAzimuthalPoints);

  auto polar = [&](double x) {
    const double theta = std::acos(x);
    return wigner_small_d(bra.j, bra.m, bra.k, theta) * wigner_small_d(2, 0, s, theta) *
           wigner_small_d(ket.j, ket.m, ket.k, theta);
  };
  const double theta_part = boost::math::quadrature::gauss<double, 32>::integrate(polar, -1.0, 1.0);

  const std::complex<double> value = std::sqrt((2.0 * bra.j + 1.0) * (2.0 * ket.j + 1.0)) /
                                     (8.0 * std::numbers::pi * std::numbers::pi) * phi_part *
                                     chi_part * theta_part;
  return value.real();
}

}  // namespace wateralign::oracle
