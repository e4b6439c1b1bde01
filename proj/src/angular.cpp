#include "wateralign/angular.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace wateralign::angular {

namespace mp = boost::multiprecision;

namespace {

const mp::cpp_int& factorial(int n) {
  // Largest argument reached by the Racah sum is j1 + j2 + j3 + 1.
  static const std::vector<mp::cpp_int> table = [] {
    std::vector<mp::cpp_int> f(3 * kMaxAngularMomentum + 2);
    f[0] = 1;
    for (std::size_t i = 1; i < f.size(); ++i) f[i] = f[i - 1] * static_cast<unsigned>(i);
    return f;
  }();
  return table.at(static_cast<std::size_t>(n));
}

// num/den to the nearest double without overflowing on 300-digit integers.
double ratio_to_double(const mp::cpp_int& num, const mp::cpp_int& den) {
  if (num == 0) return 0.0;
  const long shift = 64 - (static_cast<long>(mp::msb(num)) - static_cast<long>(mp::msb(den)));
  mp::cpp_int q = shift >= 0 ? mp::cpp_int(num << shift) / den
                             : num / mp::cpp_int(den << -shift);
  return std::ldexp(q.convert_to<double>(), static_cast<int>(-shift));
}

constexpr int parity_sign(int n) { return (n % 2 == 0) ? 1 : -1; }

}  // namespace

AngularIndices::AngularIndices(int j_, int k_, int m_) : j(j_), k(k_), m(m_) {
  if (j < 0 || std::abs(k) > j || std::abs(m) > j) {
    throw std::invalid_argument("AngularIndices: need |k|,|m| <= J, got J=" + std::to_string(j) +
                                " k=" + std::to_string(k) + " m=" + std::to_string(m));
  }
}

double wigner_3j(const ThreeJArgs& a) {
  for (int j : {a.j1, a.j2, a.j3}) {
    if (j < 0) throw std::invalid_argument("wigner_3j: negative j");
    if (j > kMaxAngularMomentum) throw std::invalid_argument("wigner_3j: j above limit");
  }
  if (a.m1 + a.m2 + a.m3 != 0) return 0.0;
  if (!triangle(a.j1, a.j2, a.j3)) return 0.0;
  if (std::abs(a.m1) > a.j1 || std::abs(a.m2) > a.j2 || std::abs(a.m3) > a.j3) return 0.0;

  const int j1 = a.j1, j2 = a.j2, j3 = a.j3;
  const int m1 = a.m1, m2 = a.m2, m3 = a.m3;

  const int t_min = std::max({0, j2 - j3 - m1, j1 - j3 + m2});
  const int t_max = std::min({j1 + j2 - j3, j1 - m1, j2 + m2});

  mp::cpp_rational sum = 0;
  for (int t = t_min; t <= t_max; ++t) {
    mp::cpp_int den = factorial(t) * factorial(j3 - j2 + t + m1) * factorial(j3 - j1 + t - m2) *
                      factorial(j1 + j2 - j3 - t) * factorial(j1 - t - m1) * factorial(j2 - t + m2);
    mp::cpp_rational term(mp::cpp_int(1), den);
    if (t % 2 != 0) term = -term;
    sum += term;
  }
  if (sum == 0) return 0.0;

  // value^2 = triangle * projections * sum^2, exactly.
  const mp::cpp_int tri_num =
      factorial(j1 + j2 - j3) * factorial(j1 - j2 + j3) * factorial(-j1 + j2 + j3);
  const mp::cpp_int& tri_den = factorial(j1 + j2 + j3 + 1);
  const mp::cpp_int proj = factorial(j1 + m1) * factorial(j1 - m1) * factorial(j2 + m2) *
                           factorial(j2 - m2) * factorial(j3 + m3) * factorial(j3 - m3);
  const mp::cpp_rational squared =
      mp::cpp_rational(tri_num * proj, tri_den) * sum * sum;

  const double magnitude =
      std::sqrt(ratio_to_double(mp::numerator(squared), mp::denominator(squared)));
  const int sign = parity_sign(j1 - j2 - m3) * (sum > 0 ? 1 : -1);
  return sign * magnitude;
}

double clebsch_gordan(int j1, int m1, int j2, int m2, int j3, int m3) {
  const double w = wigner_3j(j1, j2, j3, m1, m2, -m3);
  if (w == 0.0) return 0.0;
  return parity_sign(j1 - j2 + m3) * std::sqrt(2.0 * j3 + 1.0) * w;
}

double dmatrix_element(const AngularIndices& bra, int s, const AngularIndices& ket) {
  if (s != 0 && s != 2 && s != -2) throw std::invalid_argument("dmatrix_element: s must be 0 or +-2");
  if (bra.m != ket.m) throw std::invalid_argument("dmatrix_element: m is not conserved");
  if (!triangle(bra.j, 2, ket.j)) return 0.0;
  if (ket.k != bra.k + s) return 0.0;

  const double lab = wigner_3j(bra.j, 2, ket.j, bra.m, 0, -bra.m);
  if (lab == 0.0) return 0.0;
  const double body = wigner_3j(bra.j, 2, ket.j, bra.k, s, -ket.k);
  return parity_sign(ket.k + bra.m) *
         std::sqrt((2.0 * bra.j + 1.0) * (2.0 * ket.j + 1.0)) * lab * body;
}

}  // namespace wateralign::angular
