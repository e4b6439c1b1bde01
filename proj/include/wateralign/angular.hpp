#pragma once

// Angular-momentum algebra for integer spins.
//
// Wigner-D convention (z-y-z Euler angles (phi, theta, chi)):
//   D^J_{mk}(phi, theta, chi) = exp(-i m phi) d^J_{mk}(theta) exp(-i k chi)
// with d^J the standard real Wigner small-d matrix. Symmetric-top kets are
//   <phi, theta, chi | J k m> = sqrt((2J+1) / 8 pi^2) conj(D^J_{mk})
// where k is the projection on the body a-axis and m the projection on lab Z.
// Under this convention
//   <J k m | D^2_{0s} | J' k' m> = (-1)^(k'+m) sqrt((2J+1)(2J'+1))
//                                  (J 2 J'; m 0 -m) (J 2 J'; k s -k')
// which is the form dmatrix_element() evaluates. The quadrature oracle in
// wateralign/quadrature_oracle.hpp integrates the same element directly.

#include <cstdlib>

namespace wateralign::angular {

/// Largest j accepted by wigner_3j and everything built on it.
inline constexpr int kMaxAngularMomentum = 60;

struct AngularIndices {
  int j = 0;
  int k = 0;  // body-frame projection on the a-axis
  int m = 0;  // lab-frame projection on Z

  AngularIndices() = default;
  /// Throws std::invalid_argument unless j >= 0, |k| <= j and |m| <= j.
  AngularIndices(int j, int k, int m);
};

struct ThreeJArgs {
  int j1, j2, j3;
  int m1, m2, m3;
};

/// Exact Racah sum with big-integer intermediates; correctly signed and
/// rounded to double. Zero when the triangle or projection rules fail.
/// Throws std::invalid_argument for negative j or j above kMaxAngularMomentum.
double wigner_3j(const ThreeJArgs& args);

inline double wigner_3j(int j1, int j2, int j3, int m1, int m2, int m3) {
  return wigner_3j(ThreeJArgs{j1, j2, j3, m1, m2, m3});
}

/// <j1 m1 j2 m2 | j3 m3> = (-1)^(j1-j2+m3) sqrt(2 j3 + 1) (j1 j2 j3; m1 m2 -m3).
double clebsch_gordan(int j1, int m1, int j2, int m2, int j3, int m3);

/// True when |j1-j2| <= j3 <= j1+j2.
constexpr bool triangle(int j1, int j2, int j3) noexcept {
  return j3 >= (j1 > j2 ? j1 - j2 : j2 - j1) && j3 <= j1 + j2;
}

/// <bra| D^2_{0s} |ket> in the symmetric-top basis. s must be 0 or +-2 and
/// bra.m must equal ket.m; std::invalid_argument otherwise.
double dmatrix_element(const AngularIndices& bra, int s, const AngularIndices& ket);

}  // namespace wateralign::angular
