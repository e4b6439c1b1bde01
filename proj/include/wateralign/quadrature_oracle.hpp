#pragma once

#include "wateralign/angular.hpp"

namespace wateralign::oracle {

/// Wigner small-d matrix d^J_{m'm}(beta) from Wigner's explicit sum.
double wigner_small_d(int j, int mp, int m, double beta);

/// <bra| D^2_{0s} |ket> by direct quadrature over the Euler angles, using the
/// convention documented in wateralign/angular.hpp:
///   sqrt((2J+1)(2J'+1)) / 8pi^2 * Int D^J_{mk} D^2_{0s} conj(D^J'_{mk'}) dR.
/// phi and chi are integrated with uniform trapezoid sums (exact for the
/// trigonometric polynomials involved), theta with 32-point Gauss-Legendre in
/// cos(theta) (exact for the polynomial degree reached when J, J' <= 6).
/// Throws std::invalid_argument when J or J' exceeds 6.
double dmatrix_quadrature(const angular::AngularIndices& bra, int s,
                          const angular::AngularIndices& ket);

}  // namespace wateralign::oracle
