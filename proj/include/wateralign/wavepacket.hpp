#pragma once

#include <Eigen/Core>

#include "wateralign/rotor.hpp"

namespace wateralign::dynamics {

/// Amplitudes over the (J, tau) levels of the fixed-m basis
/// (EigenstateTable::basis_offset(m) onwards), at time t_ps.
struct WavepacketState {
  int m = 0;
  Eigen::VectorXcd amplitudes;
  double t_ps = 0.0;

  /// The pure eigenstate |J, tau, m> at time t.
  static WavepacketState eigenstate(const rotor::EigenstateTable& table, int j, int tau, int m,
                                    double t_ps = 0.0);

  double norm() const { return amplitudes.norm(); }
};

}  // namespace wateralign::dynamics
