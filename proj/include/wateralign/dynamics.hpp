#pragma once

// Field-free evolution between delta kicks and the single-molecule observables.

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "wateralign/interaction.hpp"
#include "wateralign/rotor.hpp"
#include "wateralign/wavepacket.hpp"

namespace wateralign::dynamics {

/// Pulses in arrival order. Consecutive arrivals must be separated by more
/// than 5 sigma of the earlier pulse.
struct PulseSequence {
  std::vector<interaction::PulseSpec> pulses;

  /// Throws ConfigError on an invalid pulse, non-increasing t0 or overlap.
  void validate() const;
};

/// Uniform sample times t_start + i dt, i = 0..size()-1, in ps.
struct TimeGrid {
  double t_start = 0.0;
  double t_end = 5.0;
  double dt = 0.005;

  std::size_t size() const;
  double at(std::size_t i) const { return t_start + static_cast<double>(i) * dt; }
  std::vector<double> points() const;
  void validate() const;
};

/// 2 pi c E[cm^-1] in rad/ps for each level of the m basis.
Eigen::VectorXd level_omegas(const rotor::EigenstateTable& table, int m);
Eigen::VectorXd level_energies(const rotor::EigenstateTable& table, int m);

/// Multiplies each amplitude by exp(-i omega dt) and advances t. Negative dt
/// runs the free evolution backwards.
WavepacketState free_propagate(const WavepacketState& state, const rotor::EigenstateTable& table,
                               double dt_ps);

/// (2 D^2_00 + 1) / 3 over the m basis.
Eigen::MatrixXd cos2theta_matrix(const rotor::EigenstateTable& table, int m);
Eigen::MatrixXd cos2theta_matrix(const interaction::Rank2Couplings& couplings, int m);

/// c^H M c. Throws NumericError if its imaginary part exceeds 1e-10.
double expect_cos2(const WavepacketState& state, const Eigen::MatrixXd& cos2);

/// Sum |c|^2 E in cm^-1.
double expect_energy(const WavepacketState& state, const rotor::EigenstateTable& table);

struct KickRecord {
  double t0_ps = 0.0;
  double energy_before = 0.0;  // cm^-1
  double energy_after = 0.0;
};

struct StateTrace {
  std::vector<double> time_ps;
  std::vector<double> cos2;
  std::vector<double> energy;
  std::vector<KickRecord> kicks;
};

struct RunOptions {
  interaction::KickMethod method = interaction::KickMethod::Exact;
  int ode_steps = interaction::kDefaultOdeSteps;
};

/// Evolves one initial eigenstate through the sequence: each pulse acts as a
/// delta kick at its t0 and a sample at t >= t0 sees the kicked state.
/// Samples are computed by exact phase evolution from the last kick, so the
/// grid sets resolution only.
StateTrace run_sequence(const rotor::RotorEigenstate& initial, const PulseSequence& sequence,
                        const TimeGrid& grid, const rotor::EigenstateTable& table,
                        const interaction::Rank2Couplings& couplings, const RunOptions& options = {});
StateTrace run_sequence(const rotor::RotorEigenstate& initial, const PulseSequence& sequence,
                        const TimeGrid& grid, const rotor::EigenstateTable& table,
                        const RunOptions& options = {});

}  // namespace wateralign::dynamics
