#include "wateralign/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <string>

#include "wateralign/constants.hpp"
#include "wateralign/errors.hpp"
#include "wateralign/kernels.hpp"

namespace wateralign::dynamics {

using rotor::EigenstateTable;

WavepacketState WavepacketState::eigenstate(const EigenstateTable& table, int j, int tau, int m,
                                            double t_ps) {
  if (std::abs(m) > j) throw std::out_of_range("WavepacketState::eigenstate: |m| > J");
  WavepacketState s;
  s.m = m;
  s.t_ps = t_ps;
  s.amplitudes = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(table.basis_size(m)));
  s.amplitudes(static_cast<Eigen::Index>(table.level_index(j, tau) - table.basis_offset(m))) = 1.0;
  return s;
}

void PulseSequence::validate() const {
  for (std::size_t i = 0; i < pulses.size(); ++i) {
    pulses[i].validate();
    if (i == 0) continue;
    const auto& prev = pulses[i - 1];
    if (!(pulses[i].t0_ps > prev.t0_ps)) {
      throw ConfigError("pulses: t0_ps must be strictly increasing (pulse " + std::to_string(i) + ")");
    }
    if (!(pulses[i].t0_ps - prev.t0_ps > 5.0 * prev.sigma_fs * 1.0e-3)) {
      throw ConfigError("pulses: pulse " + std::to_string(i) +
                        " overlaps the previous one (separation must exceed 5 sigma)");
    }
  }
}

std::size_t TimeGrid::size() const {
  return static_cast<std::size_t>(std::floor((t_end - t_start) / dt + 1e-9)) + 1;
}

std::vector<double> TimeGrid::points() const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(i);
  return out;
}

void TimeGrid::validate() const {
  if (!(dt > 0.0)) throw ConfigError("grid.dt_ps must be > 0");
  if (!(t_end > t_start)) throw ConfigError("grid.t_end_ps must exceed grid.t_start_ps");
}

Eigen::VectorXd level_energies(const EigenstateTable& table, int m) {
  const auto levels = table.levels().subspan(table.basis_offset(m));
  Eigen::VectorXd e(static_cast<Eigen::Index>(levels.size()));
  for (std::size_t i = 0; i < levels.size(); ++i) e(static_cast<Eigen::Index>(i)) = levels[i].energy;
  return e;
}

Eigen::VectorXd level_omegas(const EigenstateTable& table, int m) {
  return level_energies(table, m) * constants::omega_per_cm1;
}

WavepacketState free_propagate(const WavepacketState& state, const EigenstateTable& table,
                               double dt_ps) {
  const Eigen::VectorXd omega = level_omegas(table, state.m);
  if (omega.size() != state.amplitudes.size()) throw std::invalid_argument("free_propagate: size");
  Eigen::VectorXcd phases(omega.size());
  for (Eigen::Index i = 0; i < omega.size(); ++i) phases(i) = std::polar(1.0, -omega(i) * dt_ps);
  WavepacketState out = state;
  kernels::rotate(std::span(out.amplitudes.data(), static_cast<std::size_t>(out.amplitudes.size())),
                  std::span<const std::complex<double>>(phases.data(), static_cast<std::size_t>(phases.size())));
  out.t_ps += dt_ps;
  return out;
}

Eigen::MatrixXd cos2theta_matrix(const interaction::Rank2Couplings& couplings, int m) {
  Eigen::MatrixXd d00 = couplings.assemble(m, 1.0, 0.0);
  return (2.0 * d00 + Eigen::MatrixXd::Identity(d00.rows(), d00.cols())) / 3.0;
}

Eigen::MatrixXd cos2theta_matrix(const EigenstateTable& table, int m) {
  return cos2theta_matrix(interaction::Rank2Couplings(table), m);
}

double expect_cos2(const WavepacketState& state, const Eigen::MatrixXd& cos2) {
  const auto n = static_cast<std::size_t>(state.amplitudes.size());
  if (cos2.rows() != state.amplitudes.size() || cos2.cols() != state.amplitudes.size()) {
    throw std::invalid_argument("expect_cos2: dimension mismatch");
  }
  const auto value = kernels::symmetric_form(std::span<const double>(cos2.data(), n * n),
                                             std::span<const std::complex<double>>(state.amplitudes.data(), n));
  if (std::abs(value.imag()) > 1e-10) {
    throw NumericError("expect_cos2: imaginary residue " + std::to_string(value.imag()));
  }
  return value.real();
}

double expect_energy(const WavepacketState& state, const EigenstateTable& table) {
  return state.amplitudes.cwiseAbs2().dot(level_energies(table, state.m));
}

StateTrace run_sequence(const rotor::RotorEigenstate& initial, const PulseSequence& sequence,
                        const TimeGrid& grid, const EigenstateTable& table,
                        const interaction::Rank2Couplings& couplings, const RunOptions& options) {
  sequence.validate();
  grid.validate();
  const int m = initial.m;
  const Eigen::MatrixXd cos2 = cos2theta_matrix(couplings, m);

  std::vector<interaction::KickGenerator> generators;
  for (const auto& p : sequence.pulses) {
    generators.push_back(interaction::build_kick_generator(
        interaction::kick_strengths(p, table.molecule()), couplings, table, m));
  }

  const double t_begin =
      sequence.pulses.empty() ? grid.t_start : std::min(grid.t_start, sequence.pulses.front().t0_ps);
  WavepacketState state = WavepacketState::eigenstate(table, initial.j, initial.tau, m, t_begin);

  StateTrace trace;
  std::size_t next = 0;
  auto kick_through = [&](double t) {
    while (next < sequence.pulses.size() && sequence.pulses[next].t0_ps <= t) {
      state = free_propagate(state, table, sequence.pulses[next].t0_ps - state.t_ps);
      const double before = expect_energy(state, table);
      state = options.method == interaction::KickMethod::Exact
                  ? interaction::apply_kick_exact(state, generators[next])
                  : interaction::apply_kick_ode(state, generators[next], options.ode_steps);
      trace.kicks.push_back({sequence.pulses[next].t0_ps, before, expect_energy(state, table)});
      ++next;
    }
  };

  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid.at(i);
    kick_through(t);
    const WavepacketState sample = free_propagate(state, table, t - state.t_ps);
    trace.time_ps.push_back(t);
    trace.cos2.push_back(expect_cos2(sample, cos2));
    trace.energy.push_back(expect_energy(sample, table));
  }
  kick_through(std::numeric_limits<double>::infinity());
  return trace;
}

StateTrace run_sequence(const rotor::RotorEigenstate& initial, const PulseSequence& sequence,
                        const TimeGrid& grid, const EigenstateTable& table, const RunOptions& options) {
  return run_sequence(initial, sequence, grid, table, interaction::Rank2Couplings(table), options);
}

}  // namespace wateralign::dynamics
