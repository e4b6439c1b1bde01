#include "wateralign/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <span>
#include <string>

#include "wateralign/angular.hpp"
#include "wateralign/constants.hpp"
#include "wateralign/errors.hpp"
#include "wateralign/kernels.hpp"
#include "wateralign/parallel.hpp"

namespace wateralign::ensemble {

using dynamics::PulseSequence;
using dynamics::TimeGrid;
using rotor::EigenstateTable;
using rotor::SpinIsomer;

void ThermalSpec::validate() const {
  if (!(temperature_k > 0.0)) throw ConfigError("thermal.temperature_k must be > 0");
  if (jmax < 0 || jmax > angular::kMaxAngularMomentum) {
    throw ConfigError("thermal.jmax must lie in [0, " +
                      std::to_string(angular::kMaxAngularMomentum) + "]");
  }
  if (!(convergence_tol >= 0.0)) throw ConfigError("thermal.convergence_tol must be >= 0");
}

ThermalEnsemble boltzmann_weights(const EigenstateTable& table, SpinIsomer isomer,
                                  const ThermalSpec& thermal, double prune_threshold) {
  thermal.validate();
  if (table.jmax() < thermal.jmax) {
    throw std::invalid_argument("boltzmann_weights: table J_max below thermal J_max");
  }
  const double kt = thermal.temperature_k * constants::boltzmann_cm1_per_k;

  double e_low = std::numeric_limits<double>::infinity();
  for (const auto& l : table.levels()) {
    if (l.j <= thermal.jmax && l.isomer == isomer) e_low = std::min(e_low, l.energy);
  }
  if (!std::isfinite(e_low)) throw NumericError("boltzmann_weights: empty ensemble");

  double full = 0.0;
  for (const auto& l : table.levels()) {
    if (l.j > thermal.jmax || l.isomer != isomer) continue;
    full += (2 * l.j + 1) * std::exp(-(l.energy - e_low) / kt);
  }

  ThermalEnsemble out;
  out.isomer = isomer;
  out.temperature_k = thermal.temperature_k;
  out.jmax = thermal.jmax;
  out.spin_weight = rotor::statistical_weight(isomer);
  for (const auto& l : table.levels()) {
    if (l.j > thermal.jmax || l.isomer != isomer) continue;
    const double b = std::exp(-(l.energy - e_low) / kt);
    if (b / full < prune_threshold) {
      out.pruned_members += static_cast<std::size_t>(2 * l.j + 1);
      continue;
    }
    out.partition += (2 * l.j + 1) * b;
    for (int m = -l.j; m <= l.j; ++m) out.members.push_back({l.j, l.tau, m, b});
  }
  if (out.members.empty()) throw NumericError("boltzmann_weights: empty ensemble");
  out.pruned_weight = 1.0 - out.partition / full;
  for (auto& member : out.members) member.weight /= out.partition;
  return out;
}

const IsomerSeries* AlignmentTrace::find(SpinIsomer isomer) const {
  for (const auto& s : series) {
    if (s.isomer == isomer) return &s;
  }
  return nullptr;
}

namespace {

struct GroupResult {
  std::vector<double> cos2;
  std::vector<double> energy;
  std::vector<dynamics::KickRecord> kicks;
};

struct Group {
  int m = 0;
  std::vector<std::size_t> positions;  // in the m basis
  std::vector<double> weights;
};

}  // namespace

ThermalPropagator::ThermalPropagator(const EigenstateTable& table, PropagationOptions options)
    : table_(table), couplings_(table), options_(options) {}

IsomerSeries ThermalPropagator::run(const ThermalEnsemble& ensemble, const PulseSequence& sequence,
                                    const TimeGrid& grid) const {
  sequence.validate();
  grid.validate();
  if (ensemble.jmax > table_.jmax()) throw std::invalid_argument("ThermalPropagator: ensemble J_max");

  std::map<int, Group> by_m;
  for (const auto& member : ensemble.members) {
    int m = member.m;
    double w = member.weight;
    if (options_.use_m_symmetry) {
      if (m < 0) continue;
      if (m > 0) w *= 2.0;
    }
    Group& g = by_m[m];
    g.m = m;
    g.positions.push_back(table_.level_index(member.j, member.tau) - table_.basis_offset(m));
    g.weights.push_back(w);
  }
  std::vector<Group> groups;
  for (auto& [m, g] : by_m) groups.push_back(std::move(g));

  std::vector<interaction::KickCoefficients> betas;
  for (const auto& p : sequence.pulses) betas.push_back(interaction::kick_strengths(p, table_.molecule()));

  const std::size_t nt = grid.size();
  const double t_begin =
      sequence.pulses.empty() ? grid.t_start : std::min(grid.t_start, sequence.pulses.front().t0_ps);
  std::vector<GroupResult> results(groups.size());

  parallel_for(groups.size(), worker_count(options_.threads), [&](std::size_t gi) {
    const Group& group = groups[gi];
    const int m = group.m;
    const auto levels = table_.levels().subspan(table_.basis_offset(m));

    // Restrict to the isomer sector.
    std::vector<Eigen::Index> sector;
    std::vector<Eigen::Index> sector_of(levels.size(), -1);
    for (std::size_t i = 0; i < levels.size(); ++i) {
      if (levels[i].isomer != ensemble.isomer) continue;
      sector_of[i] = static_cast<Eigen::Index>(sector.size());
      sector.push_back(static_cast<Eigen::Index>(i));
    }
    const auto n = static_cast<Eigen::Index>(sector.size());
    auto restrict = [&](const Eigen::MatrixXd& full) {
      Eigen::MatrixXd sub(n, n);
      for (Eigen::Index c = 0; c < n; ++c)
        for (Eigen::Index r = 0; r < n; ++r) sub(r, c) = full(sector[r], sector[c]);
      return sub;
    };

    Eigen::VectorXd omega(n), energy(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      energy(i) = levels[static_cast<std::size_t>(sector[i])].energy;
      omega(i) = energy(i) * constants::omega_per_cm1;
    }
    const Eigen::MatrixXd cos2 = restrict(dynamics::cos2theta_matrix(couplings_, m));

    std::vector<kernels::BandRange> bands(static_cast<std::size_t>(n));
    {
      std::size_t lo = 0, hi = 0;
      for (std::size_t i = 0; i < bands.size(); ++i) {
        const int j = levels[static_cast<std::size_t>(sector[static_cast<Eigen::Index>(i)])].j;
        auto j_at = [&](std::size_t p) {
          return levels[static_cast<std::size_t>(sector[static_cast<Eigen::Index>(p)])].j;
        };
        while (j_at(lo) < j - 2) ++lo;
        while (hi < bands.size() && j_at(hi) <= j + 2) ++hi;
        bands[i] = {static_cast<std::uint32_t>(lo), static_cast<std::uint32_t>(hi)};
      }
    }

    // Kick operators per pulse, reused when consecutive pulses are identical.
    std::vector<Eigen::MatrixXd> generators;
    std::vector<Eigen::MatrixXcd> propagators;
    for (std::size_t p = 0; p < betas.size(); ++p) {
      if (p > 0 && betas[p].beta1 == betas[p - 1].beta1 && betas[p].beta2 == betas[p - 1].beta2) {
        generators.push_back(generators.back());
        if (!propagators.empty()) propagators.push_back(propagators.back());
        continue;
      }
      generators.push_back(
          restrict(interaction::build_kick_generator(betas[p], couplings_, table_, m).matrix));
      if (options_.method == interaction::KickMethod::Exact) {
        propagators.push_back(interaction::kick_propagator(generators.back()));
      }
    }

    const auto k = static_cast<Eigen::Index>(group.positions.size());
    Eigen::MatrixXcd psi = Eigen::MatrixXcd::Zero(n, k);
    Eigen::VectorXd sqrt_w(k);
    for (Eigen::Index c = 0; c < k; ++c) {
      psi(sector_of[group.positions[static_cast<std::size_t>(c)]], c) = 1.0;
      sqrt_w(c) = std::sqrt(group.weights[static_cast<std::size_t>(c)]);
    }

    double t_ref = t_begin;
    Eigen::MatrixXcd weighted_form;  // cos2 .* conj(rho), Hermitian
    double segment_energy = 0.0;
    auto start_segment = [&] {
      const Eigen::MatrixXcd a = psi * sqrt_w.asDiagonal();
      const Eigen::MatrixXcd rho = a * a.adjoint();
      weighted_form = cos2.cast<std::complex<double>>().cwiseProduct(rho.conjugate());
      segment_energy = rho.diagonal().real().dot(energy);
    };
    auto phases_at = [&](double dt) {
      Eigen::VectorXcd u(n);
      for (Eigen::Index i = 0; i < n; ++i) u(i) = std::polar(1.0, -omega(i) * dt);
      return u;
    };
    start_segment();

    GroupResult& out = results[gi];
    out.cos2.resize(nt);
    out.energy.resize(nt);
    std::size_t next = 0;
    auto kick_through = [&](double t) {
      while (next < sequence.pulses.size() && sequence.pulses[next].t0_ps <= t) {
        const double t0 = sequence.pulses[next].t0_ps;
        psi = phases_at(t0 - t_ref).asDiagonal() * psi;
        t_ref = t0;
        const double before = segment_energy;
        if (options_.method == interaction::KickMethod::Exact) {
          psi = propagators[next] * psi;
        } else {
          interaction::kick_ode_columns(psi, generators[next], options_.ode_steps);
        }
        start_segment();
        out.kicks.push_back({t0, before, segment_energy});
        ++next;
      }
    };

    const auto total = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    for (std::size_t i = 0; i < nt; ++i) {
      const double t = grid.at(i);
      kick_through(t);
      const Eigen::VectorXcd u = phases_at(t - t_ref);
      const auto value = kernels::hermitian_band_form(
          std::span<const std::complex<double>>(weighted_form.data(), total), bands,
          std::span<const std::complex<double>>(u.data(), static_cast<std::size_t>(n)));
      if (std::abs(value.imag()) > 1e-10) {
        throw NumericError("thermal trace: imaginary residue " + std::to_string(value.imag()));
      }
      out.cos2[i] = value.real();
      out.energy[i] = segment_energy;
    }
    kick_through(std::numeric_limits<double>::infinity());
  });

  IsomerSeries series;
  series.isomer = ensemble.isomer;
  series.cos2.assign(nt, 0.0);
  series.energy.assign(nt, 0.0);
  series.kicks.resize(sequence.pulses.size());
  for (std::size_t p = 0; p < sequence.pulses.size(); ++p) series.kicks[p].t0_ps = sequence.pulses[p].t0_ps;
  for (const auto& r : results) {
    for (std::size_t i = 0; i < nt; ++i) {
      series.cos2[i] += r.cos2[i];
      series.energy[i] += r.energy[i];
    }
    for (std::size_t p = 0; p < r.kicks.size(); ++p) {
      series.kicks[p].energy_before += r.kicks[p].energy_before;
      series.kicks[p].energy_after += r.kicks[p].energy_after;
    }
  }
  return series;
}

AlignmentTrace thermal_trace(const ThermalEnsemble& ensemble, const PulseSequence& sequence,
                             const TimeGrid& grid, const EigenstateTable& table,
                             const PropagationOptions& options) {
  ThermalPropagator propagator(table, options);
  return {grid.points(), {propagator.run(ensemble, sequence, grid)}};
}

AlignmentTrace run_scenario(const Scenario& scenario, const ThermalSpec& thermal) {
  thermal.validate();
  const EigenstateTable table = rotor::build_eigentable(scenario.molecule, thermal.jmax);
  ThermalPropagator propagator(table, scenario.options);
  AlignmentTrace trace{scenario.grid.points(), {}};
  for (SpinIsomer isomer : {SpinIsomer::Para, SpinIsomer::Ortho}) {
    if (std::find(scenario.species.begin(), scenario.species.end(), isomer) == scenario.species.end()) continue;
    trace.series.push_back(
        propagator.run(boltzmann_weights(table, isomer, thermal), scenario.sequence, scenario.grid));
  }
  return trace;
}

double max_alignment_change(const AlignmentTrace& a, const AlignmentTrace& b) {
  if (a.time_ps.size() != b.time_ps.size()) throw std::invalid_argument("max_alignment_change: grids differ");
  double worst = 0.0;
  for (const auto& s : a.series) {
    const IsomerSeries* other = b.find(s.isomer);
    if (other == nullptr) continue;
    for (std::size_t i = 0; i < s.cos2.size(); ++i) {
      worst = std::max(worst, std::abs(s.cos2[i] - other->cos2[i]));
    }
  }
  return worst;
}

ConvergedTrace converge_jmax(const Scenario& scenario, const ThermalSpec& thermal, int start_jmax,
                             int cap) {
  if (start_jmax < 4) throw ConfigError("converge_jmax: start J_max must be >= 4");
  if (cap > angular::kMaxAngularMomentum) throw ConfigError("converge_jmax: cap above J limit");
  ThermalSpec spec = thermal;
  spec.jmax = start_jmax;
  ConvergedTrace out;
  AlignmentTrace current = run_scenario(scenario, spec);
  for (int j = start_jmax;; j += 2) {
    if (j + 2 > cap) {
      throw ConvergenceError("J_max ladder reached the cap " + std::to_string(cap) +
                             " without meeting tolerance " + std::to_string(thermal.convergence_tol));
    }
    spec.jmax = j + 2;
    AlignmentTrace next = run_scenario(scenario, spec);
    const double change = max_alignment_change(current, next);
    out.ladder.emplace_back(j, change);
    if (change < thermal.convergence_tol) {
      out.jmax = j;
      out.trace = std::move(current);
      return out;
    }
    current = std::move(next);
  }
}

}  // namespace wateralign::ensemble
