#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "wateralign/cli.hpp"
#include "wateralign/errors.hpp"
#include "wateralign/interaction.hpp"
#include "wateralign/kernels.hpp"

namespace wateralign::cli {

namespace {

using ensemble::AlignmentTrace;
using ensemble::IsomerSeries;
using rotor::SpinIsomer;

ensemble::Scenario scenario_of(const RunConfig& config) {
  ensemble::Scenario s;
  s.molecule = config.molecule;
  s.sequence = config.pulses;
  s.grid = config.grid;
  s.species = isomers_of(config.species);
  s.options = config.propagation;
  return s;
}

double thermal_energy(const ensemble::ThermalEnsemble& ens, const rotor::EigenstateTable& table) {
  double e = 0.0;
  for (const auto& m : ens.members) e += m.weight * table.level(m.j, m.tau).energy;
  return e;
}

IsomerSummary summarize(const IsomerSeries& series, const std::vector<double>& time,
                        const ensemble::ThermalEnsemble& ens, const rotor::EigenstateTable& table) {
  IsomerSummary s;
  s.isomer = series.isomer;
  const auto [lo, hi] = std::minmax_element(series.cos2.begin(), series.cos2.end());
  s.max_cos2 = *hi;
  s.t_max_ps = time[static_cast<std::size_t>(hi - series.cos2.begin())];
  s.min_cos2 = *lo;
  s.t_min_ps = time[static_cast<std::size_t>(lo - series.cos2.begin())];
  s.initial_energy = thermal_energy(ens, table);
  s.kicks = series.kicks;
  s.partition = ens.partition;
  s.pruned_weight = ens.pruned_weight;
  s.members = ens.members.size();
  s.spin_weight = ens.spin_weight;
  return s;
}

// The table size used by a run: either as configured or found by the J_max
// ladder on the configured scenario.
struct Basis {
  int jmax = 0;
  bool converged = false;
  std::vector<std::pair<int, double>> ladder;
  std::optional<AlignmentTrace> trace;
};

Basis choose_basis(const RunConfig& config, const ensemble::Scenario& scenario) {
  Basis b;
  b.jmax = config.thermal.jmax;
  if (!config.converge) return b;
  auto result = ensemble::converge_jmax(scenario, config.thermal, config.thermal.jmax, config.jmax_cap);
  b.jmax = result.jmax;
  b.converged = true;
  b.ladder = std::move(result.ladder);
  b.trace = std::move(result.trace);
  return b;
}

void fill_common(Summary& summary, const RunConfig& config, const rotor::EigenstateTable& table) {
  summary.impulsive = true;
  for (const auto& p : config.pulses.pulses) {
    summary.betas.push_back(interaction::kick_strengths(p, config.molecule));
    const auto check = interaction::check_impulsive(p, table);
    summary.shortest_period_ps = check.shortest_period_ps;
    summary.impulsive = summary.impulsive && check.impulsive;
  }
  if (config.pulses.pulses.empty()) {
    summary.shortest_period_ps = interaction::check_impulsive({0.0, 20.0, 0.0}, table).shortest_period_ps;
  }
}

}  // namespace

SimulationResult simulate(const RunConfig& config) {
  config.validate();
  const ensemble::Scenario scenario = scenario_of(config);
  Basis basis = choose_basis(config, scenario);

  ensemble::ThermalSpec thermal = config.thermal;
  thermal.jmax = basis.jmax;
  const auto table = rotor::build_eigentable(config.molecule, basis.jmax);

  SimulationResult result;
  result.summary.jmax = basis.jmax;
  result.summary.converged = basis.converged;
  result.summary.ladder = basis.ladder;
  fill_common(result.summary, config, table);

  ensemble::ThermalPropagator propagator(table, config.propagation);
  result.trace.time_ps = config.grid.points();
  for (SpinIsomer isomer : scenario.species) {
    const auto ens = ensemble::boltzmann_weights(table, isomer, thermal);
    IsomerSeries series;
    const IsomerSeries* cached = basis.trace ? basis.trace->find(isomer) : nullptr;
    series = cached != nullptr ? *cached : propagator.run(ens, config.pulses, config.grid);
    result.summary.isomers.push_back(summarize(series, result.trace.time_ps, ens, table));
    result.trace.series.push_back(std::move(series));
  }
  return result;
}

ScanResult scan_delay(const ScanConfig& config) {
  config.validate();
  const RunConfig& base = config.base;
  const ensemble::Scenario scenario = scenario_of(base);
  const Basis basis = choose_basis(base, scenario);

  ensemble::ThermalSpec thermal = base.thermal;
  thermal.jmax = basis.jmax;
  const auto table = rotor::build_eigentable(base.molecule, basis.jmax);
  ensemble::ThermalPropagator propagator(table, base.propagation);

  const bool energy_objective = config.objective == ScanObjective::OrthoEnergySuppression;
  std::vector<SpinIsomer> isomers{SpinIsomer::Ortho};
  if (!energy_objective) isomers.insert(isomers.begin(), SpinIsomer::Para);
  std::vector<ensemble::ThermalEnsemble> ensembles;
  for (SpinIsomer isomer : isomers) ensembles.push_back(ensemble::boltzmann_weights(table, isomer, thermal));

  // The energy objective reads only the kick records and samples two grid points.
  dynamics::TimeGrid grid = base.grid;
  if (energy_objective) grid.t_end = grid.t_start + grid.dt;

  ScanResult out;
  out.objective = config.objective;
  out.jmax = basis.jmax;
  out.delays = config.delays();
  const auto& first = base.pulses.pulses.front();
  for (double delay : out.delays) {
    dynamics::PulseSequence seq{{first, first}};
    seq.pulses[1].t0_ps = first.t0_ps + delay;
    if (energy_objective) {
      const IsomerSeries ortho = propagator.run(ensembles.front(), seq, grid);
      out.values.push_back(ortho.kicks[1].energy_after - ortho.kicks[1].energy_before);
      continue;
    }
    const IsomerSeries para = propagator.run(ensembles[0], seq, grid);
    const IsomerSeries ortho = propagator.run(ensembles[1], seq, grid);
    double contrast = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (grid.at(i) < seq.pulses[1].t0_ps) continue;
      contrast = std::max(contrast, std::abs(para.cos2[i] - ortho.cos2[i]));
    }
    out.values.push_back(contrast);
  }

  const auto best = energy_objective ? std::min_element(out.values.begin(), out.values.end())
                                     : std::max_element(out.values.begin(), out.values.end());
  out.best_value = *best;
  out.best_delay = out.delays[static_cast<std::size_t>(best - out.values.begin())];
  return out;
}

nlohmann::json summary_json(const Summary& summary) {
  nlohmann::json doc;
  doc["jmax"] = summary.jmax;
  doc["jmax_converged"] = summary.converged;
  nlohmann::json ladder = nlohmann::json::array();
  for (const auto& [j, change] : summary.ladder) ladder.push_back({{"jmax", j}, {"max_change", change}});
  doc["jmax_ladder"] = ladder;
  nlohmann::json betas = nlohmann::json::array();
  for (const auto& b : summary.betas) betas.push_back({{"beta1", b.beta1}, {"beta2", b.beta2}});
  doc["kick_strengths"] = betas;
  doc["shortest_period_ps"] = summary.shortest_period_ps;
  doc["impulsive"] = summary.impulsive;
  doc["simd"] = std::string(kernels::to_string(kernels::active_isa()));
  nlohmann::json isomers = nlohmann::json::object();
  for (const auto& s : summary.isomers) {
    nlohmann::json kicks = nlohmann::json::array();
    for (const auto& k : s.kicks) {
      kicks.push_back({{"t0_ps", k.t0_ps}, {"energy_before_cm1", k.energy_before}, {"energy_after_cm1", k.energy_after}});
    }
    isomers[std::string(rotor::to_string(s.isomer))] = {
        {"max_cos2", s.max_cos2},
        {"t_max_ps", s.t_max_ps},
        {"min_cos2", s.min_cos2},
        {"t_min_ps", s.t_min_ps},
        {"initial_energy_cm1", s.initial_energy},
        {"kicks", kicks},
        {"partition_function", s.partition},
        {"pruned_weight", s.pruned_weight},
        {"members", s.members},
        {"spin_weight", s.spin_weight},
    };
  }
  doc["isomers"] = isomers;
  return doc;
}

nlohmann::json scan_json(const ScanResult& result) {
  nlohmann::json doc;
  doc["objective"] = result.objective == ScanObjective::OrthoEnergySuppression ? "ortho_energy_suppression"
                                                                                : "alignment_contrast";
  doc["jmax"] = result.jmax;
  doc["best_delay_ps"] = result.best_delay;
  doc["best_value"] = result.best_value;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < result.delays.size(); ++i) {
    rows.push_back({{"delay_ps", result.delays[i]}, {"value", result.values[i]}});
  }
  doc["table"] = rows;
  return doc;
}

}  // namespace wateralign::cli
