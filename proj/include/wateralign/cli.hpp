#pragma once

// Config-driven scenarios: single or multi-pulse runs and delay scans, with
// CSV and JSON summary output.
//
// Config document (JSON; every key optional, unknown keys rejected):
//   {
//     "molecule":    {"inertia_a_kg_m2", "inertia_b_kg_m2", "inertia_c_kg_m2",
//                     "alpha_aa_a3", "alpha_bb_a3", "alpha_cc_a3"},
//     "thermal":     {"temperature_k", "jmax", "convergence_tol", "converge", "jmax_cap"},
//     "pulses":      [{"intensity_w_cm2", "sigma_fs", "t0_ps"}, ...],
//     "grid":        {"t_start_ps", "t_end_ps", "dt_ps"},
//     "species":     "para" | "ortho" | "both",
//     "output":      "trace.csv",
//     "propagation": {"kick_method": "exact" | "ode", "ode_steps", "threads"},
//     "scan":        {"delay_min_ps", "delay_max_ps", "delay_step_ps",
//                     "objective": "ortho_energy_suppression" | "alignment_contrast"}
//   }
// Defaults: water, T = 20 K, J_max = 14, one 3e13 W/cm^2, 20 fs pulse at
// t = 0, grid 0..5 ps every 5 fs, both species.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "wateralign/dynamics.hpp"
#include "wateralign/ensemble.hpp"
#include "wateralign/rotor.hpp"

namespace wateralign::cli {

enum class Species { Para, Ortho, Both };

std::vector<rotor::SpinIsomer> isomers_of(Species species);
Species parse_species(std::string_view text);

struct RunConfig {
  rotor::MolecularSpec molecule = rotor::MolecularSpec::water();
  ensemble::ThermalSpec thermal;
  bool converge = false;
  int jmax_cap = ensemble::kDefaultJmaxCap;
  dynamics::PulseSequence pulses{{interaction::PulseSpec{3.0e13, 20.0, 0.0}}};
  dynamics::TimeGrid grid;
  Species species = Species::Both;
  std::filesystem::path output = "trace.csv";
  ensemble::PropagationOptions propagation;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

enum class ScanObjective { OrthoEnergySuppression, AlignmentContrast };

struct ScanConfig {
  RunConfig base;
  double delay_min = 1.5;
  double delay_max = 2.3;
  double delay_step = 0.05;
  ScanObjective objective = ScanObjective::OrthoEnergySuppression;

  void validate() const;
  std::vector<double> delays() const;
};

using ParsedConfig = std::variant<RunConfig, ScanConfig>;

/// A document with a "scan" section yields a ScanConfig, otherwise a RunConfig.
ParsedConfig parse_config(std::string_view text);
ParsedConfig load_config(const std::filesystem::path& path);

struct IsomerSummary {
  rotor::SpinIsomer isomer;
  double max_cos2 = 0.0;
  double t_max_ps = 0.0;
  double min_cos2 = 0.0;
  double t_min_ps = 0.0;
  double initial_energy = 0.0;  // thermal rotational energy before any pulse
  std::vector<dynamics::KickRecord> kicks;
  double partition = 0.0;
  double pruned_weight = 0.0;
  std::size_t members = 0;
  int spin_weight = 1;
};

struct Summary {
  int jmax = 0;
  bool converged = false;
  std::vector<std::pair<int, double>> ladder;
  std::vector<interaction::KickCoefficients> betas;
  double shortest_period_ps = 0.0;
  bool impulsive = true;
  std::vector<IsomerSummary> isomers;
};

struct SimulationResult {
  ensemble::AlignmentTrace trace;
  Summary summary;
};

/// Builds the table (running the J_max ladder when config.converge is set),
/// the per-species ensembles and their thermal traces. Writes nothing.
SimulationResult simulate(const RunConfig& config);

struct ScanResult {
  ScanObjective objective = ScanObjective::OrthoEnergySuppression;
  int jmax = 0;
  std::vector<double> delays;
  std::vector<double> values;
  double best_delay = 0.0;
  double best_value = 0.0;
};

/// Two identical pulses, the second `delay` after the first, for every delay
/// of the scan grid. ortho_energy_suppression = E_ortho just after the second
/// kick minus just before (minimized); alignment_contrast = max over t >= t2
/// of |cos2_para - cos2_ortho| (maximized).
ScanResult scan_delay(const ScanConfig& config);

nlohmann::json summary_json(const Summary& summary);
nlohmann::json scan_json(const ScanResult& result);

/// Columns time_ps, cos2_para, cos2_ortho, e_para_cm1, e_ortho_cm1 (absent
/// species omitted), values printed with 12 significant digits.
void write_csv(const ensemble::AlignmentTrace& trace, std::ostream& out);
void write_csv(const ensemble::AlignmentTrace& trace, const std::filesystem::path& path);
ensemble::AlignmentTrace read_csv(std::istream& in);
ensemble::AlignmentTrace read_csv(const std::filesystem::path& path);

void write_scan_csv(const ScanResult& result, const std::filesystem::path& path);

/// trace.csv -> trace.summary.json
std::filesystem::path summary_path_for(const std::filesystem::path& csv_path);
void write_json(const nlohmann::json& doc, const std::filesystem::path& path);

}  // namespace wateralign::cli
