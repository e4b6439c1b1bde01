#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include "wateralign/angular.hpp"
#include "wateralign/cli.hpp"
#include "wateralign/errors.hpp"

namespace wateralign::cli {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (auto name : allowed) known = known || item.key() == name;
    if (!known) {
      throw ConfigError("unknown key '" + (where.empty() ? item.key() : where + "." + item.key()) + "'");
    }
  }
}

double get_number(const json& obj, const std::string& where, const char* key, double fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) throw ConfigError(where + "." + key + ": expected a number");
  const double v = it->get<double>();
  if (!std::isfinite(v)) throw ConfigError(where + "." + key + ": must be finite");
  return v;
}

int get_int(const json& obj, const std::string& where, const char* key, int fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_integer()) throw ConfigError(where + "." + key + ": expected an integer");
  return it->get<int>();
}

bool get_bool(const json& obj, const std::string& where, const char* key, bool fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) throw ConfigError(where + "." + key + ": expected true or false");
  return it->get<bool>();
}

std::string get_string(const json& obj, const std::string& where, const char* key, std::string fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_string()) throw ConfigError(where + "." + key + ": expected a string");
  return it->get<std::string>();
}

// Re-raises a lower-level ConfigError with the config field prefixed.
template <typename F>
void checked(const std::string& field, F&& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    throw ConfigError(field + ": " + e.what());
  }
}

rotor::MolecularSpec parse_molecule(const json& obj) {
  reject_unknown(obj, "molecule",
                 {"inertia_a_kg_m2", "inertia_b_kg_m2", "inertia_c_kg_m2", "alpha_aa_a3", "alpha_bb_a3", "alpha_cc_a3"});
  rotor::MolecularSpec m = rotor::MolecularSpec::water();
  m.inertia_a = get_number(obj, "molecule", "inertia_a_kg_m2", m.inertia_a);
  m.inertia_b = get_number(obj, "molecule", "inertia_b_kg_m2", m.inertia_b);
  m.inertia_c = get_number(obj, "molecule", "inertia_c_kg_m2", m.inertia_c);
  m.alpha_aa = get_number(obj, "molecule", "alpha_aa_a3", m.alpha_aa);
  m.alpha_bb = get_number(obj, "molecule", "alpha_bb_a3", m.alpha_bb);
  m.alpha_cc = get_number(obj, "molecule", "alpha_cc_a3", m.alpha_cc);
  return m;
}

void parse_thermal(const json& obj, RunConfig& cfg) {
  reject_unknown(obj, "thermal", {"temperature_k", "jmax", "convergence_tol", "converge", "jmax_cap"});
  cfg.thermal.temperature_k = get_number(obj, "thermal", "temperature_k", cfg.thermal.temperature_k);
  cfg.thermal.jmax = get_int(obj, "thermal", "jmax", cfg.thermal.jmax);
  cfg.thermal.convergence_tol = get_number(obj, "thermal", "convergence_tol", cfg.thermal.convergence_tol);
  cfg.converge = get_bool(obj, "thermal", "converge", cfg.converge);
  cfg.jmax_cap = get_int(obj, "thermal", "jmax_cap", cfg.jmax_cap);
}

interaction::PulseSpec parse_pulse(const json& obj, const std::string& where) {
  reject_unknown(obj, where, {"intensity_w_cm2", "sigma_fs", "t0_ps"});
  interaction::PulseSpec p{3.0e13, 20.0, 0.0};
  p.peak_intensity = get_number(obj, where, "intensity_w_cm2", p.peak_intensity);
  p.sigma_fs = get_number(obj, where, "sigma_fs", p.sigma_fs);
  p.t0_ps = get_number(obj, where, "t0_ps", p.t0_ps);
  return p;
}

void parse_grid(const json& obj, RunConfig& cfg) {
  reject_unknown(obj, "grid", {"t_start_ps", "t_end_ps", "dt_ps"});
  cfg.grid.t_start = get_number(obj, "grid", "t_start_ps", cfg.grid.t_start);
  cfg.grid.t_end = get_number(obj, "grid", "t_end_ps", cfg.grid.t_end);
  cfg.grid.dt = get_number(obj, "grid", "dt_ps", cfg.grid.dt);
}

void parse_propagation(const json& obj, RunConfig& cfg) {
  reject_unknown(obj, "propagation", {"kick_method", "ode_steps", "threads"});
  const std::string method = get_string(obj, "propagation", "kick_method", "exact");
  if (method == "exact") {
    cfg.propagation.method = interaction::KickMethod::Exact;
  } else if (method == "ode") {
    cfg.propagation.method = interaction::KickMethod::Ode;
  } else {
    throw ConfigError("propagation.kick_method: expected \"exact\" or \"ode\", got \"" + method + "\"");
  }
  cfg.propagation.ode_steps = get_int(obj, "propagation", "ode_steps", cfg.propagation.ode_steps);
  const int threads = get_int(obj, "propagation", "threads", 0);
  if (threads < 0) throw ConfigError("propagation.threads: must be >= 0");
  cfg.propagation.threads = static_cast<unsigned>(threads);
}

ScanObjective parse_objective(const std::string& text) {
  if (text == "ortho_energy_suppression") return ScanObjective::OrthoEnergySuppression;
  if (text == "alignment_contrast") return ScanObjective::AlignmentContrast;
  throw ConfigError("scan.objective: expected \"ortho_energy_suppression\" or \"alignment_contrast\", got \"" +
                    text + "\"");
}

}  // namespace

std::vector<rotor::SpinIsomer> isomers_of(Species species) {
  switch (species) {
    case Species::Para:
      return {rotor::SpinIsomer::Para};
    case Species::Ortho:
      return {rotor::SpinIsomer::Ortho};
    case Species::Both:
      break;
  }
  return {rotor::SpinIsomer::Para, rotor::SpinIsomer::Ortho};
}

Species parse_species(std::string_view text) {
  if (text == "para") return Species::Para;
  if (text == "ortho") return Species::Ortho;
  if (text == "both") return Species::Both;
  throw ConfigError("species: expected \"para\", \"ortho\" or \"both\", got \"" + std::string(text) + "\"");
}

void RunConfig::validate() const {
  checked("molecule", [&] { molecule.validate(); });
  checked("thermal", [&] { thermal.validate(); });
  if (converge && jmax_cap < thermal.jmax + 2) {
    throw ConfigError("thermal.jmax_cap: must be at least thermal.jmax + 2 when converging");
  }
  if (jmax_cap > angular::kMaxAngularMomentum) {
    throw ConfigError("thermal.jmax_cap: must not exceed " + std::to_string(angular::kMaxAngularMomentum));
  }
  if (!(grid.dt > 0.0)) throw ConfigError("grid.dt_ps: must be > 0");
  if (!(grid.t_end > grid.t_start)) throw ConfigError("grid.t_end_ps: must exceed grid.t_start_ps");
  checked("grid", [&] { grid.validate(); });
  for (std::size_t i = 0; i < pulses.pulses.size(); ++i) {
    const auto& p = pulses.pulses[i];
    const std::string where = "pulses[" + std::to_string(i) + "]";
    checked(where, [&] { p.validate(); });
    if (p.t0_ps < grid.t_start || p.t0_ps > grid.t_end) {
      throw ConfigError(where + ".t0_ps: pulse at " + std::to_string(p.t0_ps) + " ps lies outside the grid [" +
                        std::to_string(grid.t_start) + ", " + std::to_string(grid.t_end) + "] ps");
    }
  }
  checked("pulses", [&] { pulses.validate(); });
  if (propagation.ode_steps < 1) throw ConfigError("propagation.ode_steps: must be >= 1");
  if (output.empty()) throw ConfigError("output: must not be empty");
}

std::vector<double> ScanConfig::delays() const {
  std::vector<double> out;
  const auto n = static_cast<std::size_t>(std::floor((delay_max - delay_min) / delay_step + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) out.push_back(delay_min + static_cast<double>(i) * delay_step);
  return out;
}

void ScanConfig::validate() const {
  base.validate();
  if (base.pulses.pulses.size() != 1) throw ConfigError("pulses: a scan needs exactly one base pulse");
  if (!(delay_min > 0.0)) throw ConfigError("scan.delay_min_ps: must be > 0");
  if (!(delay_step > 0.0)) throw ConfigError("scan.delay_step_ps: must be > 0");
  if (delay_max < delay_min) throw ConfigError("scan.delay_max_ps: must be >= scan.delay_min_ps");
  const double last = base.pulses.pulses.front().t0_ps + delays().back();
  if (last > base.grid.t_end) {
    throw ConfigError("scan.delay_max_ps: second pulse at " + std::to_string(last) + " ps lies beyond grid.t_end_ps");
  }
  for (double d : delays()) {
    dynamics::PulseSequence seq{{base.pulses.pulses.front(), base.pulses.pulses.front()}};
    seq.pulses[1].t0_ps += d;
    checked("scan.delay_min_ps", [&] { seq.validate(); });
  }
}

ParsedConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  reject_unknown(doc, "", {"molecule", "thermal", "pulses", "grid", "species", "output", "propagation", "scan"});

  RunConfig cfg;
  if (auto it = doc.find("molecule"); it != doc.end()) cfg.molecule = parse_molecule(*it);
  if (auto it = doc.find("thermal"); it != doc.end()) parse_thermal(*it, cfg);
  if (auto it = doc.find("pulses"); it != doc.end()) {
    if (!it->is_array()) throw ConfigError("pulses: expected an array");
    cfg.pulses.pulses.clear();
    for (std::size_t i = 0; i < it->size(); ++i) {
      cfg.pulses.pulses.push_back(parse_pulse((*it)[i], "pulses[" + std::to_string(i) + "]"));
    }
  }
  if (auto it = doc.find("grid"); it != doc.end()) parse_grid(*it, cfg);
  cfg.species = parse_species(get_string(doc, "config", "species", "both"));
  cfg.output = get_string(doc, "config", "output", cfg.output.string());
  if (auto it = doc.find("propagation"); it != doc.end()) parse_propagation(*it, cfg);

  auto scan_it = doc.find("scan");
  if (scan_it == doc.end()) {
    cfg.validate();
    return cfg;
  }
  ScanConfig scan;
  scan.base = std::move(cfg);
  const json& s = *scan_it;
  reject_unknown(s, "scan", {"delay_min_ps", "delay_max_ps", "delay_step_ps", "objective"});
  scan.delay_min = get_number(s, "scan", "delay_min_ps", scan.delay_min);
  scan.delay_max = get_number(s, "scan", "delay_max_ps", scan.delay_max);
  scan.delay_step = get_number(s, "scan", "delay_step_ps", scan.delay_step);
  scan.objective = parse_objective(get_string(s, "scan", "objective", "ortho_energy_suppression"));
  scan.validate();
  return scan;
}

ParsedConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError(path.string(), "read failed");
  return parse_config(buf.str());
}

}  // namespace wateralign::cli
