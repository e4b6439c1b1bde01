#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <variant>

#include <CLI11.hpp>

#include "wateralign/angular.hpp"
#include "wateralign/cli.hpp"
#include "wateralign/errors.hpp"
#include "wateralign/parallel.hpp"

namespace {

namespace wa = wateralign;

enum ExitCode : int { kOk = 0, kUsage = 1, kConfig = 2, kNumeric = 3, kIo = 4 };

struct Overrides {
  std::optional<std::string> output;
  std::optional<int> jmax;
  bool converge = false;
  std::optional<std::string> species;
  bool quiet = false;
};

void apply(const Overrides& o, wa::cli::RunConfig& cfg) {
  if (o.output) cfg.output = *o.output;
  if (o.jmax) cfg.thermal.jmax = *o.jmax;
  if (o.converge) cfg.converge = true;
  if (o.species) cfg.species = wa::cli::parse_species(*o.species);
}

void report_run(const wa::cli::Summary& s, const std::filesystem::path& csv) {
  std::printf("J_max %d%s\n", s.jmax, s.converged ? " (converged)" : "");
  for (const auto& iso : s.isomers) {
    std::printf("%-5s  max <cos2> %.6f at %.3f ps  min <cos2> %.6f at %.3f ps  <E>0 %.4f cm^-1\n",
                std::string(wa::rotor::to_string(iso.isomer)).c_str(), iso.max_cos2, iso.t_max_ps, iso.min_cos2,
                iso.t_min_ps, iso.initial_energy);
    for (const auto& k : iso.kicks) {
      std::printf("       kick at %.3f ps: <E> %.4f -> %.4f cm^-1\n", k.t0_ps, k.energy_before, k.energy_after);
    }
  }
  std::printf("wrote %s and %s\n", csv.string().c_str(), wa::cli::summary_path_for(csv).string().c_str());
}

int run_command(const std::string& config_path, const Overrides& o) {
  auto parsed = wa::cli::load_config(config_path);
  wa::cli::RunConfig cfg;
  if (auto* run = std::get_if<wa::cli::RunConfig>(&parsed)) {
    cfg = *run;
  } else {
    throw wa::ConfigError("config has a scan section; use the scan subcommand");
  }
  apply(o, cfg);
  const auto result = wa::cli::simulate(cfg);
  if (!result.summary.impulsive && !o.quiet) {
    std::fprintf(stderr,
                 "warning: pulse sigma exceeds 1%% of the shortest rotational period in the basis (%.4f ps); "
                 "the delta-kick approximation is approximate at high J\n",
                 result.summary.shortest_period_ps);
  }
  wa::cli::write_csv(result.trace, cfg.output);
  wa::cli::write_json(wa::cli::summary_json(result.summary), wa::cli::summary_path_for(cfg.output));
  if (!o.quiet) report_run(result.summary, cfg.output);
  return kOk;
}

int scan_command(const std::string& config_path, const Overrides& o) {
  auto parsed = wa::cli::load_config(config_path);
  auto* scan = std::get_if<wa::cli::ScanConfig>(&parsed);
  if (scan == nullptr) throw wa::ConfigError("config has no scan section");
  apply(o, scan->base);
  const auto result = wa::cli::scan_delay(*scan);
  wa::cli::write_scan_csv(result, scan->base.output);
  wa::cli::write_json(wa::cli::scan_json(result), wa::cli::summary_path_for(scan->base.output));
  if (!o.quiet) {
    for (std::size_t i = 0; i < result.delays.size(); ++i) {
      std::printf("delay %.4f ps  %.8g\n", result.delays[i], result.values[i]);
    }
    std::printf("best delay %.4f ps (value %.8g, J_max %d)\n", result.best_delay, result.best_value, result.jmax);
  }
  return kOk;
}

int table_command(const Overrides& o) {
  const int jmax = o.jmax.value_or(wa::ensemble::ThermalSpec{}.jmax);
  if (jmax < 0 || jmax > wa::angular::kMaxAngularMomentum) throw wa::ConfigError("--jmax out of range");
  const auto table = wa::rotor::build_eigentable(wa::rotor::MolecularSpec::water(), jmax);
  if (!o.output) {
    wa::rotor::write_levels_csv(table, std::cout);
    return kOk;
  }
  std::ofstream out(*o.output, std::ios::binary);
  if (!out) throw wa::IoError(*o.output, "cannot open for writing");
  wa::rotor::write_levels_csv(table, out);
  out.flush();
  if (!out) throw wa::IoError(*o.output, "write failed");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Laser alignment dynamics of ortho and para water"};
  app.require_subcommand(1);
  app.footer(std::string("Environment: ") + wa::kThreadsEnv +
             " sets the worker thread count (default: hardware concurrency); "
             "WATERALIGN_SIMD=scalar disables the AVX2 kernels.");

  Overrides o;
  std::string config_path;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--output,-o", o.output, "Output path");
    sub->add_option("--jmax", o.jmax, "Basis J_max (start of the ladder with --converge)");
  };

  auto* run = app.add_subcommand("run", "Simulate the configured pulse sequence");
  run->add_option("config", config_path, "Config file (JSON)")->required();
  add_common(run);
  run->add_flag("--converge", o.converge, "Raise J_max until the traces converge");
  run->add_option("--species", o.species, "para, ortho or both")->check(CLI::IsMember({"para", "ortho", "both"}));
  run->add_flag("--quiet,-q", o.quiet, "No console report");

  auto* scan = app.add_subcommand("scan", "Scan the delay of a second identical pulse");
  scan->add_option("config", config_path, "Config file (JSON)")->required();
  add_common(scan);
  scan->add_flag("--converge", o.converge, "Converge J_max on the single-pulse scenario first");
  scan->add_flag("--quiet,-q", o.quiet, "No console report");

  auto* table = app.add_subcommand("table", "Print the rotor levels as CSV");
  add_common(table);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (run->parsed()) return run_command(config_path, o);
    if (scan->parsed()) return scan_command(config_path, o);
    return table_command(o);
  } catch (const wa::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const wa::IoError& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return kIo;
  } catch (const wa::NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return kNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return kNumeric;
  }
}
