#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <catch_amalgamated.hpp>

#include "wateralign/cli.hpp"
#include "wateralign/errors.hpp"

using namespace wateralign;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using cli::RunConfig;
using cli::ScanConfig;
using rotor::SpinIsomer;

namespace {

namespace fs = std::filesystem;

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "wateralign_test_cli";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

RunConfig run_config(std::string_view text) { return std::get<RunConfig>(cli::parse_config(text)); }

void require_config_error(std::string_view text, const std::string& fragment) {
  INFO(text);
  CHECK_THROWS_WITH(cli::parse_config(text), ContainsSubstring(fragment));
  CHECK_THROWS_AS(cli::parse_config(text), ConfigError);
}

double max_deviation(const ensemble::IsomerSeries& s, const std::vector<double>& time, double from) {
  double worst = 0.0;
  for (std::size_t i = 0; i < time.size(); ++i)
    if (time[i] >= from) worst = std::max(worst, std::abs(s.cos2[i] - 1.0 / 3.0));
  return worst;
}

}  // namespace

TEST_CASE("minimal config yields the default scenario", "[cli][config]") {
  const RunConfig cfg = run_config(R"({"thermal": {"temperature_k": 20}})");
  const auto water = rotor::MolecularSpec::water();
  CHECK(cfg.molecule.inertia_a == water.inertia_a);
  CHECK(cfg.molecule.alpha_cc == water.alpha_cc);
  CHECK(cfg.thermal.temperature_k == 20.0);
  CHECK(cfg.thermal.jmax == 14);
  REQUIRE(cfg.pulses.pulses.size() == 1);
  CHECK(cfg.pulses.pulses[0].peak_intensity == 3.0e13);
  CHECK(cfg.pulses.pulses[0].sigma_fs == 20.0);
  CHECK(cfg.pulses.pulses[0].t0_ps == 0.0);
  CHECK(cfg.grid.t_start == 0.0);
  CHECK(cfg.grid.t_end == 5.0);
  CHECK(cfg.grid.dt == 0.005);
  CHECK(cfg.species == cli::Species::Both);
  CHECK_FALSE(cfg.converge);
  CHECK(std::holds_alternative<RunConfig>(cli::parse_config("{}")));
}

TEST_CASE("full config is read with unit-suffixed keys", "[cli][config]") {
  const RunConfig cfg = run_config(R"({
    "molecule": {"inertia_a_kg_m2": 1.0e-47, "inertia_b_kg_m2": 2.0e-47, "inertia_c_kg_m2": 3.0e-47,
                 "alpha_aa_a3": 1.6, "alpha_bb_a3": 1.5, "alpha_cc_a3": 1.4},
    "thermal": {"temperature_k": 5, "jmax": 10, "convergence_tol": 1e-5, "converge": true, "jmax_cap": 20},
    "pulses": [{"intensity_w_cm2": 1e13, "sigma_fs": 30, "t0_ps": 0.5}, {"t0_ps": 2.0}],
    "grid": {"t_start_ps": 0.0, "t_end_ps": 3.0, "dt_ps": 0.01},
    "species": "ortho",
    "output": "out/trace.csv",
    "propagation": {"kick_method": "ode", "ode_steps": 256, "threads": 2}
  })");
  CHECK(cfg.molecule.inertia_b == 2.0e-47);
  CHECK(cfg.molecule.alpha_aa == 1.6);
  CHECK(cfg.thermal.jmax == 10);
  CHECK(cfg.thermal.convergence_tol == 1e-5);
  CHECK(cfg.converge);
  CHECK(cfg.jmax_cap == 20);
  REQUIRE(cfg.pulses.pulses.size() == 2);
  CHECK(cfg.pulses.pulses[0].peak_intensity == 1e13);
  CHECK(cfg.pulses.pulses[1].peak_intensity == 3e13);
  CHECK(cfg.pulses.pulses[1].t0_ps == 2.0);
  CHECK(cfg.grid.dt == 0.01);
  CHECK(cfg.species == cli::Species::Ortho);
  CHECK(cfg.output == fs::path("out/trace.csv"));
  CHECK(cfg.propagation.method == interaction::KickMethod::Ode);
  CHECK(cfg.propagation.ode_steps == 256);
  CHECK(cfg.propagation.threads == 2);
}

TEST_CASE("config errors name the offending field", "[cli][config]") {
  require_config_error(R"({"grid": {"dt_ps": 0}})", "dt_ps");
  require_config_error(R"({"grid": {"t_start_ps": 1, "t_end_ps": 1}})", "t_end_ps");
  require_config_error(R"({"pulses": [{"t0_ps": 7.0}]})", "pulses[0].t0_ps");
  require_config_error(R"({"pulses": [{"t0_ps": -0.5}]})", "pulses[0].t0_ps");
  require_config_error(R"({"temperature": 20})", "temperature");
  require_config_error(R"({"thermal": {"temp_k": 20}})", "thermal.temp_k");
  require_config_error(R"({"pulses": [{"sigma": 20}]})", "pulses[0].sigma");
  require_config_error(R"({"thermal": {"temperature_k": "warm"}})", "thermal.temperature_k");
  require_config_error(R"({"thermal": {"temperature_k": -3}})", "temperature_k");
  require_config_error(R"({"thermal": {"jmax": 2.5}})", "thermal.jmax");
  require_config_error(R"({"pulses": [{"intensity_w_cm2": -1}]})", "pulses[0]");
  require_config_error(R"({"pulses": [{"sigma_fs": 0}]})", "pulses[0]");
  require_config_error(R"({"pulses": [{"t0_ps": 1.0}, {"t0_ps": 0.5}]})", "pulses");
  require_config_error(R"({"pulses": {"t0_ps": 1.0}})", "pulses");
  require_config_error(R"({"species": "meta"})", "species");
  require_config_error(R"({"propagation": {"kick_method": "magnus"}})", "propagation.kick_method");
  require_config_error(R"({"propagation": {"ode_steps": 0}})", "ode_steps");
  require_config_error(R"({"molecule": {"inertia_c_kg_m2": 5e-47}})", "molecule");
  require_config_error(R"({"thermal": {"converge": true, "jmax": 14, "jmax_cap": 10}})", "jmax_cap");
  require_config_error(R"({"thermal": {)", "malformed");
  require_config_error(R"([1, 2])", "object");
}

TEST_CASE("scan config", "[cli][config]") {
  const auto parsed = cli::parse_config(R"({"scan": {}})");
  REQUIRE(std::holds_alternative<ScanConfig>(parsed));
  const auto& scan = std::get<ScanConfig>(parsed);
  CHECK(scan.delay_min == 1.5);
  CHECK(scan.delay_max == 2.3);
  CHECK(scan.delay_step == 0.05);
  CHECK(scan.objective == cli::ScanObjective::OrthoEnergySuppression);
  const auto delays = scan.delays();
  REQUIRE(delays.size() == 17);
  CHECK_THAT(delays.back(), WithinAbs(2.3, 1e-12));

  const auto single = std::get<ScanConfig>(
      cli::parse_config(R"({"scan": {"delay_min_ps": 1.9, "delay_max_ps": 1.9, "objective": "alignment_contrast"}})"));
  CHECK(single.delays().size() == 1);
  CHECK(single.objective == cli::ScanObjective::AlignmentContrast);

  require_config_error(R"({"scan": {"delay_min_ps": 0}})", "delay_min_ps");
  require_config_error(R"({"scan": {"delay_step_ps": 0}})", "delay_step_ps");
  require_config_error(R"({"scan": {"delay_max_ps": 9}})", "delay_max_ps");
  require_config_error(R"({"scan": {"delay_min_ps": 2.0, "delay_max_ps": 1.0}})", "delay_max_ps");
  require_config_error(R"({"scan": {"objective": "speed"}})", "scan.objective");
  require_config_error(R"({"scan": {"delay": 1}})", "scan.delay");
  require_config_error(R"({"pulses": [{"t0_ps": 0}, {"t0_ps": 1}], "scan": {}})", "exactly one");
}

TEST_CASE("config file loading", "[cli][config]") {
  const fs::path p = scratch_dir() / "cfg.json";
  std::ofstream(p) << R"({"species": "para"})";
  CHECK(std::get<RunConfig>(cli::load_config(p)).species == cli::Species::Para);
  CHECK_THROWS_AS(cli::load_config(scratch_dir() / "missing.json"), IoError);
}

TEST_CASE("CSV layout and round trip", "[cli][csv]") {
  RunConfig cfg;
  cfg.grid = {0.0, 3.0, 0.01};
  const auto result = cli::simulate(cfg);
  std::ostringstream out;
  cli::write_csv(result.trace, out);
  const std::string text = out.str();
  CHECK(text.substr(0, text.find('\n')) == "time_ps,cos2_para,cos2_ortho,e_para_cm1,e_ortho_cm1");

  std::istringstream in(text);
  const auto back = cli::read_csv(in);
  REQUIRE(back.time_ps.size() == result.trace.time_ps.size());
  for (auto isomer : {SpinIsomer::Para, SpinIsomer::Ortho}) {
    const auto* a = result.trace.find(isomer);
    const auto* b = back.find(isomer);
    REQUIRE(b != nullptr);
    for (std::size_t i = 0; i < a->cos2.size(); ++i) {
      CHECK_THAT(b->cos2[i], WithinRel(a->cos2[i], 1e-11));
      CHECK_THAT(b->energy[i], WithinRel(a->energy[i], 1e-11));
    }
  }

  RunConfig para_only = cfg;
  para_only.species = cli::Species::Para;
  std::ostringstream p;
  cli::write_csv(cli::simulate(para_only).trace, p);
  CHECK(p.str().substr(0, p.str().find('\n')) == "time_ps,cos2_para,e_para_cm1");
}

TEST_CASE("zero-pulse CSV is isotropic", "[cli][csv]") {
  RunConfig cfg;
  cfg.pulses.pulses.clear();
  cfg.grid = {0.0, 2.0, 0.05};
  const fs::path path = scratch_dir() / "flat.csv";
  cli::write_csv(cli::simulate(cfg).trace, path);
  const auto back = cli::read_csv(path);
  for (const auto& s : back.series)
    for (double v : s.cos2) CHECK_THAT(v, WithinAbs(0.333333, 1e-6));
}

TEST_CASE("zero-intensity pulse gives flat traces", "[cli]") {
  RunConfig cfg = run_config(R"({"pulses": [{"intensity_w_cm2": 0}], "grid": {"t_end_ps": 2}})");
  const auto result = cli::simulate(cfg);
  for (const auto& s : result.trace.series)
    for (double v : s.cos2) CHECK_THAT(v, WithinAbs(1.0 / 3.0, 1e-12));
}

TEST_CASE("CSV I/O failures carry the path", "[cli][csv]") {
  const fs::path bad = scratch_dir() / "no_such_dir" / "trace.csv";
  ensemble::AlignmentTrace empty;
  try {
    cli::write_csv(empty, bad);
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(e.path() == bad.string());
  }
  CHECK_THROWS_AS(cli::read_csv(bad), IoError);
  std::istringstream junk("time_ps,cos2_para\n0.1,abc\n");
  CHECK_THROWS_AS(cli::read_csv(junk), ConfigError);
  std::istringstream wrong("t,cos2_para\n");
  CHECK_THROWS_AS(cli::read_csv(wrong), ConfigError);
}

TEST_CASE("identical config gives a byte-identical CSV", "[cli][csv]") {
  RunConfig cfg;
  cfg.pulses.pulses.push_back({3e13, 20.0, 1.9});
  const fs::path a = scratch_dir() / "a.csv", b = scratch_dir() / "b.csv";
  cli::write_csv(cli::simulate(cfg).trace, a);
  cfg.propagation.threads = 3;
  cli::write_csv(cli::simulate(cfg).trace, b);
  CHECK(slurp(a) == slurp(b));
}

TEST_CASE("summary record", "[cli]") {
  RunConfig cfg;
  const auto result = cli::simulate(cfg);
  const auto& s = result.summary;
  CHECK(s.jmax == 14);
  CHECK_FALSE(s.converged);
  REQUIRE(s.betas.size() == 1);
  CHECK_THAT(s.betas[0].beta1, WithinAbs(-0.174, 0.006));
  CHECK_FALSE(s.impulsive);
  REQUIRE(s.isomers.size() == 2);
  const auto& para = s.isomers[0];
  const auto& ortho = s.isomers[1];
  CHECK(para.isomer == SpinIsomer::Para);
  CHECK(ortho.spin_weight == 3);
  // The isomers peak at different times.
  CHECK(para.t_max_ps != ortho.t_max_ps);
  CHECK(para.max_cos2 > 1.0 / 3.0);
  CHECK(ortho.min_cos2 < 1.0 / 3.0);
  REQUIRE(para.kicks.size() == 1);
  CHECK_THAT(para.kicks[0].energy_before, WithinAbs(para.initial_energy, 1e-10));

  const auto doc = cli::summary_json(s);
  CHECK(doc["jmax"] == 14);
  CHECK(doc["isomers"]["ortho"]["spin_weight"] == 3);
  CHECK(doc["isomers"]["para"]["kicks"].size() == 1);
  CHECK(cli::summary_path_for("out/trace.csv") == fs::path("out/trace.summary.json"));
}

TEST_CASE("converged run records the ladder", "[cli]") {
  RunConfig cfg;
  cfg.converge = true;
  cfg.thermal.jmax = 4;
  const auto result = cli::simulate(cfg);
  CHECK(result.summary.converged);
  CHECK(result.summary.jmax <= 14);
  CHECK_FALSE(result.summary.ladder.empty());
  CHECK(result.trace.series.size() == 2);
}

TEST_CASE("second pulse at 1.9 ps: ortho deviation shrinks, para grows", "[cli][scenario]") {
  RunConfig one;
  RunConfig two;
  two.pulses.pulses.push_back({3e13, 20.0, 1.9});
  const auto r1 = cli::simulate(one);
  const auto r2 = cli::simulate(two);
  const auto& t = r1.trace.time_ps;
  CHECK(max_deviation(*r2.trace.find(SpinIsomer::Ortho), t, 1.9) <
        max_deviation(*r1.trace.find(SpinIsomer::Ortho), t, 1.9));
  CHECK(max_deviation(*r2.trace.find(SpinIsomer::Para), t, 1.9) >
        max_deviation(*r1.trace.find(SpinIsomer::Para), t, 1.9));
}

TEST_CASE("delay scan", "[cli][scan]") {
  const auto cfg = std::get<ScanConfig>(cli::parse_config(R"({"scan": {}})"));
  const auto a = cli::scan_delay(cfg);
  REQUIRE(a.values.size() == 17);
  CHECK(std::abs(a.best_delay - 1.9) <= 0.2);
  CHECK(a.best_value < 0.0);
  const auto b = cli::scan_delay(cfg);
  CHECK(a.values == b.values);

  // The scan value equals the kick record of a direct two-pulse run.
  RunConfig direct = cfg.base;
  direct.species = cli::Species::Ortho;
  direct.pulses.pulses.push_back({3e13, 20.0, a.best_delay});
  const auto result = cli::simulate(direct);
  const auto& kicks = result.summary.isomers[0].kicks;
  CHECK_THAT(kicks[1].energy_after - kicks[1].energy_before, WithinAbs(a.best_value, 1e-10));

  auto single = cfg;
  single.delay_min = single.delay_max = 1.9;
  single.objective = cli::ScanObjective::AlignmentContrast;
  const auto c = cli::scan_delay(single);
  REQUIRE(c.values.size() == 1);
  CHECK(c.best_delay == 1.9);
  CHECK(c.values[0] > 0.0);

  const auto doc = cli::scan_json(a);
  CHECK(doc["table"].size() == 17);
  CHECK(doc["objective"] == "ortho_energy_suppression");
}
