#include <cmath>

#include <catch_amalgamated.hpp>

#include "wateralign/constants.hpp"
#include "wateralign/dynamics.hpp"
#include "wateralign/ensemble.hpp"
#include "wateralign/errors.hpp"

using namespace wateralign;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using ensemble::ThermalSpec;
using rotor::SpinIsomer;

namespace {

const interaction::PulseSpec kPulse{3.0e13, 20.0, 0.0};

const rotor::EigenstateTable& table14() {
  static const auto t = rotor::build_eigentable(rotor::MolecularSpec::water(), 14);
  return t;
}

double weight_sum(const ensemble::ThermalEnsemble& e) {
  double s = 0.0;
  for (const auto& m : e.members) s += m.weight;
  return s;
}

}  // namespace

TEST_CASE("thermal energy scale", "[ensemble]") {
  // k_B T / hc at 20 K from SI literals
  const double kt = 1.380649e-23 * 20.0 / (6.62607015e-34 * 2.99792458e10);
  CHECK_THAT(kt, WithinAbs(13.90, 0.01));
  CHECK_THAT(20.0 * constants::boltzmann_cm1_per_k, WithinRel(kt, 1e-14));
}

TEST_CASE("thermal spec validation", "[ensemble]") {
  CHECK_THROWS_AS((ThermalSpec{0.0, 14, 1e-4}.validate()), ConfigError);
  CHECK_THROWS_AS((ThermalSpec{20.0, -1, 1e-4}.validate()), ConfigError);
  CHECK_THROWS_AS((ThermalSpec{20.0, 61, 1e-4}.validate()), ConfigError);
  CHECK_THROWS_AS((ThermalSpec{20.0, 14, -1.0}.validate()), ConfigError);
  CHECK_THROWS((ensemble::boltzmann_weights(table14(), SpinIsomer::Para, ThermalSpec{20.0, 15, 1e-4})));
}

TEST_CASE("near-zero temperature ensembles", "[ensemble]") {
  const ThermalSpec cold{0.01, 14, 1e-4};
  const auto para = ensemble::boltzmann_weights(table14(), SpinIsomer::Para, cold);
  REQUIRE(para.members.size() == 1);
  CHECK(para.members[0].j == 0);
  CHECK(para.members[0].m == 0);
  CHECK(para.members[0].weight == 1.0);
  CHECK(para.spin_weight == 1);

  const auto ortho = ensemble::boltzmann_weights(table14(), SpinIsomer::Ortho, cold);
  REQUIRE(ortho.members.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(ortho.members[i].j == 1);
    CHECK(ortho.members[i].tau == -1);
    CHECK(ortho.members[i].m == i - 1);
    CHECK_THAT(ortho.members[i].weight, WithinAbs(1.0 / 3.0, 1e-15));
  }
  CHECK(ortho.spin_weight == 3);
}

TEST_CASE("20 K weights", "[ensemble]") {
  const ThermalSpec spec{20.0, 14, 1e-4};
  for (auto isomer : {SpinIsomer::Para, SpinIsomer::Ortho}) {
    const auto e = ensemble::boltzmann_weights(table14(), isomer, spec, 0.0);
    CHECK_THAT(weight_sum(e), WithinAbs(1.0, 1e-12));
    // Independent partition function over the isomer's levels.
    const double kt = 20.0 * 1.380649e-23 / (6.62607015e-34 * 2.99792458e10);
    const double e_low = isomer == SpinIsomer::Para ? 0.0 : table14().level(1, -1).energy;
    double q = 0.0, low = 0.0;
    for (const auto& l : table14().levels()) {
      if (l.isomer != isomer) continue;
      const double b = (2 * l.j + 1) * std::exp(-(l.energy - e_low) / kt);
      q += b;
      if (l.j <= 4) low += b;
    }
    CHECK_THAT(e.partition, WithinRel(q, 1e-12));
    CHECK(low / q > 0.999);
    for (const auto& m : e.members) {
      CHECK_THAT(m.weight, WithinRel(std::exp(-(table14().level(m.j, m.tau).energy - e_low) / kt) / q, 1e-12));
    }
  }
}

TEST_CASE("pruning drops negligible levels and renormalizes", "[ensemble]") {
  const ThermalSpec spec{20.0, 14, 1e-4};
  const auto full = ensemble::boltzmann_weights(table14(), SpinIsomer::Para, spec, 0.0);
  const auto pruned = ensemble::boltzmann_weights(table14(), SpinIsomer::Para, spec);
  CHECK(pruned.members.size() < full.members.size());
  CHECK(pruned.members.size() + pruned.pruned_members == full.members.size());
  CHECK(pruned.pruned_weight > 0.0);
  CHECK(pruned.pruned_weight < 1e-6);
  CHECK_THAT(weight_sum(pruned), WithinAbs(1.0, 1e-12));
  for (const auto& m : pruned.members) CHECK(m.j <= 5);
}

TEST_CASE("field-free thermal alignment is isotropic", "[ensemble]") {
  const dynamics::TimeGrid grid{0.0, 5.0, 0.05};
  for (double temperature : {5.0, 20.0, 100.0}) {
    const ThermalSpec spec{temperature, 14, 1e-4};
    for (auto isomer : {SpinIsomer::Para, SpinIsomer::Ortho}) {
      const auto e = ensemble::boltzmann_weights(table14(), isomer, spec);
      const auto trace = ensemble::thermal_trace(e, {}, grid, table14());
      REQUIRE(trace.series.size() == 1);
      for (double v : trace.series[0].cos2) CHECK_THAT(v, WithinAbs(1.0 / 3.0, 1e-6));
    }
  }
}

TEST_CASE("zero-intensity pulse keeps the trace flat", "[ensemble]") {
  const ThermalSpec spec{20.0, 8, 1e-4};
  const auto table = rotor::build_eigentable(rotor::MolecularSpec::water(), 8);
  const auto e = ensemble::boltzmann_weights(table, SpinIsomer::Ortho, spec);
  const auto trace = ensemble::thermal_trace(e, {{{0.0, 20.0, 1.0}}}, {0.0, 3.0, 0.05}, table);
  for (double v : trace.series[0].cos2) CHECK_THAT(v, WithinAbs(1.0 / 3.0, 1e-12));
  REQUIRE(trace.series[0].kicks.size() == 1);
  CHECK_THAT(trace.series[0].kicks[0].energy_after, WithinAbs(trace.series[0].kicks[0].energy_before, 1e-12));
}

TEST_CASE("m and -m members evolve identically", "[ensemble]") {
  const auto& t = table14();
  const interaction::Rank2Couplings couplings(t);
  const dynamics::PulseSequence seq{{kPulse, {3e13, 20.0, 1.9}}};
  const dynamics::TimeGrid grid{0.0, 4.0, 0.02};
  for (auto [j, tau, m] : {std::tuple{1, 0, 1}, std::tuple{3, -2, 2}, std::tuple{4, 1, 3}}) {
    const auto plus = dynamics::run_sequence(t.state(j, tau, m), seq, grid, t, couplings);
    const auto minus = dynamics::run_sequence(t.state(j, tau, -m), seq, grid, t, couplings);
    for (std::size_t i = 0; i < plus.cos2.size(); ++i) CHECK_THAT(minus.cos2[i], WithinAbs(plus.cos2[i], 1e-12));
  }
}

TEST_CASE("thermal trace is the weighted sum of member traces", "[ensemble]") {
  const auto table = rotor::build_eigentable(rotor::MolecularSpec::water(), 8);
  const interaction::Rank2Couplings couplings(table);
  const ThermalSpec spec{10.0, 8, 1e-4};
  const dynamics::PulseSequence seq{{kPulse, {3e13, 20.0, 1.9}}};
  const dynamics::TimeGrid grid{0.0, 3.0, 0.01};
  for (auto isomer : {SpinIsomer::Para, SpinIsomer::Ortho}) {
    const auto e = ensemble::boltzmann_weights(table, isomer, spec);
    std::vector<double> cos2(grid.size(), 0.0), energy(grid.size(), 0.0);
    for (const auto& member : e.members) {
      const auto tr = dynamics::run_sequence(table.state(member.j, member.tau, member.m), seq, grid, table, couplings);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        cos2[i] += member.weight * tr.cos2[i];
        energy[i] += member.weight * tr.energy[i];
      }
    }
    ensemble::PropagationOptions folded;
    ensemble::PropagationOptions unfolded;
    unfolded.use_m_symmetry = false;
    const auto a = ensemble::thermal_trace(e, seq, grid, table, folded).series[0];
    const auto b = ensemble::thermal_trace(e, seq, grid, table, unfolded).series[0];
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK_THAT(a.cos2[i], WithinAbs(cos2[i], 1e-12));
      CHECK_THAT(b.cos2[i], WithinAbs(cos2[i], 1e-12));
      CHECK_THAT(a.energy[i], WithinAbs(energy[i], 1e-10));
    }
  }
}

TEST_CASE("thermal trace: ODE kicks match exact kicks", "[ensemble]") {
  const auto& t = table14();
  const ThermalSpec spec{20.0, 14, 1e-4};
  const auto e = ensemble::boltzmann_weights(t, SpinIsomer::Ortho, spec);
  const dynamics::PulseSequence seq{{kPulse}};
  const dynamics::TimeGrid grid{0.0, 3.0, 0.01};
  ensemble::PropagationOptions ode;
  ode.method = interaction::KickMethod::Ode;
  const auto a = ensemble::thermal_trace(e, seq, grid, t).series[0];
  const auto b = ensemble::thermal_trace(e, seq, grid, t, ode).series[0];
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK_THAT(b.cos2[i], WithinAbs(a.cos2[i], 1e-9));
}

TEST_CASE("thermal trace is bit-stable across thread counts", "[ensemble]") {
  const auto& t = table14();
  const auto e = ensemble::boltzmann_weights(t, SpinIsomer::Para, ThermalSpec{50.0, 14, 1e-4});
  const dynamics::PulseSequence seq{{kPulse}};
  const dynamics::TimeGrid grid{0.0, 2.0, 0.01};
  ensemble::PropagationOptions one, four;
  one.threads = 1;
  four.threads = 4;
  const auto a = ensemble::thermal_trace(e, seq, grid, t, one).series[0];
  const auto b = ensemble::thermal_trace(e, seq, grid, t, four).series[0];
  const auto c = ensemble::thermal_trace(e, seq, grid, t, four).series[0];
  CHECK(a.cos2 == b.cos2);
  CHECK(b.cos2 == c.cos2);
  CHECK(a.energy == b.energy);
}

TEST_CASE("pre-pulse samples carry the thermal energy", "[ensemble]") {
  const auto& t = table14();
  const auto e = ensemble::boltzmann_weights(t, SpinIsomer::Para, ThermalSpec{20.0, 14, 1e-4});
  double thermal = 0.0;
  for (const auto& m : e.members) thermal += m.weight * t.level(m.j, m.tau).energy;
  const auto s = ensemble::thermal_trace(e, {{{3e13, 20.0, 1.0}}}, {0.0, 2.0, 0.1}, t).series[0];
  CHECK_THAT(s.energy[0], WithinAbs(thermal, 1e-10));
  CHECK_THAT(s.cos2[5], WithinAbs(1.0 / 3.0, 1e-6));
  CHECK_THAT(s.kicks[0].energy_before, WithinAbs(thermal, 1e-10));
}

TEST_CASE("single default pulse at 20 K separates the isomers near 2 ps", "[ensemble][scenario]") {
  ensemble::Scenario sc;
  sc.sequence = {{kPulse}};
  sc.grid = {0.0, 3.0, 0.005};
  const auto trace = ensemble::run_scenario(sc, ThermalSpec{20.0, 14, 1e-4});
  const auto* para = trace.find(SpinIsomer::Para);
  const auto* ortho = trace.find(SpinIsomer::Ortho);
  REQUIRE(para != nullptr);
  REQUIRE(ortho != nullptr);
  bool found = false;
  double max_diff = 0.0;
  for (std::size_t i = 0; i < trace.time_ps.size(); ++i) {
    max_diff = std::max(max_diff, std::abs(para->cos2[i] - ortho->cos2[i]));
    const double t = trace.time_ps[i];
    if (t >= 1.7 && t <= 2.3 && para->cos2[i] > 1.0 / 3.0 && ortho->cos2[i] < 1.0 / 3.0) found = true;
  }
  CHECK(found);
  CHECK(max_diff > 0.01);
}

TEST_CASE("second pulse at 1.9 ps cools ortho and heats para", "[ensemble][scenario]") {
  ensemble::Scenario sc;
  sc.sequence = {{kPulse, {3e13, 20.0, 1.9}}};
  sc.grid = {0.0, 5.0, 0.05};
  const auto trace = ensemble::run_scenario(sc, ThermalSpec{20.0, 14, 1e-4});
  const auto& ok = trace.find(SpinIsomer::Ortho)->kicks;
  const auto& pk = trace.find(SpinIsomer::Para)->kicks;
  REQUIRE(ok.size() == 2);
  CHECK(ok[1].energy_after < ok[1].energy_before);
  CHECK(pk[1].energy_after > pk[1].energy_before);
}

TEST_CASE("J_max convergence ladder", "[ensemble]") {
  ensemble::Scenario flat;
  flat.grid = {0.0, 2.0, 0.05};
  const ThermalSpec spec{20.0, 14, 1e-4};
  const auto immediate = ensemble::converge_jmax(flat, spec, 6);
  CHECK(immediate.jmax == 6);
  REQUIRE(immediate.ladder.size() == 1);
  CHECK(immediate.ladder[0].second < 1e-6);

  CHECK_THROWS_AS(ensemble::converge_jmax(flat, spec, 3), ConfigError);

  ensemble::Scenario pulsed;
  pulsed.sequence = {{kPulse}};
  pulsed.grid = {0.0, 5.0, 0.01};
  const auto converged = ensemble::converge_jmax(pulsed, spec, 4);
  CHECK(converged.jmax <= 14);
  // Regression value for this scenario.
  CHECK(converged.jmax == 4);
  CHECK(converged.ladder.back().second < 1e-4);
  CHECK(converged.trace.series.size() == 2);

  ThermalSpec strict = spec;
  strict.convergence_tol = 0.0;
  CHECK_THROWS_AS(ensemble::converge_jmax(pulsed, strict, 4, 10), ConvergenceError);
}

TEST_CASE("alignment change between traces", "[ensemble]") {
  ensemble::AlignmentTrace a{{0.0, 1.0}, {{SpinIsomer::Para, {0.3, 0.4}, {0, 0}, {}}}};
  ensemble::AlignmentTrace b{{0.0, 1.0}, {{SpinIsomer::Para, {0.31, 0.35}, {0, 0}, {}}}};
  CHECK_THAT(ensemble::max_alignment_change(a, b), WithinAbs(0.05, 1e-15));
  ensemble::AlignmentTrace c{{0.0}, {}};
  CHECK_THROWS(ensemble::max_alignment_change(a, c));
}
