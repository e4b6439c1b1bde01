#pragma once

// Thermal averaging over initial eigenstates, one spin isomer at a time.
//
// Para and ortho never mix, so each isomer is normalized by its own
// partition function and both traces start at exactly 1/3. The 3:1 nuclear
// spin weight is carried as metadata only.

#include <optional>
#include <utility>
#include <vector>

#include "wateralign/dynamics.hpp"
#include "wateralign/interaction.hpp"
#include "wateralign/rotor.hpp"

namespace wateralign::ensemble {

struct ThermalSpec {
  double temperature_k = 20.0;
  int jmax = 14;
  double convergence_tol = 1e-4;

  void validate() const;
};

/// Levels whose Boltzmann weight falls below this are dropped.
inline constexpr double kPruneThreshold = 1e-8;

struct EnsembleMember {
  int j = 0;
  int tau = 0;
  int m = 0;
  double weight = 0.0;
};

struct ThermalEnsemble {
  rotor::SpinIsomer isomer = rotor::SpinIsomer::Para;
  double temperature_k = 0.0;
  int jmax = 0;
  std::vector<EnsembleMember> members;  // ordered by (J, tau, m)
  double partition = 0.0;               // sum over retained members of exp(-(E - E_low)/kT)
  double pruned_weight = 0.0;           // weight fraction dropped before renormalizing
  std::size_t pruned_members = 0;
  int spin_weight = 1;
};

/// Members are all (J, tau, m) of the isomer with J <= thermal.jmax, every m
/// enumerated explicitly. Weights exp(-E/kT)/Q are renormalized over the
/// members that survive pruning, so they sum to 1. Energies are measured from
/// the isomer's lowest level, which keeps Q finite as T -> 0.
ThermalEnsemble boltzmann_weights(const rotor::EigenstateTable& table, rotor::SpinIsomer isomer,
                                  const ThermalSpec& thermal,
                                  double prune_threshold = kPruneThreshold);

struct IsomerSeries {
  rotor::SpinIsomer isomer = rotor::SpinIsomer::Para;
  std::vector<double> cos2;
  std::vector<double> energy;  // cm^-1
  std::vector<dynamics::KickRecord> kicks;
};

struct AlignmentTrace {
  std::vector<double> time_ps;
  std::vector<IsomerSeries> series;  // para before ortho when both present

  const IsomerSeries* find(rotor::SpinIsomer isomer) const;
};

struct PropagationOptions {
  interaction::KickMethod method = interaction::KickMethod::Exact;
  int ode_steps = interaction::kDefaultOdeSteps;
  /// Fold each -m member onto +m (identical dynamics), halving the work.
  bool use_m_symmetry = true;
  /// 0: use worker_count().
  unsigned threads = 0;
};

/// Propagates thermal ensembles over one eigenstate table. Members sharing
/// (m, isomer) are evolved together as a weighted block of state vectors;
/// between kicks the sampled value is Tr(rho(t) cos^2) with rho evolved by
/// exact phases. Groups run in parallel and are reduced in fixed m order.
class ThermalPropagator {
 public:
  explicit ThermalPropagator(const rotor::EigenstateTable& table, PropagationOptions options = {});

  IsomerSeries run(const ThermalEnsemble& ensemble, const dynamics::PulseSequence& sequence,
                   const dynamics::TimeGrid& grid) const;

  const rotor::EigenstateTable& table() const noexcept { return table_; }

 private:
  const rotor::EigenstateTable& table_;
  interaction::Rank2Couplings couplings_;
  PropagationOptions options_;
};

AlignmentTrace thermal_trace(const ThermalEnsemble& ensemble, const dynamics::PulseSequence& sequence,
                             const dynamics::TimeGrid& grid, const rotor::EigenstateTable& table,
                             const PropagationOptions& options = {});

/// Everything except the basis size: what converge_jmax re-runs.
struct Scenario {
  rotor::MolecularSpec molecule = rotor::MolecularSpec::water();
  dynamics::PulseSequence sequence;
  dynamics::TimeGrid grid;
  std::vector<rotor::SpinIsomer> species{rotor::SpinIsomer::Para, rotor::SpinIsomer::Ortho};
  PropagationOptions options;
};

/// Builds the table at thermal.jmax and runs every requested species.
AlignmentTrace run_scenario(const Scenario& scenario, const ThermalSpec& thermal);

/// Largest |cos2| difference between two traces over the species both hold.
double max_alignment_change(const AlignmentTrace& a, const AlignmentTrace& b);

inline constexpr int kDefaultJmaxCap = 30;

struct ConvergedTrace {
  int jmax = 0;
  AlignmentTrace trace;
  std::vector<std::pair<int, double>> ladder;  // (J_max, change against J_max + 2)
};

/// Raises J_max by 2 from start_jmax until the alignment traces at J_max and
/// J_max + 2 differ by less than thermal.convergence_tol everywhere; returns
/// that J_max with its trace. Throws ConvergenceError once J_max + 2 would
/// pass the cap.
ConvergedTrace converge_jmax(const Scenario& scenario, const ThermalSpec& thermal, int start_jmax,
                             int cap = kDefaultJmaxCap);

}  // namespace wateralign::ensemble
