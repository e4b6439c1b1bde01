#pragma once

// Laser-molecule coupling in the impulsive limit: pulse -> kick strengths ->
// kick generator G in the rotor eigenbasis -> exp(-iG) applied to a state.

#include <vector>

#include <Eigen/Core>

#include "wateralign/rotor.hpp"
#include "wateralign/wavepacket.hpp"

namespace wateralign::interaction {

/// Gaussian intensity envelope eps^2(t) = eps0^2 exp(-(t - t0)^2 / 2 sigma^2).
struct PulseSpec {
  double peak_intensity = 0.0;  // W/cm^2
  double sigma_fs = 20.0;
  double t0_ps = 0.0;

  /// Throws ConfigError on negative intensity or non-positive sigma.
  void validate() const;
};

struct KickCoefficients {
  double beta1 = 0.0;  // multiplies D^2_00
  double beta2 = 0.0;  // multiplies D^2_02 + D^2_0-2
};

/// Peak field in V/m from I = c eps_vac eps0^2 / 2.
double field_from_intensity(double intensity_w_cm2);

/// Int eps^2 dt = sqrt(2 pi) sigma eps0^2, in V^2 s / m^2.
double fluence_integral(const PulseSpec& pulse);

/// beta1 = -(1/4hbar) (alpha_ab + alpha_ac)/3 Int eps^2 dt,
/// beta2 = +(1/4hbar) alpha_cb / sqrt(6) Int eps^2 dt,
/// with alpha_xy = alpha_xx - alpha_yy converted from volumes by 4 pi eps_vac.
KickCoefficients kick_strengths(const PulseSpec& pulse, const rotor::MolecularSpec& molecule);

struct ImpulsiveCheck {
  double shortest_period_ps = 0.0;  // 1 / (c (E_max - E_min)) over the table
  bool impulsive = true;            // sigma <= 1% of that period
};
ImpulsiveCheck check_impulsive(const PulseSpec& pulse, const rotor::EigenstateTable& table);

/// Rank-2 tensor elements <J'tau'm| D^2_0s |J tau m> in the eigenbasis.
/// Each element factorizes into an m-dependent 3-j symbol times an
/// m-independent body-frame block, so the body blocks are transformed to the
/// eigenbasis once per (J', J) and only rescaled per m.
class Rank2Couplings {
 public:
  explicit Rank2Couplings(const rotor::EigenstateTable& table);

  int jmax() const noexcept { return jmax_; }

  /// w0 D^2_00 + w2 (D^2_02 + D^2_0-2) over the m basis.
  Eigen::MatrixXd assemble(int m, double w0, double w2) const;

 private:
  struct PairBlocks {
    Eigen::MatrixXd d00;
    Eigen::MatrixXd d02_sum;
  };
  const PairBlocks& pair(int j_bra, int j_ket) const;
  double lab_factor(int j_bra, int j_ket, int m) const;

  int jmax_;
  std::vector<PairBlocks> blocks_;     // [j_bra][j_ket - j_bra + 2]
  std::vector<double> lab_factors_;    // [j_bra][j_ket - j_bra + 2][m + jmax]
};

struct KickGenerator {
  int m = 0;
  Eigen::MatrixXd matrix;  // real symmetric over the m basis
};

/// Throws LeakageError if |G(para, ortho)| exceeds 1e-12 anywhere and
/// NumericError if G is not symmetric to 1e-12.
KickGenerator build_kick_generator(const KickCoefficients& betas, const Rank2Couplings& couplings,
                                   const rotor::EigenstateTable& table, int m);
KickGenerator build_kick_generator(const KickCoefficients& betas,
                                   const rotor::EigenstateTable& table, int m);

/// Largest |M(i, j)| with i, j in different isomer sectors of the m basis.
double isomer_leakage(const Eigen::MatrixXd& matrix, const rotor::EigenstateTable& table, int m);

/// How a kick exp(-iG) is applied: the fixed-step xi-ODE or the
/// eigendecomposition of G. The two agree to 1e-8 at the default step count.
enum class KickMethod { Ode, Exact };

inline constexpr int kDefaultOdeSteps = 512;
inline constexpr double kNormDriftTolerance = 1e-10;

/// Integrates dc/dxi = -i G c over xi in [0, 1] with fixed-step RK4. No
/// renormalization; throws IntegrationError if any column's norm drifts by
/// 1e-10 or more.
void kick_ode_columns(Eigen::MatrixXcd& columns, const Eigen::MatrixXd& generator,
                      int steps = kDefaultOdeSteps);

dynamics::WavepacketState apply_kick_ode(const dynamics::WavepacketState& state,
                                         const KickGenerator& generator,
                                         int steps = kDefaultOdeSteps);

/// exp(-iG) from the eigendecomposition of G.
Eigen::MatrixXcd kick_propagator(const Eigen::MatrixXd& generator);

dynamics::WavepacketState apply_kick_exact(const dynamics::WavepacketState& state,
                                           const KickGenerator& generator);

}  // namespace wateralign::interaction
