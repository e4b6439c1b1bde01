#include "wateralign/interaction.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "wateralign/angular.hpp"
#include "wateralign/constants.hpp"
#include "wateralign/errors.hpp"

namespace wateralign::interaction {

using rotor::EigenstateTable;

namespace {

constexpr int parity_sign(int n) { return (n % 2 == 0) ? 1 : -1; }

// Column-stacked level coefficients of one J block: (2J+1) x (2J+1), column tau + J.
Eigen::MatrixXd block_vectors(const EigenstateTable& table, int j) {
  const int n = 2 * j + 1;
  Eigen::MatrixXd v(n, n);
  for (int tau = -j; tau <= j; ++tau) {
    const auto& c = table.level(j, tau).coeffs;
    v.col(tau + j) = Eigen::Map<const Eigen::VectorXd>(c.data(), n);
  }
  return v;
}

}  // namespace

void PulseSpec::validate() const {
  if (!(peak_intensity >= 0.0)) throw ConfigError("pulse: intensity must be >= 0");
  if (!(sigma_fs > 0.0)) throw ConfigError("pulse: sigma_fs must be > 0");
}

double field_from_intensity(double intensity_w_cm2) {
  const double si = intensity_w_cm2 * constants::w_per_cm2_to_w_per_m2;
  return std::sqrt(2.0 * si / (constants::speed_of_light * constants::vacuum_permittivity));
}

double fluence_integral(const PulseSpec& pulse) {
  const double eps0 = field_from_intensity(pulse.peak_intensity);
  return std::sqrt(2.0 * std::numbers::pi) * pulse.sigma_fs * 1.0e-15 * eps0 * eps0;
}

KickCoefficients kick_strengths(const PulseSpec& pulse, const rotor::MolecularSpec& molecule) {
  const double to_si = 4.0 * std::numbers::pi * constants::vacuum_permittivity *
                       constants::angstrom3_to_m3;
  const double ab = molecule.alpha_aa - molecule.alpha_bb;
  const double ac = molecule.alpha_aa - molecule.alpha_cc;
  const double cb = molecule.alpha_cc - molecule.alpha_bb;
  const double scale = fluence_integral(pulse) / (4.0 * constants::hbar);
  return {-scale * (ab + ac) / 3.0 * to_si, scale * cb / std::sqrt(6.0) * to_si};
}

ImpulsiveCheck check_impulsive(const PulseSpec& pulse, const EigenstateTable& table) {
  double lo = 0.0, hi = 0.0;
  for (const auto& l : table.levels()) {
    lo = std::min(lo, l.energy);
    hi = std::max(hi, l.energy);
  }
  ImpulsiveCheck out;
  if (hi - lo <= 0.0) {
    out.shortest_period_ps = std::numeric_limits<double>::infinity();
    return out;
  }
  out.shortest_period_ps = 1.0 / (constants::speed_of_light_cm_per_ps * (hi - lo));
  out.impulsive = pulse.sigma_fs * 1.0e-3 <= 0.01 * out.shortest_period_ps;
  return out;
}

Rank2Couplings::Rank2Couplings(const EigenstateTable& table) : jmax_(table.jmax()) {
  const auto n_j = static_cast<std::size_t>(jmax_ + 1);
  const auto n_m = static_cast<std::size_t>(2 * jmax_ + 1);
  blocks_.resize(n_j * 5);
  lab_factors_.assign(n_j * 5 * n_m, 0.0);

  std::vector<Eigen::MatrixXd> vectors;
  vectors.reserve(n_j);
  for (int j = 0; j <= jmax_; ++j) vectors.push_back(block_vectors(table, j));

  for (int jb = 0; jb <= jmax_; ++jb) {
    for (int jk = std::max(0, jb - 2); jk <= std::min(jmax_, jb + 2); ++jk) {
      const auto slot = static_cast<std::size_t>(jb) * 5 + static_cast<std::size_t>(jk - jb + 2);
      if (!angular::triangle(jb, 2, jk)) continue;

      // Body part: (-1)^k sqrt((2J'+1)(2J+1)) (J' 2 J; k' s -k), k = k' + s.
      const double norm = std::sqrt((2.0 * jb + 1.0) * (2.0 * jk + 1.0));
      Eigen::MatrixXd r0 = Eigen::MatrixXd::Zero(2 * jb + 1, 2 * jk + 1);
      Eigen::MatrixXd r2 = r0;
      for (int kb = -jb; kb <= jb; ++kb) {
        for (int s : {0, 2, -2}) {
          const int kk = kb + s;
          if (std::abs(kk) > jk) continue;
          const double v = parity_sign(kk) * norm * angular::wigner_3j(jb, 2, jk, kb, s, -kk);
          (s == 0 ? r0 : r2)(kb + jb, kk + jk) += v;
        }
      }
      blocks_[slot].d00 = vectors[jb].transpose() * r0 * vectors[jk];
      blocks_[slot].d02_sum = vectors[jb].transpose() * r2 * vectors[jk];

      for (int m = -std::min(jb, jk); m <= std::min(jb, jk); ++m) {
        lab_factors_[slot * n_m + static_cast<std::size_t>(m + jmax_)] =
            parity_sign(m) * angular::wigner_3j(jb, 2, jk, m, 0, -m);
      }
    }
  }
}

const Rank2Couplings::PairBlocks& Rank2Couplings::pair(int j_bra, int j_ket) const {
  return blocks_[static_cast<std::size_t>(j_bra) * 5 + static_cast<std::size_t>(j_ket - j_bra + 2)];
}

double Rank2Couplings::lab_factor(int j_bra, int j_ket, int m) const {
  const auto slot =
      static_cast<std::size_t>(j_bra) * 5 + static_cast<std::size_t>(j_ket - j_bra + 2);
  return lab_factors_[slot * static_cast<std::size_t>(2 * jmax_ + 1) +
                      static_cast<std::size_t>(m + jmax_)];
}

Eigen::MatrixXd Rank2Couplings::assemble(int m, double w0, double w2) const {
  if (std::abs(m) > jmax_) throw std::out_of_range("Rank2Couplings::assemble: |m| > J_max");
  const int jmin = std::abs(m);
  const auto offset = static_cast<Eigen::Index>(m) * m;
  const auto dim = static_cast<Eigen::Index>(jmax_ + 1) * (jmax_ + 1) - offset;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, dim);
  for (int jb = jmin; jb <= jmax_; ++jb) {
    for (int jk = std::max(jmin, jb - 2); jk <= std::min(jmax_, jb + 2); ++jk) {
      const double f = lab_factor(jb, jk, m);
      if (f == 0.0) continue;
      const auto& p = pair(jb, jk);
      const Eigen::Index row = static_cast<Eigen::Index>(jb) * jb - offset;
      const Eigen::Index col = static_cast<Eigen::Index>(jk) * jk - offset;
      out.block(row, col, 2 * jb + 1, 2 * jk + 1) = f * (w0 * p.d00 + w2 * p.d02_sum);
    }
  }
  return out;
}

double isomer_leakage(const Eigen::MatrixXd& matrix, const EigenstateTable& table, int m) {
  const auto levels = table.levels().subspan(table.basis_offset(m));
  double worst = 0.0;
  for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
    for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
      if (levels[static_cast<std::size_t>(r)].isomer != levels[static_cast<std::size_t>(c)].isomer) {
        worst = std::max(worst, std::abs(matrix(r, c)));
      }
    }
  }
  return worst;
}

KickGenerator build_kick_generator(const KickCoefficients& betas, const Rank2Couplings& couplings,
                                   const EigenstateTable& table, int m) {
  if (std::abs(m) > table.jmax()) throw std::out_of_range("build_kick_generator: |m| > J_max");
  KickGenerator g{m, couplings.assemble(m, betas.beta1, betas.beta2)};
  const double asym = (g.matrix - g.matrix.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12) {
    throw NumericError("kick generator not symmetric (" + std::to_string(asym) + ")");
  }
  const double leak = isomer_leakage(g.matrix, table, m);
  if (leak > 1e-12) {
    throw LeakageError("kick generator couples para and ortho levels at m=" + std::to_string(m) +
                       " (" + std::to_string(leak) + ")");
  }
  return g;
}

KickGenerator build_kick_generator(const KickCoefficients& betas, const EigenstateTable& table,
                                   int m) {
  return build_kick_generator(betas, Rank2Couplings(table), table, m);
}

void kick_ode_columns(Eigen::MatrixXcd& columns, const Eigen::MatrixXd& generator, int steps) {
  if (steps <= 0) throw std::invalid_argument("kick_ode_columns: steps must be positive");
  if (generator.rows() != columns.rows()) throw std::invalid_argument("kick_ode_columns: size");
  const Eigen::VectorXd before = columns.colwise().norm().transpose();

  // dc/dxi = -i G c, split into re/im: d(re)/dxi = G im, d(im)/dxi = -G re.
  Eigen::MatrixXd re = columns.real();
  Eigen::MatrixXd im = columns.imag();
  const double h = 1.0 / steps;
  Eigen::MatrixXd k1r, k1i, k2r, k2i, k3r, k3i, k4r, k4i;
  for (int step = 0; step < steps; ++step) {
    k1r.noalias() = generator * im;
    k1i.noalias() = -(generator * re);
    k2r.noalias() = generator * (im + 0.5 * h * k1i);
    k2i.noalias() = -(generator * (re + 0.5 * h * k1r));
    k3r.noalias() = generator * (im + 0.5 * h * k2i);
    k3i.noalias() = -(generator * (re + 0.5 * h * k2r));
    k4r.noalias() = generator * (im + h * k3i);
    k4i.noalias() = -(generator * (re + h * k3r));
    re += (h / 6.0) * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
    im += (h / 6.0) * (k1i + 2.0 * k2i + 2.0 * k3i + k4i);
  }
  columns.real() = re;
  columns.imag() = im;

  const Eigen::VectorXd after = columns.colwise().norm().transpose();
  const double drift = (after - before).cwiseAbs().maxCoeff();
  if (!(drift < kNormDriftTolerance)) {
    throw IntegrationError("kick ODE norm drift " + std::to_string(drift) + " with " +
                           std::to_string(steps) + " steps; increase the step count");
  }
}

dynamics::WavepacketState apply_kick_ode(const dynamics::WavepacketState& state,
                                         const KickGenerator& generator, int steps) {
  if (state.m != generator.m) throw std::invalid_argument("apply_kick_ode: m mismatch");
  Eigen::MatrixXcd col = state.amplitudes;
  kick_ode_columns(col, generator.matrix, steps);
  return {state.m, col.col(0), state.t_ps};
}

Eigen::MatrixXcd kick_propagator(const Eigen::MatrixXd& generator) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(generator);
  const Eigen::VectorXcd phases =
      es.eigenvalues().unaryExpr([](double l) { return std::polar(1.0, -l); });
  const Eigen::MatrixXcd v = es.eigenvectors().cast<std::complex<double>>();
  return v * phases.asDiagonal() * v.transpose();
}

dynamics::WavepacketState apply_kick_exact(const dynamics::WavepacketState& state,
                                           const KickGenerator& generator) {
  if (state.m != generator.m) throw std::invalid_argument("apply_kick_exact: m mismatch");
  return {state.m, kick_propagator(generator.matrix) * state.amplitudes, state.t_ps};
}

}  // namespace wateralign::interaction
