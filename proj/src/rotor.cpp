#include "wateralign/rotor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "wateralign/constants.hpp"
#include "wateralign/errors.hpp"

namespace wateralign::rotor {

namespace {

constexpr int parity_sign(int n) { return (n % 2 == 0) ? 1 : -1; }

constexpr double kEigenTolerance = 1e-10;

// Wang sector of a symmetric-top basis function: parity of k and the sign of
// the (|k> +- |-k>) combination. k = 0 sits in the '+' sectors.
struct Sector {
  int k_parity;
  int wang_sign;
};
constexpr std::array<Sector, 4> kSectors{{{0, +1}, {0, -1}, {1, +1}, {1, -1}}};

}  // namespace

MolecularSpec MolecularSpec::water() {
  MolecularSpec s;
  s.inertia_a = 1.025e-47;
  s.inertia_b = 1.921e-47;
  s.inertia_c = 2.946e-47;
  s.alpha_aa = 1.528;
  s.alpha_bb = 1.468;
  s.alpha_cc = 1.415;
  return s;
}

double MolecularSpec::planarity_defect() const {
  return std::abs(inertia_c - (inertia_a + inertia_b)) / inertia_c;
}

void MolecularSpec::validate() const {
  if (!(inertia_a > 0.0 && inertia_a < inertia_b && inertia_b < inertia_c)) {
    throw ConfigError("molecule: moments of inertia must satisfy 0 < I_a < I_b < I_c");
  }
  if (!(planarity_defect() < 1e-3)) {
    throw ConfigError("molecule: not planar, |I_c - I_a - I_b| / I_c = " +
                      std::to_string(planarity_defect()));
  }
}

double rotational_constant(double inertia) {
  return constants::planck /
         (8.0 * std::numbers::pi * std::numbers::pi * constants::speed_of_light_cm_per_s * inertia);
}

RotationalConstants rotational_constants(const MolecularSpec& spec) {
  return {rotational_constant(spec.inertia_a), rotational_constant(spec.inertia_b),
          rotational_constant(spec.inertia_c)};
}

std::array<int, 4> character_row(SymmetryLabel label) {
  switch (label) {
    case SymmetryLabel::A1: return {1, 1, 1, 1};
    case SymmetryLabel::A2: return {1, 1, -1, -1};
    case SymmetryLabel::B1: return {1, -1, -1, 1};
    case SymmetryLabel::B2: return {1, -1, 1, -1};
  }
  throw std::invalid_argument("character_row: bad label");
}

SpinIsomer isomer_of(SymmetryLabel label) {
  return (label == SymmetryLabel::A1 || label == SymmetryLabel::A2) ? SpinIsomer::Para
                                                                    : SpinIsomer::Ortho;
}

int statistical_weight(SpinIsomer isomer) { return isomer == SpinIsomer::Para ? 1 : 3; }

std::string_view to_string(SymmetryLabel label) {
  switch (label) {
    case SymmetryLabel::A1: return "A1";
    case SymmetryLabel::A2: return "A2";
    case SymmetryLabel::B1: return "B1";
    case SymmetryLabel::B2: return "B2";
  }
  return "?";
}

std::string_view to_string(SpinIsomer isomer) {
  return isomer == SpinIsomer::Para ? "para" : "ortho";
}

Eigen::MatrixXd build_hamiltonian_block(const MolecularSpec& spec, int j) {
  if (j < 0) throw std::invalid_argument("build_hamiltonian_block: negative J");
  const auto [a, b, c] = rotational_constants(spec);
  const int n = 2 * j + 1;
  const double jj = static_cast<double>(j) * (j + 1);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (int k = -j; k <= j; ++k) {
    h(k + j, k + j) = 0.5 * (b + c) * (jj - k * k) + a * k * k;
    if (k + 2 <= j) {
      const double off = 0.25 * (b - c) *
                         std::sqrt((jj - k * (k + 1.0)) * (jj - (k + 1.0) * (k + 2.0)));
      h(k + j + 2, k + j) = off;
      h(k + j, k + j + 2) = off;
    }
  }
  return h;
}

std::vector<BlockEigenpair> solve_block(const Eigen::MatrixXd& h, int j) {
  const int n = 2 * j + 1;
  if (h.rows() != n || h.cols() != n) throw std::invalid_argument("solve_block: size mismatch");

  // Orthogonal map from the Wang basis, grouped by sector, to |k>.
  Eigen::MatrixXd wang = Eigen::MatrixXd::Zero(n, n);
  std::array<std::vector<int>, 4> sector_cols;
  int col = 0;
  for (std::size_t s = 0; s < kSectors.size(); ++s) {
    const auto [k_parity, sign] = kSectors[s];
    for (int k = 0; k <= j; ++k) {
      if (k % 2 != k_parity) continue;
      if (k == 0) {
        if (sign < 0) continue;
        wang(j, col) = 1.0;
      } else {
        wang(j + k, col) = std::numbers::sqrt2 / 2.0;
        wang(j - k, col) = sign * std::numbers::sqrt2 / 2.0;
      }
      sector_cols[s].push_back(col++);
    }
  }

  const Eigen::MatrixXd hw = wang.transpose() * h * wang;
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  for (std::size_t s1 = 0; s1 < 4; ++s1) {
    for (std::size_t s2 = s1 + 1; s2 < 4; ++s2) {
      for (int r : sector_cols[s1]) {
        for (int c : sector_cols[s2]) {
          if (std::abs(hw(r, c)) > 1e-12 * scale) {
            throw NumericError("solve_block: Hamiltonian couples D2 symmetry sectors at J=" +
                               std::to_string(j));
          }
        }
      }
    }
  }

  struct Candidate {
    double energy;
    std::size_t sector;
    Eigen::VectorXd vec;
  };
  std::vector<Candidate> found;
  for (std::size_t s = 0; s < 4; ++s) {
    const auto& cols = sector_cols[s];
    if (cols.empty()) continue;
    const auto dim = static_cast<Eigen::Index>(cols.size());
    Eigen::MatrixXd sub(dim, dim);
    Eigen::MatrixXd basis(n, dim);
    for (Eigen::Index p = 0; p < dim; ++p) {
      basis.col(p) = wang.col(cols[p]);
      for (Eigen::Index q = 0; q < dim; ++q) sub(p, q) = hw(cols[p], cols[q]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub);
    for (Eigen::Index p = 0; p < dim; ++p) {
      found.push_back({es.eigenvalues()(p), s, basis * es.eigenvectors().col(p)});
    }
  }
  std::stable_sort(found.begin(), found.end(), [](const Candidate& x, const Candidate& y) {
    return x.energy < y.energy;
  });

  std::vector<BlockEigenpair> out;
  out.reserve(found.size());
  for (std::size_t i = 0; i < found.size(); ++i) {
    Eigen::VectorXd v = found[i].vec;
    v.normalize();
    int pivot = n - 1;
    for (int p = n - 2; p >= 0; --p) {
      if (std::abs(v(p)) > std::abs(v(pivot))) pivot = p;
    }
    if (v(pivot) < 0.0) v = -v;
    out.push_back({static_cast<int>(i) - j, found[i].energy,
                   std::vector<double>(v.data(), v.data() + n)});
  }
  return out;
}

std::vector<double> apply_rotation(Rotation op, std::span<const double> coeffs, int j) {
  const auto n = static_cast<std::size_t>(2 * j + 1);
  if (coeffs.size() != n) throw std::invalid_argument("apply_rotation: size mismatch");
  std::vector<double> out(n);
  for (int k = -j; k <= j; ++k) {
    const double mirrored = coeffs[static_cast<std::size_t>(j - k)];
    double value = 0.0;
    switch (op) {
      case Rotation::Identity: value = coeffs[static_cast<std::size_t>(k + j)]; break;
      case Rotation::Ra: value = parity_sign(k) * coeffs[static_cast<std::size_t>(k + j)]; break;
      case Rotation::Rb: value = parity_sign(j) * mirrored; break;
      case Rotation::Rc: value = parity_sign(j + k) * mirrored; break;
    }
    out[static_cast<std::size_t>(k + j)] = value;
  }
  return out;
}

Classification classify_symmetry(std::span<const double> coeffs, int j) {
  std::array<int, 4> chars{1, 0, 0, 0};
  const std::array<Rotation, 3> ops{Rotation::Rb, Rotation::Rc, Rotation::Ra};
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const auto image = apply_rotation(ops[i], coeffs, j);
    double overlap = 0.0;
    for (std::size_t p = 0; p < image.size(); ++p) overlap += image[p] * coeffs[p];
    const int sign = overlap >= 0.0 ? 1 : -1;
    double residual = 0.0;
    for (std::size_t p = 0; p < image.size(); ++p) {
      residual = std::max(residual, std::abs(image[p] - sign * coeffs[p]));
    }
    if (residual > kEigenTolerance) {
      throw ClassificationError("classify_symmetry: J=" + std::to_string(j) +
                                " vector is not a D2 eigenvector (residual " +
                                std::to_string(residual) + ")");
    }
    chars[i + 1] = sign;
  }
  for (auto label : {SymmetryLabel::A1, SymmetryLabel::A2, SymmetryLabel::B1, SymmetryLabel::B2}) {
    if (character_row(label) == chars) return {label, isomer_of(label)};
  }
  throw ClassificationError("classify_symmetry: no matching character row");
}

EigenstateTable::EigenstateTable(MolecularSpec spec, int jmax, std::vector<RotorLevel> levels)
    : spec_(spec), jmax_(jmax), constants_(rotational_constants(spec)), levels_(std::move(levels)) {
  const auto expected = static_cast<std::size_t>(jmax + 1) * static_cast<std::size_t>(jmax + 1);
  if (levels_.size() != expected) throw std::invalid_argument("EigenstateTable: level count");
}

std::size_t EigenstateTable::level_index(int j, int tau) const {
  if (j < 0 || j > jmax_ || std::abs(tau) > j) {
    throw std::out_of_range("EigenstateTable: no level J=" + std::to_string(j) +
                            " tau=" + std::to_string(tau));
  }
  return static_cast<std::size_t>(j * j + j + tau);
}

RotorEigenstate EigenstateTable::state(int j, int tau, int m) const {
  if (std::abs(m) > j) throw std::out_of_range("EigenstateTable::state: |m| > J");
  const RotorLevel& l = level(j, tau);
  return {l.j, l.tau, m, l.energy, l.coeffs, l.symmetry, l.isomer};
}

std::vector<RotorEigenstate> EigenstateTable::states() const {
  std::vector<RotorEigenstate> out;
  for (const auto& l : levels_) {
    for (int m = -l.j; m <= l.j; ++m) out.push_back({l.j, l.tau, m, l.energy, l.coeffs, l.symmetry, l.isomer});
  }
  return out;
}

EigenstateTable build_eigentable(const MolecularSpec& spec, int jmax) {
  if (jmax < 0) throw std::invalid_argument("build_eigentable: negative J_max");
  spec.validate();
  std::vector<RotorLevel> levels;
  levels.reserve(static_cast<std::size_t>(jmax + 1) * static_cast<std::size_t>(jmax + 1));
  for (int j = 0; j <= jmax; ++j) {
    for (auto& pair : solve_block(build_hamiltonian_block(spec, j), j)) {
      const auto cls = classify_symmetry(pair.coeffs, j);
      levels.push_back({j, pair.tau, pair.energy, std::move(pair.coeffs), cls.symmetry, cls.isomer});
    }
  }
  return EigenstateTable(spec, jmax, std::move(levels));
}

void write_levels_csv(const EigenstateTable& table, std::ostream& out) {
  out << "J,tau,energy_cm1,symmetry,isomer\n";
  char buf[64];
  for (const auto& l : table.levels()) {
    std::snprintf(buf, sizeof buf, "%.12g", l.energy);
    out << l.j << ',' << l.tau << ',' << buf << ',' << to_string(l.symmetry) << ','
        << to_string(l.isomer) << '\n';
  }
}

}  // namespace wateralign::rotor
