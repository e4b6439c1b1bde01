#pragma once

// Rigid asymmetric-top rotor in the a-axis quantized symmetric-top basis,
// with C2v(M) symmetry classification of the eigenstates.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace wateralign::rotor {

/// Moments of inertia in kg m^2, polarizability volumes in Angstrom^3.
struct MolecularSpec {
  double inertia_a = 0.0;
  double inertia_b = 0.0;
  double inertia_c = 0.0;
  double alpha_aa = 0.0;
  double alpha_bb = 0.0;
  double alpha_cc = 0.0;

  /// H2O: principal moments from the planar equilibrium geometry and the
  /// static polarizability tensor in the principal-axis frame.
  static MolecularSpec water();

  /// Relative planarity defect |I_c - I_a - I_b| / I_c.
  double planarity_defect() const;

  /// Throws ConfigError unless 0 < I_a < I_b < I_c and the defect is below 1e-3.
  void validate() const;
};

/// Rotational constants in cm^-1.
struct RotationalConstants {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

/// h / (8 pi^2 c I) in cm^-1 for I in kg m^2.
double rotational_constant(double inertia);
RotationalConstants rotational_constants(const MolecularSpec& spec);

enum class SymmetryLabel { A1, A2, B1, B2 };
enum class SpinIsomer { Para, Ortho };

/// The C2v(M) operations E, (12), E*, (12)* act on rotational states as
/// R^0, R_b^pi, R_c^pi, R_a^pi.
enum class Rotation { Identity, Rb, Rc, Ra };

/// Character row over (E, (12), E*, (12)*).
std::array<int, 4> character_row(SymmetryLabel label);
SpinIsomer isomer_of(SymmetryLabel label);
/// Nuclear-spin statistical weight: 1 for para, 3 for ortho.
int statistical_weight(SpinIsomer isomer);
std::string_view to_string(SymmetryLabel label);
std::string_view to_string(SpinIsomer isomer);

/// One eigenpair of a J block. coeffs are indexed by k + J.
struct BlockEigenpair {
  int tau = 0;
  double energy = 0.0;
  std::vector<double> coeffs;
};

struct Classification {
  SymmetryLabel symmetry;
  SpinIsomer isomer;
};

/// One (J, tau) level; the same for every m.
struct RotorLevel {
  int j = 0;
  int tau = 0;
  double energy = 0.0;  // cm^-1, ground state at 0
  std::vector<double> coeffs;
  SymmetryLabel symmetry = SymmetryLabel::A1;
  SpinIsomer isomer = SpinIsomer::Para;
};

struct RotorEigenstate {
  int j = 0;
  int tau = 0;
  int m = 0;
  double energy = 0.0;
  std::vector<double> coeffs;
  SymmetryLabel symmetry = SymmetryLabel::A1;
  SpinIsomer isomer = SpinIsomer::Para;
};

/// (2J+1)x(2J+1) block of A Ja^2 + B Jb^2 + C Jc^2 in cm^-1, rows/cols k + J.
Eigen::MatrixXd build_hamiltonian_block(const MolecularSpec& spec, int j);

/// Diagonalizes a block from build_hamiltonian_block. The block is first split
/// into its four D2 symmetry sectors (Wang combinations of +-k), so every
/// eigenvector is symmetry adapted even when levels are numerically
/// degenerate. Eigenpairs come back in ascending energy with tau = -J..J and
/// the largest-magnitude coefficient positive (largest k wins ties).
/// Throws NumericError if the block couples different symmetry sectors.
std::vector<BlockEigenpair> solve_block(const Eigen::MatrixXd& h, int j);

/// Action of a D2 rotation on a coefficient vector over k = -J..J.
std::vector<double> apply_rotation(Rotation op, std::span<const double> coeffs, int j);

/// Throws ClassificationError if the vector is not a +-1 eigenvector of all
/// three rotations to 1e-10.
Classification classify_symmetry(std::span<const double> coeffs, int j);

class EigenstateTable {
 public:
  EigenstateTable(MolecularSpec spec, int jmax, std::vector<RotorLevel> levels);

  int jmax() const noexcept { return jmax_; }
  const MolecularSpec& molecule() const noexcept { return spec_; }
  const RotationalConstants& constants() const noexcept { return constants_; }

  /// Levels ordered by J, then tau.
  std::span<const RotorLevel> levels() const noexcept { return levels_; }
  std::size_t level_index(int j, int tau) const;
  const RotorLevel& level(int j, int tau) const { return levels_[level_index(j, tau)]; }

  RotorEigenstate state(int j, int tau, int m) const;
  /// Every (J, tau, m) with |m| <= J <= jmax.
  std::vector<RotorEigenstate> states() const;

  /// The basis for projection m is the levels with J >= |m|: a contiguous
  /// tail of levels() starting at m^2.
  std::size_t basis_offset(int m) const noexcept {
    return static_cast<std::size_t>(m) * static_cast<std::size_t>(m);
  }
  std::size_t basis_size(int m) const noexcept { return levels_.size() - basis_offset(m); }

 private:
  MolecularSpec spec_;
  int jmax_;
  RotationalConstants constants_;
  std::vector<RotorLevel> levels_;
};

/// Builds, solves and classifies every block up to jmax.
EigenstateTable build_eigentable(const MolecularSpec& spec, int jmax);

/// CSV with header J,tau,energy_cm1,symmetry,isomer.
void write_levels_csv(const EigenstateTable& table, std::ostream& out);

}  // namespace wateralign::rotor
