#pragma once

// Physical content of the fibered Hamiltonian
//
//   H_p = 1/2 (p - P_f - e A)^2 - (e/2) sigma . B + H_f
//
// on the truncated space: dispersion, form factor, polarization gauge, the
// field operators at x = 0 and the assembled Hamiltonian. Units m = hbar = c = 1.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pflab/fock.hpp"
#include "pflab/quadrature.hpp"
#include "pflab/types.hpp"

namespace pflab {

/// (2 pi)^(-3/2): the required value of the form factor at k = 0.
inline constexpr double kFormFactorOrigin = 0.063493635934240969;

enum class DispersionKind { massive, massless, custom };

/// Photon dispersion omega(k), a function of |k| only.
class Dispersion {
 public:
  static Dispersion massive(double photon_mass);
  static Dispersion massless();
  /// Piecewise-linear in |k| through the samples (sorted by |k|), linearly
  /// extrapolated beyond the ends.
  static Dispersion custom(std::vector<std::pair<double, double>> table);

  DispersionKind kind() const { return kind_; }
  double photon_mass() const { return mass_; }
  const std::vector<std::pair<double, double>>& table() const { return table_; }

  double operator()(double k_abs) const;
  double operator()(const Vec3& k) const { return (*this)(k.norm()); }

 private:
  DispersionKind kind_ = DispersionKind::massive;
  double mass_ = 1.0;
  std::vector<std::pair<double, double>> table_;
};

enum class FormFactorKind { gaussian, sharp };

/// phi_hat(k): gaussian  scale (2pi)^(-3/2) exp(-|k|^2 / 2 lambda^2)
///             sharp     scale (2pi)^(-3/2) 1{|k| <= lambda}
/// `scale` = 1 is the normalised form factor.
class FormFactor {
 public:
  static FormFactor gaussian(double lambda, double scale = 1.0);
  static FormFactor sharp(double lambda, double scale = 1.0);

  FormFactorKind kind() const { return kind_; }
  double lambda() const { return lambda_; }
  double scale() const { return scale_; }

  double operator()(double k_abs) const;
  double operator()(const Vec3& k) const { return (*this)(k.norm()); }

  /// Radius beyond which the form factor is negligible (gaussian) or zero.
  double natural_radius() const;

 private:
  FormFactorKind kind_ = FormFactorKind::gaussian;
  double lambda_ = 1.0;
  double scale_ = 1.0;
};

/// All k on +-axis; Gauss-Legendre nodes in |k| on [0, k_max]. Each node
/// carries the shell volume 4 pi k^2 w, split evenly between +k and -k when
/// symmetric.
struct AxialModeSpec {
  Vec3 axis = Vec3::UnitZ();
  int radial_nodes = 3;
  double k_max = 3.0;
  bool symmetric = true;
};

/// Cubic lattice of points_per_axis^3 points with the given spacing, centred
/// on the origin (the origin itself is dropped); weight spacing^3.
struct CubicModeSpec {
  int points_per_axis = 2;
  double spacing = 1.0;
};

struct ExplicitModeSpec {
  std::vector<Vec3> k_points;
  std::vector<double> weights;
  std::optional<Vec3> axis;
};

using ModeSetSpec = std::variant<AxialModeSpec, CubicModeSpec, ExplicitModeSpec>;

ModeSet build_mode_set(const ModeSetSpec& spec);

/// Dedicated grid for the scalar momentum integrals (coupling bound, theta,
/// the spinless uniqueness integral). radius <= 0 selects the form factor's
/// natural radius.
struct QuadratureSettings {
  double radius = 0.0;
  int radial_panels = 64;
  int radial_order = 8;
  int angular_nodes = 48;
};

struct ModelConfig {
  Dispersion dispersion = Dispersion::massive(1.0);
  FormFactor form_factor = FormFactor::gaussian(1.0);
  double coupling = 0.0;          // e
  Vec3 momentum = Vec3::Zero();   // p
  bool with_spin = true;
  ModeSetSpec mode_spec = AxialModeSpec{};
  int total_max = 2;              // N_max
  int per_mode_max = 2;           // n_max
  std::size_t dimension_cap = kDefaultDimensionCap;
  QuadratureSettings quadrature;

  ModeSet mode_set() const { return build_mode_set(mode_spec); }
  FockBasis basis() const {
    return FockBasis(mode_set(), total_max, per_mode_max, with_spin, dimension_cap);
  }
};

MomentumGrid momentum_grid(const ModelConfig& config);

/// Right-handed transverse frame: e1 = z x k^ / |z x k^|, e2 = k^ x e1; for k
/// along +-z, e1 = x and e2 = +-y. Throws DomainError for k = 0.
struct PolarizationFrame {
  Vec3 e1;
  Vec3 e2;
  const Vec3& operator[](int polarization) const { return polarization == 1 ? e1 : e2; }
};
PolarizationFrame polarization_frame(const Vec3& k);

/// phi_hat(k_m) sqrt(V_m / (2 omega(k_m))) per mode.
std::vector<double> mode_amplitudes(const ModelConfig& config, const ModeSet& modes);

/// Field operators of one configuration on its truncated basis. They depend
/// on neither e nor p, so one instance serves a whole sweep.
///
/// Quadratic field terms are formed on a basis extended by one quantum in
/// both cutoffs and then compressed, which makes the truncated Hamiltonian
/// the exact compression P H P of the untruncated one.
class FieldModel {
 public:
  explicit FieldModel(const ModelConfig& config);

  const ModelConfig& config() const { return config_; }
  const FockBasis& basis() const { return basis_; }

  // Boson-factor operators on basis().
  const std::array<SparseOp, 3>& vector_potential() const { return vector_potential_; }
  const std::array<SparseOp, 3>& magnetic_field() const { return magnetic_field_; }
  const std::array<SparseOp, 3>& field_momentum() const { return field_momentum_; }
  const SparseOp& field_energy() const { return field_energy_; }
  const SparseOp& number() const { return number_; }
  /// sum_mu P A_mu A_mu P.
  const SparseOp& vector_potential_square() const { return vector_potential_square_; }
  const std::vector<double>& omega_per_k_point() const { return omega_; }
  const std::vector<double>& amplitudes() const { return amplitudes_; }

  /// sum_mu P (p - P_f - e A)_mu^2 P, from explicit products on the extended
  /// basis.
  SparseOp kinetic_square(const Vec3& p, double e) const;

  /// Full-space operators for given (p, e).
  SparseOp hamiltonian(const Vec3& p, double e) const;
  SparseOp free_hamiltonian(const Vec3& p) const;
  SparseOp interaction(const Vec3& p, double e) const;

  /// Lift a boson-factor operator to the full space.
  SparseOp lift(const SparseOp& boson_op, int pauli = 0) const { return spin_tensor(pauli, boson_op, basis_); }

 private:
  ModelConfig config_;
  FockBasis basis_;
  FockBasis extended_;
  std::vector<std::size_t> embedding_;  // basis boson index -> extended boson index
  std::vector<double> omega_;
  std::vector<double> amplitudes_;
  std::array<SparseOp, 3> vector_potential_;
  std::array<SparseOp, 3> magnetic_field_;
  std::array<SparseOp, 3> field_momentum_;
  SparseOp field_energy_;
  SparseOp number_;
  SparseOp vector_potential_square_;
  std::array<SparseOp, 3> extended_vector_potential_;
  std::array<SparseOp, 3> extended_field_momentum_;
};

std::array<SparseOp, 3> build_vector_potential(const ModelConfig& config);
std::array<SparseOp, 3> build_magnetic_field(const ModelConfig& config);
/// H_p on C^2 (x) F_trunc (or F_trunc spinless), exactly Hermitian.
SparseOp assemble_hamiltonian(const ModelConfig& config);
/// H_{p0} = 1/2 (p - P_f)^2 + H_f.
SparseOp free_hamiltonian(const ModelConfig& config);
/// H_I = -e (p - P_f).A + e^2/2 A^2 - (e/2) sigma . B, with the cross term
/// symmetrised.
SparseOp interaction_part(const ModelConfig& config);

/// Diagnostic c0(e) = |e| sqrt(I1) + e^2 I2 with the order-one constant set
/// to 1; I1 = int (omega^-2 + omega) phi^2, I2 = int (omega^-2 + 1) phi^2.
struct CouplingBound {
  double value = 0.0;
  double first_integral = 0.0;
  double second_integral = 0.0;
  bool finite = true;
};
CouplingBound coupling_bound(const ModelConfig& config);
CouplingBound coupling_bound(const ModelConfig& config, double e);

struct AxiomCheck {
  bool passed = true;
  double worst_margin = 0.0;
  Vec3 witness_k1 = Vec3::Zero();
  Vec3 witness_k2 = Vec3::Zero();
};

struct DispersionAxiomReport {
  AxiomCheck positivity;           // omega >= omega_0 > 0
  AxiomCheck subadditivity;
  AxiomCheck rotation_invariance;
  bool all_passed() const {
    return positivity.passed && subadditivity.passed && rotation_invariance.passed;
  }
};

/// Samples |k| up to `sample_radius`; always includes k = 0 and the pair
/// k1 = k2 = (1, 0, 0).
DispersionAxiomReport check_dispersion_axioms(const Dispersion& dispersion, int sample_count,
                                              std::uint64_t seed, double sample_radius = 10.0);

struct FormFactorReport {
  double value_at_origin = 0.0;
  bool normalized = false;
  /// int omega^-2 phi^2, int omega^-1 phi^2, int phi^2, int omega phi^2.
  std::array<double, 4> decay_integrals{};
  bool decay_finite = false;
};
FormFactorReport check_form_factor(const ModelConfig& config);

}  // namespace pflab
