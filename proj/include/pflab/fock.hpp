#pragma once

// Truncated spin (x) boson Fock space: photon modes, the occupation-number
// basis, and the elementary operators built on it.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "pflab/types.hpp"

namespace pflab {

/// One photon mode (k, j). `weight` is the quadrature cell volume V_m that
/// the discretised field amplitudes carry as sqrt(V_m).
struct Mode {
  Vec3 k = Vec3::Zero();
  double weight = 0.0;
  int polarization = 1;  // 1 or 2
};

/// Ordered photon modes. Each k-point contributes two consecutive modes,
/// polarization 1 then 2, so mode index = 2 * k_point + (j - 1).
class ModeSet {
 public:
  ModeSet() = default;

  /// Throws ConfigError on empty input, non-positive weights, non-finite or
  /// repeated k-points. The set is flagged axial when every k-point is
  /// parallel or antiparallel to a common axis; `axis_hint`, when given,
  /// fixes that axis (otherwise the direction of the first k-point is used).
  static ModeSet from_k_points(std::vector<Vec3> k_points, std::vector<double> weights,
                               std::optional<Vec3> axis_hint = std::nullopt);

  std::size_t size() const { return modes_.size(); }
  std::size_t k_point_count() const { return k_points_.size(); }
  const Mode& operator[](std::size_t m) const { return modes_[m]; }
  const std::vector<Mode>& modes() const { return modes_; }
  const Vec3& k_point(std::size_t i) const { return k_points_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }

  static constexpr std::size_t mode_index(std::size_t k_point, int polarization) {
    return 2 * k_point + static_cast<std::size_t>(polarization - 1);
  }
  static constexpr std::size_t k_point_of(std::size_t mode) { return mode / 2; }

  bool axial() const { return axial_; }
  /// Unit vector; meaningful only when axial().
  const Vec3& axis() const { return axis_; }

  /// True when k -> -k maps the set of k-points (with weights) onto itself.
  bool reflection_symmetric(double tol = 1e-12) const;
  /// True when R maps the set of k-points (with weights) onto itself.
  bool invariant_under(const Mat3& rotation, double tol = 1e-12) const;
  /// Index of the k-point equal to `k`, if any.
  std::optional<std::size_t> find_k_point(const Vec3& k, double tol = 1e-12) const;

 private:
  std::vector<Vec3> k_points_;
  std::vector<double> weights_;
  std::vector<Mode> modes_;
  bool axial_ = false;
  Vec3 axis_ = Vec3::UnitZ();
};

struct OccupationState {
  std::vector<int> occupations;
  int spin = 0;  // 0 = up, 1 = down; ignored for spinless bases
};

inline constexpr std::size_t kDefaultDimensionCap = 500000;

/// Number of occupation vectors over `modes` modes with sum <= total_max and
/// each entry <= per_mode_max. Saturates at SIZE_MAX.
std::size_t count_occupations(std::size_t modes, int total_max, int per_mode_max);

/// Enumerated basis of C^2 (x) F_trunc (or F_trunc when spinless).
///
/// Boson states are graded by photon number; inside a grade they run in
/// descending lexicographic order, so the one-photon states appear in mode
/// order right after the vacuum. The full index is spin-major:
/// index = spin * boson_dimension() + boson_index.
class FockBasis {
 public:
  FockBasis(ModeSet modes, int total_max, int per_mode_max, bool with_spin,
            std::size_t dimension_cap = kDefaultDimensionCap);

  std::size_t dimension() const { return spin_factor() * boson_dimension(); }
  std::size_t boson_dimension() const { return boson_count_; }
  std::size_t spin_factor() const { return with_spin_ ? 2 : 1; }
  bool with_spin() const { return with_spin_; }
  int total_max() const { return total_max_; }
  int per_mode_max() const { return per_mode_max_; }
  const ModeSet& mode_set() const { return modes_; }
  std::size_t mode_count() const { return modes_.size(); }

  std::span<const std::uint8_t> occupations(std::size_t boson_index) const {
    return {occupations_.data() + boson_index * mode_count(), mode_count()};
  }
  int occupation(std::size_t boson_index, std::size_t mode) const {
    return occupations_[boson_index * mode_count() + mode];
  }
  int photon_number(std::size_t boson_index) const { return photon_numbers_[boson_index]; }

  std::size_t index(int spin, std::size_t boson_index) const {
    return static_cast<std::size_t>(spin) * boson_count_ + boson_index;
  }
  std::size_t boson_index_of(std::size_t index) const { return index % boson_count_; }
  int spin_of(std::size_t index) const { return static_cast<int>(index / boson_count_); }

  /// Index of the vacuum with the given spin.
  std::size_t vacuum_index(int spin = 0) const { return index(spin, 0); }

  /// Boson index of an occupation vector, or nullopt if it lies outside the
  /// truncation.
  std::optional<std::size_t> find_boson(std::span<const std::uint8_t> occ) const;
  std::optional<std::size_t> find_boson(std::span<const int> occ) const;

  /// Throws DomainError for inadmissible states / out-of-range indices.
  std::size_t rank(const OccupationState& state) const;
  OccupationState unrank(std::size_t index) const;

 private:
  ModeSet modes_;
  int total_max_;
  int per_mode_max_;
  bool with_spin_;
  std::size_t boson_count_ = 0;
  std::vector<std::uint8_t> occupations_;
  std::vector<int> photon_numbers_;
  std::unordered_map<std::string, std::size_t> lookup_;
};

FockBasis enumerate_basis(const ModeSet& modes, int total_max, int per_mode_max, bool with_spin,
                          std::size_t dimension_cap = kDefaultDimensionCap);

// Operators on the boson factor (boson_dimension() square).

SparseOp annihilation_matrix(const FockBasis& basis, std::size_t mode);
/// Exactly the adjoint of annihilation_matrix on the truncated space.
SparseOp creation_matrix(const FockBasis& basis, std::size_t mode);
SparseOp number_operator(const FockBasis& basis);
/// Diagonal sum_m omega(k_m) n_m; `omega_per_k_point` is indexed by k-point.
SparseOp field_energy(const FockBasis& basis, std::span<const double> omega_per_k_point);
std::array<SparseOp, 3> field_momentum(const FockBasis& basis);
SparseOp boson_identity(const FockBasis& basis);

/// sigma_pauli (x) boson_op in spin-major order; pauli 0 is the identity.
/// On a spinless basis only pauli 0 is accepted and the operator is returned
/// unchanged.
SparseOp spin_tensor(int pauli, const SparseOp& boson_op, const FockBasis& basis);

/// The 2x2 Pauli matrix (index 0 = identity).
Eigen::Matrix2cd pauli_matrix(int index);

/// Principal submatrix of `op` on the given row/column indices.
SparseOp restrict_to(const SparseOp& op, std::span<const std::size_t> indices);

}  // namespace pflab
