#pragma once

// Angular momentum about the symmetry axis for axial mode sets: helicity,
// total J along the axis, the sector decomposition of H_p and the labels of
// the ground sectors.

#include <span>
#include <string>
#include <vector>

#include "pflab/model.hpp"
#include "pflab/spectra.hpp"

namespace pflab {

/// Eigenvalue z of the axial angular momentum, stored as 2z. Half-integer
/// (2z odd) with spin, integer without.
struct SectorLabel {
  int twice_z = 1;

  bool half_integer() const { return twice_z % 2 != 0; }
  double value() const { return 0.5 * twice_z; }
  std::string str() const;
  friend auto operator<=>(const SectorLabel&, const SectorLabel&) = default;
};

/// n_hat . S_f on the boson factor: per k-point sign(k . n) i (a2^dag a1 - a1^dag a2).
/// Throws DomainError for non-axial mode sets.
SparseOp helicity_operator(const FockBasis& basis);

/// n_hat . J = n_hat . S_f + (1/2) n_hat . sigma on the full space (helicity
/// alone for spinless bases). n is the mode-set axis.
SparseOp total_Jz(const FockBasis& basis);

/// Unitary from the circular (helicity) occupation basis to the linear one,
/// on the full space. Column i is the basis state whose occupation vector is
/// read as (n_plus, n_minus) per k-point, with the spin factor rotated to the
/// eigenbasis of n . sigma (+1 first). Requires an axial set and
/// n_max >= N_max, so that the truncated space is rotation invariant.
SparseOp helicity_transform(const FockBasis& basis);

/// 2z for each helicity basis state (index as in helicity_transform).
std::vector<int> sector_twice_z(const FockBasis& basis);

struct SectorBlock {
  SectorLabel label;
  std::vector<std::size_t> indices;  // helicity basis indices
  SparseOp hamiltonian;              // block of W^dag H W
};

struct SectorDecomposition {
  std::vector<SectorBlock> blocks;  // ascending label
  SparseOp Jz;                      // in the linear basis
  SparseOp transform;               // W
  double commutator_norm = 0.0;     // max |[H, Jz]|
  double off_block_norm = 0.0;      // max |entry of W^dag H W| between sectors

  std::vector<SectorLabel> labels() const;
};

/// Throws DomainError if max |[H, Jz]| exceeds `tol`, naming the worst entry.
SectorDecomposition sector_decompose(const SparseOp& h, const FockBasis& basis, double tol = 1e-10);

struct SectorGround {
  SectorLabel label;
  std::size_t dimension = 0;
  double ground_energy = 0.0;
};

struct SectorReport {
  std::vector<SectorGround> sectors;
  double minimum = 0.0;
  std::vector<SectorLabel> ground_labels;  // sectors within eps_deg of the minimum
  bool expected_pair = false;              // ground_labels == {-1/2, +1/2}
};

SectorReport ground_sector_labels(const SectorDecomposition& decomposition, double eps_deg = 1e-8,
                                  const SolverOptions& options = {});

struct RotationReport {
  std::vector<double> energies;       // E(R p) per rotation
  double reference = 0.0;             // E(p)
  double max_discrepancy = 0.0;
};

/// E(p) against E(R p) for each R; R must map the mode set onto itself
/// (DomainError otherwise). Improper R = -1 is accepted as the parity flip.
RotationReport rotation_invariance_check(const FieldModel& model, double e, const Vec3& p,
                                         std::span<const Mat3> rotations, const SolverOptions& options = {});

/// Rotation by `angle` about `axis` (right-handed).
Mat3 rotation_about(const Vec3& axis, double angle);

}  // namespace pflab
