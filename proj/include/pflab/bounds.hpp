#pragma once

// Quantitative checks on ground states: the photon-number bound via theta(p),
// the vacuum overlap, the structure of P0 Pg P0, the e0 threshold and the
// spinless uniqueness condition.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pflab/model.hpp"
#include "pflab/spectra.hpp"

namespace pflab {

inline constexpr double kDenominatorFloor = 1e-6;

// ------------------------------------------------------------------ theta

struct ThetaResult {
  double value = 0.0;
  double min_denominator = 0.0;  // min of E(p-k) + omega(k) - E(p) over the grid
  double energy_spacing = 0.0;   // sample spacing of the E profile
};

/// theta(p) = 2 int (|k|^2/4 + 6 E(p)) / (E(p-k) + omega(k) - E(p))^2 phi^2 / omega dk
/// on the configuration's radial x angular grid (angle measured from p).
/// E(p-k) is read from the radial profile, so the result depends on p only
/// through |p|. Throws NumericalError when a denominator falls below `floor`.
ThetaResult theta(const ModelConfig& config, const Vec3& p, const std::function<double(double)>& energy_of_radius,
                  double energy_at_p, double floor = kDenominatorFloor);
ThetaResult theta(const ModelConfig& config, const Vec3& p, const RadialEnergy& energy,
                  double floor = kDenominatorFloor);

/// Radial E profile long enough for theta at momentum p.
RadialEnergy theta_energy_profile(const FieldModel& model, double e, const Vec3& p, double spacing = 0.1,
                                  const SweepOptions& options = {}, SweepCache* cache = nullptr);

/// Direction along which E profiles are sampled: the mode-set axis when
/// axial, otherwise p (or z when p = 0).
Vec3 profile_direction(const FieldModel& model, const Vec3& p);

// ------------------------------------------------------ vacuum projector

/// P0 = 1 (x) |Omega><Omega| on the truncated basis.
struct VacuumProjector {
  std::vector<std::size_t> indices;  // basis indices of spin (x) vacuum

  explicit VacuumProjector(const FockBasis& basis);
  std::size_t rank() const { return indices.size(); }
  SparseOp matrix(std::size_t dimension) const;
  double expectation(const StateVector& psi) const;
};

// ----------------------------------------------------- photon-number bound

struct LemmaFpReport {
  double lhs = 0.0;      // max of <Psi, N_f Psi> over unit vectors in the cluster
  double average = 0.0;  // trace(P_g N_f) / count
  double rhs = 0.0;      // e^2 theta(p)
  double ratio = 0.0;    // lhs / rhs (0 when both vanish)
  double slack = 0.1;
  bool passed = true;
};

/// Boson-factor number operator N_f lifted to the full space.
LemmaFpReport verify_lemma_fp(const GroundCluster& cluster, const FieldModel& model, double e, double theta_value,
                              double slack = 0.1);

/// || a_m Psi - e c_m (H_{p-k_m} + omega - E)^{-1} {pi . e_j + (1/2) sigma . (i k ^ e_j)} Psi || / ||Psi||
/// with pi = p - P_f - e A. Throws NumericalError when the shifted operator
/// has an eigenvalue below the denominator floor.
double pull_through_residual(const FieldModel& model, double e, const Vec3& p, const StateVector& psi, double energy,
                             std::size_t mode, double floor = kDenominatorFloor);

// ---------------------------------------------------- degeneracy bounds

struct UpperBoundReport {
  bool hypothesis = false;  // |e| < 1 / sqrt(3 theta)
  double bound_value = 0.0;  // 2 / (1 - e^2 theta); +inf when e^2 theta >= 1
  int count = 0;
  bool passed = true;        // count <= 2 whenever the hypothesis holds
  bool chain_consistent = true;
};
UpperBoundReport upper_bound_check(const GroundCluster& cluster, double e, double theta_value,
                                   double vacuum_trace);

struct VacuumOverlapReport {
  std::vector<double> overlaps;  // <Psi_i, P0 Psi_i> per cluster vector
  double minimum = 0.0;
  double trace = 0.0;            // trace(P_g P0)
  double lower_bound = 0.0;      // 1 - e^2 theta
  bool passed = true;            // minimum >= lower_bound
};
VacuumOverlapReport vacuum_overlap(const GroundCluster& cluster, const FockBasis& basis, double e,
                                   double theta_value);

struct GramReport {
  Eigen::Matrix2cd gram;  // <x_i (x) Omega, P_g x_j (x) Omega>
  double a = 0.0;         // trace / 2
  double defect = 0.0;    // max |G - a I|
  double diagonal_gap = 0.0;  // |G_11 - G_22|
  double off_diagonal = 0.0;  // |G_12|
};
/// Requires a certified twofold cluster on a spin basis; throws DomainError
/// otherwise.
GramReport p0_gram(const GroundCluster& cluster, const FockBasis& basis);

// ---------------------------------------------------------- e0 threshold

struct E0Result {
  double value = 0.0;
  bool empty = false;           // no admissible coupling on the grid
  std::string binding;          // "theta", "coupling_bound", "both" or "grid"
  double theta_at_value = 0.0;
  double coupling_bound_at_value = 0.0;
};

/// Largest |e| on the ascending grid with e < 1/sqrt(3 theta(e)) and
/// c0(e) < 1, every smaller grid point also admissible, refined by bisection
/// towards the first inadmissible grid point.
E0Result e0_threshold(const std::function<double(double)>& theta_of_e,
                      const std::function<double(double)>& coupling_bound_of_e, std::span<const double> e_grid,
                      int bisection_steps = 30);

// ------------------------------------------------------ spinless condition

struct SpinlessReport {
  double integral = 0.0;        // int E(p) / (E(p-k) + omega - E(p))^2 phi^2 / omega dk
  double threshold = 0.0;       // (1/2) / integral, +inf when the integral vanishes
  bool hypothesis = false;      // e^2 <= threshold
  int degeneracy = 0;
  double gap_above = 0.0;
  bool passed = true;           // degeneracy 1 with positive gap whenever the hypothesis holds
};
SpinlessReport spinless_uniqueness_check(const ModelConfig& config, const Vec3& p, const RadialEnergy& energy,
                                         const GroundCluster& cluster, double floor = kDenominatorFloor);

// -------------------------------------------------------------- full suite

struct BoundSuiteOptions {
  SweepOptions sweep;
  double profile_spacing = 0.1;
  double slack = 0.1;
  std::vector<double> e_grid;  // empty: 0, 0.25, ..., 5
  int bisection_steps = 20;
  bool compute_e0 = true;
};

struct BoundReport {
  Vec3 p = Vec3::Zero();
  double e = 0.0;
  bool with_spin = true;
  GroundCluster cluster;
  ThetaResult theta;
  LemmaFpReport lemma_fp;
  UpperBoundReport upper;
  VacuumOverlapReport overlap;
  std::optional<GramReport> gram;
  std::optional<E0Result> e0;
  std::optional<SpinlessReport> spinless;
  double coupling_bound = 0.0;
  /// |e| < e0 and Delta(p) > 0 as evaluated here (Delta from the cluster gap).
  bool hypotheses_hold = false;
  bool conclusion_observed = false;
};

BoundReport run_bound_suite(const FieldModel& model, const BoundSuiteOptions& options = {},
                            SweepCache* cache = nullptr);

}  // namespace pflab
