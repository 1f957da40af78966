#pragma once

// Lowest eigenpairs of sparse Hermitian operators, ground-cluster detection,
// E(p) sweeps and the continuous-spectrum gap estimate.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <random>
#include <span>
#include <tuple>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "pflab/model.hpp"
#include "pflab/sparse.hpp"
#include "pflab/types.hpp"

namespace pflab {

enum class SolverMethod { automatic, dense, lanczos };

const char* to_string(SolverMethod method);

struct SolverOptions {
  int n_eig = 6;
  double tol = 1e-10;
  std::uint64_t seed = kDefaultSeed;
  SolverMethod method = SolverMethod::automatic;
  std::size_t dense_threshold = 256;  // automatic picks dense at or below this dimension
  int krylov_dim = 60;
  int max_restarts = 300;
  bool vectors = true;  // false: the dense path skips eigenvectors (residuals are then not computed)
};

template <typename Scalar>
struct SpectralResult {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  std::vector<double> eigenvalues;  // ascending
  Matrix eigenvectors;              // orthonormal columns
  std::vector<double> residual_norms;
  SolverMethod method = SolverMethod::dense;
};

namespace detail {

inline double draw_uniform(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> random_vector(Eigen::Index n, std::mt19937_64& gen) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if constexpr (std::is_same_v<Scalar, double>) {
      v[i] = draw_uniform(gen);
    } else {
      const double re = draw_uniform(gen);
      const double im = draw_uniform(gen);
      v[i] = Scalar(re, im);
    }
  }
  return v;
}

/// Orthogonalizes v against the first `count` columns of Q twice (classical
/// Gram-Schmidt with reorthogonalization); returns the remaining norm.
template <typename Scalar>
double orthogonalize(Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& v,
                     const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& q, Eigen::Index count) {
  if (count > 0)
    for (int pass = 0; pass < 2; ++pass) v -= q.leftCols(count) * (q.leftCols(count).adjoint() * v);
  return v.norm();
}

template <typename Scalar>
void check_input(const Eigen::SparseMatrix<Scalar>& h, int n_eig) {
  if (h.rows() != h.cols()) throw DomainError("solve_lowest: matrix is not square");
  const double defect = hermiticity_defect(h);
  if (defect > 1e-12 * std::max(1.0, max_abs_entry(h)))
    throw DomainError(fmt::format("solve_lowest: matrix is not Hermitian (max |H - H^dagger| = {:.3e})", defect));
  if (n_eig < 1 || static_cast<Eigen::Index>(n_eig) >= h.rows())
    throw DomainError(fmt::format("solve_lowest: n_eig = {} must lie in [1, dimension - 1] (dimension {})", n_eig,
                                  h.rows()));
}

template <typename Scalar>
void fill_residuals(const Eigen::SparseMatrix<Scalar>& h, SpectralResult<Scalar>& r) {
  r.residual_norms.resize(r.eigenvalues.size());
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
    const auto col = r.eigenvectors.col(static_cast<Eigen::Index>(i));
    r.residual_norms[i] = (h * col - r.eigenvalues[i] * col).norm();
  }
}

}  // namespace detail

/// Full dense diagonalization, truncated to the lowest n_eig pairs.
template <typename Scalar>
SpectralResult<Scalar> solve_dense(const Eigen::SparseMatrix<Scalar>& h, int n_eig, bool vectors = true) {
  detail::check_input(h, n_eig);
  using Matrix = typename SpectralResult<Scalar>::Matrix;
  Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(h), vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("solve_lowest: dense eigensolver failed");
  SpectralResult<Scalar> r;
  r.method = SolverMethod::dense;
  r.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + n_eig);
  if (vectors) {
    r.eigenvectors = es.eigenvectors().leftCols(n_eig);
    detail::fill_residuals(h, r);
  }
  return r;
}

/// Thick-restart Lanczos with full reorthogonalization. The first cycle
/// expands a block of seeded random vectors; each restart keeps the lowest
/// Ritz vectors (the wanted ones plus a guard band, so clusters straddling
/// the cut are resolved as a whole), the residuals of the least converged
/// wanted pairs and one fresh random vector, and continues the Krylov
/// expansion from there. Nothing is locked: deflating a converged vector
/// whose neighbour lies closer than its residual allows would pin the
/// neighbour's residual above tolerance.
template <typename Scalar>
SpectralResult<Scalar> solve_lanczos(const Eigen::SparseMatrix<Scalar>& h, const SolverOptions& opt) {
  detail::check_input(h, opt.n_eig);
  using Matrix = typename SpectralResult<Scalar>::Matrix;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Eigen::Index n = h.rows();
  const Eigen::Index want = opt.n_eig;
  const double tol = opt.tol * std::max(1.0, max_abs_entry(h));
  constexpr Eigen::Index kBlock = 4;
  constexpr Eigen::Index kGuard = 10;

  std::mt19937_64 gen(opt.seed);
  Matrix keep;       // Ritz vectors carried into the next cycle
  Matrix residuals;  // residual directions of unconverged wanted pairs
  std::vector<double> best(static_cast<std::size_t>(want), INFINITY);
  const Eigen::Index cap = std::min<Eigen::Index>(n, std::max<Eigen::Index>(opt.krylov_dim, 3 * want + 30));

  for (int restart = 0; restart < opt.max_restarts; ++restart) {
    Matrix basis(n, cap);
    Matrix image(n, cap);  // h * basis, filled as columns are expanded
    Eigen::Index size = 0;

    auto append = [&](Vector x) {
      if (size >= cap) return false;
      const double before = x.norm();
      if (!(before > 0.0)) return false;
      const double after = detail::orthogonalize(x, basis, size);
      if (!(after > 1e-10 * before)) return false;
      basis.col(size++) = x / after;
      return true;
    };
    auto append_random = [&] {
      for (int attempt = 0; attempt < 8; ++attempt)
        if (append(detail::random_vector<Scalar>(n, gen))) return;
    };

    for (Eigen::Index i = 0; i < keep.cols(); ++i) append(keep.col(i));
    const Eigen::Index kept = size;
    for (Eigen::Index i = 0; i < residuals.cols(); ++i) append(residuals.col(i));
    if (restart == 0)
      for (Eigen::Index i = 0; i < std::min(kBlock, cap); ++i) append_random();
    else
      append_random();

    // Kept Ritz vectors need their images but are not expanded.
    for (Eigen::Index j = 0; j < kept; ++j) image.col(j) = h * basis.col(j);
    Eigen::Index next = kept;
    while (next < size) {
      image.col(next) = h * basis.col(next);
      if (size < cap && !append(image.col(next))) append_random();
      ++next;
    }

    Matrix t = basis.leftCols(size).adjoint() * image.leftCols(size);
    t = 0.5 * (t + Matrix(t.adjoint()));
    Eigen::SelfAdjointEigenSolver<Matrix> es(t);
    if (es.info() != Eigen::Success) throw NumericalError("solve_lowest: projected eigensolve failed");

    const Eigen::Index carried = std::min(size, std::max(want, std::min(want + kGuard, cap / 2)));
    Matrix y = basis.leftCols(size) * es.eigenvectors().leftCols(carried);
    Matrix hy = image.leftCols(size) * es.eigenvectors().leftCols(carried);

    std::vector<Eigen::Index> open;
    for (Eigen::Index i = 0; i < std::min(carried, want); ++i) {
      const double res = (hy.col(i) - es.eigenvalues()[i] * y.col(i)).norm();
      best[static_cast<std::size_t>(i)] = std::min(best[static_cast<std::size_t>(i)], res);
      if (res > 0.5 * tol) open.push_back(i);
    }
    if (open.empty() && carried >= want) {
      SpectralResult<Scalar> r;
      r.method = SolverMethod::lanczos;
      r.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + want);
      r.eigenvectors = y.leftCols(want);
      detail::fill_residuals(h, r);
      for (std::size_t i = 0; i < r.residual_norms.size(); ++i)
        if (r.residual_norms[i] > tol)
          throw NumericalError(fmt::format("solve_lowest: residual {:.3e} of pair {} exceeds tolerance {:.3e}",
                                           r.residual_norms[i], i, tol));
      return r;
    }

    keep = y;
    const auto nres = std::min<Eigen::Index>(kBlock, static_cast<Eigen::Index>(open.size()));
    residuals.resize(n, nres);
    for (Eigen::Index k = 0; k < nres; ++k) {
      const Eigen::Index i = open[static_cast<std::size_t>(k)];
      residuals.col(k) = hy.col(i) - es.eigenvalues()[i] * y.col(i);
    }
  }

  std::string list;
  for (double b : best) list += fmt::format(" {:.3e}", b);
  throw NumericalError(fmt::format("solve_lowest: Lanczos did not converge after {} restarts; best residuals:{}",
                                   opt.max_restarts, list));
}

/// Lowest n_eig eigenpairs of a Hermitian matrix. Residual norms are at most
/// tol * max(1, max |H_ij|).
template <typename Scalar>
SpectralResult<Scalar> solve_lowest(const Eigen::SparseMatrix<Scalar>& h, const SolverOptions& opt) {
  SolverMethod method = opt.method;
  if (method == SolverMethod::automatic)
    method = static_cast<std::size_t>(h.rows()) <= opt.dense_threshold ? SolverMethod::dense : SolverMethod::lanczos;
  if (method == SolverMethod::dense) return solve_dense(h, opt.n_eig, opt.vectors);
  return solve_lanczos(h, opt);
}

template <typename Scalar>
SpectralResult<Scalar> solve_lowest(const Eigen::SparseMatrix<Scalar>& h, int n_eig, double tol = 1e-10,
                                    std::uint64_t seed = kDefaultSeed) {
  SolverOptions opt;
  opt.n_eig = n_eig;
  opt.tol = tol;
  opt.seed = seed;
  return solve_lowest(h, opt);
}

// ------------------------------------------------------------ ground cluster

enum class ClusterStatus { certified, indeterminate };

struct ClusterTolerances {
  double eps_deg = 1e-8;
  double eps_sep = 1e-5;
};

/// Eigenvalues within eps_deg * max(1, |E|) of the lowest one. The count is
/// certified only when the next eigenvalue is known and lies more than
/// eps_sep * max(1, |E|) above the cluster.
struct GroundCluster {
  ClusterStatus status = ClusterStatus::indeterminate;
  int count = 0;
  double energy = 0.0;  // lowest eigenvalue
  double cluster_width = 0.0;
  double gap_above = 0.0;  // NaN when no eigenvalue above the cluster is known
  double scale = 1.0;
  DenseOp vectors;  // orthonormal cluster basis, one column per state

  bool certified() const { return status == ClusterStatus::certified; }
  /// P_g as a dense matrix (dimension squared storage).
  DenseOp projector() const { return vectors * vectors.adjoint(); }
  StateVector apply_projector(const StateVector& x) const { return vectors * (vectors.adjoint() * x); }
};

GroundCluster detect_ground_cluster(const SpectralResult<Complex>& result, const ClusterTolerances& tol = {});

// ------------------------------------------------------------------- sweeps

struct SweepOptions {
  SolverOptions solver;
  ClusterTolerances cluster;
};

struct SweepPoint {
  Vec3 p = Vec3::Zero();
  double energy = 0.0;
  ClusterStatus status = ClusterStatus::indeterminate;
  int degeneracy = 0;
  double cluster_width = 0.0;
  double gap_above = 0.0;
  std::vector<double> eigenvalues;
  SolverMethod method = SolverMethod::dense;
};

/// Results keyed by (configuration hash, p); thread-safe, writes idempotent.
class SweepCache {
 public:
  std::optional<SweepPoint> find(std::uint64_t config_hash, const Vec3& p) const;
  void store(std::uint64_t config_hash, const SweepPoint& point);
  std::size_t size() const;

 private:
  using Key = std::tuple<std::uint64_t, double, double, double>;
  mutable std::mutex mutex_;
  std::map<Key, SweepPoint> entries_;
};

/// Lowest levels and cluster at one p with the model's coupling overridden.
SweepPoint solve_point(const FieldModel& model, double e, const Vec3& p, const SweepOptions& options);

/// E(p) and the ground cluster for each p. The basis is shared; p enters only
/// through the kinetic term. Solver errors are rethrown annotated with p.
std::vector<SweepPoint> energy_sweep(const FieldModel& model, double e, std::span<const Vec3> ps,
                                     const SweepOptions& options = {}, SweepCache* cache = nullptr);

// -------------------------------------------------------------- E tables

/// E on a rectilinear grid with trilinear interpolation. An axis with a
/// single coordinate accepts only that exact coordinate.
class EnergyTable {
 public:
  EnergyTable(std::array<std::vector<double>, 3> axes, std::vector<double> values);

  static EnergyTable compute(const FieldModel& model, double e, std::array<std::vector<double>, 3> axes,
                             const SweepOptions& options = {}, SweepCache* cache = nullptr);

  const std::array<std::vector<double>, 3>& axes() const { return axes_; }
  bool contains(const Vec3& q) const;
  /// Throws DomainError outside the grid.
  double operator()(const Vec3& q) const;
  double at(std::size_t i, std::size_t j, std::size_t k) const;
  /// Largest spacing over all axes (0 for a single point).
  double spacing() const;

 private:
  std::array<std::vector<double>, 3> axes_;
  std::vector<double> values_;
};

/// Candidate photon momenta for the infimum in E_c(p).
struct KSearchGrid {
  std::array<std::vector<double>, 3> axes;

  /// Tensor product of the distinct coordinates of the mode set's k-points,
  /// each axis extended by 0.
  static KSearchGrid from_mode_set(const ModeSet& modes);
  std::size_t size() const { return axes[0].size() * axes[1].size() * axes[2].size(); }
};

/// Axes of an E table covering p - k for every p in `ps` and k in `grid`.
std::array<std::vector<double>, 3> covering_axes(std::span<const Vec3> ps, const KSearchGrid& grid);

struct GapReport {
  double E_p = 0.0;
  double E_c_p = 0.0;
  double delta_p = 0.0;
  Vec3 argmin_k = Vec3::Zero();
  double grid_spacing = 0.0;
};

/// E_c(p) = min_k {E(p - k) + omega(k)} over the search grid, followed by one
/// refinement pass around the minimiser; Delta(p) = E_c(p) - E(p).
GapReport gap_estimate(const Dispersion& dispersion, const Vec3& p, const EnergyTable& energy,
                       const KSearchGrid& grid);

/// E(|q|) sampled along one direction, piecewise linear in |q|. Used where
/// E must be rotation invariant by construction (theta).
class RadialEnergy {
 public:
  RadialEnergy(std::vector<double> radii, std::vector<double> values);
  /// Samples q * direction for q in [0, radius] with at most `spacing` between
  /// samples.
  static RadialEnergy compute(const FieldModel& model, double e, const Vec3& direction, double radius, double spacing,
                              const SweepOptions& options = {}, SweepCache* cache = nullptr);

  double radius() const { return radii_.back(); }
  double spacing() const;
  /// Throws DomainError beyond radius().
  double operator()(double q) const;
  double operator()(const Vec3& q) const { return (*this)(q.norm()); }

 private:
  std::vector<double> radii_;
  std::vector<double> values_;
};

}  // namespace pflab
