#include "pflab/bounds.hpp"

#include <cmath>
#include <limits>

#include <Eigen/SparseCholesky>
#include <fmt/format.h>

namespace pflab {

// ------------------------------------------------------------------ theta

namespace {

template <typename Integrand>
double integrate_against_energy(const ModelConfig& config, const Vec3& p,
                                const std::function<double(double)>& energy_of_radius, double energy_at_p,
                                double floor, double& min_denominator, Integrand&& numerator) {
  const MomentumGrid grid = momentum_grid(config);
  const double pn = p.norm();
  min_denominator = INFINITY;
  return grid.integrate([&](double k, double mu) {
    const double q = std::sqrt(std::max(0.0, pn * pn + k * k - 2.0 * pn * k * mu));
    const double w = config.dispersion(k);
    const double d = energy_of_radius(q) + w - energy_at_p;
    min_denominator = std::min(min_denominator, d);
    if (!(d >= floor))
      throw NumericalError(
          fmt::format("gap too small for theta: denominator {:.3e} at |k| = {}, cos = {} (floor {:.1e})", d, k, mu,
                      floor));
    const double f = config.form_factor(k);
    return numerator(k) / (d * d) * f * f / w;
  });
}

}  // namespace

ThetaResult theta(const ModelConfig& config, const Vec3& p, const std::function<double(double)>& energy_of_radius,
                  double energy_at_p, double floor) {
  ThetaResult r;
  r.value = 2.0 * integrate_against_energy(config, p, energy_of_radius, energy_at_p, floor, r.min_denominator,
                                           [&](double k) { return 0.25 * k * k + 6.0 * energy_at_p; });
  return r;
}

ThetaResult theta(const ModelConfig& config, const Vec3& p, const RadialEnergy& energy, double floor) {
  ThetaResult r = theta(config, p, [&](double q) { return energy(q); }, energy(p.norm()), floor);
  r.energy_spacing = energy.spacing();
  return r;
}

Vec3 profile_direction(const FieldModel& model, const Vec3& p) {
  const ModeSet& modes = model.basis().mode_set();
  if (modes.axial()) return modes.axis();
  if (p.norm() > 0.0) return p.normalized();
  return Vec3::UnitZ();
}

RadialEnergy theta_energy_profile(const FieldModel& model, double e, const Vec3& p, double spacing,
                                  const SweepOptions& options, SweepCache* cache) {
  const MomentumGrid grid = momentum_grid(model.config());
  const double radius = p.norm() + grid.radial.nodes.back();
  // Only the lowest level is read.
  SweepOptions energy_only = options;
  energy_only.solver.n_eig = std::min(energy_only.solver.n_eig, 2);
  return RadialEnergy::compute(model, e, profile_direction(model, p), radius, spacing, energy_only, cache);
}

// ------------------------------------------------------ vacuum projector

VacuumProjector::VacuumProjector(const FockBasis& basis) {
  for (std::size_t s = 0; s < basis.spin_factor(); ++s) indices.push_back(basis.vacuum_index(static_cast<int>(s)));
}

SparseOp VacuumProjector::matrix(std::size_t dimension) const {
  SparseOp p(static_cast<Eigen::Index>(dimension), static_cast<Eigen::Index>(dimension));
  std::vector<Eigen::Triplet<Complex>> t;
  for (std::size_t i : indices) t.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
  p.setFromTriplets(t.begin(), t.end());
  return p;
}

double VacuumProjector::expectation(const StateVector& psi) const {
  double sum = 0.0;
  for (std::size_t i : indices) sum += std::norm(psi[static_cast<Eigen::Index>(i)]);
  return sum;
}

// ----------------------------------------------------- photon-number bound

LemmaFpReport verify_lemma_fp(const GroundCluster& cluster, const FieldModel& model, double e, double theta_value,
                              double slack) {
  const SparseOp n = model.lift(model.number());
  const DenseOp& v = cluster.vectors;
  DenseOp compressed = v.adjoint() * (n * v);
  compressed = 0.5 * (compressed + DenseOp(compressed.adjoint()));
  Eigen::SelfAdjointEigenSolver<DenseOp> es(compressed, Eigen::EigenvaluesOnly);
  LemmaFpReport r;
  r.lhs = std::max(0.0, es.eigenvalues().maxCoeff());
  r.average = std::max(0.0, compressed.trace().real() / static_cast<double>(v.cols()));
  r.rhs = e * e * theta_value;
  r.slack = slack;
  r.ratio = r.rhs > 0.0 ? r.lhs / r.rhs : (r.lhs > 0.0 ? INFINITY : 0.0);
  r.passed = r.lhs <= r.rhs * (1.0 + slack) + 1e-14;
  return r;
}

double pull_through_residual(const FieldModel& model, double e, const Vec3& p, const StateVector& psi, double energy,
                             std::size_t mode, double floor) {
  const FockBasis& basis = model.basis();
  const ModeSet& modes = basis.mode_set();
  if (mode >= modes.size()) throw DomainError(fmt::format("pull_through_residual: mode {} out of range", mode));
  if (psi.size() != static_cast<Eigen::Index>(basis.dimension()))
    throw DomainError("pull_through_residual: state dimension does not match the basis");
  const Mode& m = modes[mode];
  const Vec3 pol = polarization_frame(m.k)[m.polarization];
  const double omega = model.omega_per_k_point()[ModeSet::k_point_of(mode)];
  const double c = model.amplitudes()[mode];

  const SparseOp lower = model.lift(annihilation_matrix(basis, mode));
  const StateVector lhs = lower * psi;

  // {pi . e_j + (1/2) sigma . (i k ^ e_j)} Psi
  const auto nb = static_cast<Eigen::Index>(basis.boson_dimension());
  SparseOp pi_e(nb, nb);
  {
    SparseOp id(nb, nb);
    id.setIdentity();
    for (int mu = 0; mu < 3; ++mu) {
      if (pol[mu] == 0.0) continue;
      SparseOp pi = Complex(p[mu]) * id - model.field_momentum()[mu];
      if (e != 0.0) pi -= Complex(e) * model.vector_potential()[mu];
      pi_e += Complex(pol[mu]) * pi;
    }
  }
  StateVector source = model.lift(pi_e) * psi;
  if (basis.with_spin()) {
    const Vec3 axial = m.k.cross(pol);
    for (int mu = 0; mu < 3; ++mu)
      if (axial[mu] != 0.0) {
        const SparseOp s = model.lift(boson_identity(basis), mu + 1);
        source += (Complex(0.0, 0.5 * axial[mu])) * (s * psi);
      }
  }
  source *= e * c;

  const double norm = psi.norm();
  if (e == 0.0) return lhs.norm() / norm;

  SparseOp shifted = model.hamiltonian(Vec3(p - m.k), e);
  SparseOp id(shifted.rows(), shifted.cols());
  id.setIdentity();
  shifted += Complex(omega - energy) * id;

  SolverOptions lowest;
  lowest.n_eig = 1;
  const double bottom = solve_lowest(shifted, lowest).eigenvalues.front();
  if (!(bottom >= floor))
    throw NumericalError(
        fmt::format("pull_through_residual: shifted operator has eigenvalue {:.3e} below the floor {:.1e}", bottom,
                    floor));
  Eigen::SimplicialLDLT<SparseOp> ldlt(shifted);
  if (ldlt.info() != Eigen::Success) throw NumericalError("pull_through_residual: factorization failed");
  const StateVector rhs = ldlt.solve(source);
  return (lhs - rhs).norm() / norm;
}

// ---------------------------------------------------- degeneracy bounds

UpperBoundReport upper_bound_check(const GroundCluster& cluster, double e, double theta_value, double vacuum_trace) {
  UpperBoundReport r;
  const double x = e * e * theta_value;
  r.hypothesis = 3.0 * x < 1.0;
  r.bound_value = x < 1.0 ? 2.0 / (1.0 - x) : INFINITY;
  r.count = cluster.count;
  r.passed = !r.hypothesis || (cluster.certified() && cluster.count <= 2);
  // trace(P_g P0) <= rank P0 = 2, so trace >= (1 - x) count forces
  // count <= 2 / (1 - x).
  if (x < 1.0 && vacuum_trace >= (1.0 - x) * cluster.count - 1e-12)
    r.chain_consistent = cluster.count <= r.bound_value + 1e-12;
  return r;
}

VacuumOverlapReport vacuum_overlap(const GroundCluster& cluster, const FockBasis& basis, double e,
                                   double theta_value) {
  const VacuumProjector p0(basis);
  VacuumOverlapReport r;
  r.minimum = INFINITY;
  for (Eigen::Index i = 0; i < cluster.vectors.cols(); ++i) {
    const double o = p0.expectation(cluster.vectors.col(i));
    r.overlaps.push_back(o);
    r.minimum = std::min(r.minimum, o);
    r.trace += o;
  }
  r.lower_bound = 1.0 - e * e * theta_value;
  r.passed = r.minimum >= r.lower_bound - 1e-12;
  return r;
}

GramReport p0_gram(const GroundCluster& cluster, const FockBasis& basis) {
  if (!basis.with_spin()) throw DomainError("p0_gram: requires a basis with spin");
  if (!cluster.certified() || cluster.count != 2)
    throw DomainError(fmt::format("p0_gram: requires a certified twofold ground cluster (count {}, {})", cluster.count,
                                  cluster.certified() ? "certified" : "indeterminate"));
  const VacuumProjector p0(basis);
  GramReport r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const auto a = static_cast<Eigen::Index>(p0.indices[i]);
      const auto b = static_cast<Eigen::Index>(p0.indices[j]);
      Complex sum = 0.0;
      for (Eigen::Index c = 0; c < cluster.vectors.cols(); ++c)
        sum += cluster.vectors(a, c) * std::conj(cluster.vectors(b, c));
      r.gram(i, j) = sum;
    }
  r.a = 0.5 * r.gram.trace().real();
  r.defect = (r.gram - r.a * Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff();
  r.diagonal_gap = std::abs(r.gram(0, 0) - r.gram(1, 1));
  r.off_diagonal = std::abs(r.gram(0, 1));
  return r;
}

// ---------------------------------------------------------- e0 threshold

E0Result e0_threshold(const std::function<double(double)>& theta_of_e,
                      const std::function<double(double)>& coupling_bound_of_e, std::span<const double> e_grid,
                      int bisection_steps) {
  if (e_grid.empty()) throw DomainError("e0_threshold: empty grid");
  for (std::size_t i = 1; i < e_grid.size(); ++i)
    if (!(e_grid[i] > e_grid[i - 1])) throw DomainError("e0_threshold: grid must be strictly ascending");

  struct Probe {
    bool theta_ok, bound_ok;
    double theta, bound;
    bool ok() const { return theta_ok && bound_ok; }
  };
  auto probe = [&](double e) {
    Probe pr{};
    pr.bound = coupling_bound_of_e(e);
    pr.bound_ok = pr.bound < 1.0;
    try {
      pr.theta = theta_of_e(e);
    } catch (const NumericalError&) {
      pr.theta = INFINITY;
    }
    pr.theta_ok = pr.theta <= 0.0 || 3.0 * e * e * pr.theta < 1.0;
    return pr;
  };

  E0Result r;
  std::size_t good = e_grid.size();
  Probe last{};
  for (std::size_t i = 0; i < e_grid.size(); ++i) {
    const Probe pr = probe(std::abs(e_grid[i]));
    if (!pr.ok()) {
      if (i == 0) {
        r.empty = true;
        r.value = 0.0;
        r.binding = !pr.theta_ok && !pr.bound_ok ? "both" : (!pr.theta_ok ? "theta" : "coupling_bound");
        return r;
      }
      double lo = e_grid[i - 1], hi = e_grid[i];
      Probe fail = pr;
      for (int step = 0; step < bisection_steps; ++step) {
        const double mid = 0.5 * (lo + hi);
        const Probe pm = probe(mid);
        if (pm.ok()) {
          lo = mid;
          last = pm;
        } else {
          hi = mid;
          fail = pm;
        }
      }
      r.value = lo;
      r.theta_at_value = last.theta;
      r.coupling_bound_at_value = last.bound;
      r.binding = !fail.theta_ok && !fail.bound_ok ? "both" : (!fail.theta_ok ? "theta" : "coupling_bound");
      return r;
    }
    last = pr;
    good = i;
  }
  r.value = e_grid[good];
  r.theta_at_value = last.theta;
  r.coupling_bound_at_value = last.bound;
  r.binding = "grid";
  return r;
}

// ------------------------------------------------------ spinless condition

SpinlessReport spinless_uniqueness_check(const ModelConfig& config, const Vec3& p, const RadialEnergy& energy,
                                         const GroundCluster& cluster, double floor) {
  if (config.with_spin) throw DomainError("spinless_uniqueness_check: configuration has spin");
  SpinlessReport r;
  const double ep = energy(p.norm());
  double min_den = 0.0;
  r.integral = integrate_against_energy(config, p, [&](double q) { return energy(q); }, ep, floor, min_den,
                                        [&](double) { return ep; });
  r.threshold = r.integral > 0.0 ? 0.5 / r.integral : INFINITY;
  r.hypothesis = config.coupling * config.coupling <= r.threshold;
  r.degeneracy = cluster.certified() ? cluster.count : 0;
  r.gap_above = cluster.gap_above;
  r.passed = !r.hypothesis || (r.degeneracy == 1 && r.gap_above > 0.0);
  return r;
}

// -------------------------------------------------------------- full suite

BoundReport run_bound_suite(const FieldModel& model, const BoundSuiteOptions& options, SweepCache* cache) {
  const ModelConfig& config = model.config();
  BoundReport r;
  r.p = config.momentum;
  r.e = config.coupling;
  r.with_spin = config.with_spin;

  const SparseOp h = model.hamiltonian(r.p, r.e);
  SolverOptions solver = options.sweep.solver;
  solver.n_eig = std::min<int>(solver.n_eig, static_cast<int>(h.rows()) - 1);
  r.cluster = detect_ground_cluster(solve_lowest(h, solver), options.sweep.cluster);

  const RadialEnergy profile = theta_energy_profile(model, r.e, r.p, options.profile_spacing, options.sweep, cache);
  r.theta = theta(config, r.p, profile);
  r.lemma_fp = verify_lemma_fp(r.cluster, model, r.e, r.theta.value, options.slack);
  r.overlap = vacuum_overlap(r.cluster, model.basis(), r.e, r.theta.value);
  r.upper = upper_bound_check(r.cluster, r.e, r.theta.value, r.overlap.trace);
  if (config.with_spin && r.cluster.certified() && r.cluster.count == 2) r.gram = p0_gram(r.cluster, model.basis());
  if (!config.with_spin) r.spinless = spinless_uniqueness_check(config, r.p, profile, r.cluster);
  r.coupling_bound = coupling_bound(config).value;

  if (options.compute_e0) {
    std::vector<double> grid = options.e_grid;
    if (grid.empty())
      for (int i = 0; i <= 20; ++i) grid.push_back(0.25 * i);
    const double spacing = std::max(options.profile_spacing, 0.25);
    auto theta_of_e = [&](double e) {
      const RadialEnergy prof = theta_energy_profile(model, e, r.p, spacing, options.sweep, cache);
      return theta(config, r.p, prof).value;
    };
    auto bound_of_e = [&](double e) { return coupling_bound(config, e).value; };
    r.e0 = e0_threshold(theta_of_e, bound_of_e, grid, options.bisection_steps);
  }

  const bool gap_positive = r.cluster.certified() && r.cluster.gap_above > 0.0;
  const bool below_e0 = !r.e0 || std::abs(r.e) < r.e0->value;
  r.hypotheses_hold = gap_positive && below_e0;
  r.conclusion_observed = r.cluster.certified() && r.cluster.count == (config.with_spin ? 2 : 1);
  return r;
}

}  // namespace pflab
