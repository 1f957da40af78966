#include <doctest.h>

#include "oracle.hpp"
#include "pflab/spectra.hpp"

using namespace pflab;

namespace {

ModelConfig desk(double e, bool spin = true, int N = 2, int nodes = 3) {
  ModelConfig c;
  c.mode_spec = AxialModeSpec{Vec3::UnitZ(), nodes, 3.0, true};
  c.coupling = e;
  c.momentum = Vec3(0, 0, 0.2);
  c.with_spin = spin;
  c.total_max = N;
  c.per_mode_max = N;
  return c;
}

SpectralResult<Complex> synthetic(std::vector<double> values) {
  SpectralResult<Complex> r;
  r.eigenvalues = std::move(values);
  const auto n = static_cast<Eigen::Index>(r.eigenvalues.size());
  r.eigenvectors = DenseOp::Identity(n + 1, n);
  return r;
}

SolverOptions lanczos(int n_eig) {
  SolverOptions o;
  o.n_eig = n_eig;
  o.method = SolverMethod::lanczos;
  return o;
}

}  // namespace

TEST_CASE("small diagonal matrix") {
  std::vector<Eigen::Triplet<Complex>> t{{0, 0, 0.0}, {1, 1, 0.0}, {2, 2, 1.0}, {3, 3, 3.0}};
  SparseOp h(4, 4);
  h.setFromTriplets(t.begin(), t.end());
  const auto r = solve_lowest(h, 3);
  REQUIRE(r.eigenvalues.size() == 3);
  CHECK(r.eigenvalues[0] == 0.0);
  CHECK(r.eigenvalues[1] == 0.0);
  CHECK(r.eigenvalues[2] == 1.0);
  CHECK(r.method == SolverMethod::dense);
}

TEST_CASE("input validation") {
  SparseOp h(3, 3);
  std::vector<Eigen::Triplet<Complex>> t{{0, 1, 1.0}, {1, 0, 2.0}, {2, 2, 1.0}};
  h.setFromTriplets(t.begin(), t.end());
  CHECK_THROWS_AS(solve_lowest(h, 1), DomainError);
  const FieldModel model(desk(0.1));
  const SparseOp hp = model.hamiltonian(Vec3(0, 0, 0.2), 0.1);
  CHECK_THROWS_AS(solve_lowest(hp, static_cast<int>(hp.rows())), DomainError);
}

TEST_CASE("free ground state") {
  const FieldModel model(desk(0.0));
  const auto r = solve_lowest(model.hamiltonian(Vec3::Zero(), 0.0), 4);
  CHECK(r.eigenvalues[0] == 0.0);
  CHECK(r.eigenvalues[1] == 0.0);
  CHECK(r.eigenvalues[2] > 0.5);
}

TEST_CASE("lanczos against the dense oracle") {
  const FieldModel model(desk(0.2));
  const SparseOp h = model.hamiltonian(Vec3(0, 0, 0.2), 0.2);
  const auto r = solve_lowest(h, lanczos(6));
  CHECK(r.method == SolverMethod::lanczos);
  const auto ref = oracle::lowest_dense(DenseOp(h), 6);
  for (int i = 0; i < 6; ++i) CHECK(std::abs(r.eigenvalues[i] - ref[i]) < 1e-10);
  for (int i = 0; i < 5; ++i) CHECK(r.eigenvalues[i] <= r.eigenvalues[i + 1]);
  const double tol = 1e-10 * std::max(1.0, max_abs_entry(h));
  for (double res : r.residual_norms) CHECK(res <= tol);
  const DenseOp gram = r.eigenvectors.adjoint() * r.eigenvectors;
  CHECK((gram - DenseOp::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-10);

  const auto again = solve_lowest(h, lanczos(6));
  CHECK(again.eigenvalues == r.eigenvalues);
}

TEST_CASE("ground cluster semantics") {
  const GroundCluster pair = detect_ground_cluster(synthetic({0.0, 1e-13, 0.7}), {1e-9, 1e-6});
  CHECK(pair.count == 2);
  CHECK(pair.certified());
  CHECK(pair.gap_above == doctest::Approx(0.7));

  const GroundCluster single = detect_ground_cluster(synthetic({0.5, 0.5 + 1e-4, 0.9}), {1e-9, 1e-6});
  CHECK(single.count == 1);
  CHECK(single.certified());
  CHECK(single.gap_above == doctest::Approx(1e-4).epsilon(1e-9));

  const GroundCluster unsure = detect_ground_cluster(synthetic({0.5, 0.5 + 1e-7, 0.9}), {1e-9, 1e-6});
  CHECK(unsure.status == ClusterStatus::indeterminate);

  const GroundCluster open = detect_ground_cluster(synthetic({0.0, 0.0}), {});
  CHECK(open.status == ClusterStatus::indeterminate);
  CHECK(std::isnan(open.gap_above));
}

TEST_CASE("projector algebra") {
  const FieldModel model(desk(0.1));
  const SparseOp h = model.hamiltonian(Vec3(0, 0, 0.2), 0.1);
  const GroundCluster c = detect_ground_cluster(solve_lowest(h, 6));
  REQUIRE(c.certified());
  CHECK(c.count == 2);
  CHECK(c.cluster_width < 1e-8 * c.scale);
  const DenseOp P = c.projector();
  CHECK((P * P - P).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((P - DenseOp(P.adjoint())).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(std::abs(P.trace() - 2.0) < 1e-10);
  const DenseOp hd = DenseOp(h);
  CHECK((hd * P - P * hd).norm() <= c.cluster_width + 1e-9);
}

TEST_CASE("spinless ground state is simple") {
  const FieldModel model(desk(0.1, false));
  const GroundCluster c = detect_ground_cluster(solve_lowest(model.hamiltonian(Vec3(0, 0, 0.2), 0.1), 4));
  CHECK(c.certified());
  CHECK(c.count == 1);
}

TEST_CASE("second-order perturbation theory") {
  const ModelConfig c = desk(0.0);
  const FieldModel model(c);
  oracle::DenseModel o;
  const ModeSet ms = c.mode_set();
  for (std::size_t i = 0; i < ms.k_point_count(); ++i) {
    o.k_points.push_back(ms.k_point(i));
    o.weights.push_back(ms.weight(i));
  }
  const double e = 0.02;
  for (double pz : {0.0, 0.2, 0.4}) {
    const Vec3 p(0, 0, pz);
    const double E = solve_lowest(model.hamiltonian(p, e), 3).eigenvalues[0];
    const double ref = o.second_order_energy(p, e);
    // The remainder is O(e^4).
    CHECK(std::abs(E - ref) < 1e-9);
    CHECK(std::abs((E - 0.5 * pz * pz) / (ref - 0.5 * pz * pz) - 1.0) < 1e-3);
  }

  // Effective mass from second differences at p = 0.
  const double h = 0.05;
  auto energy = [&](double pz) { return solve_lowest(model.hamiltonian(Vec3(0, 0, pz), e), 3).eigenvalues[0]; };
  auto pt = [&](double pz) { return o.second_order_energy(Vec3(0, 0, pz), e); };
  const double curvature = (energy(h) - 2 * energy(0) + energy(-h)) / (h * h);
  const double curvature_pt = (pt(h) - 2 * pt(0) + pt(-h)) / (h * h);
  CHECK(curvature < 1.0);
  CHECK(std::abs(curvature - curvature_pt) < 1e-5);
}

TEST_CASE("energy sweeps") {
  const FieldModel model(desk(0.0));
  std::vector<Vec3> ps;
  for (int i = -3; i <= 3; ++i) ps.push_back(Vec3(0, 0, 0.1 * i));
  const auto free = energy_sweep(model, 0.0, ps);
  for (const SweepPoint& s : free) {
    CHECK(s.energy == doctest::Approx(0.5 * s.p.squaredNorm()).epsilon(1e-14));
    CHECK(s.degeneracy == 2);
  }

  SweepCache cache;
  const auto coupled = energy_sweep(model, 0.2, ps, {}, &cache);
  CHECK(cache.size() == ps.size());
  for (std::size_t i = 0; i < ps.size(); ++i)
    CHECK(std::abs(coupled[i].energy - coupled[ps.size() - 1 - i].energy) < 1e-10);
  const auto cached = energy_sweep(model, 0.2, ps, {}, &cache);
  CHECK(cache.size() == ps.size());
  const auto fresh = energy_sweep(model, 0.2, ps);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    CHECK(cached[i].energy == coupled[i].energy);
    CHECK(fresh[i].eigenvalues == coupled[i].eigenvalues);
  }
}

TEST_CASE("variational monotonicity along the cutoff ladder") {
  double previous = INFINITY;
  for (int N = 1; N <= 3; ++N) {
    const FieldModel model(desk(0.2, true, N));
    const double E = solve_lowest(model.hamiltonian(Vec3(0, 0, 0.2), 0.2), 3).eigenvalues[0];
    CHECK(E <= previous + 1e-14);
    previous = E;
  }
}

TEST_CASE("gap estimate") {
  const ModelConfig c = desk(0.0);
  const FieldModel model(c);
  const KSearchGrid grid = KSearchGrid::from_mode_set(model.basis().mode_set());
  const std::vector<Vec3> ps{Vec3::Zero(), Vec3(0, 0, 0.5)};
  const EnergyTable table = EnergyTable::compute(model, 0.0, covering_axes(ps, grid));

  const GapReport at0 = gap_estimate(c.dispersion, Vec3::Zero(), table, grid);
  CHECK(at0.delta_p == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(at0.argmin_k.norm() == 0.0);
  CHECK(at0.delta_p == doctest::Approx(at0.E_c_p - at0.E_p));

  const GapReport at5 = gap_estimate(c.dispersion, Vec3(0, 0, 0.5), table, grid);
  CHECK(at5.delta_p > 0.0);
  CHECK(at5.E_p == doctest::Approx(0.125).epsilon(1e-14));

  CHECK_THROWS_AS(gap_estimate(c.dispersion, Vec3(0, 0, 2.0), table, grid), DomainError);
  CHECK_THROWS_AS(gap_estimate(c.dispersion, Vec3(0.1, 0, 0), table, grid), DomainError);
}

TEST_CASE("gap estimators agree at matched cutoffs") {
  const ModelConfig c = desk(0.2);
  const FieldModel model(c);
  const KSearchGrid grid = KSearchGrid::from_mode_set(model.basis().mode_set());
  std::vector<Vec3> ps;
  for (double pz : {0.0, 0.25, 0.5}) ps.push_back(Vec3(0, 0, pz));
  SweepCache cache;
  const EnergyTable table = EnergyTable::compute(model, 0.2, covering_axes(ps, grid), {}, &cache);
  const auto points = energy_sweep(model, 0.2, ps, {}, &cache);
  for (const SweepPoint& s : points) {
    const GapReport g = gap_estimate(c.dispersion, s.p, table, grid);
    CHECK(g.delta_p > 0.0);
    CHECK(std::abs(s.gap_above - g.delta_p) <= 0.2 * g.delta_p);
  }
}

TEST_CASE("radial energy profile") {
  const FieldModel model(desk(0.0));
  const RadialEnergy profile = RadialEnergy::compute(model, 0.0, Vec3::UnitZ(), 1.0, 0.1);
  CHECK(profile.radius() == 1.0);
  CHECK(profile.spacing() <= 0.1 + 1e-15);
  CHECK(profile(0.5) == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(profile(Vec3(0.3, 0.4, 0.0)) == doctest::Approx(0.125).epsilon(1e-14));
  CHECK_THROWS_AS(profile(1.5), DomainError);
}

TEST_CASE("lanczos with a near-degenerate cluster straddling the cut") {
  // Spin pairs 6e-8 apart inside a cluster of eight; locking one member used to stall its neighbour.
  const FieldModel model(desk(0.1, true, 2, 4));
  const SparseOp h = model.hamiltonian(Vec3(0, 0, 6.098168609813269), 0.1);
  const auto ref = oracle::lowest_dense(DenseOp(h), 8);
  REQUIRE(ref[2] - ref[1] < 1e-7);
  for (int k : {1, 2, 3, 4}) {
    const auto r = solve_lowest(h, lanczos(k));
    for (int i = 0; i < k; ++i) CHECK(std::abs(r.eigenvalues[i] - ref[i]) < 1e-10);
  }
}
