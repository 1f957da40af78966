#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "oracle.hpp"
#include "pflab/bounds.hpp"

using namespace pflab;

namespace {

ModelConfig desk(double e, bool spin = true, int N = 2) {
  ModelConfig c;
  c.mode_spec = AxialModeSpec{Vec3::UnitZ(), 3, 3.0, true};
  c.coupling = e;
  c.momentum = Vec3(0, 0, 0.2);
  c.with_spin = spin;
  c.total_max = N;
  c.per_mode_max = N;
  return c;
}

ModelConfig single_mode(double e, int N) {
  ModelConfig c;
  c.mode_spec = ExplicitModeSpec{{Vec3(0, 0, 0.8)}, {1.0}, Vec3::UnitZ()};
  c.coupling = e;
  c.momentum = Vec3(0, 0, 0.2);
  c.total_max = N;
  c.per_mode_max = N;
  return c;
}

GroundCluster ground(const FieldModel& model, const Vec3& p, double e) {
  const SparseOp h = model.hamiltonian(p, e);
  return detect_ground_cluster(solve_lowest(h, std::min<int>(6, static_cast<int>(h.rows()) - 1)));
}

/// theta for E(q) = q^2/2 by adaptive quadrature.
double free_theta_oracle(double p) {
  using boost::math::quadrature::gauss_kronrod;
  boost::math::quadrature::exp_sinh<double> outer;
  const double ep = 0.5 * p * p;
  return outer.integrate(
      [&](double k) {
        if (k == 0.0) return 0.0;
        const double w = oracle::omega_massive(k, 1.0);
        const double f = oracle::phi_gaussian(k, 1.0);
        const double angular = gauss_kronrod<double, 31>::integrate(
            [&](double mu) {
              const double d = 0.5 * (k * k - 2.0 * p * k * mu) + w;
              return (0.25 * k * k + 6.0 * ep) / (d * d);
            },
            -1.0, 1.0, 10, 1e-14);
        return 2.0 * 2.0 * std::numbers::pi * k * k * angular * f * f / w;
      },
      0.0, std::numeric_limits<double>::infinity());
}

}  // namespace

TEST_CASE("theta against adaptive quadrature") {
  const ModelConfig c = desk(0.0);
  auto free = [](double q) { return 0.5 * q * q; };
  for (double p : {0.0, 0.3, 0.5}) {
    const ThetaResult t = theta(c, Vec3(0, 0, p), free, 0.5 * p * p);
    const double ref = free_theta_oracle(p);
    CHECK(std::abs(t.value - ref) < 1e-9 * ref);
    CHECK(t.min_denominator > 0.9);
  }
  CHECK_THROWS_AS(theta(c, Vec3::Zero(), free, 5.0), NumericalError);
}

TEST_CASE("theta from the model profile") {
  const ModelConfig c = desk(0.0);
  const FieldModel model(c);
  const RadialEnergy profile = theta_energy_profile(model, 0.0, Vec3(0, 0, 0.2), 0.05);
  // E(q) = q^2/2 at e = 0 while the vacuum stays lowest, up to the linear interpolation error.
  const double h = profile.spacing();
  for (double q : {0.0, 0.25, 0.5, 1.0}) CHECK(std::abs(profile(q) - 0.5 * q * q) <= h * h / 8.0 + 1e-14);
  const ThetaResult t = theta(c, Vec3(0, 0, 0.2), profile);
  CHECK(t.value > 0.0);
  CHECK(t.energy_spacing <= 0.05 + 1e-15);

  const Mat3 r = Eigen::AngleAxisd(0.7, Vec3(1, 1, 0).normalized()).toRotationMatrix();
  const ThetaResult rotated = theta(c, r * Vec3(0, 0, 0.2), profile);
  CHECK(rotated.value == t.value);
}

TEST_CASE("vacuum projector") {
  const FieldModel model(desk(0.0));
  const VacuumProjector p0(model.basis());
  CHECK(p0.rank() == 2);
  const SparseOp m = p0.matrix(model.basis().dimension());
  CHECK(DenseOp(m).trace().real() == 2.0);
  StateVector psi = StateVector::Zero(model.basis().dimension());
  psi(0) = 0.6;
  psi(1) = 0.8;
  CHECK(p0.expectation(psi) == doctest::Approx(0.36));
  CHECK(VacuumProjector(FieldModel(desk(0.0, false)).basis()).rank() == 1);
}

TEST_CASE("photon number bound and its scaling") {
  const ModelConfig c = desk(0.1);
  const FieldModel model(c);
  const RadialEnergy profile = theta_energy_profile(model, 0.1, c.momentum);
  const double th = theta(c, c.momentum, profile).value;

  const LemmaFpReport zero = verify_lemma_fp(ground(model, c.momentum, 0.0), model, 0.0, th);
  CHECK(zero.lhs == 0.0);
  CHECK(zero.passed);

  const LemmaFpReport r = verify_lemma_fp(ground(model, c.momentum, 0.1), model, 0.1, th);
  CHECK(r.passed);
  CHECK(r.lhs > 0.0);
  CHECK(r.average <= r.lhs + 1e-18);
  CHECK(r.ratio <= 1.1);

  std::vector<double> n;
  for (double e : {0.025, 0.05, 0.1}) n.push_back(verify_lemma_fp(ground(model, c.momentum, e), model, e, th).lhs);
  CHECK(std::abs(n[1] / n[0] / 4.0 - 1.0) < 0.05);
  CHECK(std::abs(n[2] / n[1] / 4.0 - 1.0) < 0.05);
}

TEST_CASE("pull-through residual shrinks along the ladder") {
  double previous = INFINITY;
  for (int N = 1; N <= 3; ++N) {
    const ModelConfig c = single_mode(0.1, N);
    const FieldModel model(c);
    const GroundCluster g = ground(model, c.momentum, 0.1);
    const double res = pull_through_residual(model, 0.1, c.momentum, g.vectors.col(0), g.energy, 0);
    CHECK(res < previous);
    previous = res;
  }
  CHECK(previous < 1e-8);

  const ModelConfig c = single_mode(0.0, 2);
  const FieldModel model(c);
  const GroundCluster g = ground(model, c.momentum, 0.0);
  CHECK(pull_through_residual(model, 0.0, c.momentum, g.vectors.col(0), g.energy, 1) == 0.0);
  CHECK_THROWS_AS(pull_through_residual(model, 0.1, c.momentum, g.vectors.col(0), g.energy, 7), DomainError);
}

TEST_CASE("vacuum overlap, Gram matrix and the degeneracy bound") {
  for (double e : {0.0, 0.05, 0.1, 0.2}) {
    const ModelConfig c = desk(e);
    const FieldModel model(c);
    const GroundCluster g = ground(model, c.momentum, e);
    const double th = theta(c, c.momentum, theta_energy_profile(model, e, c.momentum)).value;
    const double x = e * e * th;

    const VacuumOverlapReport o = vacuum_overlap(g, model.basis(), e, th);
    CHECK(o.passed);
    CHECK(o.minimum >= 1.0 - x);

    const GramReport gram = p0_gram(g, model.basis());
    CHECK(gram.defect < 1e-8);
    CHECK(gram.a > 0.0);
    CHECK(gram.a >= 1.0 - x);
    if (e == 0.0) CHECK(gram.a == doctest::Approx(1.0).epsilon(1e-15));

    const UpperBoundReport u = upper_bound_check(g, e, th, o.trace);
    CHECK(u.hypothesis);
    CHECK(u.passed);
    CHECK(u.chain_consistent);
    CHECK(u.count == 2);
  }

  const FieldModel spinless(desk(0.1, false));
  const GroundCluster g = ground(spinless, Vec3(0, 0, 0.2), 0.1);
  CHECK_THROWS_AS(p0_gram(g, spinless.basis()), DomainError);
}

TEST_CASE("e0 threshold") {
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(0.1 * i);

  // 3 e^2 theta < 1 binds at e = 1/sqrt(3 theta) = 1/sqrt(0.75).
  const E0Result by_theta = e0_threshold([](double) { return 0.25; }, [](double e) { return 0.1 * e; }, grid, 40);
  CHECK(by_theta.binding == "theta");
  CHECK(by_theta.value == doctest::Approx(1.0 / std::sqrt(0.75)).epsilon(1e-10));

  const E0Result by_bound = e0_threshold([](double) { return 0.01; }, [](double e) { return e / 1.5; }, grid, 40);
  CHECK(by_bound.binding == "coupling_bound");
  CHECK(by_bound.value == doctest::Approx(1.5).epsilon(1e-10));

  const E0Result whole = e0_threshold([](double) { return 0.0; }, [](double) { return 0.0; }, grid, 10);
  CHECK(whole.binding == "grid");
  CHECK(whole.value == 2.0);

  const E0Result none = e0_threshold([](double) { return 1.0; }, [](double) { return 2.0; }, grid, 10);
  CHECK(none.empty);
  CHECK(none.value == 0.0);

  CHECK_THROWS_AS(e0_threshold([](double) { return 0.0; }, [](double) { return 0.0; }, std::vector<double>{}, 1),
                  DomainError);
}

TEST_CASE("spinless uniqueness") {
  const ModelConfig c = desk(0.1, false);
  const FieldModel model(c);
  const RadialEnergy profile = theta_energy_profile(model, 0.1, c.momentum);
  const SpinlessReport r = spinless_uniqueness_check(c, c.momentum, profile, ground(model, c.momentum, 0.1));
  CHECK(r.hypothesis);
  CHECK(r.degeneracy == 1);
  CHECK(r.gap_above > 0.0);
  CHECK(r.passed);
  CHECK_THROWS_AS(spinless_uniqueness_check(desk(0.1), c.momentum, profile, ground(model, c.momentum, 0.1)),
                  DomainError);
}

TEST_CASE("bound suite") {
  BoundSuiteOptions opt;
  opt.compute_e0 = false;
  const BoundReport free = run_bound_suite(FieldModel(desk(0.0)), opt);
  CHECK(free.lemma_fp.lhs == 0.0);
  REQUIRE(free.gram);
  CHECK(free.gram->a == 1.0);
  CHECK(free.conclusion_observed);

  opt.compute_e0 = true;
  const BoundReport r = run_bound_suite(FieldModel(desk(0.1)), opt);
  REQUIRE(r.e0);
  CHECK(r.e0->value > 0.1);
  CHECK(r.hypotheses_hold);
  CHECK(r.conclusion_observed);
  CHECK(r.lemma_fp.passed);
  CHECK(r.overlap.passed);
}
