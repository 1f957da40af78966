#include <doctest.h>

#include "oracle.hpp"
#include "pflab/fock.hpp"
#include "pflab/sparse.hpp"

using namespace pflab;

namespace {

ModeSet one_k_point() { return ModeSet::from_k_points({Vec3(0, 0, 1)}, {1.0}); }

ModeSet two_k_points() { return ModeSet::from_k_points({Vec3(0, 0, 1), Vec3(0, 0, -1)}, {1.0, 1.0}); }

DenseOp dense(const SparseOp& a) { return DenseOp(a); }

}  // namespace

TEST_CASE("basis dimensions") {
  CHECK(enumerate_basis(one_k_point(), 0, 1, true).dimension() == 2);
  CHECK(enumerate_basis(one_k_point(), 1, 1, true).dimension() == 6);
  const FockBasis b = enumerate_basis(two_k_points(), 2, 2, false);
  CHECK(b.dimension() == oracle::enumerate(4, 2, 2).size());
  CHECK(b.dimension() == 15);
  CHECK(count_occupations(4, 2, 2) == 15);
  CHECK(count_occupations(12, 3, 1) == oracle::enumerate(12, 3, 1).size());
}

TEST_CASE("enumeration order matches the brute-force oracle") {
  for (auto [N, n] : {std::pair{2, 2}, std::pair{3, 1}, std::pair{3, 2}}) {
    const FockBasis b = enumerate_basis(two_k_points(), N, n, true);
    const auto ref = oracle::enumerate(4, N, n);
    REQUIRE(b.boson_dimension() == ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i)
      for (std::size_t m = 0; m < 4; ++m) CHECK(b.occupation(i, m) == ref[i][m]);
  }
}

TEST_CASE("rank and unrank") {
  const FockBasis b = enumerate_basis(two_k_points(), 2, 2, false);
  for (std::size_t i = 0; i < b.dimension(); ++i) CHECK(b.rank(b.unrank(i)) == i);

  const FockBasis s = enumerate_basis(one_k_point(), 1, 1, true);
  const OccupationState first = s.unrank(0);
  CHECK(first.spin == 0);
  CHECK(first.occupations == std::vector<int>{0, 0});
  const auto ref = oracle::enumerate(2, 1, 1);
  const auto pos = std::find(ref.begin(), ref.end(), std::vector<int>{1, 0}) - ref.begin();
  CHECK(s.rank({{1, 0}, 0}) == static_cast<std::size_t>(pos));
  CHECK(s.rank({{1, 0}, 1}) == static_cast<std::size_t>(pos) + s.boson_dimension());

  CHECK_THROWS_AS(s.rank({{1, 1}, 0}), DomainError);
  CHECK_THROWS_AS(s.unrank(6), DomainError);
}

TEST_CASE("dimension cap") {
  const ModeSet many = ModeSet::from_k_points(
      {Vec3(0, 0, 1), Vec3(0, 0, 2), Vec3(0, 0, 3), Vec3(0, 0, 4), Vec3(0, 0, 5)}, {1, 1, 1, 1, 1});
  CHECK_THROWS_AS(enumerate_basis(many, 6, 6, true, 1000), ConfigError);
}

TEST_CASE("ladder operators") {
  const FockBasis single = enumerate_basis(one_k_point(), 3, 3, false);
  const DenseOp a = dense(annihilation_matrix(single, 0));
  const DenseOp ad = dense(creation_matrix(single, 0));
  CHECK((ad - a.adjoint()).norm() == 0.0);

  StateVector vac = StateVector::Zero(single.dimension());
  vac(0) = 1.0;
  CHECK((a * vac).norm() == 0.0);

  const std::size_t one = *single.find_boson(std::vector<int>{1, 0});
  const std::size_t two = *single.find_boson(std::vector<int>{2, 0});
  CHECK(std::abs(ad(two, one) - std::sqrt(2.0)) < 1e-15);

  const FockBasis b = enumerate_basis(two_k_points(), 2, 2, false);
  for (std::size_t m = 0; m < 4; ++m) {
    const DenseOp am = dense(annihilation_matrix(b, m));
    const DenseOp num = am.adjoint() * am;
    const DenseOp comm = am * am.adjoint() - am.adjoint() * am;
    // States whose occupation of m can still be raised without leaving the truncation.
    std::vector<std::size_t> inner;
    for (std::size_t i = 0; i < b.dimension(); ++i) {
      CHECK(std::abs(num(i, i) - double(b.occupation(i, m))) < 1e-14);
      if (b.occupation(i, m) < b.per_mode_max() && b.photon_number(i) < b.total_max()) inner.push_back(i);
    }
    for (std::size_t i : inner)
      for (std::size_t j : inner) CHECK(std::abs(comm(i, j) - (i == j ? 1.0 : 0.0)) < 1e-14);
  }
}

TEST_CASE("diagonal field operators") {
  const ModeSet ms = two_k_points();
  const FockBasis b = enumerate_basis(ms, 2, 2, false);
  const std::vector<double> omega{1.0, 1.0};
  const SparseOp hf = field_energy(b, omega);
  const auto pf = field_momentum(b);
  const SparseOp nf = number_operator(b);

  CHECK(std::abs(DenseOp(hf)(0, 0)) == 0.0);
  CHECK(std::abs(DenseOp(nf)(0, 0)) == 0.0);
  const std::size_t up = *b.find_boson(std::vector<int>{1, 0, 0, 0});
  CHECK(DenseOp(hf)(up, up).real() == 1.0);
  CHECK(DenseOp(pf[2])(up, up).real() == 1.0);
  const std::size_t pair = *b.find_boson(std::vector<int>{1, 0, 1, 0});
  for (int mu = 0; mu < 3; ++mu) CHECK(DenseOp(pf[mu])(pair, pair).real() == 0.0);

  CHECK(max_abs_entry(commutator(hf, nf)) == 0.0);
  for (int mu = 0; mu < 3; ++mu) {
    CHECK(max_abs_entry(commutator(hf, pf[mu])) == 0.0);
    CHECK(max_abs_entry(commutator(nf, pf[mu])) == 0.0);
  }
}

TEST_CASE("spin tensor") {
  const FockBasis b = enumerate_basis(one_k_point(), 1, 1, true);
  const SparseOp id = boson_identity(b);
  const DenseOp s3 = dense(spin_tensor(3, id, b));
  CHECK(s3(b.vacuum_index(0), b.vacuum_index(0)).real() == 1.0);
  CHECK(s3(b.vacuum_index(1), b.vacuum_index(1)).real() == -1.0);

  const DenseOp s1 = dense(spin_tensor(1, id, b));
  CHECK((s1 * s1 - DenseOp::Identity(6, 6)).norm() == 0.0);

  const Vec3 v(0.3, -0.2, 0.5);
  DenseOp sv = DenseOp::Zero(6, 6);
  for (int mu = 0; mu < 3; ++mu) sv += v[mu] * dense(spin_tensor(mu + 1, id, b));
  CHECK((sv * sv - v.squaredNorm() * DenseOp::Identity(6, 6)).norm() < 1e-15);

  const FockBasis spinless = enumerate_basis(one_k_point(), 1, 1, false);
  CHECK_THROWS_AS(spin_tensor(1, boson_identity(spinless), spinless), DomainError);
}

TEST_CASE("mode set validation") {
  CHECK_THROWS_AS(ModeSet::from_k_points({}, {}), ConfigError);
  CHECK_THROWS_AS(ModeSet::from_k_points({Vec3(0, 0, 1)}, {0.0}), ConfigError);
  CHECK_THROWS_AS(ModeSet::from_k_points({Vec3(0, 0, 1), Vec3(0, 0, 1)}, {1.0, 1.0}), ConfigError);
  const ModeSet ms = two_k_points();
  CHECK(ms.size() == 4);
  CHECK(ms.axial());
  CHECK(ms.reflection_symmetric());
  CHECK(!ModeSet::from_k_points({Vec3(0, 0, 1), Vec3(1, 0, 0)}, {1.0, 1.0}).axial());
}
