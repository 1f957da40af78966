#include "pflab/fock.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace pflab {

namespace {

std::string occupation_key(std::span<const std::uint8_t> occ) {
  return {reinterpret_cast<const char*>(occ.data()), occ.size()};
}

std::size_t saturating_add(std::size_t a, std::size_t b) {
  return (a > std::numeric_limits<std::size_t>::max() - b) ? std::numeric_limits<std::size_t>::max()
                                                           : a + b;
}

// Appends every vector of length occ.size() - pos with the given remaining
// sum, descending lexicographically.
void fill_grade(std::vector<std::uint8_t>& occ, std::size_t pos, int remaining, int per_mode_max,
                std::vector<std::uint8_t>& out) {
  if (pos + 1 == occ.size()) {
    if (remaining > per_mode_max) return;
    occ[pos] = static_cast<std::uint8_t>(remaining);
    out.insert(out.end(), occ.begin(), occ.end());
    return;
  }
  for (int n = std::min(remaining, per_mode_max); n >= 0; --n) {
    occ[pos] = static_cast<std::uint8_t>(n);
    fill_grade(occ, pos + 1, remaining - n, per_mode_max, out);
  }
  occ[pos] = 0;
}

}  // namespace

ModeSet ModeSet::from_k_points(std::vector<Vec3> k_points, std::vector<double> weights,
                               std::optional<Vec3> axis_hint) {
  if (k_points.empty()) throw ConfigError("mode set is empty");
  if (k_points.size() != weights.size())
    throw ConfigError("mode set: k-point and weight counts differ");

  ModeSet set;
  for (std::size_t i = 0; i < k_points.size(); ++i) {
    const Vec3& k = k_points[i];
    if (!k.allFinite()) throw ConfigError(fmt::format("mode set: k-point {} is not finite", i));
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i]))
      throw ConfigError(fmt::format("mode set: weight of k-point {} must be positive", i));
    for (std::size_t j = 0; j < i; ++j)
      if ((k_points[j] - k).norm() <= 1e-14 * std::max(1.0, k.norm()))
        throw ConfigError(fmt::format("mode set: k-points {} and {} coincide", j, i));
  }

  Vec3 axis = Vec3::UnitZ();
  if (axis_hint) {
    if (!(axis_hint->norm() > 0.0)) throw ConfigError("mode set: axis must be nonzero");
    axis = axis_hint->normalized();
  } else {
    for (const Vec3& k : k_points)
      if (k.norm() > 0.0) {
        axis = k.normalized();
        break;
      }
  }
  bool axial = true;
  for (const Vec3& k : k_points)
    if (k.cross(axis).norm() > 1e-12 * std::max(1.0, k.norm())) axial = false;

  set.axial_ = axial;
  set.axis_ = axis;
  set.k_points_ = std::move(k_points);
  set.weights_ = std::move(weights);
  set.modes_.reserve(2 * set.k_points_.size());
  for (std::size_t i = 0; i < set.k_points_.size(); ++i)
    for (int j = 1; j <= 2; ++j) set.modes_.push_back({set.k_points_[i], set.weights_[i], j});
  return set;
}

std::optional<std::size_t> ModeSet::find_k_point(const Vec3& k, double tol) const {
  for (std::size_t i = 0; i < k_points_.size(); ++i)
    if ((k_points_[i] - k).norm() <= tol * std::max(1.0, k.norm())) return i;
  return std::nullopt;
}

bool ModeSet::invariant_under(const Mat3& rotation, double tol) const {
  for (std::size_t i = 0; i < k_points_.size(); ++i) {
    auto j = find_k_point(rotation * k_points_[i], tol);
    if (!j || std::abs(weights_[*j] - weights_[i]) > tol * weights_[i]) return false;
  }
  return true;
}

bool ModeSet::reflection_symmetric(double tol) const { return invariant_under(-Mat3::Identity(), tol); }

std::size_t count_occupations(std::size_t modes, int total_max, int per_mode_max) {
  if (total_max < 0 || per_mode_max < 0) return 0;
  // ways[s]: number of vectors over the modes processed so far with sum s.
  std::vector<std::size_t> ways(static_cast<std::size_t>(total_max) + 1, 0);
  ways[0] = 1;
  for (std::size_t m = 0; m < modes; ++m) {
    std::vector<std::size_t> next(ways.size(), 0);
    for (std::size_t s = 0; s < ways.size(); ++s) {
      if (ways[s] == 0) continue;
      for (int n = 0; n <= per_mode_max && s + n < ways.size(); ++n)
        next[s + n] = saturating_add(next[s + n], ways[s]);
    }
    ways = std::move(next);
  }
  std::size_t total = 0;
  for (std::size_t w : ways) total = saturating_add(total, w);
  return total;
}

FockBasis::FockBasis(ModeSet modes, int total_max, int per_mode_max, bool with_spin,
                     std::size_t dimension_cap)
    : modes_(std::move(modes)),
      total_max_(total_max),
      per_mode_max_(per_mode_max),
      with_spin_(with_spin) {
  if (modes_.size() == 0) throw ConfigError("basis: mode set is empty");
  if (total_max_ < 0) throw ConfigError("basis: N_max must be >= 0");
  if (per_mode_max_ < 1) throw ConfigError("basis: n_max must be >= 1");
  if (per_mode_max_ > 255) throw ConfigError("basis: n_max must be <= 255");

  const std::size_t bosons = count_occupations(modes_.size(), total_max_, per_mode_max_);
  const std::size_t spin = with_spin_ ? 2 : 1;
  if (bosons > dimension_cap / spin)
    throw ConfigError(fmt::format(
        "basis: dimension {}x{} exceeds the cap {} ({} modes, N_max={}, n_max={}); reduce the "
        "cutoffs or raise dimension_cap",
        spin, bosons, dimension_cap, modes_.size(), total_max_, per_mode_max_));

  const std::size_t m = modes_.size();
  occupations_.reserve(bosons * m);
  std::vector<std::uint8_t> scratch(m, 0);
  for (int n = 0; n <= total_max_; ++n) fill_grade(scratch, 0, n, per_mode_max_, occupations_);
  boson_count_ = occupations_.size() / m;

  photon_numbers_.resize(boson_count_);
  lookup_.reserve(boson_count_);
  for (std::size_t i = 0; i < boson_count_; ++i) {
    auto occ = occupations(i);
    int n = 0;
    for (auto v : occ) n += v;
    photon_numbers_[i] = n;
    lookup_.emplace(occupation_key(occ), i);
  }
}

std::optional<std::size_t> FockBasis::find_boson(std::span<const std::uint8_t> occ) const {
  if (occ.size() != mode_count()) return std::nullopt;
  auto it = lookup_.find(occupation_key(occ));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> FockBasis::find_boson(std::span<const int> occ) const {
  if (occ.size() != mode_count()) return std::nullopt;
  std::vector<std::uint8_t> bytes(occ.size());
  for (std::size_t i = 0; i < occ.size(); ++i) {
    if (occ[i] < 0 || occ[i] > 255) return std::nullopt;
    bytes[i] = static_cast<std::uint8_t>(occ[i]);
  }
  return find_boson(std::span<const std::uint8_t>(bytes));
}

std::size_t FockBasis::rank(const OccupationState& state) const {
  const int spin = with_spin_ ? state.spin : 0;
  if (spin < 0 || spin >= static_cast<int>(spin_factor()))
    throw DomainError(fmt::format("rank: spin index {} not admissible", state.spin));
  auto b = find_boson(std::span<const int>(state.occupations));
  if (!b) throw DomainError("rank: occupation vector lies outside the truncated basis");
  return index(spin, *b);
}

OccupationState FockBasis::unrank(std::size_t i) const {
  if (i >= dimension())
    throw DomainError(fmt::format("unrank: index {} out of range (dimension {})", i, dimension()));
  const std::size_t b = boson_index_of(i);
  auto occ = occupations(b);
  return {std::vector<int>(occ.begin(), occ.end()), spin_of(i)};
}

FockBasis enumerate_basis(const ModeSet& modes, int total_max, int per_mode_max, bool with_spin,
                          std::size_t dimension_cap) {
  return FockBasis(modes, total_max, per_mode_max, with_spin, dimension_cap);
}

SparseOp annihilation_matrix(const FockBasis& basis, std::size_t mode) {
  if (mode >= basis.mode_count())
    throw DomainError(fmt::format("mode index {} out of range ({} modes)", mode, basis.mode_count()));
  const auto n = static_cast<Eigen::Index>(basis.boson_dimension());
  std::vector<Eigen::Triplet<Complex>> entries;
  std::vector<std::uint8_t> occ(basis.mode_count());
  for (std::size_t s = 0; s < basis.boson_dimension(); ++s) {
    const int nm = basis.occupation(s, mode);
    if (nm == 0) continue;
    auto src = basis.occupations(s);
    std::copy(src.begin(), src.end(), occ.begin());
    occ[mode] = static_cast<std::uint8_t>(nm - 1);
    // Lowering never leaves the truncation.
    const std::size_t t = *basis.find_boson(std::span<const std::uint8_t>(occ));
    entries.emplace_back(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(s),
                         std::sqrt(static_cast<double>(nm)));
  }
  SparseOp a(n, n);
  a.setFromTriplets(entries.begin(), entries.end());
  return a;
}

SparseOp creation_matrix(const FockBasis& basis, std::size_t mode) {
  return SparseOp(annihilation_matrix(basis, mode).adjoint());
}

namespace {

template <typename F>
SparseOp diagonal_from(const FockBasis& basis, F&& value_of) {
  const auto n = static_cast<Eigen::Index>(basis.boson_dimension());
  std::vector<Eigen::Triplet<Complex>> entries;
  entries.reserve(basis.boson_dimension());
  for (std::size_t s = 0; s < basis.boson_dimension(); ++s) {
    const double v = value_of(s);
    if (v != 0.0) entries.emplace_back(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s), v);
  }
  SparseOp d(n, n);
  d.setFromTriplets(entries.begin(), entries.end());
  return d;
}

}  // namespace

SparseOp number_operator(const FockBasis& basis) {
  return diagonal_from(basis, [&](std::size_t s) { return double(basis.photon_number(s)); });
}

SparseOp field_energy(const FockBasis& basis, std::span<const double> omega_per_k_point) {
  if (omega_per_k_point.size() != basis.mode_set().k_point_count())
    throw DomainError("field_energy: one omega value per k-point required");
  return diagonal_from(basis, [&](std::size_t s) {
    double e = 0.0;
    for (std::size_t m = 0; m < basis.mode_count(); ++m)
      e += omega_per_k_point[ModeSet::k_point_of(m)] * basis.occupation(s, m);
    return e;
  });
}

std::array<SparseOp, 3> field_momentum(const FockBasis& basis) {
  std::array<SparseOp, 3> p;
  for (int mu = 0; mu < 3; ++mu)
    p[mu] = diagonal_from(basis, [&](std::size_t s) {
      double v = 0.0;
      for (std::size_t m = 0; m < basis.mode_count(); ++m)
        v += basis.mode_set()[m].k[mu] * basis.occupation(s, m);
      return v;
    });
  return p;
}

SparseOp boson_identity(const FockBasis& basis) {
  const auto n = static_cast<Eigen::Index>(basis.boson_dimension());
  SparseOp id(n, n);
  id.setIdentity();
  return id;
}

Eigen::Matrix2cd pauli_matrix(int index) {
  const Complex i(0.0, 1.0);
  Eigen::Matrix2cd s;
  switch (index) {
    case 0: s << 1, 0, 0, 1; break;
    case 1: s << 0, 1, 1, 0; break;
    case 2: s << 0, -i, i, 0; break;
    case 3: s << 1, 0, 0, -1; break;
    default: throw DomainError(fmt::format("pauli index {} not in 0..3", index));
  }
  return s;
}

SparseOp spin_tensor(int pauli, const SparseOp& boson_op, const FockBasis& basis) {
  const auto nb = static_cast<Eigen::Index>(basis.boson_dimension());
  if (boson_op.rows() != nb || boson_op.cols() != nb)
    throw DomainError(fmt::format("spin_tensor: operator is {}x{}, boson factor is {}", boson_op.rows(),
                                  boson_op.cols(), nb));
  const Eigen::Matrix2cd sigma = pauli_matrix(pauli);
  if (!basis.with_spin()) {
    if (pauli != 0) throw DomainError("spin_tensor: Pauli matrix requested on a spinless basis");
    return boson_op;
  }
  std::vector<Eigen::Triplet<Complex>> entries;
  entries.reserve(2 * static_cast<std::size_t>(boson_op.nonZeros()));
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      const Complex s = sigma(r, c);
      if (s == Complex(0.0)) continue;
      for (int k = 0; k < boson_op.outerSize(); ++k)
        for (SparseOp::InnerIterator it(boson_op, k); it; ++it)
          entries.emplace_back(r * nb + it.row(), c * nb + it.col(), s * it.value());
    }
  SparseOp out(2 * nb, 2 * nb);
  out.setFromTriplets(entries.begin(), entries.end());
  return out;
}

SparseOp restrict_to(const SparseOp& op, std::span<const std::size_t> indices) {
  std::vector<Eigen::Index> position(static_cast<std::size_t>(op.rows()), -1);
  for (std::size_t i = 0; i < indices.size(); ++i) position[indices[i]] = static_cast<Eigen::Index>(i);
  std::vector<Eigen::Triplet<Complex>> entries;
  for (int k = 0; k < op.outerSize(); ++k)
    for (SparseOp::InnerIterator it(op, k); it; ++it) {
      const Eigen::Index r = position[static_cast<std::size_t>(it.row())];
      const Eigen::Index c = position[static_cast<std::size_t>(it.col())];
      if (r >= 0 && c >= 0) entries.emplace_back(r, c, it.value());
    }
  const auto n = static_cast<Eigen::Index>(indices.size());
  SparseOp out(n, n);
  out.setFromTriplets(entries.begin(), entries.end());
  return out;
}

}  // namespace pflab
