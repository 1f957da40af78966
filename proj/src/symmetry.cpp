#include "pflab/symmetry.hpp"

#include <cmath>
#include <map>

#include <fmt/format.h>

#include "pflab/sparse.hpp"

namespace pflab {

std::string SectorLabel::str() const {
  if (twice_z % 2 == 0) return fmt::format("{}", twice_z / 2);
  return fmt::format("{}/2", twice_z);
}

namespace {

void require_axial(const FockBasis& basis, const char* what) {
  if (!basis.mode_set().axial())
    throw DomainError(fmt::format("{}: the mode set is not axial; angular momentum about an axis is only "
                                  "implemented for k-points on a common axis",
                                  what));
}

std::vector<int> k_point_signs(const ModeSet& modes) {
  std::vector<int> signs(modes.k_point_count());
  for (std::size_t i = 0; i < signs.size(); ++i) signs[i] = modes.k_point(i).dot(modes.axis()) > 0.0 ? 1 : -1;
  return signs;
}

double factorial(int n) { return std::tgamma(n + 1.0); }

double binomial(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

Complex power_of_i(int n) {
  switch (((n % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

// <n1, n2 | n_plus, n_minus> for b_pm^dag = (a1^dag +- i a2^dag) / sqrt 2.
Complex circular_overlap(int n_plus, int n_minus, int n1) {
  const int n = n_plus + n_minus;
  const int n2 = n - n1;
  Complex sum = 0.0;
  for (int r = std::max(0, n1 - n_minus); r <= std::min(n_plus, n1); ++r) {
    const int s = n1 - r;
    sum += binomial(n_plus, r) * binomial(n_minus, s) * power_of_i(n_plus - r) * power_of_i(-(n_minus - s));
  }
  return sum * std::sqrt(factorial(n1) * factorial(n2) / (factorial(n_plus) * factorial(n_minus))) /
         std::pow(2.0, 0.5 * n);
}

Eigen::Matrix2cd spin_frame(const Vec3& axis) {
  if ((axis - Vec3::UnitZ()).norm() <= 1e-14) return Eigen::Matrix2cd::Identity();
  if ((axis + Vec3::UnitZ()).norm() <= 1e-14) {
    Eigen::Matrix2cd u;
    u << 0, 1, 1, 0;
    return u;
  }
  Eigen::Matrix2cd s = axis.x() * pauli_matrix(1) + axis.y() * pauli_matrix(2) + axis.z() * pauli_matrix(3);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(s);
  Eigen::Matrix2cd u;
  u.col(0) = es.eigenvectors().col(1);  // +1
  u.col(1) = es.eigenvectors().col(0);  // -1
  return u;
}

}  // namespace

SparseOp helicity_operator(const FockBasis& basis) {
  require_axial(basis, "helicity_operator");
  const ModeSet& modes = basis.mode_set();
  const std::vector<int> signs = k_point_signs(modes);
  const auto nb = static_cast<Eigen::Index>(basis.boson_dimension());
  SparseOp s(nb, nb);
  const Complex i(0.0, 1.0);
  for (std::size_t kp = 0; kp < modes.k_point_count(); ++kp) {
    const SparseOp a1 = annihilation_matrix(basis, ModeSet::mode_index(kp, 1));
    const SparseOp a2 = annihilation_matrix(basis, ModeSet::mode_index(kp, 2));
    const SparseOp c1 = a1.adjoint();
    const SparseOp c2 = a2.adjoint();
    const SparseOp term = SparseOp(c2 * a1) - SparseOp(c1 * a2);
    s += (Complex(signs[kp]) * i) * term;
  }
  s.prune(Complex(0.0));
  return s;
}

SparseOp total_Jz(const FockBasis& basis) {
  const SparseOp s = helicity_operator(basis);
  SparseOp j = spin_tensor(0, s, basis);
  if (basis.with_spin()) {
    const Vec3& n = basis.mode_set().axis();
    const SparseOp id = boson_identity(basis);
    for (int mu = 0; mu < 3; ++mu)
      if (n[mu] != 0.0) j += Complex(0.5 * n[mu]) * spin_tensor(mu + 1, id, basis);
  }
  j.prune(Complex(0.0));
  return j;
}

SparseOp helicity_transform(const FockBasis& basis) {
  require_axial(basis, "helicity_transform");
  if (basis.per_mode_max() < basis.total_max())
    throw DomainError(fmt::format("helicity_transform: n_max = {} < N_max = {}; the truncated space is not "
                                  "rotation invariant and carries no sector decomposition",
                                  basis.per_mode_max(), basis.total_max()));
  const ModeSet& modes = basis.mode_set();
  const std::size_t kps = modes.k_point_count();
  const auto nb = static_cast<Eigen::Index>(basis.boson_dimension());

  std::vector<Eigen::Triplet<Complex>> boson;
  std::vector<std::uint8_t> occ(modes.size());
  for (std::size_t col = 0; col < basis.boson_dimension(); ++col) {
    const auto circ = basis.occupations(col);
    // Expand the product over k-points.
    std::vector<std::pair<std::vector<std::uint8_t>, Complex>> terms{{occ, Complex(1.0)}};
    for (std::size_t kp = 0; kp < kps; ++kp) {
      const int np = circ[2 * kp], nm = circ[2 * kp + 1];
      std::vector<std::pair<std::vector<std::uint8_t>, Complex>> next;
      for (int n1 = 0; n1 <= np + nm; ++n1) {
        const Complex c = circular_overlap(np, nm, n1);
        if (std::abs(c) < 1e-15) continue;
        for (const auto& [o, w] : terms) {
          auto o2 = o;
          o2[2 * kp] = static_cast<std::uint8_t>(n1);
          o2[2 * kp + 1] = static_cast<std::uint8_t>(np + nm - n1);
          next.emplace_back(std::move(o2), w * c);
        }
      }
      terms = std::move(next);
    }
    for (const auto& [o, w] : terms) {
      const auto row = basis.find_boson(std::span<const std::uint8_t>(o));
      if (!row) throw DomainError("helicity_transform: linear-basis state outside the truncation");
      boson.emplace_back(static_cast<int>(*row), static_cast<int>(col), w);
    }
  }
  SparseOp wb(nb, nb);
  wb.setFromTriplets(boson.begin(), boson.end());
  if (!basis.with_spin()) return wb;

  const Eigen::Matrix2cd u = spin_frame(basis.mode_set().axis());
  std::vector<Eigen::Triplet<Complex>> full;
  for (int sr = 0; sr < 2; ++sr)
    for (int sc = 0; sc < 2; ++sc) {
      if (u(sr, sc) == Complex(0.0)) continue;
      for (int k = 0; k < wb.outerSize(); ++k)
        for (SparseOp::InnerIterator it(wb, k); it; ++it)
          full.emplace_back(static_cast<int>(sr * nb + it.row()), static_cast<int>(sc * nb + it.col()),
                            u(sr, sc) * it.value());
    }
  SparseOp w(2 * nb, 2 * nb);
  w.setFromTriplets(full.begin(), full.end());
  return w;
}

std::vector<int> sector_twice_z(const FockBasis& basis) {
  require_axial(basis, "sector_twice_z");
  const std::vector<int> signs = k_point_signs(basis.mode_set());
  std::vector<int> out(basis.dimension());
  for (std::size_t i = 0; i < basis.dimension(); ++i) {
    const auto occ = basis.occupations(basis.boson_index_of(i));
    int twice = 0;
    for (std::size_t kp = 0; kp < signs.size(); ++kp) twice += 2 * signs[kp] * (occ[2 * kp] - occ[2 * kp + 1]);
    if (basis.with_spin()) twice += basis.spin_of(i) == 0 ? 1 : -1;
    out[i] = twice;
  }
  return out;
}

std::vector<SectorLabel> SectorDecomposition::labels() const {
  std::vector<SectorLabel> out;
  for (const auto& b : blocks) out.push_back(b.label);
  return out;
}

SectorDecomposition sector_decompose(const SparseOp& h, const FockBasis& basis, double tol) {
  if (h.rows() != static_cast<Eigen::Index>(basis.dimension()))
    throw DomainError("sector_decompose: operator dimension does not match the basis");
  SectorDecomposition d;
  d.Jz = total_Jz(basis);

  const SparseOp c = commutator(h, d.Jz);
  int worst_row = -1, worst_col = -1;
  for (int k = 0; k < c.outerSize(); ++k)
    for (SparseOp::InnerIterator it(c, k); it; ++it)
      if (std::abs(it.value()) > d.commutator_norm) {
        d.commutator_norm = std::abs(it.value());
        worst_row = static_cast<int>(it.row());
        worst_col = static_cast<int>(it.col());
      }
  if (d.commutator_norm > tol)
    throw DomainError(fmt::format("sector_decompose: max |[H, Jz]| = {:.3e} exceeds {:.1e} (worst entry ({}, {}))",
                                  d.commutator_norm, tol, worst_row, worst_col));

  d.transform = helicity_transform(basis);
  const SparseOp rotated = SparseOp(d.transform.adjoint()) * h * d.transform;
  const std::vector<int> twice = sector_twice_z(basis);

  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < twice.size(); ++i) groups[twice[i]].push_back(i);
  for (int k = 0; k < rotated.outerSize(); ++k)
    for (SparseOp::InnerIterator it(rotated, k); it; ++it)
      if (twice[it.row()] != twice[it.col()]) d.off_block_norm = std::max(d.off_block_norm, std::abs(it.value()));

  for (auto& [label, indices] : groups) {
    SectorBlock b;
    b.label = SectorLabel{label};
    b.hamiltonian = hermitian_part(restrict_to(rotated, indices));
    b.indices = std::move(indices);
    d.blocks.push_back(std::move(b));
  }
  return d;
}

SectorReport ground_sector_labels(const SectorDecomposition& decomposition, double eps_deg,
                                  const SolverOptions& options) {
  SectorReport r;
  r.minimum = INFINITY;
  for (const SectorBlock& b : decomposition.blocks) {
    SectorGround g;
    g.label = b.label;
    g.dimension = b.indices.size();
    if (g.dimension == 1) {
      g.ground_energy = std::real(b.hamiltonian.coeff(0, 0));
    } else {
      SolverOptions opt = options;
      opt.n_eig = 1;
      g.ground_energy = solve_lowest(b.hamiltonian, opt).eigenvalues.front();
    }
    r.minimum = std::min(r.minimum, g.ground_energy);
    r.sectors.push_back(g);
  }
  const double scale = std::max(1.0, std::abs(r.minimum));
  for (const SectorGround& g : r.sectors)
    if (g.ground_energy - r.minimum <= eps_deg * scale) r.ground_labels.push_back(g.label);
  r.expected_pair = r.ground_labels == std::vector<SectorLabel>{SectorLabel{-1}, SectorLabel{1}};
  return r;
}

Mat3 rotation_about(const Vec3& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

RotationReport rotation_invariance_check(const FieldModel& model, double e, const Vec3& p,
                                         std::span<const Mat3> rotations, const SolverOptions& options) {
  const ModeSet& modes = model.basis().mode_set();
  SolverOptions opt = options;
  opt.n_eig = 1;
  RotationReport r;
  r.reference = solve_lowest(model.hamiltonian(p, e), opt).eigenvalues.front();
  for (std::size_t i = 0; i < rotations.size(); ++i) {
    const Mat3& rot = rotations[i];
    if (!rot.allFinite() || (rot.transpose() * rot - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-12)
      throw DomainError(fmt::format("rotation_invariance_check: matrix {} is not orthogonal", i));
    if (!modes.invariant_under(rot))
      throw DomainError(fmt::format("rotation_invariance_check: matrix {} does not map the mode set onto itself", i));
    const double e_rot = solve_lowest(model.hamiltonian(Vec3(rot * p), e), opt).eigenvalues.front();
    r.energies.push_back(e_rot);
    r.max_discrepancy = std::max(r.max_discrepancy, std::abs(e_rot - r.reference));
  }
  return r;
}

}  // namespace pflab
