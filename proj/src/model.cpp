#include "pflab/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "pflab/sparse.hpp"

namespace pflab {

// ---------------------------------------------------------------- dispersion

Dispersion Dispersion::massive(double photon_mass) {
  if (!(photon_mass > 0.0) || !std::isfinite(photon_mass))
    throw ConfigError("dispersion: m_ph must be positive");
  Dispersion d;
  d.kind_ = DispersionKind::massive;
  d.mass_ = photon_mass;
  return d;
}

Dispersion Dispersion::massless() {
  Dispersion d;
  d.kind_ = DispersionKind::massless;
  d.mass_ = 0.0;
  return d;
}

Dispersion Dispersion::custom(std::vector<std::pair<double, double>> table) {
  if (table.size() < 2) throw ConfigError("dispersion: custom table needs at least two samples");
  std::sort(table.begin(), table.end());
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto [k, w] = table[i];
    if (!std::isfinite(k) || !std::isfinite(w) || k < 0.0)
      throw ConfigError(fmt::format("dispersion: custom sample {} is invalid", i));
    if (i > 0 && table[i - 1].first == k)
      throw ConfigError(fmt::format("dispersion: duplicate |k| = {} in custom table", k));
  }
  Dispersion d;
  d.kind_ = DispersionKind::custom;
  d.mass_ = 0.0;
  d.table_ = std::move(table);
  return d;
}

double Dispersion::operator()(double k) const {
  switch (kind_) {
    case DispersionKind::massive: return std::sqrt(k * k + mass_ * mass_);
    case DispersionKind::massless: return k;
    case DispersionKind::custom: {
      auto hi = std::upper_bound(table_.begin(), table_.end(), k,
                                 [](double v, const auto& s) { return v < s.first; });
      if (hi == table_.begin()) ++hi;
      if (hi == table_.end()) --hi;
      const auto lo = hi - 1;
      const double t = (k - lo->first) / (hi->first - lo->first);
      return lo->second + t * (hi->second - lo->second);
    }
  }
  return 0.0;
}

// --------------------------------------------------------------- form factor

FormFactor FormFactor::gaussian(double lambda, double scale) {
  if (!(lambda > 0.0)) throw ConfigError("form factor: lambda must be positive");
  FormFactor f;
  f.kind_ = FormFactorKind::gaussian;
  f.lambda_ = lambda;
  f.scale_ = scale;
  return f;
}

FormFactor FormFactor::sharp(double lambda, double scale) {
  if (!(lambda > 0.0)) throw ConfigError("form factor: lambda must be positive");
  FormFactor f;
  f.kind_ = FormFactorKind::sharp;
  f.lambda_ = lambda;
  f.scale_ = scale;
  return f;
}

double FormFactor::operator()(double k) const {
  const double base = scale_ * kFormFactorOrigin;
  if (kind_ == FormFactorKind::sharp) return k <= lambda_ ? base : 0.0;
  return base * std::exp(-k * k / (2.0 * lambda_ * lambda_));
}

double FormFactor::natural_radius() const {
  return kind_ == FormFactorKind::sharp ? lambda_ : 6.0 * lambda_;
}

// ------------------------------------------------------------------ mode sets

ModeSet build_mode_set(const ModeSetSpec& spec) {
  return std::visit(
      [](const auto& s) -> ModeSet {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, AxialModeSpec>) {
          if (s.radial_nodes < 1) throw ConfigError("mode_set: radial_nodes must be >= 1");
          if (!(s.k_max > 0.0)) throw ConfigError("mode_set: k_max must be positive");
          if (!(s.axis.norm() > 0.0)) throw ConfigError("mode_set: axis must be nonzero");
          const Vec3 axis = s.axis.normalized();
          const QuadratureRule rule = gauss_legendre(s.radial_nodes, 0.0, s.k_max);
          std::vector<Vec3> ks;
          std::vector<double> ws;
          for (std::size_t i = 0; i < rule.size(); ++i) {
            const double k = rule.nodes[i];
            const double shell = 4.0 * std::numbers::pi * k * k * rule.weights[i];
            if (s.symmetric) {
              ks.push_back(k * axis);
              ws.push_back(0.5 * shell);
              ks.push_back(-k * axis);
              ws.push_back(0.5 * shell);
            } else {
              ks.push_back(k * axis);
              ws.push_back(shell);
            }
          }
          return ModeSet::from_k_points(std::move(ks), std::move(ws), axis);
        } else if constexpr (std::is_same_v<T, CubicModeSpec>) {
          if (s.points_per_axis < 1) throw ConfigError("mode_set: points_per_axis must be >= 1");
          if (!(s.spacing > 0.0)) throw ConfigError("mode_set: spacing must be positive");
          const int n = s.points_per_axis;
          std::vector<Vec3> ks;
          std::vector<double> ws;
          const double offset = 0.5 * (n - 1);
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
              for (int l = 0; l < n; ++l) {
                const Vec3 k = s.spacing * Vec3(i - offset, j - offset, l - offset);
                if (k.norm() == 0.0) continue;
                ks.push_back(k);
                ws.push_back(s.spacing * s.spacing * s.spacing);
              }
          if (ks.empty()) throw ConfigError("mode_set: cubic lattice contains only the origin");
          return ModeSet::from_k_points(std::move(ks), std::move(ws));
        } else {
          return ModeSet::from_k_points(s.k_points, s.weights, s.axis);
        }
      },
      spec);
}

MomentumGrid momentum_grid(const ModelConfig& config) {
  const QuadratureSettings& q = config.quadrature;
  const double radius = q.radius > 0.0 ? q.radius : config.form_factor.natural_radius();
  MomentumGrid grid;
  grid.radial = composite_gauss_legendre(q.radial_panels, q.radial_order, 0.0, radius);
  grid.angular = gauss_legendre(q.angular_nodes, -1.0, 1.0);
  return grid;
}

PolarizationFrame polarization_frame(const Vec3& k) {
  const double norm = k.norm();
  if (!(norm > 0.0)) throw DomainError("polarization frame undefined at k = 0");
  const Vec3 khat = k / norm;
  const Vec3 zx = Vec3::UnitZ().cross(khat);
  PolarizationFrame f;
  if (zx.norm() <= 1e-12) {
    f.e1 = Vec3::UnitX();
    f.e2 = khat.z() > 0.0 ? Vec3::UnitY() : Vec3(-Vec3::UnitY());
  } else {
    f.e1 = zx.normalized();
    f.e2 = khat.cross(f.e1);
  }
  return f;
}

std::vector<double> mode_amplitudes(const ModelConfig& config, const ModeSet& modes) {
  std::vector<double> c(modes.size());
  for (std::size_t m = 0; m < modes.size(); ++m) {
    const Mode& mode = modes[m];
    const double omega = config.dispersion(mode.k);
    if (!(omega > 0.0))
      throw DomainError(fmt::format("omega(k) = {} is not positive at mode {}", omega, m));
    c[m] = config.form_factor(mode.k) * std::sqrt(mode.weight / (2.0 * omega));
  }
  return c;
}

// --------------------------------------------------------------- field model

namespace {

std::array<SparseOp, 3> potential_on(const FockBasis& basis, std::span<const double> amplitude) {
  const ModeSet& modes = basis.mode_set();
  std::array<SparseOp, 3> a;
  const auto n = static_cast<Eigen::Index>(basis.boson_dimension());
  for (auto& op : a) op = SparseOp(n, n);
  for (std::size_t m = 0; m < modes.size(); ++m) {
    const Vec3 e = polarization_frame(modes[m].k)[modes[m].polarization];
    const SparseOp lower = annihilation_matrix(basis, m);
    const SparseOp field = lower + SparseOp(lower.adjoint());
    for (int mu = 0; mu < 3; ++mu)
      if (e[mu] != 0.0) a[mu] += (amplitude[m] * e[mu]) * field;
  }
  return a;
}

}  // namespace

FieldModel::FieldModel(const ModelConfig& config)
    : config_(config),
      basis_(config.basis()),
      extended_(basis_.mode_set(), config.total_max + 1, config.per_mode_max + 1, false,
                std::numeric_limits<std::size_t>::max()) {
  const ModeSet& modes = basis_.mode_set();
  for (std::size_t i = 0; i < modes.k_point_count(); ++i)
    if (!(modes.k_point(i).norm() > 0.0))
      throw DomainError("mode set contains k = 0, where the polarization frame is undefined");

  embedding_.resize(basis_.boson_dimension());
  for (std::size_t s = 0; s < basis_.boson_dimension(); ++s)
    embedding_[s] = *extended_.find_boson(basis_.occupations(s));

  omega_.resize(modes.k_point_count());
  for (std::size_t i = 0; i < modes.k_point_count(); ++i) omega_[i] = config.dispersion(modes.k_point(i));
  amplitudes_ = mode_amplitudes(config, modes);

  extended_vector_potential_ = potential_on(extended_, amplitudes_);
  extended_field_momentum_ = pflab::field_momentum(extended_);

  for (int mu = 0; mu < 3; ++mu) vector_potential_[mu] = restrict_to(extended_vector_potential_[mu], embedding_);

  const auto n = static_cast<Eigen::Index>(basis_.boson_dimension());
  const Complex i(0.0, 1.0);
  for (auto& op : magnetic_field_) op = SparseOp(n, n);
  for (std::size_t m = 0; m < modes.size(); ++m) {
    const Vec3 e = polarization_frame(modes[m].k)[modes[m].polarization];
    const Vec3 axial = modes[m].k.cross(e);
    const SparseOp lower = annihilation_matrix(basis_, m);
    const SparseOp field = SparseOp(lower.adjoint()) - lower;
    for (int mu = 0; mu < 3; ++mu)
      if (axial[mu] != 0.0) magnetic_field_[mu] += (i * amplitudes_[m] * axial[mu]) * field;
  }

  field_momentum_ = pflab::field_momentum(basis_);
  field_energy_ = pflab::field_energy(basis_, omega_);
  number_ = number_operator(basis_);

  SparseOp square(static_cast<Eigen::Index>(extended_.boson_dimension()),
                  static_cast<Eigen::Index>(extended_.boson_dimension()));
  for (int mu = 0; mu < 3; ++mu) square += extended_vector_potential_[mu] * extended_vector_potential_[mu];
  vector_potential_square_ = restrict_to(square, embedding_);
}

SparseOp FieldModel::kinetic_square(const Vec3& p, double e) const {
  const auto n = static_cast<Eigen::Index>(extended_.boson_dimension());
  SparseOp id(n, n);
  id.setIdentity();
  SparseOp square(n, n);
  for (int mu = 0; mu < 3; ++mu) {
    SparseOp pi = Complex(p[mu]) * id - extended_field_momentum_[mu];
    if (e != 0.0) pi -= Complex(e) * extended_vector_potential_[mu];
    square += pi * pi;
  }
  return restrict_to(square, embedding_);
}

SparseOp FieldModel::hamiltonian(const Vec3& p, double e) const {
  SparseOp boson = 0.5 * kinetic_square(p, e) + field_energy_;
  SparseOp h = lift(boson);
  if (basis_.with_spin() && e != 0.0)
    for (int mu = 0; mu < 3; ++mu) h -= Complex(0.5 * e) * lift(magnetic_field_[mu], mu + 1);
  return hermitian_part(h);
}

SparseOp FieldModel::free_hamiltonian(const Vec3& p) const {
  const auto n = static_cast<Eigen::Index>(basis_.boson_dimension());
  SparseOp id(n, n);
  id.setIdentity();
  SparseOp boson = field_energy_;
  for (int mu = 0; mu < 3; ++mu) {
    const SparseOp shifted = Complex(p[mu]) * id - field_momentum_[mu];
    boson += 0.5 * SparseOp(shifted * shifted);
  }
  return hermitian_part(lift(boson));
}

SparseOp FieldModel::interaction(const Vec3& p, double e) const {
  const auto n = static_cast<Eigen::Index>(basis_.boson_dimension());
  SparseOp id(n, n);
  id.setIdentity();
  SparseOp boson = Complex(0.5 * e * e) * vector_potential_square_;
  for (int mu = 0; mu < 3; ++mu) {
    const SparseOp shifted = Complex(p[mu]) * id - field_momentum_[mu];
    const SparseOp cross = shifted * vector_potential_[mu] + vector_potential_[mu] * shifted;
    boson -= Complex(0.5 * e) * cross;
  }
  SparseOp h = lift(boson);
  if (basis_.with_spin())
    for (int mu = 0; mu < 3; ++mu) h -= Complex(0.5 * e) * lift(magnetic_field_[mu], mu + 1);
  return hermitian_part(h);
}

std::array<SparseOp, 3> build_vector_potential(const ModelConfig& config) {
  return FieldModel(config).vector_potential();
}

std::array<SparseOp, 3> build_magnetic_field(const ModelConfig& config) {
  return FieldModel(config).magnetic_field();
}

SparseOp assemble_hamiltonian(const ModelConfig& config) {
  return FieldModel(config).hamiltonian(config.momentum, config.coupling);
}

SparseOp free_hamiltonian(const ModelConfig& config) {
  return FieldModel(config).free_hamiltonian(config.momentum);
}

SparseOp interaction_part(const ModelConfig& config) {
  return FieldModel(config).interaction(config.momentum, config.coupling);
}

// ---------------------------------------------------------------- diagnostics

CouplingBound coupling_bound(const ModelConfig& config, double e) {
  const MomentumGrid grid = momentum_grid(config);
  CouplingBound b;
  b.first_integral = grid.integrate_radial([&](double k) {
    const double w = config.dispersion(k);
    const double f = config.form_factor(k);
    return (1.0 / (w * w) + w) * f * f;
  });
  b.second_integral = grid.integrate_radial([&](double k) {
    const double w = config.dispersion(k);
    const double f = config.form_factor(k);
    return (1.0 / (w * w) + 1.0) * f * f;
  });
  b.finite = std::isfinite(b.first_integral) && std::isfinite(b.second_integral);
  if (!b.finite) {
    b.value = std::numeric_limits<double>::infinity();
    return b;
  }
  b.value = std::abs(e) * std::sqrt(b.first_integral) + e * e * b.second_integral;
  return b;
}

CouplingBound coupling_bound(const ModelConfig& config) { return coupling_bound(config, config.coupling); }

namespace {

double uniform01(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

Vec3 random_unit(std::mt19937_64& gen) {
  const double z = 2.0 * uniform01(gen) - 1.0;
  const double phi = 2.0 * std::numbers::pi * uniform01(gen);
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {r * std::cos(phi), r * std::sin(phi), z};
}

Mat3 random_rotation(std::mt19937_64& gen) {
  Eigen::Vector4d q(2 * uniform01(gen) - 1, 2 * uniform01(gen) - 1, 2 * uniform01(gen) - 1,
                    2 * uniform01(gen) - 1);
  if (q.norm() < 1e-3) q = Eigen::Vector4d(1, 0, 0, 0);
  q.normalize();
  return Eigen::Quaterniond(q[0], q[1], q[2], q[3]).toRotationMatrix();
}

}  // namespace

DispersionAxiomReport check_dispersion_axioms(const Dispersion& omega, int sample_count,
                                              std::uint64_t seed, double sample_radius) {
  if (sample_count < 1) throw DomainError("check_dispersion_axioms: sample_count must be >= 1");
  std::mt19937_64 gen(seed);
  std::vector<Vec3> samples{Vec3::Zero(), Vec3::UnitX()};
  for (int i = 0; i < sample_count; ++i) samples.push_back(sample_radius * uniform01(gen) * random_unit(gen));

  DispersionAxiomReport report;

  report.positivity.worst_margin = INFINITY;
  for (const Vec3& k : samples) {
    const double w = omega(k);
    if (w < report.positivity.worst_margin) {
      report.positivity.worst_margin = w;
      report.positivity.witness_k1 = k;
    }
  }
  report.positivity.passed = report.positivity.worst_margin > 0.0;

  std::vector<std::pair<Vec3, Vec3>> pairs{{Vec3::UnitX(), Vec3::UnitX()}};
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) pairs.emplace_back(samples[i], samples[i + 1]);
  for (int i = 0; i < sample_count; ++i) {
    const Vec3 k1 = sample_radius * uniform01(gen) * random_unit(gen);
    pairs.emplace_back(k1, sample_radius * uniform01(gen) * random_unit(gen));
  }
  report.subadditivity.worst_margin = INFINITY;
  for (const auto& [k1, k2] : pairs) {
    const double margin = omega(k1) + omega(k2) - omega(Vec3(k1 + k2));
    if (margin < report.subadditivity.worst_margin) {
      report.subadditivity.worst_margin = margin;
      report.subadditivity.witness_k1 = k1;
      report.subadditivity.witness_k2 = k2;
    }
  }
  report.subadditivity.passed = report.subadditivity.worst_margin >= -1e-12;

  report.rotation_invariance.worst_margin = 0.0;
  for (const Vec3& k : samples) {
    const Vec3 rk = random_rotation(gen) * k;
    const double w = omega(k);
    const double margin = -std::abs(w - omega(rk)) / std::max(1.0, std::abs(w));
    if (margin < report.rotation_invariance.worst_margin) {
      report.rotation_invariance.worst_margin = margin;
      report.rotation_invariance.witness_k1 = k;
      report.rotation_invariance.witness_k2 = rk;
    }
  }
  report.rotation_invariance.passed = report.rotation_invariance.worst_margin >= -1e-12;
  return report;
}

FormFactorReport check_form_factor(const ModelConfig& config) {
  FormFactorReport r;
  r.value_at_origin = config.form_factor(0.0);
  r.normalized = std::abs(r.value_at_origin - kFormFactorOrigin) <= 1e-12 * kFormFactorOrigin;
  const MomentumGrid grid = momentum_grid(config);
  const std::array<int, 4> powers{-2, -1, 0, 1};
  r.decay_finite = true;
  for (std::size_t i = 0; i < powers.size(); ++i) {
    r.decay_integrals[i] = grid.integrate_radial([&](double k) {
      const double f = config.form_factor(k);
      return std::pow(config.dispersion(k), powers[i]) * f * f;
    });
    r.decay_finite = r.decay_finite && std::isfinite(r.decay_integrals[i]);
  }
  return r;
}

}  // namespace pflab
