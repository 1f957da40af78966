#include "pflab/spectra.hpp"

#include <limits>

#include "pflab/config.hpp"

namespace pflab {

const char* to_string(SolverMethod method) {
  switch (method) {
    case SolverMethod::automatic: return "auto";
    case SolverMethod::dense: return "dense";
    case SolverMethod::lanczos: return "lanczos";
  }
  return "?";
}

GroundCluster detect_ground_cluster(const SpectralResult<Complex>& result, const ClusterTolerances& tol) {
  const auto& ev = result.eigenvalues;
  if (ev.empty()) throw DomainError("detect_ground_cluster: no eigenvalues");
  GroundCluster c;
  c.energy = ev.front();
  c.scale = std::max(1.0, std::abs(c.energy));
  std::size_t count = 1;
  while (count < ev.size() && ev[count] - ev.front() <= tol.eps_deg * c.scale) ++count;
  c.count = static_cast<int>(count);
  c.cluster_width = ev[count - 1] - ev.front();
  if (count < ev.size()) {
    c.gap_above = ev[count] - ev[count - 1];
    c.status = c.gap_above > tol.eps_sep * c.scale ? ClusterStatus::certified : ClusterStatus::indeterminate;
  } else {
    c.gap_above = std::numeric_limits<double>::quiet_NaN();
    c.status = ClusterStatus::indeterminate;
  }
  if (result.eigenvectors.cols() >= static_cast<Eigen::Index>(count))
    c.vectors = result.eigenvectors.leftCols(static_cast<Eigen::Index>(count));
  return c;
}

// ------------------------------------------------------------------ sweeps

std::optional<SweepPoint> SweepCache::find(std::uint64_t config_hash, const Vec3& p) const {
  std::lock_guard lock(mutex_);
  const auto it = entries_.find({config_hash, p.x(), p.y(), p.z()});
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void SweepCache::store(std::uint64_t config_hash, const SweepPoint& point) {
  std::lock_guard lock(mutex_);
  entries_.emplace(Key{config_hash, point.p.x(), point.p.y(), point.p.z()}, point);
}

std::size_t SweepCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

namespace {

std::uint64_t sweep_key(const FieldModel& model, double e, const SweepOptions& options) {
  ModelConfig c = model.config();
  c.coupling = e;
  c.momentum = Vec3::Zero();
  const SolverOptions& s = options.solver;
  const std::string extra =
      fmt::format("|{}|{}|{}|{}|{}|{}|{}|{}|{}", s.n_eig, s.tol, s.seed, static_cast<int>(s.method), s.dense_threshold,
                  s.krylov_dim, s.max_restarts, options.cluster.eps_deg, options.cluster.eps_sep);
  return fnv1a(canonical_form(c) + extra);
}

}  // namespace

SweepPoint solve_point(const FieldModel& model, double e, const Vec3& p, const SweepOptions& options) {
  const SparseOp h = model.hamiltonian(p, e);
  SolverOptions solver = options.solver;
  solver.n_eig = std::min<int>(solver.n_eig, static_cast<int>(h.rows()) - 1);
  const SpectralResult<Complex> r = solve_lowest(h, solver);
  const GroundCluster c = detect_ground_cluster(r, options.cluster);
  SweepPoint pt;
  pt.p = p;
  pt.energy = c.energy;
  pt.status = c.status;
  pt.degeneracy = c.certified() ? c.count : 0;
  pt.cluster_width = c.cluster_width;
  pt.gap_above = c.gap_above;
  pt.eigenvalues = r.eigenvalues;
  pt.method = r.method;
  return pt;
}

std::vector<SweepPoint> energy_sweep(const FieldModel& model, double e, std::span<const Vec3> ps,
                                     const SweepOptions& options, SweepCache* cache) {
  const std::uint64_t key = cache ? sweep_key(model, e, options) : 0;
  std::vector<SweepPoint> out;
  out.reserve(ps.size());
  SweepOptions energy_only = options;
  energy_only.solver.vectors = false;
  for (const Vec3& p : ps) {
    if (cache)
      if (auto hit = cache->find(key, p)) {
        out.push_back(*hit);
        continue;
      }
    try {
      out.push_back(solve_point(model, e, p, energy_only));
    } catch (const NumericalError& err) {
      throw NumericalError(fmt::format("p = ({}, {}, {}): {}", p.x(), p.y(), p.z(), err.what()));
    } catch (const DomainError& err) {
      throw DomainError(fmt::format("p = ({}, {}, {}): {}", p.x(), p.y(), p.z(), err.what()));
    }
    if (cache) cache->store(key, out.back());
  }
  return out;
}

// ---------------------------------------------------------------- E tables

namespace {

void check_axis(const std::vector<double>& axis, int index) {
  if (axis.empty()) throw DomainError(fmt::format("energy table: axis {} is empty", index));
  for (std::size_t i = 0; i < axis.size(); ++i) {
    if (!std::isfinite(axis[i])) throw DomainError(fmt::format("energy table: axis {} has a non-finite entry", index));
    if (i > 0 && !(axis[i] > axis[i - 1]))
      throw DomainError(fmt::format("energy table: axis {} is not strictly increasing", index));
  }
}

// Cell index and weight of x on the axis; nullopt outside.
std::optional<std::pair<std::size_t, double>> locate(const std::vector<double>& axis, double x) {
  constexpr double slack = 1e-12;
  if (axis.size() == 1) {
    if (std::abs(x - axis[0]) <= slack * std::max(1.0, std::abs(x))) return std::pair<std::size_t, double>{0, 0.0};
    return std::nullopt;
  }
  const double lo = axis.front(), hi = axis.back();
  const double tol = slack * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
  if (x < lo - tol || x > hi + tol) return std::nullopt;
  x = std::clamp(x, lo, hi);
  std::size_t i = static_cast<std::size_t>(std::upper_bound(axis.begin(), axis.end(), x) - axis.begin());
  i = std::clamp<std::size_t>(i, 1, axis.size() - 1) - 1;
  return std::pair<std::size_t, double>{i, (x - axis[i]) / (axis[i + 1] - axis[i])};
}

}  // namespace

EnergyTable::EnergyTable(std::array<std::vector<double>, 3> axes, std::vector<double> values)
    : axes_(std::move(axes)), values_(std::move(values)) {
  for (int a = 0; a < 3; ++a) check_axis(axes_[a], a);
  if (values_.size() != axes_[0].size() * axes_[1].size() * axes_[2].size())
    throw DomainError("energy table: value count does not match the grid");
}

EnergyTable EnergyTable::compute(const FieldModel& model, double e, std::array<std::vector<double>, 3> axes,
                                 const SweepOptions& options, SweepCache* cache) {
  for (int a = 0; a < 3; ++a) check_axis(axes[a], a);
  std::vector<Vec3> ps;
  ps.reserve(axes[0].size() * axes[1].size() * axes[2].size());
  for (double x : axes[0])
    for (double y : axes[1])
      for (double z : axes[2]) ps.emplace_back(x, y, z);
  const std::vector<SweepPoint> pts = energy_sweep(model, e, ps, options, cache);
  std::vector<double> values;
  values.reserve(pts.size());
  for (const SweepPoint& pt : pts) values.push_back(pt.energy);
  return EnergyTable(std::move(axes), std::move(values));
}

double EnergyTable::at(std::size_t i, std::size_t j, std::size_t k) const {
  return values_[(i * axes_[1].size() + j) * axes_[2].size() + k];
}

bool EnergyTable::contains(const Vec3& q) const {
  for (int a = 0; a < 3; ++a)
    if (!locate(axes_[a], q[a])) return false;
  return true;
}

double EnergyTable::operator()(const Vec3& q) const {
  std::array<std::pair<std::size_t, double>, 3> cell;
  for (int a = 0; a < 3; ++a) {
    const auto c = locate(axes_[a], q[a]);
    if (!c)
      throw DomainError(fmt::format("energy table: ({}, {}, {}) lies outside the interpolation domain", q.x(), q.y(),
                                    q.z()));
    cell[a] = *c;
  }
  double sum = 0.0;
  for (int dx = 0; dx < 2; ++dx)
    for (int dy = 0; dy < 2; ++dy)
      for (int dz = 0; dz < 2; ++dz) {
        const double w = (dx ? cell[0].second : 1.0 - cell[0].second) * (dy ? cell[1].second : 1.0 - cell[1].second) *
                         (dz ? cell[2].second : 1.0 - cell[2].second);
        if (w == 0.0) continue;
        sum += w * at(cell[0].first + dx, cell[1].first + dy, cell[2].first + dz);
      }
  return sum;
}

double EnergyTable::spacing() const {
  double h = 0.0;
  for (const auto& axis : axes_)
    for (std::size_t i = 1; i < axis.size(); ++i) h = std::max(h, axis[i] - axis[i - 1]);
  return h;
}

// ------------------------------------------------------------------- gap

namespace {

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v)
    if (out.empty() || x - out.back() > 1e-12 * std::max(1.0, std::abs(x))) out.push_back(x);
  return out;
}

}  // namespace

KSearchGrid KSearchGrid::from_mode_set(const ModeSet& modes) {
  KSearchGrid g;
  for (int a = 0; a < 3; ++a) {
    std::vector<double> coords{0.0};
    for (std::size_t i = 0; i < modes.k_point_count(); ++i) coords.push_back(modes.k_point(i)[a]);
    g.axes[a] = sorted_unique(std::move(coords));
  }
  return g;
}

std::array<std::vector<double>, 3> covering_axes(std::span<const Vec3> ps, const KSearchGrid& grid) {
  std::array<std::vector<double>, 3> axes;
  for (int a = 0; a < 3; ++a) {
    std::vector<double> coords;
    for (const Vec3& p : ps)
      for (double k : grid.axes[a]) coords.push_back(p[a] - k);
    axes[a] = sorted_unique(std::move(coords));
  }
  return axes;
}

GapReport gap_estimate(const Dispersion& dispersion, const Vec3& p, const EnergyTable& energy,
                       const KSearchGrid& grid) {
  GapReport r;
  r.E_p = energy(p);
  r.grid_spacing = energy.spacing();

  double best = INFINITY;
  std::array<std::size_t, 3> best_index{};
  for (std::size_t i = 0; i < grid.axes[0].size(); ++i)
    for (std::size_t j = 0; j < grid.axes[1].size(); ++j)
      for (std::size_t l = 0; l < grid.axes[2].size(); ++l) {
        const Vec3 k(grid.axes[0][i], grid.axes[1][j], grid.axes[2][l]);
        const double value = energy(Vec3(p - k)) + dispersion(k);
        if (value < best) {
          best = value;
          best_index = {i, j, l};
          r.argmin_k = k;
        }
      }

  // Refinement: subdivide the neighbouring cells of the minimiser.
  constexpr int kSubdivisions = 8;
  std::array<std::vector<double>, 3> local;
  for (int a = 0; a < 3; ++a) {
    const auto& axis = grid.axes[a];
    const std::size_t i = best_index[a];
    const double lo = axis[i > 0 ? i - 1 : i];
    const double hi = axis[i + 1 < axis.size() ? i + 1 : i];
    local[a].push_back(axis[i]);
    for (int s = 1; s < kSubdivisions; ++s) {
      if (lo < axis[i]) local[a].push_back(axis[i] + (lo - axis[i]) * s / kSubdivisions);
      if (hi > axis[i]) local[a].push_back(axis[i] + (hi - axis[i]) * s / kSubdivisions);
    }
  }
  for (double x : local[0])
    for (double y : local[1])
      for (double z : local[2]) {
        const Vec3 k(x, y, z);
        const Vec3 q = p - k;
        if (!energy.contains(q)) continue;
        const double value = energy(q) + dispersion(k);
        if (value < best) {
          best = value;
          r.argmin_k = k;
        }
      }

  r.E_c_p = best;
  r.delta_p = r.E_c_p - r.E_p;
  return r;
}

// ------------------------------------------------------------ radial E

RadialEnergy::RadialEnergy(std::vector<double> radii, std::vector<double> values)
    : radii_(std::move(radii)), values_(std::move(values)) {
  if (radii_.size() < 2 || radii_.size() != values_.size())
    throw DomainError("radial energy: need at least two samples with matching values");
  if (radii_.front() != 0.0) throw DomainError("radial energy: samples must start at |q| = 0");
  for (std::size_t i = 1; i < radii_.size(); ++i)
    if (!(radii_[i] > radii_[i - 1])) throw DomainError("radial energy: radii must increase strictly");
}

RadialEnergy RadialEnergy::compute(const FieldModel& model, double e, const Vec3& direction, double radius,
                                   double spacing, const SweepOptions& options, SweepCache* cache) {
  if (!(direction.norm() > 0.0)) throw DomainError("radial energy: direction must be nonzero");
  if (!(radius > 0.0) || !(spacing > 0.0)) throw DomainError("radial energy: radius and spacing must be positive");
  const Vec3 u = direction.normalized();
  const auto intervals = static_cast<std::size_t>(std::ceil(radius / spacing));
  std::vector<double> radii(intervals + 1);
  std::vector<Vec3> ps(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i) {
    radii[i] = radius * static_cast<double>(i) / static_cast<double>(intervals);
    ps[i] = radii[i] * u;
  }
  const std::vector<SweepPoint> pts = energy_sweep(model, e, ps, options, cache);
  std::vector<double> values;
  for (const SweepPoint& pt : pts) values.push_back(pt.energy);
  return RadialEnergy(std::move(radii), std::move(values));
}

double RadialEnergy::spacing() const {
  double h = 0.0;
  for (std::size_t i = 1; i < radii_.size(); ++i) h = std::max(h, radii_[i] - radii_[i - 1]);
  return h;
}

double RadialEnergy::operator()(double q) const {
  if (!(q >= 0.0) || q > radii_.back() * (1.0 + 1e-12))
    throw DomainError(fmt::format("radial energy: |q| = {} lies outside [0, {}]", q, radii_.back()));
  q = std::min(q, radii_.back());
  std::size_t i = static_cast<std::size_t>(std::upper_bound(radii_.begin(), radii_.end(), q) - radii_.begin());
  i = std::clamp<std::size_t>(i, 1, radii_.size() - 1) - 1;
  const double t = (q - radii_[i]) / (radii_[i + 1] - radii_[i]);
  return values_[i] + t * (values_[i + 1] - values_[i]);
}

}  // namespace pflab
