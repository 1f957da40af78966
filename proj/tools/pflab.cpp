// pflab: command-line front end.
//
//   pflab model-check --config C
//   pflab spectrum    --config C [--out DIR] [--n-eig N] [--seed S] [--dense] [--dump-vectors]
//   pflab sweep       --config C [--out DIR] [--p-grid "axis=z;from=0;to=0.6;steps=13"]
//   pflab bounds      --config C [--out DIR]
//   pflab sectors     --config C [--out DIR]
//
// Exit status: 0 success, 1 scientific failure, 2 usage or configuration
// error, 3 numerical failure.

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "pflab/bounds.hpp"
#include "pflab/config.hpp"
#include "pflab/io.hpp"
#include "pflab/spectra.hpp"
#include "pflab/symmetry.hpp"

namespace {

using namespace pflab;

constexpr const char* kVersion = "0.1.0";

enum Exit : int { kOk = 0, kScientific = 1, kUsage = 2, kNumerical = 3 };

struct UsageError : Error {
  using Error::Error;
};

struct Options {
  std::string config;
  std::string out;
  int n_eig = 6;
  std::uint64_t seed = kDefaultSeed;
  bool dense = false;
  bool override_massless = false;
  bool dump_vectors = false;
  std::string p_grid = "axis=z;from=0;to=0.5;steps=6";
};

class Run {
 public:
  Run(const Options& opt, std::string command) : opt_(opt) {
    manifest_.command = std::move(command);
    manifest_.tool_version = kVersion;
    manifest_.started = utc_timestamp();
    manifest_.seed = opt.seed;
    config_ = load_config(opt.config);
    manifest_.config_hash = hash_hex(config_hash(config_));
  }

  const ModelConfig& config() const { return config_; }
  const Options& options() const { return opt_; }

  SweepOptions sweep_options() const {
    SweepOptions s;
    s.solver.n_eig = opt_.n_eig;
    s.solver.seed = opt_.seed;
    if (opt_.dense) s.solver.method = SolverMethod::dense;
    return s;
  }

  /// Refuses dispersions without a positive lower bound unless overridden.
  void require_gapped_dispersion() const {
    const auto report = check_dispersion_axioms(config_.dispersion, 200, opt_.seed);
    if (report.positivity.passed) return;
    if (!opt_.override_massless)
      throw UsageError(fmt::format(
          "dispersion has no positive lower bound (min omega = {} at |k| = {}); pass --override-massless to proceed",
          report.positivity.worst_margin, report.positivity.witness_k1.norm()));
    std::fprintf(stderr, "warning: dispersion has no positive lower bound; continuing (--override-massless)\n");
  }

  void require_solvable(std::size_t dimension) const {
    if (opt_.n_eig < 1 || static_cast<std::size_t>(opt_.n_eig) >= dimension)
      throw UsageError(fmt::format("--n-eig {} must lie in [1, {}) for a basis of dimension {}; lower --n-eig or "
                                   "raise N_max/n_max",
                                   opt_.n_eig, dimension, dimension));
  }

  void emit(const std::string& name, const std::string& contents) {
    if (opt_.out.empty()) return;
    write_file(std::filesystem::path(opt_.out) / name, contents);
    manifest_.outputs.push_back(name);
  }

  void emit_json(const std::string& name, const Json& doc) { emit(name, doc.dump(2) + "\n"); }

  void emit_vectors(const std::string& name, const DenseOp& vectors) {
    if (opt_.out.empty()) return;
    write_eigenvectors(std::filesystem::path(opt_.out) / name, vectors);
    manifest_.outputs.push_back(name);
  }

  void finish() {
    if (opt_.out.empty()) return;
    manifest_.finished = utc_timestamp();
    write_file(std::filesystem::path(opt_.out) / "manifest.json", manifest_json(manifest_).dump(2) + "\n");
  }

 private:
  Options opt_;
  ModelConfig config_;
  RunManifest manifest_;
};

std::string value_or_none(double x) { return std::isfinite(x) ? fmt::format("{:.12g}", x) : std::string("none"); }

// ------------------------------------------------------------ model-check

int cmd_model_check(Run& run) {
  const ModelConfig& c = run.config();
  int status = kOk;

  const auto axioms = check_dispersion_axioms(c.dispersion, 200, run.options().seed);
  auto line = [](const char* name, const AxiomCheck& a) {
    fmt::print("{:<26} {}  worst margin {:.6g}\n", name, a.passed ? "ok  " : "FAIL", a.worst_margin);
  };
  line("positivity", axioms.positivity);
  line("subadditivity", axioms.subadditivity);
  line("rotation invariance", axioms.rotation_invariance);
  if (!axioms.positivity.passed) {
    if (run.options().override_massless)
      fmt::print("note: omega has no positive lower bound; accepted via --override-massless\n");
    else
      fmt::print("WARNING: omega has no positive lower bound, so the gap hypotheses cannot hold; "
                 "pass --override-massless to acknowledge\n");
  }
  if (!axioms.subadditivity.passed || !axioms.rotation_invariance.passed)
    fmt::print("warning: dispersion axiom violated\n");

  const auto ff = check_form_factor(c);
  fmt::print("{:<26} {}  phi(0) = {:.17g} (expected {:.17g})\n", "form factor normalisation",
             ff.normalized ? "ok  " : "FAIL", ff.value_at_origin, kFormFactorOrigin);
  fmt::print("{:<26} {}  integrals omega^-2,-1,0,1: {:.6g} {:.6g} {:.6g} {:.6g}\n", "form factor decay",
             ff.decay_finite ? "ok  " : "FAIL", ff.decay_integrals[0], ff.decay_integrals[1], ff.decay_integrals[2],
             ff.decay_integrals[3]);
  if (!ff.normalized || !ff.decay_finite) status = kScientific;

  const auto c0 = coupling_bound(c);
  fmt::print("{:<26} {}  c0({}) = {:.6g}\n", "coupling diagnostic", c0.value < 1.0 ? "ok  " : "warn", c.coupling,
             c0.value);

  run.emit_json("model_check.json",
                Json{{"config_hash", hash_hex(config_hash(c))},
                     {"positivity", axioms.positivity.passed},
                     {"subadditivity", axioms.subadditivity.passed},
                     {"rotation_invariance", axioms.rotation_invariance.passed},
                     {"positivity_margin", axioms.positivity.worst_margin},
                     {"form_factor_origin", ff.value_at_origin},
                     {"normalized", ff.normalized},
                     {"decay_integrals", ff.decay_integrals},
                     {"decay_finite", ff.decay_finite},
                     {"coupling_bound", number_json(c0.value)}});
  return status;
}

// --------------------------------------------------------------- spectrum

int cmd_spectrum(Run& run) {
  run.require_gapped_dispersion();
  const ModelConfig& c = run.config();
  const FieldModel model(c);
  const std::size_t dim = model.basis().dimension();
  run.require_solvable(dim);

  const SweepOptions so = run.sweep_options();
  const SparseOp h = model.hamiltonian(c.momentum, c.coupling);
  const auto result = solve_lowest(h, so.solver);
  const GroundCluster cluster = detect_ground_cluster(result, so.cluster);

  fmt::print("dimension {}  method {}\n", dim, to_string(result.method));
  fmt::print("E(p) = {:.15g}\n", cluster.energy);
  fmt::print("degeneracy {} ({})\n", cluster.count, cluster.certified() ? "certified" : "indeterminate");
  fmt::print("gap_above = {}\n", value_or_none(cluster.gap_above));

  run.emit("spectrum.csv", spectrum_csv(result));
  run.emit_json("spectrum.json", spectrum_json(c, result, cluster, dim));
  if (run.options().dump_vectors) run.emit_vectors("eigenvectors.bin", result.eigenvectors);
  return kOk;
}

// ------------------------------------------------------------------ sweep

struct PGrid {
  Vec3 direction = Vec3::UnitZ();
  double from = 0.0;
  double to = 0.0;
  int steps = 1;

  std::vector<Vec3> points() const {
    std::vector<Vec3> ps;
    for (int i = 0; i < steps; ++i) {
      const double s = steps == 1 ? from : ((steps - 1 - i) * from + i * to) / (steps - 1);
      ps.push_back((s * direction).array() + 0.0);  // + 0.0 turns -0 into 0
    }
    return ps;
  }
};

PGrid parse_p_grid(const std::string& spec) {
  PGrid g;
  bool have_to = false;
  std::size_t start = 0;
  while (start <= spec.size()) {
    const std::size_t end = std::min(spec.find(';', start), spec.size());
    const std::string item = spec.substr(start, end - start);
    start = end + 1;
    if (item.empty()) continue;
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos) throw UsageError(fmt::format("--p-grid: '{}' is not key=value", item));
    const std::string key = item.substr(0, eq), value = item.substr(eq + 1);
    try {
      if (key == "axis") {
        if (value == "x") g.direction = Vec3::UnitX();
        else if (value == "y") g.direction = Vec3::UnitY();
        else if (value == "z") g.direction = Vec3::UnitZ();
        else {
          std::vector<double> v;
          std::size_t s = 0;
          while (s <= value.size()) {
            const std::size_t e = std::min(value.find(',', s), value.size());
            v.push_back(std::stod(value.substr(s, e - s)));
            s = e + 1;
          }
          if (v.size() != 3) throw UsageError("--p-grid: axis must be x, y, z or three comma-separated numbers");
          g.direction = Vec3(v[0], v[1], v[2]);
          if (g.direction.norm() == 0.0) throw UsageError("--p-grid: axis must be non-zero");
          g.direction.normalize();
        }
      } else if (key == "from") {
        g.from = std::stod(value);
      } else if (key == "to") {
        g.to = std::stod(value);
        have_to = true;
      } else if (key == "steps") {
        g.steps = std::stoi(value);
        if (g.steps < 1) throw UsageError("--p-grid: steps must be at least 1");
      } else {
        throw UsageError(fmt::format("--p-grid: unknown key '{}'", key));
      }
    } catch (const std::logic_error&) {
      throw UsageError(fmt::format("--p-grid: bad value in '{}'", item));
    }
  }
  if (!have_to) g.to = g.from;
  return g;
}

int cmd_sweep(Run& run) {
  run.require_gapped_dispersion();
  const ModelConfig& c = run.config();
  const PGrid grid = parse_p_grid(run.options().p_grid);
  const FieldModel model(c);
  run.require_solvable(model.basis().dimension());

  const SweepOptions so = run.sweep_options();
  SweepCache cache;
  const std::vector<Vec3> ps = grid.points();
  const auto points = energy_sweep(model, c.coupling, ps, so, &cache);

  const KSearchGrid kgrid = KSearchGrid::from_mode_set(model.basis().mode_set());
  const EnergyTable table = EnergyTable::compute(model, c.coupling, covering_axes(ps, kgrid), so, &cache);

  std::vector<SweepRow> rows;
  for (const SweepPoint& pt : points) {
    SweepRow row{pt, std::nullopt, {}};
    try {
      row.gap = gap_estimate(c.dispersion, pt.p, table, kgrid);
    } catch (const DomainError& err) {
      row.error = err.what();
    }
    rows.push_back(std::move(row));
  }

  fmt::print("{:>10} {:>18} {:>4} {:>14} {:>14}\n", "s", "E", "deg", "gap_above", "delta");
  for (const SweepRow& r : rows)
    fmt::print("{:>10.6g} {:>18.12g} {:>4} {:>14} {:>14}{}\n", r.point.p.dot(grid.direction), r.point.energy,
               r.point.degeneracy, value_or_none(r.point.gap_above), r.gap ? value_or_none(r.gap->delta_p) : "-",
               r.error.empty() ? "" : "  (" + r.error + ")");

  bool decreasing = true;
  const SweepRow* prev = nullptr;
  for (const SweepRow& r : rows) {
    if (!r.gap) continue;
    if (prev && r.point.p.norm() > prev->point.p.norm() && r.gap->delta_p > prev->gap->delta_p) decreasing = false;
    prev = &r;
  }
  const std::string trend = decreasing ? "non-increasing" : "not monotone";
  fmt::print("delta trend in |p|: {}\n", trend);

  Json doc = sweep_json(c, c.coupling, rows);
  doc["delta_trend"] = trend;
  run.emit("sweep.csv", sweep_csv(rows));
  run.emit_json("sweep.json", doc);
  run.emit("sweep.dat", sweep_dat(rows, grid.direction));
  return kOk;
}

// ----------------------------------------------------------------- bounds

int cmd_bounds(Run& run) {
  run.require_gapped_dispersion();
  const ModelConfig& c = run.config();
  const FieldModel model(c);
  run.require_solvable(model.basis().dimension());

  BoundSuiteOptions bo;
  bo.sweep = run.sweep_options();
  SweepCache cache;
  const BoundReport r = run_bound_suite(model, bo, &cache);

  fmt::print("E(p) = {:.15g}  degeneracy {} ({})  gap_above {}\n", r.cluster.energy, r.cluster.count,
             r.cluster.certified() ? "certified" : "indeterminate", value_or_none(r.cluster.gap_above));
  fmt::print("theta(p) = {:.10g}  e^2 theta = {:.6g}\n", r.theta.value, r.e * r.e * r.theta.value);
  fmt::print("photon number: lhs {:.6g}  rhs {:.6g}  ratio {:.6g}  {}\n", r.lemma_fp.lhs, r.lemma_fp.rhs,
             r.lemma_fp.ratio, r.lemma_fp.passed ? "ok" : "FAIL");
  fmt::print("vacuum overlap: min {:.12g} >= {:.12g}  {}\n", r.overlap.minimum, r.overlap.lower_bound,
             r.overlap.passed ? "ok" : "FAIL");
  fmt::print("degeneracy bound: 2/(1 - e^2 theta) = {}  {}\n", value_or_none(r.upper.bound_value),
             r.upper.passed ? "ok" : "FAIL");
  if (r.gram)
    fmt::print("P0 Pg P0 on spin (x) vacuum: a = {:.12g}  |G - aI|_max = {:.3g}\n", r.gram->a, r.gram->defect);
  if (r.spinless)
    fmt::print("spinless: e^2 <= {} {}  degeneracy {}  gap_above {}  {}\n", value_or_none(r.spinless->threshold),
               r.spinless->hypothesis ? "holds" : "fails", r.spinless->degeneracy,
               value_or_none(r.spinless->gap_above), r.spinless->passed ? "ok" : "FAIL");
  if (r.e0)
    fmt::print("e0 = {}  (binding: {})\n", r.e0->empty ? std::string("empty") : value_or_none(r.e0->value),
               r.e0->binding);
  const int expected = c.with_spin ? 2 : 1;
  fmt::print("summary: hypotheses |e| < e0 and Delta(p) > 0 {}; Tr P_g = {} {}\n",
             r.hypotheses_hold ? "hold" : "do not hold", expected,
             r.conclusion_observed ? "observed" : "not observed");

  run.emit_json("bounds.json", bound_report_json(r));

  bool failed = !r.lemma_fp.passed || !r.overlap.passed || !r.upper.passed;
  if (r.spinless && !r.spinless->passed) failed = true;
  if (r.hypotheses_hold && !r.conclusion_observed) failed = true;
  return failed ? kScientific : kOk;
}

// ---------------------------------------------------------------- sectors

int cmd_sectors(Run& run) {
  run.require_gapped_dispersion();
  const ModelConfig& c = run.config();
  const FieldModel model(c);
  if (!model.basis().mode_set().axial())
    throw UsageError("sectors: refused. Exact angular momentum sectors exist only for axial mode sets (all k-points "
                     "on one axis), where the orbital part vanishes; this configuration is not axial");
  run.require_solvable(model.basis().dimension());

  const SweepOptions so = run.sweep_options();
  const SparseOp h = model.hamiltonian(c.momentum, c.coupling);
  const SectorDecomposition d = sector_decompose(h, model.basis());
  const SectorReport r = ground_sector_labels(d, so.cluster.eps_deg, so.solver);

  fmt::print("{:>8} {:>10} {:>20}\n", "z", "dimension", "ground energy");
  for (const SectorGround& s : r.sectors)
    fmt::print("{:>8} {:>10} {:>20.14g}\n", s.label.str(), s.dimension, s.ground_energy);
  std::string labels;
  for (const SectorLabel& l : r.ground_labels) labels += (labels.empty() ? "" : ", ") + l.str();
  fmt::print("ground sectors: {{{}}}\n", labels);
  fmt::print("max |[H, J]| = {:.3g}\n", d.commutator_norm);

  // Gate on the hypotheses at this coupling: gap above the ground cluster,
  // e^2 < 1/(3 theta) and c0(e) < 1.
  bool gated = false;
  if (c.with_spin) {
    SolverOptions so2 = so.solver;
    so2.n_eig = std::min<int>(so2.n_eig, static_cast<int>(h.rows()) - 1);
    const GroundCluster cluster = detect_ground_cluster(solve_lowest(h, so2), so.cluster);
    const RadialEnergy profile = theta_energy_profile(model, c.coupling, c.momentum, 0.1, so);
    const double th = theta(c, c.momentum, profile).value;
    gated = cluster.certified() && cluster.gap_above > 0.0 && 3.0 * c.coupling * c.coupling * th < 1.0 &&
            coupling_bound(c).value < 1.0;
    fmt::print("hypotheses at this coupling {}; labels {{-1/2, +1/2}} {}\n", gated ? "hold" : "do not hold",
               r.expected_pair ? "observed" : "not observed");
  }

  Json doc = sector_report_json(d, r);
  doc["config_hash"] = hash_hex(config_hash(c));
  doc["hypotheses_hold"] = gated;
  run.emit("sectors.csv", sector_csv(r));
  run.emit_json("sectors.json", doc);
  return gated && !r.expected_pair ? kScientific : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fibered Pauli-Fierz Hamiltonian on a truncated photon Fock space"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Options opt;
  auto add_common = [&](CLI::App* sub, bool solves) {
    sub->add_option("--config", opt.config, "configuration file (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output directory");
    sub->add_option("--seed", opt.seed, "solver seed");
    sub->add_flag("--override-massless", opt.override_massless, "accept dispersions without a positive lower bound");
    if (solves) {
      sub->add_option("--n-eig", opt.n_eig, "number of lowest eigenvalues");
      sub->add_flag("--dense", opt.dense, "force the dense solver");
    }
  };

  auto* model_check = app.add_subcommand("model-check", "dispersion, form factor and coupling diagnostics");
  add_common(model_check, false);
  auto* spectrum = app.add_subcommand("spectrum", "lowest eigenvalues and the ground cluster at the config's p");
  add_common(spectrum, true);
  spectrum->add_flag("--dump-vectors", opt.dump_vectors, "write eigenvectors.bin");
  auto* sweep = app.add_subcommand("sweep", "E(p), degeneracy and Delta(p) along a line of momenta");
  add_common(sweep, true);
  sweep->add_option("--p-grid", opt.p_grid, "axis=x|y|z|a,b,c;from=F;to=T;steps=N")->capture_default_str();
  auto* bounds = app.add_subcommand("bounds", "photon-number, vacuum-overlap, degeneracy and e0 checks");
  add_common(bounds, true);
  auto* sectors = app.add_subcommand("sectors", "angular momentum sectors about the axis (axial mode sets)");
  add_common(sectors, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kOk : kUsage;
  }

  std::string command;
  for (int i = 0; i < argc; ++i) command += (i ? " " : "") + std::string(argv[i]);

  try {
    Run run(opt, command);
    int status = kOk;
    if (model_check->parsed()) status = cmd_model_check(run);
    else if (spectrum->parsed()) status = cmd_spectrum(run);
    else if (sweep->parsed()) status = cmd_sweep(run);
    else if (bounds->parsed()) status = cmd_bounds(run);
    else if (sectors->parsed()) status = cmd_sectors(run);
    run.finish();
    return status;
  } catch (const ConfigError& err) {
    fmt::print(stderr, "config error: {}\n", err.what());
    return kUsage;
  } catch (const UsageError& err) {
    fmt::print(stderr, "error: {}\n", err.what());
    return kUsage;
  } catch (const DomainError& err) {
    fmt::print(stderr, "error: {}\n", err.what());
    return kUsage;
  } catch (const NumericalError& err) {
    fmt::print(stderr, "numerical failure: {}\n", err.what());
    return kNumerical;
  } catch (const std::exception& err) {
    fmt::print(stderr, "error: {}\n", err.what());
    return kNumerical;
  }
}
