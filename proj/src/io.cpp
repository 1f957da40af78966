#include "pflab/io.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace pflab {

static_assert(std::endian::native == std::endian::little, "eigenvector dumps assume a little-endian host");

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{}", x);
}

Json number_json(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json vec_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

void write_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(fmt::format("cannot open {} for writing", path.string()));
  out << contents;
  if (!out) throw Error(fmt::format("write to {} failed", path.string()));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ------------------------------------------------------------- spectrum

namespace {

const char* status_name(ClusterStatus s) { return s == ClusterStatus::certified ? "certified" : "indeterminate"; }

Json doubles_json(const std::vector<double>& xs) {
  Json a = Json::array();
  for (double x : xs) a.push_back(number_json(x));
  return a;
}

}  // namespace

Json cluster_json(const GroundCluster& c) {
  return Json{{"status", status_name(c.status)},
              {"count", c.count},
              {"energy", number_json(c.energy)},
              {"cluster_width", number_json(c.cluster_width)},
              {"gap_above", number_json(c.gap_above)},
              {"scale", number_json(c.scale)}};
}

Json spectrum_json(const ModelConfig& config, const SpectralResult<Complex>& result, const GroundCluster& cluster,
                   std::size_t dimension) {
  return Json{{"config_hash", hash_hex(config_hash(config))},
              {"config", to_json(config)},
              {"dimension", dimension},
              {"method", to_string(result.method)},
              {"eigenvalues", doubles_json(result.eigenvalues)},
              {"residual_norms", doubles_json(result.residual_norms)},
              {"ground_cluster", cluster_json(cluster)}};
}

std::string spectrum_csv(const SpectralResult<Complex>& result) {
  std::string out = "index,eigenvalue,residual\n";
  for (std::size_t i = 0; i < result.eigenvalues.size(); ++i) {
    const double res = i < result.residual_norms.size() ? result.residual_norms[i] : NAN;
    out += fmt::format("{},{},{}\n", i, format_number(result.eigenvalues[i]), format_number(res));
  }
  return out;
}

namespace {

void put_u64(std::ofstream& out, std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); }

std::uint64_t get_u64(std::ifstream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

}  // namespace

void write_eigenvectors(const std::filesystem::path& path, const DenseOp& vectors) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(fmt::format("cannot open {} for writing", path.string()));
  put_u64(out, static_cast<std::uint64_t>(vectors.rows()));
  put_u64(out, static_cast<std::uint64_t>(vectors.cols()));
  // Column-major complex<double> storage is already (re, im) interleaved, column after column.
  out.write(reinterpret_cast<const char*>(vectors.data()),
            static_cast<std::streamsize>(vectors.size() * sizeof(Complex)));
  if (!out) throw Error(fmt::format("write to {} failed", path.string()));
}

DenseOp read_eigenvectors(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open {}", path.string()));
  const std::uint64_t rows = get_u64(in);
  const std::uint64_t cols = get_u64(in);
  if (!in) throw Error(fmt::format("{}: truncated header", path.string()));
  DenseOp v(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(Complex)));
  if (!in) throw Error(fmt::format("{}: truncated payload", path.string()));
  return v;
}

// ---------------------------------------------------------------- sweep

namespace {

std::string csv_quoted(const std::string& text) {
  std::string out = "\"";
  for (char c : text) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "px,py,pz,E,degeneracy,cluster_width,gap_above,E_c,delta,status,error\n";
  for (const SweepRow& r : rows) {
    const SweepPoint& s = r.point;
    const double ec = r.gap ? r.gap->E_c_p : NAN;
    const double delta = r.gap ? r.gap->delta_p : NAN;
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", format_number(s.p.x()), format_number(s.p.y()),
                       format_number(s.p.z()), format_number(s.energy), s.degeneracy, format_number(s.cluster_width),
                       format_number(s.gap_above), format_number(ec), format_number(delta), status_name(s.status),
                       csv_quoted(r.error));
  }
  return out;
}

Json sweep_json(const ModelConfig& config, double e, const std::vector<SweepRow>& rows) {
  Json points = Json::array();
  for (const SweepRow& r : rows) {
    const SweepPoint& s = r.point;
    Json j{{"p", vec_json(s.p)},
           {"E", number_json(s.energy)},
           {"degeneracy", s.degeneracy},
           {"status", status_name(s.status)},
           {"cluster_width", number_json(s.cluster_width)},
           {"gap_above", number_json(s.gap_above)},
           {"eigenvalues", doubles_json(s.eigenvalues)},
           {"method", to_string(s.method)}};
    if (r.gap) {
      j["E_c"] = number_json(r.gap->E_c_p);
      j["delta"] = number_json(r.gap->delta_p);
      j["argmin_k"] = vec_json(r.gap->argmin_k);
      j["grid_spacing"] = number_json(r.gap->grid_spacing);
    } else {
      j["error"] = r.error;
    }
    points.push_back(std::move(j));
  }
  return Json{{"config_hash", hash_hex(config_hash(config))}, {"e", e}, {"points", std::move(points)}};
}

std::string sweep_dat(const std::vector<SweepRow>& rows, const Vec3& direction) {
  const Vec3 d = direction.normalized();
  std::string out = "# s px py pz E delta degeneracy\n";
  for (const SweepRow& r : rows) {
    const SweepPoint& s = r.point;
    out += fmt::format("{} {} {} {} {} {} {}\n", format_number(s.p.dot(d)), format_number(s.p.x()),
                       format_number(s.p.y()), format_number(s.p.z()), format_number(s.energy),
                       format_number(r.gap ? r.gap->delta_p : NAN), s.degeneracy);
  }
  return out;
}

// --------------------------------------------------------- bounds, sectors

Json bound_report_json(const BoundReport& r) {
  Json j{{"p", vec_json(r.p)}, {"e", r.e}, {"with_spin", r.with_spin}, {"ground_cluster", cluster_json(r.cluster)}};
  j["theta"] = Json{{"value", number_json(r.theta.value)},
                    {"min_denominator", number_json(r.theta.min_denominator)},
                    {"energy_spacing", number_json(r.theta.energy_spacing)}};
  j["photon_number"] = Json{{"lhs", number_json(r.lemma_fp.lhs)},
                            {"average", number_json(r.lemma_fp.average)},
                            {"rhs", number_json(r.lemma_fp.rhs)},
                            {"ratio", number_json(r.lemma_fp.ratio)},
                            {"slack", r.lemma_fp.slack},
                            {"passed", r.lemma_fp.passed}};
  j["vacuum_overlap"] = Json{{"overlaps", doubles_json(r.overlap.overlaps)},
                             {"minimum", number_json(r.overlap.minimum)},
                             {"trace", number_json(r.overlap.trace)},
                             {"lower_bound", number_json(r.overlap.lower_bound)},
                             {"passed", r.overlap.passed}};
  j["degeneracy_bound"] = Json{{"hypothesis", r.upper.hypothesis},
                               {"bound", number_json(r.upper.bound_value)},
                               {"count", r.upper.count},
                               {"passed", r.upper.passed},
                               {"chain_consistent", r.upper.chain_consistent}};
  if (r.gram) {
    const auto& g = *r.gram;
    Json re = Json::array(), im = Json::array();
    for (int i = 0; i < 2; ++i) {
      re.push_back(Json::array({g.gram(i, 0).real(), g.gram(i, 1).real()}));
      im.push_back(Json::array({g.gram(i, 0).imag(), g.gram(i, 1).imag()}));
    }
    j["gram"] = Json{{"re", re},
                     {"im", im},
                     {"a", g.a},
                     {"defect", g.defect},
                     {"diagonal_gap", g.diagonal_gap},
                     {"off_diagonal", g.off_diagonal}};
  }
  if (r.e0)
    j["e0"] = Json{{"value", number_json(r.e0->value)},
                   {"empty", r.e0->empty},
                   {"binding", r.e0->binding},
                   {"theta_at_value", number_json(r.e0->theta_at_value)},
                   {"coupling_bound_at_value", number_json(r.e0->coupling_bound_at_value)}};
  if (r.spinless)
    j["spinless"] = Json{{"integral", number_json(r.spinless->integral)},
                         {"threshold", number_json(r.spinless->threshold)},
                         {"hypothesis", r.spinless->hypothesis},
                         {"degeneracy", r.spinless->degeneracy},
                         {"gap_above", number_json(r.spinless->gap_above)},
                         {"passed", r.spinless->passed}};
  j["coupling_bound"] = number_json(r.coupling_bound);
  j["hypotheses_hold"] = r.hypotheses_hold;
  j["conclusion_observed"] = r.conclusion_observed;
  return j;
}

Json sector_report_json(const SectorDecomposition& d, const SectorReport& r) {
  Json sectors = Json::array();
  for (const SectorGround& s : r.sectors)
    sectors.push_back(Json{{"label", s.label.str()},
                           {"twice_z", s.label.twice_z},
                           {"dimension", s.dimension},
                           {"ground_energy", number_json(s.ground_energy)}});
  Json labels = Json::array();
  for (const SectorLabel& l : r.ground_labels) labels.push_back(l.str());
  return Json{{"sectors", std::move(sectors)},
              {"minimum", number_json(r.minimum)},
              {"ground_labels", std::move(labels)},
              {"expected_pair", r.expected_pair},
              {"commutator_norm", d.commutator_norm},
              {"off_block_norm", d.off_block_norm}};
}

std::string sector_csv(const SectorReport& r) {
  std::string out = "label,twice_z,dimension,ground_energy\n";
  for (const SectorGround& s : r.sectors)
    out += fmt::format("{},{},{},{}\n", s.label.str(), s.label.twice_z, s.dimension, format_number(s.ground_energy));
  return out;
}

// ------------------------------------------------------------- manifest

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

Json manifest_json(const RunManifest& m) {
  return Json{{"config_hash", m.config_hash}, {"command", m.command},   {"tool_version", m.tool_version},
              {"started", m.started},         {"finished", m.finished}, {"outputs", m.outputs},
              {"seed", m.seed}};
}

}  // namespace pflab
