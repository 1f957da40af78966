#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <string>

#include "pflab/io.hpp"

using namespace pflab;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = fs::path(PFLAB_SOURCE_DIR) / "configs";

Json desk_doc() {
  return Json::parse(R"({
    "dispersion": {"kind": "massive", "m_ph": 1.0},
    "form_factor": {"kind": "gaussian", "lambda": 1.0},
    "e": 0.1,
    "p": [0, 0, 0.2],
    "mode_set": {"kind": "axial", "axis": [0, 0, 1], "radial_nodes": 3, "k_max": 3.0, "symmetric": true},
    "N_max": 2,
    "n_max": 2
  })");
}

std::string config_error(const Json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "pflab_test_config_io";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("parse the desk configuration") {
  const ModelConfig c = parse_config(desk_doc());
  CHECK(c.coupling == 0.1);
  CHECK(c.momentum == Vec3(0, 0, 0.2));
  CHECK(c.with_spin);
  CHECK(c.total_max == 2);
  CHECK(c.per_mode_max == 2);
  CHECK(c.dispersion.kind() == DispersionKind::massive);
  CHECK(std::holds_alternative<AxialModeSpec>(c.mode_spec));
  CHECK(c.basis().dimension() == 182);

  const ModelConfig file = load_config(kConfigs / "desk_axial.json");
  CHECK(canonical_form(file) == canonical_form(c));
}

TEST_CASE("every shipped configuration loads") {
  std::size_t n = 0;
  for (const auto& entry : fs::directory_iterator(kConfigs)) {
    if (entry.path().extension() != ".json") continue;
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(load_config(entry.path()));
    ++n;
  }
  CHECK(n >= 5);
}

TEST_CASE("errors name the offending field") {
  Json doc = desk_doc();
  doc["mode_set"]["radial_nodes"] = "three";
  CHECK(config_error(doc) == "config.mode_set.radial_nodes: expected an integer");

  doc = desk_doc();
  doc["colour"] = 1;
  CHECK(config_error(doc) == "config.colour: unknown field");

  doc = desk_doc();
  doc["form_factor"]["width"] = 1;
  CHECK(config_error(doc) == "config.form_factor.width: unknown field");

  doc = desk_doc();
  doc.erase("dispersion");
  CHECK(config_error(doc) == "config.dispersion: missing field");

  doc = desk_doc();
  doc["p"] = Json::array({0, 1});
  CHECK(config_error(doc) == "config.p: expected [x, y, z]");

  doc = desk_doc();
  doc["dispersion"]["kind"] = "tachyonic";
  CHECK(config_error(doc).starts_with("config.dispersion.kind: unknown kind"));

  doc = desk_doc();
  doc["n_max"] = 0;
  CHECK(config_error(doc).starts_with("config.n_max"));

  doc = desk_doc();
  doc["with_spin"] = 1;
  CHECK(config_error(doc) == "config.with_spin: expected true or false");

  CHECK_THROWS_AS(load_config(kConfigs / "does_not_exist.json"), ConfigError);
  const fs::path broken = scratch("broken.json");
  write_file(broken, "{\"e\": ");
  CHECK_THROWS_AS(load_config(broken), ConfigError);
}

TEST_CASE("serialisation round trip and hashing") {
  for (const auto& entry : fs::directory_iterator(kConfigs)) {
    CAPTURE(entry.path().string());
    const ModelConfig c = load_config(entry.path());
    const ModelConfig back = parse_config(to_json(c));
    CHECK(canonical_form(back) == canonical_form(c));
    CHECK(config_hash(back) == config_hash(c));
  }

  // Key order and whitespace do not change the hash; values do.
  const ModelConfig a = parse_config(desk_doc());
  const ModelConfig b = parse_config(Json::parse(desk_doc().dump(4)));
  CHECK(config_hash(a) == config_hash(b));
  Json other = desk_doc();
  other["e"] = 0.10000000000000002;
  CHECK(config_hash(parse_config(other)) != config_hash(a));

  const std::string canon = canonical_form(a);
  CHECK(canon.find(' ') == std::string::npos);
  CHECK(canon.find("\"e\":0.1,") != std::string::npos);
  CHECK(Json::parse(canon) == to_json(a));

  // Published FNV-1a test vectors.
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a("foobar") == 0x85944171f73967e8ULL);
  CHECK(hash_hex(0xabcULL) == "0000000000000abc");
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.3333333333333333");
  CHECK(format_number(1e-300) == "1e-300");
  CHECK(format_number(NAN) == "nan");
  CHECK(format_number(INFINITY) == "inf");
  CHECK(format_number(-INFINITY) == "-inf");
  for (double x : {0.1, 2.0 / 3.0, 1.2345678901234567e-5, 12345.678}) CHECK(std::stod(format_number(x)) == x);
  CHECK(number_json(NAN).is_null());
  CHECK(number_json(0.5) == Json(0.5));
}

TEST_CASE("spectrum csv and json") {
  SpectralResult<Complex> r;
  r.eigenvalues = {0.25, 0.25, 1.5};
  r.residual_norms = {1e-14, 2e-14};
  r.eigenvectors = DenseOp::Identity(4, 3);
  const std::string csv = spectrum_csv(r);
  CHECK(csv == "index,eigenvalue,residual\n0,0.25,1e-14\n1,0.25,2e-14\n2,1.5,nan\n");

  const ModelConfig c = parse_config(desk_doc());
  const GroundCluster g = detect_ground_cluster(r);
  const Json j = spectrum_json(c, r, g, 4);
  CHECK(j["dimension"] == 4);
  CHECK(j["config_hash"] == hash_hex(config_hash(c)));
  CHECK(j["eigenvalues"].size() == 3);
  CHECK(j["ground_cluster"]["count"] == 2);
  CHECK(parse_config(j["config"]).coupling == 0.1);
}

TEST_CASE("eigenvector dump round trip") {
  DenseOp v(5, 2);
  for (Eigen::Index i = 0; i < v.rows(); ++i)
    for (Eigen::Index k = 0; k < v.cols(); ++k) v(i, k) = Complex(0.1 * i + k, -1.0 / (1.0 + i + k));
  const fs::path path = scratch("vectors.bin");
  write_eigenvectors(path, v);
  CHECK(fs::file_size(path) == 16 + 5 * 2 * 16);
  CHECK(read_eigenvectors(path) == v);

  // Header and the first entry as raw little-endian words.
  const std::string raw = read_file(path);
  std::uint64_t rows = 0, cols = 0;
  double re = 1, im = 1;
  std::memcpy(&rows, raw.data(), 8);
  std::memcpy(&cols, raw.data() + 8, 8);
  std::memcpy(&re, raw.data() + 16, 8);
  std::memcpy(&im, raw.data() + 24, 8);
  CHECK(rows == 5);
  CHECK(cols == 2);
  CHECK(re == 0.0);
  CHECK(im == -1.0);

  write_file(path, raw.substr(0, 40));
  CHECK_THROWS_AS(read_eigenvectors(path), Error);
}

TEST_CASE("manifest") {
  RunManifest m;
  m.config_hash = "0123456789abcdef";
  m.command = "spectrum";
  m.tool_version = "test";
  m.started = utc_timestamp();
  m.finished = m.started;
  m.outputs = {"spectrum.csv"};
  const Json j = manifest_json(m);
  CHECK(j["config_hash"] == m.config_hash);
  CHECK(j["outputs"][0] == "spectrum.csv");
  CHECK(j["seed"] == kDefaultSeed);
  const std::string t = m.started;
  REQUIRE(t.size() == 20);
  CHECK(t[4] == '-');
  CHECK(t[10] == 'T');
  CHECK(t.back() == 'Z');
}
