#include <doctest.h>

#include <json.hpp>

#include "cli_runner.hpp"

using nlohmann::json;

namespace {

json load_json(const cli::fs::path& path) { return json::parse(cli::slurp(path)); }

std::string with_config(const std::string& command, const std::string& name, const std::string& extra = "") {
  return command + " --config '" + cli::config(name).string() + "' " + extra;
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(cli::run("").status == 2);
  CHECK(cli::run("spectrum").status == 2);
  CHECK(cli::run("spectrum --config /nonexistent.json").status == 2);
  CHECK(cli::run(with_config("spectrum", "single_mode", "--n-eig 20")).status == 2);
  CHECK(cli::run(with_config("spectrum", "single_mode", "--n-eig 0")).status == 2);
  CHECK(cli::run(with_config("sweep", "desk_axial", "--p-grid 'axis=z;from=0;to=1;steps=0'")).status == 2);
  CHECK(cli::run(with_config("sweep", "desk_axial", "--p-grid 'axis=q;from=0;to=1;steps=3'")).status == 2);

  const cli::fs::path dir = cli::scratch("bad_config");
  std::ofstream(dir / "bad.json") << R"({"dispersion": {"kind": "massive"}, "form_factor": {"kind": "gaussian"},
    "mode_set": {"kind": "axial"}, "colour": 1})";
  const cli::Result r = cli::run("spectrum --config '" + (dir / "bad.json").string() + "'");
  CHECK(r.status == 2);
  CHECK(r.contains("config.colour: unknown field"));
}

TEST_CASE("model-check") {
  const cli::Result ok = cli::run(with_config("model-check", "desk_axial"));
  CHECK(ok.status == 0);
  CHECK(ok.contains("positivity"));
  CHECK(ok.contains("coupling diagnostic"));

  const cli::Result scaled = cli::run(with_config("model-check", "scaled_form_factor"));
  CHECK(scaled.status == 1);
  CHECK(scaled.contains("form factor normalisation  FAIL"));

  const cli::Result massless = cli::run(with_config("model-check", "massless"));
  CHECK(massless.status == 0);
  CHECK(massless.contains("WARNING"));
}

TEST_CASE("massless dispersions need the override") {
  const cli::Result refused = cli::run(with_config("spectrum", "massless"));
  CHECK(refused.status == 2);
  CHECK(refused.contains("--override-massless"));
  CHECK(cli::run(with_config("spectrum", "massless", "--override-massless")).status == 0);
}

TEST_CASE("free spectrum") {
  const cli::fs::path out = cli::scratch("free");
  const cli::Result r = cli::run(with_config("spectrum", "free", "--out '" + out.string() + "'"));
  REQUIRE(r.status == 0);
  CHECK(r.contains("degeneracy 2 (certified)"));
  const json j = load_json(out / "spectrum.json");
  const auto& p = j["config"]["p"];
  const double expected = 0.5 * (p[0].get<double>() * p[0].get<double>() + p[1].get<double>() * p[1].get<double>() +
                                 p[2].get<double>() * p[2].get<double>());
  CHECK(std::abs(j["eigenvalues"][0].get<double>() - expected) < 1e-12);
  CHECK(j["ground_cluster"]["count"] == 2);
  CHECK(cli::fs::exists(out / "spectrum.csv"));
  const json manifest = load_json(out / "manifest.json");
  CHECK(manifest["command"].get<std::string>().find(" spectrum --config ") != std::string::npos);
  CHECK(manifest["config_hash"] == j["config_hash"]);
}

TEST_CASE("desk spectrum matches the golden file") {
  const cli::fs::path out = cli::scratch("golden");
  for (const char* solver : {"--dense", ""}) {
    CAPTURE(solver);
    const cli::Result r =
        cli::run(with_config("spectrum", "desk_axial", std::string("--n-eig 6 ") + solver + " --out '" + out.string() + "'"));
    REQUIRE(r.status == 0);
    const cli::Csv got = cli::read_csv(out / "spectrum.csv");
    const cli::Csv want = cli::read_csv(cli::kSourceDir / "tests" / "golden" / "desk_axial_spectrum.csv");
    CHECK(got.header == want.header);
    REQUIRE(got.rows.size() == want.rows.size());
    for (std::size_t i = 0; i < want.rows.size(); ++i) {
      CHECK(std::abs(got.number(i, "eigenvalue") - want.number(i, "eigenvalue")) < 1e-10);
      CHECK(got.number(i, "residual") < 1e-10);
    }
  }
}

TEST_CASE("eigenvector dump") {
  const cli::fs::path out = cli::scratch("vectors");
  REQUIRE(cli::run(with_config("spectrum", "desk_axial", "--n-eig 4 --dump-vectors --out '" + out.string() + "'"))
              .status == 0);
  const std::string raw = cli::slurp(out / "eigenvectors.bin");
  std::uint64_t rows = 0, cols = 0;
  REQUIRE(raw.size() >= 16);
  std::memcpy(&rows, raw.data(), 8);
  std::memcpy(&cols, raw.data() + 8, 8);
  CHECK(rows == 182);
  CHECK(cols == 4);
  CHECK(raw.size() == 16 + rows * cols * 16);
}

TEST_CASE("sweep") {
  const cli::fs::path free = cli::scratch("sweep_free");
  REQUIRE(cli::run(with_config("sweep", "free", "--p-grid 'axis=z;from=0;to=0.4;steps=5' --out '" + free.string() + "'"))
              .status == 0);
  const cli::Csv csv = cli::read_csv(free / "sweep.csv");
  REQUIRE(csv.rows.size() == 5);
  CHECK(csv.number(0, "pz") == 0.0);
  CHECK(csv.number(4, "pz") == 0.4);
  CHECK(std::abs(csv.number(0, "delta") - 1.0) < 1e-12);
  for (std::size_t i = 0; i < 5; ++i) {
    const double pz = csv.number(i, "pz");
    CHECK(std::abs(csv.number(i, "E") - 0.5 * pz * pz) < 1e-12);
    CHECK(csv.number(i, "degeneracy") == 2);
    CHECK(csv.number(i, "delta") > 0.0);
  }
  CHECK(cli::fs::exists(free / "sweep.dat"));

  const cli::fs::path coupled = cli::scratch("sweep_coupled");
  const cli::Result r = cli::run(with_config("sweep", "desk_axial", "--out '" + coupled.string() + "'"));
  REQUIRE(r.status == 0);
  CHECK(r.contains("delta trend in |p|"));
  const json j = load_json(coupled / "sweep.json");
  CHECK(j["points"].size() == 6);
  CHECK(j.contains("delta_trend"));
  for (const json& p : j["points"]) CHECK(p["degeneracy"] == 2);
}

TEST_CASE("bounds") {
  const cli::fs::path out = cli::scratch("bounds");
  const cli::Result r = cli::run(with_config("bounds", "desk_axial", "--out '" + out.string() + "'"));
  CHECK(r.status == 0);
  CHECK(r.contains("Tr P_g = 2 observed"));
  const json j = load_json(out / "bounds.json");
  CHECK(j["photon_number"]["passed"] == true);

  const cli::Result spinless = cli::run(with_config("bounds", "desk_axial_spinless"));
  CHECK(spinless.status == 0);
  CHECK(spinless.contains("Tr P_g = 1 observed"));
}

TEST_CASE("sectors") {
  const cli::fs::path out = cli::scratch("sectors");
  const cli::Result r = cli::run(with_config("sectors", "desk_axial", "--out '" + out.string() + "'"));
  CHECK(r.status == 0);
  const cli::Csv csv = cli::read_csv(out / "sectors.csv");
  CHECK(!csv.rows.empty());
  const json j = load_json(out / "sectors.json");
  CHECK(j.dump().find("-1/2") != std::string::npos);

  const cli::Result refused = cli::run(with_config("sectors", "desk_cubic"));
  CHECK(refused.status == 2);
  CHECK(refused.contains("axial"));
  CHECK(cli::run(with_config("sectors", "single_mode")).status == 0);
}

TEST_CASE("result files are byte-identical across runs") {
  for (const char* command : {"spectrum --dump-vectors", "sweep", "bounds", "sectors"}) {
    CAPTURE(command);
    const cli::fs::path a = cli::scratch("repeat_a");
    const cli::fs::path b = cli::scratch("repeat_b");
    REQUIRE(cli::run(with_config(command, "desk_axial", "--seed 7 --out '" + a.string() + "'")).status == 0);
    REQUIRE(cli::run(with_config(command, "desk_axial", "--seed 7 --out '" + b.string() + "'")).status == 0);
    const auto fa = cli::result_files(a);
    CHECK(!fa.empty());
    CHECK(fa == cli::result_files(b));
  }
}
