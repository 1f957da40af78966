#include "pflab/config.hpp"

#include <fstream>
#include <set>

#include <fmt/format.h>

namespace pflab {

namespace {

class Reader {
 public:
  Reader(const Json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail("expected an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [key, value] : node_.items())
      if (!allowed.count(key)) throw ConfigError(fmt::format("{}: unknown field", child(key)));
  }

  bool has(const char* key) const { return node_.contains(key); }

  const Json& at(const char* key) const {
    if (!node_.contains(key)) throw ConfigError(fmt::format("{}: missing field", child(key)));
    return node_.at(key);
  }

  double number(const char* key, double fallback) const {
    return has(key) ? as_number(at(key), child(key)) : fallback;
  }
  double number(const char* key) const { return as_number(at(key), child(key)); }

  int integer(const char* key, int fallback) const {
    if (!has(key)) return fallback;
    const Json& v = at(key);
    if (!v.is_number_integer()) throw ConfigError(fmt::format("{}: expected an integer", child(key)));
    return v.get<int>();
  }

  std::size_t size(const char* key, std::size_t fallback) const {
    if (!has(key)) return fallback;
    const Json& v = at(key);
    if (!v.is_number_unsigned()) throw ConfigError(fmt::format("{}: expected a non-negative integer", child(key)));
    return v.get<std::size_t>();
  }

  bool boolean(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    const Json& v = at(key);
    if (!v.is_boolean()) throw ConfigError(fmt::format("{}: expected true or false", child(key)));
    return v.get<bool>();
  }

  std::string string(const char* key) const {
    const Json& v = at(key);
    if (!v.is_string()) throw ConfigError(fmt::format("{}: expected a string", child(key)));
    return v.get<std::string>();
  }

  Vec3 vector(const char* key) const { return as_vector(at(key), child(key)); }

  Reader section(const char* key) const { return Reader(at(key), child(key)); }
  std::string child(const std::string& key) const { return path_ + "." + key; }

  static double as_number(const Json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(fmt::format("{}: expected a number", path));
    return v.get<double>();
  }

  static Vec3 as_vector(const Json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 3) throw ConfigError(fmt::format("{}: expected [x, y, z]", path));
    Vec3 out;
    for (int i = 0; i < 3; ++i) out[i] = as_number(v[i], fmt::format("{}[{}]", path, i));
    return out;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(fmt::format("{}: {}", path_, what));
  }

 private:
  const Json& node_;
  std::string path_;
};

Dispersion parse_dispersion(const Reader& r) {
  const std::string kind = r.string("kind");
  if (kind == "massive") {
    r.allow({"kind", "m_ph"});
    return Dispersion::massive(r.number("m_ph", 1.0));
  }
  if (kind == "massless") {
    r.allow({"kind"});
    return Dispersion::massless();
  }
  if (kind == "custom") {
    r.allow({"kind", "table"});
    const Json& t = r.at("table");
    const std::string path = r.child("table");
    if (!t.is_array()) throw ConfigError(fmt::format("{}: expected an array of [k, omega]", path));
    std::vector<std::pair<double, double>> table;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const std::string item = fmt::format("{}[{}]", path, i);
      if (!t[i].is_array() || t[i].size() != 2) throw ConfigError(fmt::format("{}: expected [k, omega]", item));
      table.emplace_back(Reader::as_number(t[i][0], item + "[0]"), Reader::as_number(t[i][1], item + "[1]"));
    }
    return Dispersion::custom(std::move(table));
  }
  throw ConfigError(fmt::format("{}: unknown kind '{}'", r.child("kind"), kind));
}

FormFactor parse_form_factor(const Reader& r) {
  r.allow({"kind", "lambda", "scale"});
  const std::string kind = r.string("kind");
  const double lambda = r.number("lambda", 1.0);
  const double scale = r.number("scale", 1.0);
  if (kind == "gaussian") return FormFactor::gaussian(lambda, scale);
  if (kind == "sharp") return FormFactor::sharp(lambda, scale);
  throw ConfigError(fmt::format("{}: unknown kind '{}'", r.child("kind"), kind));
}

ModeSetSpec parse_mode_set(const Reader& r) {
  const std::string kind = r.string("kind");
  if (kind == "axial") {
    r.allow({"kind", "axis", "radial_nodes", "k_max", "symmetric"});
    AxialModeSpec s;
    if (r.has("axis")) s.axis = r.vector("axis");
    s.radial_nodes = r.integer("radial_nodes", s.radial_nodes);
    s.k_max = r.number("k_max", s.k_max);
    s.symmetric = r.boolean("symmetric", s.symmetric);
    return s;
  }
  if (kind == "cubic") {
    r.allow({"kind", "points_per_axis", "spacing"});
    CubicModeSpec s;
    s.points_per_axis = r.integer("points_per_axis", s.points_per_axis);
    s.spacing = r.number("spacing", s.spacing);
    return s;
  }
  if (kind == "explicit") {
    r.allow({"kind", "k_points", "weights", "axis"});
    ExplicitModeSpec s;
    const Json& ks = r.at("k_points");
    const Json& ws = r.at("weights");
    if (!ks.is_array()) throw ConfigError(fmt::format("{}: expected an array", r.child("k_points")));
    if (!ws.is_array()) throw ConfigError(fmt::format("{}: expected an array", r.child("weights")));
    for (std::size_t i = 0; i < ks.size(); ++i)
      s.k_points.push_back(Reader::as_vector(ks[i], fmt::format("{}[{}]", r.child("k_points"), i)));
    for (std::size_t i = 0; i < ws.size(); ++i)
      s.weights.push_back(Reader::as_number(ws[i], fmt::format("{}[{}]", r.child("weights"), i)));
    if (r.has("axis")) s.axis = r.vector("axis");
    return s;
  }
  throw ConfigError(fmt::format("{}: unknown kind '{}'", r.child("kind"), kind));
}

Json vec_json(const Vec3& v) { return Json::array({v[0], v[1], v[2]}); }

}  // namespace

ModelConfig parse_config(const Json& doc) {
  const Reader r(doc, "config");
  r.allow({"dispersion", "form_factor", "e", "p", "with_spin", "mode_set", "N_max", "n_max",
           "dimension_cap", "quadrature"});
  ModelConfig c;
  c.dispersion = parse_dispersion(r.section("dispersion"));
  c.form_factor = parse_form_factor(r.section("form_factor"));
  c.coupling = r.number("e", 0.0);
  if (!std::isfinite(c.coupling)) throw ConfigError("config.e: must be finite");
  if (r.has("p")) c.momentum = r.vector("p");
  c.with_spin = r.boolean("with_spin", true);
  c.mode_spec = parse_mode_set(r.section("mode_set"));
  c.total_max = r.integer("N_max", c.total_max);
  c.per_mode_max = r.integer("n_max", c.per_mode_max);
  if (c.total_max < 0) throw ConfigError("config.N_max: must be >= 0");
  if (c.per_mode_max < 1 || c.per_mode_max > 254) throw ConfigError("config.n_max: must lie in [1, 254]");
  c.dimension_cap = r.size("dimension_cap", c.dimension_cap);
  if (r.has("quadrature")) {
    const Reader q = r.section("quadrature");
    q.allow({"radius", "radial_panels", "radial_order", "angular_nodes"});
    c.quadrature.radius = q.number("radius", c.quadrature.radius);
    c.quadrature.radial_panels = q.integer("radial_panels", c.quadrature.radial_panels);
    c.quadrature.radial_order = q.integer("radial_order", c.quadrature.radial_order);
    c.quadrature.angular_nodes = q.integer("angular_nodes", c.quadrature.angular_nodes);
    if (c.quadrature.radial_panels < 1 || c.quadrature.radial_order < 1 || c.quadrature.angular_nodes < 1)
      throw ConfigError("config.quadrature: node counts must be >= 1");
  }
  return c;
}

ModelConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return parse_config(doc);
}

Json to_json(const ModelConfig& c) {
  Json j;
  switch (c.dispersion.kind()) {
    case DispersionKind::massive:
      j["dispersion"] = {{"kind", "massive"}, {"m_ph", c.dispersion.photon_mass()}};
      break;
    case DispersionKind::massless:
      j["dispersion"] = {{"kind", "massless"}};
      break;
    case DispersionKind::custom: {
      Json t = Json::array();
      for (const auto& [k, w] : c.dispersion.table()) t.push_back({k, w});
      j["dispersion"] = {{"kind", "custom"}, {"table", t}};
      break;
    }
  }
  j["form_factor"] = {{"kind", c.form_factor.kind() == FormFactorKind::gaussian ? "gaussian" : "sharp"},
                      {"lambda", c.form_factor.lambda()},
                      {"scale", c.form_factor.scale()}};
  j["e"] = c.coupling;
  j["p"] = vec_json(c.momentum);
  j["with_spin"] = c.with_spin;
  j["mode_set"] = std::visit(
      [](const auto& s) -> Json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, AxialModeSpec>) {
          return {{"kind", "axial"}, {"axis", vec_json(s.axis)}, {"radial_nodes", s.radial_nodes},
                  {"k_max", s.k_max}, {"symmetric", s.symmetric}};
        } else if constexpr (std::is_same_v<T, CubicModeSpec>) {
          return {{"kind", "cubic"}, {"points_per_axis", s.points_per_axis}, {"spacing", s.spacing}};
        } else {
          Json ks = Json::array();
          for (const Vec3& k : s.k_points) ks.push_back(vec_json(k));
          Json out = {{"kind", "explicit"}, {"k_points", ks}, {"weights", s.weights}};
          if (s.axis) out["axis"] = vec_json(*s.axis);
          return out;
        }
      },
      c.mode_spec);
  j["N_max"] = c.total_max;
  j["n_max"] = c.per_mode_max;
  j["dimension_cap"] = c.dimension_cap;
  j["quadrature"] = {{"radius", c.quadrature.radius},
                     {"radial_panels", c.quadrature.radial_panels},
                     {"radial_order", c.quadrature.radial_order},
                     {"angular_nodes", c.quadrature.angular_nodes}};
  return j;
}

std::string canonical_form(const ModelConfig& config) { return to_json(config).dump(); }

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t config_hash(const ModelConfig& config) { return fnv1a(canonical_form(config)); }

std::string hash_hex(std::uint64_t hash) { return fmt::format("{:016x}", hash); }

}  // namespace pflab
