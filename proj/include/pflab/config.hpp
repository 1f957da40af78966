#pragma once

// JSON form of ModelConfig.
//
//   {
//     "dispersion":  {"kind": "massive", "m_ph": 1.0}        | {"kind": "massless"}
//                  | {"kind": "custom", "table": [[k, omega], ...]},
//     "form_factor": {"kind": "gaussian" | "sharp", "lambda": 1.0, "scale": 1.0},
//     "e": 0.1,
//     "p": [0, 0, 0.2],
//     "with_spin": true,
//     "mode_set":    {"kind": "axial", "axis": [0,0,1], "radial_nodes": 3, "k_max": 3.0,
//                     "symmetric": true}
//                  | {"kind": "cubic", "points_per_axis": 2, "spacing": 1.0}
//                  | {"kind": "explicit", "k_points": [[x,y,z], ...], "weights": [...],
//                     "axis": [x,y,z]},
//     "N_max": 2,
//     "n_max": 2,
//     "dimension_cap": 500000,
//     "quadrature":  {"radius": 0, "radial_panels": 64, "radial_order": 8, "angular_nodes": 48}
//   }
//
// Fields other than dispersion, form_factor and mode_set take the defaults of
// ModelConfig when absent; within a section, absent fields take the section
// defaults. Unknown fields are rejected.

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "pflab/model.hpp"

namespace pflab {

using Json = nlohmann::json;

/// Throws ConfigError naming the offending field path.
ModelConfig parse_config(const Json& doc);
ModelConfig load_config(const std::filesystem::path& path);

/// Every field written explicitly, so that equal configurations serialise
/// identically.
Json to_json(const ModelConfig& config);

/// Sorted keys, shortest round-trip numbers, no whitespace.
std::string canonical_form(const ModelConfig& config);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);
std::uint64_t config_hash(const ModelConfig& config);
std::string hash_hex(std::uint64_t hash);

}  // namespace pflab
