#pragma once

// Result files: CSV and JSON reports, gnuplot data blocks, binary
// eigenvector dumps and the run manifest. Numbers are written in shortest
// round-trip form, so equal results give byte-identical files.

#include <filesystem>
#include <string>
#include <vector>

#include "pflab/bounds.hpp"
#include "pflab/config.hpp"
#include "pflab/spectra.hpp"
#include "pflab/symmetry.hpp"

namespace pflab {

/// Shortest round-trip decimal; "nan", "inf", "-inf" for non-finite values.
std::string format_number(double x);

/// Non-finite values become null.
Json number_json(double x);
Json vec_json(const Vec3& v);

void write_file(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

// ------------------------------------------------------------- spectrum

Json cluster_json(const GroundCluster& cluster);
Json spectrum_json(const ModelConfig& config, const SpectralResult<Complex>& result, const GroundCluster& cluster,
                   std::size_t dimension);
/// index,eigenvalue,residual
std::string spectrum_csv(const SpectralResult<Complex>& result);

/// Little-endian: uint64 dimension, uint64 count, then count columns of
/// dimension complex entries, each as (re, im) doubles, column after column.
void write_eigenvectors(const std::filesystem::path& path, const DenseOp& vectors);
DenseOp read_eigenvectors(const std::filesystem::path& path);

// ---------------------------------------------------------------- sweep

struct SweepRow {
  SweepPoint point;
  std::optional<GapReport> gap;
  std::string error;  // why the gap could not be evaluated
};

/// px,py,pz,E,degeneracy,cluster_width,gap_above,E_c,delta,status,error
std::string sweep_csv(const std::vector<SweepRow>& rows);
Json sweep_json(const ModelConfig& config, double e, const std::vector<SweepRow>& rows);
/// Whitespace-separated columns for gnuplot: s px py pz E delta degeneracy,
/// with s the signed coordinate along `direction`.
std::string sweep_dat(const std::vector<SweepRow>& rows, const Vec3& direction);

// --------------------------------------------------------- bounds, sectors

Json bound_report_json(const BoundReport& report);
Json sector_report_json(const SectorDecomposition& decomposition, const SectorReport& report);
std::string sector_csv(const SectorReport& report);

// ------------------------------------------------------------- manifest

struct RunManifest {
  std::string config_hash;
  std::string command;
  std::string tool_version;
  std::string started;   // UTC, ISO 8601
  std::string finished;
  std::vector<std::string> outputs;
  std::uint64_t seed = kDefaultSeed;
};

std::string utc_timestamp();
Json manifest_json(const RunManifest& manifest);

}  // namespace pflab
