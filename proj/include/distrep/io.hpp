#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "distrep/types.hpp"

namespace distrep {

inline constexpr const char* kToolVersion = "0.1.0";

// Provenance block embedded in every analysis output (JSON results carry it
// inline; CSV outputs get a <file>.manifest.json sidecar). Identical
// manifests imply bit-identical numeric outputs.
struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::vector<std::pair<std::string, std::string>> input_digests;  // path -> fnv1a-64 hex
  std::optional<std::uint64_t> seed;
  std::string tool_version = kToolVersion;
};

// FNV-1a 64 digest of a file's bytes, as 16 hex characters.
std::string file_digest_hex(const std::string& path);

// Compact single-line JSON rendering of the manifest.
std::string manifest_json(const RunManifest& manifest);

// Writes the manifest next to a CSV artifact as <path>.manifest.json.
void write_manifest_sidecar(const std::string& path, const RunManifest& manifest);

// ---- CSV artifacts (numbers serialized with %.17g, round-trip exact) ----

// Layout: header "p,<id1>,<id2>,..."; one row per probability grid point.
void write_quantile_csv(const std::string& path, std::span<const QuantileFunction> qs);
std::vector<QuantileFunction> read_quantile_csv(const std::string& path);

// Layout: header "glucose,<id1>,..."; one row per support grid point.
void write_density_csv(const std::string& path, std::span<const Glucodensity> ds);
std::vector<Glucodensity> read_density_csv(const std::string& path);

// Ingest-compatible CGM CSV with ISO-8601 timestamps.
void write_cgm_csv(const std::string& path, std::span<const CgmSeries> series);

// Layout: "subject_id,label" with 1-based labels.
void write_labels_csv(const std::string& path, std::span<const std::string> ids,
                      std::span<const std::size_t> labels);

// Square matrix CSV: header "id,<id1>,..."; row id then distances.
void write_distance_csv(const std::string& path, const DistanceMatrix& dm);

// Compact binary layout: magic "DSTM", little-endian uint64 count, then the
// strict lower triangle as little-endian doubles (row i = 1.., columns < i).
void write_distance_binary(const std::string& path, const DistanceMatrix& dm);
DistanceMatrix read_distance_binary(const std::string& path);

// Layout: "subject_id,cell_1,...,cell_D".
void write_composition_csv(const std::string& path, std::span<const Composition> comps);

// Generic per-subject numeric matrix: "subject_id,<col1>,...".
void write_feature_csv(const std::string& path, std::span<const std::string> columns,
                       std::span<const std::string> ids,
                       std::span<const std::vector<double>> rows);

// ---- Generic subject table (responses, covariates, group labels) ----

// CSV with header "subject_id,<col>,..."; cells kept as strings so callers
// can hold mixed text/numeric columns.
struct Table {
  std::vector<std::string> columns;  // excludes the leading subject_id
  std::vector<std::string> ids;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> column_index(const std::string& name) const;
  // Throws when the column is missing or a cell fails to parse.
  std::vector<double> numeric_column(const std::string& name) const;
  std::vector<std::string> string_column(const std::string& name) const;
};

Table read_table_csv(const std::string& path);

// %.17g rendering shared by all writers.
std::string format_double(double v);

}  // namespace distrep
