// distrep: glucodensity analysis of CGM time series.
//
// Subcommands chain ingest -> representation -> analysis. Results go to
// standard output as single-line JSON; bulk vectors and matrices go to CSV
// files with a .manifest.json sidecar. Exit codes: 0 success, 1 data error,
// 2 usage error; errors are single-line JSON on standard error.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "distrep/baseline.hpp"
#include "distrep/clustering.hpp"
#include "distrep/densities.hpp"
#include "distrep/errors.hpp"
#include "distrep/inference.hpp"
#include "distrep/ingest.hpp"
#include "distrep/io.hpp"
#include "distrep/regression.hpp"
#include "distrep/report.hpp"
#include "distrep/simulate.hpp"
#include "distrep/types.hpp"
#include "distrep/wasserstein.hpp"

namespace {

using nlohmann::json;
using namespace distrep;

// Post-parse validation failures that are the caller's fault.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int resolve_threads(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("DISTREP_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return 1;
}

Instant minutes_to_seconds(double minutes, const char* what) {
  if (!(minutes > 0.0)) throw UsageError(std::string(what) + " must be positive");
  return static_cast<Instant>(std::llround(minutes * 60.0));
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string single_line(std::string text) {
  std::replace(text.begin(), text.end(), '\n', ' ');
  return text;
}

json manifest_block(const RunManifest& manifest) { return json::parse(manifest_json(manifest)); }

// Prints the result JSON to stdout and mirrors it to `path` when nonempty.
void emit(const json& result, const std::string& path = "") {
  const std::string line = result.dump();
  std::cout << line << "\n";
  if (!path.empty()) {
    std::ofstream out(path);
    if (!out) raise(Errc::io_failure, "cannot open output file: " + path);
    out << line << "\n";
    if (!out) raise(Errc::io_failure, "write failed: " + path);
  }
}

// ---- Shared ingest plumbing ----

struct IngestFlags {
  std::string input;
  std::string timestamp_format;
  double interval_minutes = 5.0;
  double max_gap_minutes = 120.0;
  double range_lo = 40.0;
  double range_hi = 400.0;
};

void add_ingest_flags(CLI::App* cmd, IngestFlags& f) {
  cmd->add_option("--input", f.input, "CGM CSV (subject_id,timestamp,glucose)")->required();
  cmd->add_option("--timestamp-format", f.timestamp_format,
                  "strptime-style timestamp layout; default ISO-8601");
  cmd->add_option("--interval-minutes", f.interval_minutes,
                  "nominal spacing between readings [5]");
  cmd->add_option("--max-gap-minutes", f.max_gap_minutes,
                  "per-day total gap budget before the day is discarded [120]");
  cmd->add_option("--range-lo", f.range_lo, "lowest plausible reading [40]");
  cmd->add_option("--range-hi", f.range_hi, "highest plausible reading [400]");
}

void append_ingest_parameters(RunManifest& m, const IngestFlags& f) {
  if (!f.timestamp_format.empty()) m.parameters.emplace_back("timestamp_format", f.timestamp_format);
  m.parameters.emplace_back("interval_minutes", format_double(f.interval_minutes));
  m.parameters.emplace_back("max_gap_minutes", format_double(f.max_gap_minutes));
  m.parameters.emplace_back("range_lo", format_double(f.range_lo));
  m.parameters.emplace_back("range_hi", format_double(f.range_hi));
}

struct CohortLoad {
  std::vector<CgmSeries> series;
  std::vector<std::string> discarded_subjects;
  std::size_t subjects_parsed = 0;
  std::size_t records_parsed = 0;
  std::size_t records_kept = 0;
  std::vector<RejectedRow> rejected;
};

CohortLoad load_cohort(const IngestFlags& f) {
  CsvFormatSpec fmt;
  fmt.timestamp_format = f.timestamp_format;
  fmt.nominal_interval = minutes_to_seconds(f.interval_minutes, "--interval-minutes");
  CleanOptions clean;
  clean.max_daily_gap = minutes_to_seconds(f.max_gap_minutes, "--max-gap-minutes");
  clean.range_lo = f.range_lo;
  clean.range_hi = f.range_hi;

  ParseResult parsed = parse_cgm_csv_file(f.input, fmt);
  CohortLoad out;
  out.subjects_parsed = parsed.series.size();
  out.rejected = std::move(parsed.rejected);
  for (CgmSeries& s : parsed.series) {
    out.records_parsed += s.records.size();
    try {
      CgmSeries cleaned = clean_series(s, clean);
      out.records_kept += cleaned.records.size();
      out.series.push_back(std::move(cleaned));
    } catch (const Error& e) {
      if (e.code() != Errc::all_data_discarded) throw;
      out.discarded_subjects.push_back(s.subject_id);
    }
  }
  if (out.series.empty())
    raise(Errc::all_data_discarded, "no subject survived cleaning: " + f.input);
  return out;
}

std::vector<QuantileFunction> cohort_quantiles(std::span<const CgmSeries> series, std::size_t m) {
  const std::vector<double> probs = default_prob_grid(m);
  std::vector<QuantileFunction> qs;
  qs.reserve(series.size());
  for (const CgmSeries& s : series)
    qs.push_back(empirical_quantile(glucose_values(s), probs, s.subject_id));
  return qs;
}

std::vector<std::string> quantile_ids(std::span<const QuantileFunction> qs) {
  std::vector<std::string> ids;
  ids.reserve(qs.size());
  for (const QuantileFunction& q : qs) ids.push_back(q.subject_id);
  return ids;
}

// Table rows reordered to follow `ids`; every id must have a row.
std::vector<std::size_t> match_rows(const Table& table, std::span<const std::string> ids) {
  std::unordered_map<std::string, std::size_t> row_of;
  for (std::size_t r = 0; r < table.ids.size(); ++r) row_of.emplace(table.ids[r], r);
  std::vector<std::size_t> rows;
  rows.reserve(ids.size());
  for (const std::string& id : ids) {
    const auto it = row_of.find(id);
    if (it == row_of.end()) raise(Errc::dimension_mismatch, "no table row for subject " + id);
    rows.push_back(it->second);
  }
  return rows;
}

std::vector<double> aligned_numeric(const Table& table, const std::string& column,
                                    std::span<const std::size_t> rows) {
  const std::vector<double> raw = table.numeric_column(column);
  std::vector<double> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(raw[r]);
  return out;
}

// Distinct group names in sorted order; labels index into that order.
struct GroupEncoding {
  std::vector<std::size_t> labels;
  std::vector<std::string> names;
};

GroupEncoding encode_groups(std::span<const std::string> values) {
  GroupEncoding enc;
  enc.names.assign(values.begin(), values.end());
  std::sort(enc.names.begin(), enc.names.end());
  enc.names.erase(std::unique(enc.names.begin(), enc.names.end()), enc.names.end());
  enc.labels.reserve(values.size());
  for (const std::string& v : values) {
    const auto it = std::lower_bound(enc.names.begin(), enc.names.end(), v);
    enc.labels.push_back(static_cast<std::size_t>(it - enc.names.begin()));
  }
  return enc;
}

std::vector<std::string> read_id_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::io_failure, "cannot open id list: " + path);
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
      line.pop_back();
    std::size_t start = 0;
    while (start < line.size() && (line[start] == ' ' || line[start] == '\t')) ++start;
    if (start > 0) line.erase(0, start);
    if (!line.empty()) ids.push_back(line);
  }
  return ids;
}

json test_result_json(const TestResult& result) {
  json j;
  j["statistic"] = result.statistic;
  j["p_value"] = result.p_value;
  j["resamples"] = result.resamples;
  j["seed"] = result.seed;
  json comp = json::object();
  for (const auto& [key, value] : result.components) comp[key] = value;
  j["components"] = comp;
  return j;
}

// ---- Subcommand options ----

struct IngestCmd {
  IngestFlags in;
  std::string out;
  std::string rejects_out;
};

struct DensityCmd {
  IngestFlags in;
  std::string kernel = "gaussian";
  std::string selector = "rot";
  double bandwidth = 0.0;
  double grid_lo = 40.0;
  double grid_hi = 400.0;
  std::size_t grid_points = 721;
  std::string out;
};

struct QuantileCmd {
  IngestFlags in;
  std::string density_input;
  std::size_t grid_points = 500;
  std::string out;
};

struct DistmatCmd {
  std::string quantiles;
  std::string out;
  std::string binary_out;
  int threads = 0;
};

struct FrechetMeanCmd {
  std::string quantiles;
  std::string out;
};

struct RegressScalarCmd {
  std::string quantiles;
  std::string table;
  std::string response;
  double bandwidth = 0.0;
  int threads = 0;
  std::string out;
};

struct RegressDensityCmd {
  std::string quantiles;
  std::string table;
  std::string covariates;
  std::string predict_table;
  double floor = 40.0;
  int threads = 0;
  std::string out;
  std::string summary_out;
};

struct AnovaCmd {
  std::string quantiles;
  std::string table;
  std::string groups = "group";
  std::size_t reps = 1000;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out;
};

struct EnergyCmd {
  std::string quantiles;
  std::string table;
  std::string groups = "group";
  std::size_t reps = 999;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out;
};

struct ClusterCmd {
  std::string quantiles;
  std::size_t k = 2;
  std::string heuristic = "hartigan";
  std::size_t restarts = 20;
  std::size_t max_iter = 100;
  bool squared = false;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string labels_out;
  std::string out;
};

struct TirCmd {
  IngestFlags in;
  std::string cutoffs = "ada";
  std::string normo_ids;
  double zero_repair = 1e-6;
  std::string out;
  std::string ilr_out;
};

struct SimulateCmd {
  std::size_t subjects = 100;
  std::size_t days = 4;
  double interval_minutes = 5.0;
  std::string mix;
  double noise_sd = 2.0;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out_dir;
};

struct ReportCmd {
  IngestFlags in;
  std::string biomarkers;
  std::string biomarker_cols = "a1c_like,variability_like,homa_like";
  std::string normo_col = "archetype";
  std::string normo_value = "normo";
  std::string normo_ids;
  std::size_t grid_points = 500;
  std::size_t neighbors = 10;
  int threads = 0;
  std::string out;
  std::string table_out;
};

// ---- Subcommand bodies ----

void run_ingest(const IngestCmd& cmd) {
  RunManifest manifest;
  manifest.command = "ingest";
  append_ingest_parameters(manifest, cmd.in);
  manifest.input_digests.emplace_back(cmd.in.input, file_digest_hex(cmd.in.input));

  const CohortLoad load = load_cohort(cmd.in);
  if (!cmd.out.empty()) {
    write_cgm_csv(cmd.out, load.series);
    write_manifest_sidecar(cmd.out, manifest);
  }
  if (!cmd.rejects_out.empty()) {
    std::ofstream rej(cmd.rejects_out);
    if (!rej) raise(Errc::io_failure, "cannot open output file: " + cmd.rejects_out);
    rej << "line,reason\n";
    for (const RejectedRow& r : load.rejected) rej << r.line_number << ",\"" << r.reason << "\"\n";
  }

  json j;
  j["command"] = "ingest";
  j["subjects_parsed"] = load.subjects_parsed;
  j["subjects_kept"] = load.series.size();
  j["records_parsed"] = load.records_parsed;
  j["records_kept"] = load.records_kept;
  j["rejected_rows"] = load.rejected.size();
  j["discarded_subjects"] = load.discarded_subjects;
  if (!cmd.out.empty()) j["out"] = cmd.out;
  j["manifest"] = manifest_block(manifest);
  emit(j);
}

void run_density(const DensityCmd& cmd) {
  DensityOptions opt;
  if (cmd.kernel == "gaussian")
    opt.kernel = KernelKind::gaussian;
  else if (cmd.kernel == "epanechnikov")
    opt.kernel = KernelKind::epanechnikov;
  else
    throw UsageError("--kernel must be gaussian or epanechnikov");
  if (cmd.selector == "rot")
    opt.selector = BandwidthSelector::rule_of_thumb;
  else if (cmd.selector == "lscv")
    opt.selector = BandwidthSelector::least_squares_cv;
  else
    throw UsageError("--selector must be rot or lscv");
  if (cmd.bandwidth > 0.0) opt.bandwidth = cmd.bandwidth;
  if (cmd.grid_points < 2) throw UsageError("--grid-points must be at least 2");
  if (!(cmd.grid_hi > cmd.grid_lo)) throw UsageError("--grid-hi must exceed --grid-lo");

  RunManifest manifest;
  manifest.command = "density";
  append_ingest_parameters(manifest, cmd.in);
  manifest.parameters.emplace_back("kernel", cmd.kernel);
  manifest.parameters.emplace_back("selector", cmd.selector);
  if (cmd.bandwidth > 0.0) manifest.parameters.emplace_back("bandwidth", format_double(cmd.bandwidth));
  manifest.parameters.emplace_back("grid_lo", format_double(cmd.grid_lo));
  manifest.parameters.emplace_back("grid_hi", format_double(cmd.grid_hi));
  manifest.parameters.emplace_back("grid_points", std::to_string(cmd.grid_points));
  manifest.input_digests.emplace_back(cmd.in.input, file_digest_hex(cmd.in.input));

  const CohortLoad load = load_cohort(cmd.in);
  std::vector<double> grid(cmd.grid_points);
  const double step = (cmd.grid_hi - cmd.grid_lo) / static_cast<double>(cmd.grid_points - 1);
  for (std::size_t i = 0; i < cmd.grid_points; ++i)
    grid[i] = cmd.grid_lo + step * static_cast<double>(i);

  std::vector<Glucodensity> densities;
  densities.reserve(load.series.size());
  json bandwidths = json::object();
  for (const CgmSeries& s : load.series) {
    densities.push_back(estimate_glucodensity(s, grid, opt));
    bandwidths[s.subject_id] = densities.back().bandwidth;
  }
  write_density_csv(cmd.out, densities);
  write_manifest_sidecar(cmd.out, manifest);

  json j;
  j["command"] = "density";
  j["subjects"] = densities.size();
  j["grid_points"] = cmd.grid_points;
  j["bandwidths"] = bandwidths;
  j["discarded_subjects"] = load.discarded_subjects;
  j["out"] = cmd.out;
  j["manifest"] = manifest_block(manifest);
  emit(j);
}

void run_quantile(const QuantileCmd& cmd) {
  const bool from_density = !cmd.density_input.empty();
  if (from_density && !cmd.in.input.empty())
    throw UsageError("give either --input or --density-input, not both");
  if (!from_density && cmd.in.input.empty())
    throw UsageError("one of --input or --density-input is required");
  if (cmd.grid_points < 1) throw UsageError("--grid-points must be at least 1");

  RunManifest manifest;
  manifest.command = "quantile";
  manifest.parameters.emplace_back("grid_points", std::to_string(cmd.grid_points));

  std::vector<QuantileFunction> qs;
  std::vector<std::string> discarded;
  if (from_density) {
    manifest.input_digests.emplace_back(cmd.density_input, file_digest_hex(cmd.density_input));
    const std::vector<Glucodensity> densities = read_density_csv(cmd.density_input);
    const std::vector<double> probs = default_prob_grid(cmd.grid_points);
    qs.reserve(densities.size());
    for (const Glucodensity& d : densities) qs.push_back(density_to_quantile(d, probs));
  } else {
    append_ingest_parameters(manifest, cmd.in);
    manifest.input_digests.emplace_back(cmd.in.input, file_digest_hex(cmd.in.input));
    const CohortLoad load = load_cohort(cmd.in);
    discarded = load.discarded_subjects;
    qs = cohort_quantiles(load.series, cmd.grid_points);
  }
  write_quantile_csv(cmd.out, qs);
  write_manifest_sidecar(cmd.out, manifest);

  json j;
  j["command"] = "quantile";
  j["subjects"] = qs.size();
  j["grid_points"] = cmd.grid_points;
  j["discarded_subjects"] = discarded;
  j["out"] = cmd.out;
  j["manifest"] = manifest_block(manifest);
  emit(j);
}

void run_distmat(const DistmatCmd& cmd) {
  if (cmd.out.empty() && cmd.binary_out.empty())
    throw UsageError("at least one of --out or --binary-out is required");
  RunManifest manifest;
  manifest.command = "distmat";
  manifest.input_digests.emplace_back(cmd.quantiles, file_digest_hex(cmd.quantiles));

  const std::vector<QuantileFunction> qs = read_quantile_csv(cmd.quantiles);
  const DistanceMatrix dm = distance_matrix(qs, resolve_threads(cmd.threads));
  if (!cmd.out.empty()) {
    write_distance_csv(cmd.out, dm);
    write_manifest_sidecar(cmd.out, manifest);
  }
  if (!cmd.binary_out.empty()) {
    write_distance_binary(cmd.binary_out, dm);
    write_manifest_sidecar(cmd.binary_out, manifest);
  }

  json j;
  j["command"] = "distmat";
  j["subjects"] = dm.size();
  if (!cmd.out.empty()) j["out"] = cmd.out;
  if (!cmd.binary_out.empty()) j["binary_out"] = cmd.binary_out;
  j["manifest"] = manifest_block(manifest);
  emit(j);
}

void run_frechet_mean(const FrechetMeanCmd& cmd) {
  RunManifest manifest;
  manifest.command = "frechet-mean";
  manifest.input_digests.emplace_back(cmd.quantiles, file_digest_hex(cmd.quantiles));

  const std::vector<QuantileFunction> qs = read_quantile_csv(cmd.quantiles);
  QuantileFunction mean = frechet_mean(qs);
  const double variance = frechet_variance(qs, mean);
  mean.subject_id = "frechet_mean";
  const std::vector<QuantileFunction> one{mean};
  write_quantile_csv(cmd.out, one);
  write_manifest_sidecar(cmd.out, manifest);

  json j;
  j["command"] = "frechet-mean";
  j["subjects"] = qs.size();
  j["frechet_variance"] = variance;
  j["out"] = cmd.out;
  j["manifest"] = manifest_block(manifest);
  emit(j);
}

void run_regress_scalar(const RegressScalarCmd& cmd) {
  RunManifest manifest;
  manifest.command = "regress-scalar";
  manifest.parameters.emplace_back("response", cmd.response);
  if (cmd.bandwidth > 0.0) manifest.parameters.emplace_back("bandwidth", format_double(cmd.bandwidth));
  manifest.input_digests.emplace_back(cmd.quantiles, file_digest_hex(cmd.quantiles));
  manifest.input_digests.emplace_back(cmd.table, file_digest_hex(cmd.table));

  const std::vector<QuantileFunction> qs = read_quantile_csv(cmd.quantiles);
  const std::vector<std::string> ids = quantile_ids(qs);
  const Table table = read_table_csv(cmd.table);
  const std::vector<std::size_t> rows = match_rows(table, ids);
  const std::vector<double> y = aligned_numeric(table, cmd.response, rows);

  const DistanceMatrix dm = distance_matrix(qs, resolve_threads(cmd.threads));
  double bandwidth = cmd.bandwidth;
  std::string source = "fixed";
  if (!(bandwidth > 0.0)) {
    bandwidth = nw_cv_bandwidth(dm, y, default_bandwidth_grid(dm));
    source = "cv";
  }

  const std::size_t n = qs.size();
  json predictions = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    const std::optional<double> pred =
        nw_predict_from_distances(dm.row(i), y, bandwidth, i);
    if (!pred)
      raise(Errc::all_weights_vanish,
            "every kernel weight vanished for held-out subject " + ids[i] +
                "; increase --bandwidth");
    json p;
    p["subject_id"] = ids[i];
    p["observed"] = y[i];
    p["loo_prediction"] = *pred;
    predictions.push_back(std::move(p));
  }
  const double r2 = loocv_r2(dm, y, bandwidth);

  json j;
  j["command"] = "regress-scalar";
  j["n"] = n;
  j["response"] = cmd.response;
  j["bandwidth"] = bandwidth;
  j["bandwidth_source"] = source;
  j["loo_r2"] = r2;
  j["predictions"] = predictions;
  j["manifest"] = manifest_block(manifest);
  emit(j, cmd.out);
}

void run_regress_density(const RegressDensityCmd& cmd) {
  const std::vector<std::string> cov_cols = split_commas(cmd.covariates);
  if (cov_cols.empty() || cov_cols.front().empty())
    throw UsageError("--covariates needs a comma-separated column list");

  RunManifest manifest;
  manifest.command = "regress-density";
  manifest.parameters.emplace_back("covariates", cmd.covariates);
  manifest.parameters.emplace_back("floor", format_double(cmd.floor));
  manifest.input_digests.emplace_back(cmd.quantiles, file_digest_hex(cmd.quantiles));
  manifest.input_digests.emplace_back(cmd.table, file_digest_hex(cmd.table));
  if (!cmd.predict_table.empty())
    manifest.input_digests.emplace_back(cmd.predict_table, file_digest_hex(cmd.predict_table));

  std::vector<QuantileFunction> qs = read_quantile_csv(cmd.quantiles);
  const std::vector<std::string> ids = quantile_ids(qs);
  const Table table = read_table_csv(cmd.table);
  const std::vector<std::size_t> rows = match_rows(table, ids);

  const std::size_t n = qs.size();
  const std::size_t d = cov_cols.size();
  Mat covariates(n, d);
  for (std::size_t c = 0; c < d; ++c) {
    const std::vector<double> col = aligned_numeric(table, cov_cols[c], rows);
    for (std::size_t i = 0; i < n; ++i) covariates(i, c) = col[i];
  }
  const FrechetRegressionModel model = frechet_fit(covariates, std::move(qs));
  const double r2 = frechet_r2(model, resolve_threads(cmd.threads));

  std::vector<std::string> query_ids = ids;
  Mat queries = covariates;
  if (!cmd.predict_table.empty()) {
    const Table pt = read_table_csv(cmd.predict_table);
    query_ids = pt.ids;
    queries = Mat(pt.ids.size(), d);
    for (std::size_t c = 0; c < d; ++c) {
      const std::vector<double> col = pt.numeric_column(cov_cols[c]);
      for (std::size_t i = 0; i < pt.ids.size(); ++i) queries(i, c) = col[i];
    }
  }

  std::size_t clamped_points = 0;
  std::vector<QuantileFunction> fitted;
  fitted.reserve(query_ids.size());
  std::vector<double> u(d);
  for (std::size_t i = 0; i < query_ids.size(); ++i) {
    for (std::size_t c = 0; c < d; ++c) u[c] = queries(i, c);
    QuantileFunction q = frechet_predict(model, u);
    clamped_points += clamp_to_floor(q, cmd.floor);
    q.subject_id = query_ids[i];
    fitted.push_back(std::move(q));
  }
  if (!cmd.out.empty()) {
    write_quantile_csv(cmd.out, fitted);
    write_manifest_sidecar(cmd.out, manifest);
  }

  json j;
  j["command"] = "regress-density";
  j["n"] = n;
  j["d"] = d;
  j["frechet_r2"] = r2;
  j["clamped_points"] = clamped_points;
  j["predicted"] = fitted.size();
  if (!cmd.out.empty()) j["out"] = cmd.out;
  j["manifest"] = manifest_block(manifest);
  emit(j, cmd.summary_out);
}

GroupedSample load_grouped(const std::string& quantiles_path, const std::string& table_path,
                           const std::string& groups_col, GroupEncoding& enc,
                           std::vector<std::string>& ids) {
  GroupedSample sample;
  sample.quantiles = read_quantile_csv(quantiles_path);
  ids = quantile_ids(sample.quantiles);
  const Table table = read_table_csv(table_path);
  const std::vector<std::size_t> rows = match_rows(table, ids);
  const std::vector<std::string> raw = table.string_column(groups_col);
  std::vector<std::string> aligned;
  aligned.reserve(rows.size());
  for (std::size_t r : rows) aligned.push_back(raw[r]);
  enc = encode_groups(aligned);
  sample.labels = enc.labels;
  return sample;
}

json group_size_block(const GroupEncoding& enc, std::span<const std::size_t> labels) {
  std::vector<std::size_t> sizes(enc.names.size(), 0);
  for (std::size_t g : labels) ++sizes[g];
  json j = json::object();
  for (std::size_t g = 0; g < enc.names.size(); ++g) j[enc.names[g]] = sizes[g];
  return j;
}

void run_anova(const AnovaCmd& cmd) {
  RunManifest manifest;
  manifest.command = "anova";
  manifest.parameters.emplace_back("groups", cmd.groups);
  manifest.parameters.emplace_back("reps", std::to_string(cmd.reps));
  manifest.seed = cmd.seed;
  manifest.input_digests.emplace_back(cmd.quantiles, file_digest_hex(cmd.quantiles));
  manifest.input_digests.emplace_back(cmd.table, file_digest_hex(cmd.table));

  GroupEncoding enc;
  std::vector<std::string> ids;
  const GroupedSample sample = load_grouped(cmd.quantiles, cmd.table, cmd.groups, enc, ids);
  const TestResult result = anova_test(sample, cmd.reps, cmd.seed, resolve_threads(cmd.threads));

  json j = test_result_json(result);
  j["command"] = "anova";
  j["groups"] = group_size_block(enc, sample.labels);
  j["manifest"] = manifest_block(manifest);
  emit(j, cmd.out);
}

void run_energy(const EnergyCmd& cmd) {
  RunManifest manifest;
  manifest.command = "energy-test";
  manifest.parameters.emplace_back("groups", cmd.groups);
  manifest.parameters.emplace_back("reps", std::to_string(cmd.reps));
  manifest.seed = cmd.seed;
  manifest.input_digests.emplace_back(cmd.quantiles, file_digest_hex(cmd.quantiles));
  manifest.input_digests.emplace_back(cmd.table, file_digest_hex(cmd.table));

  GroupEncoding enc;
  std::vector<std::string> ids;
  const GroupedSample sample = load_grouped(cmd.quantiles, cmd.table, cmd.groups, enc, ids);
  validate_grouped(sample);
  const int threads = resolve_threads(cmd.threads);

  TestResult result;
  std::string variant;
  if (sample.group_count() == 2) {
    std::vector<QuantileFunction> a, b;
    for (std::size_t i = 0; i < sample.quantiles.size(); ++i)
      (sample.labels[i] == 0 ? a : b).push_back(sample.quantiles[i]);
    result = energy_permutation_test(a, b, cmd.reps, cmd.seed, threads);
    variant = "two_sample";
  } else {
    result = k_sample_energy_test(sample, cmd.reps, cmd.seed, threads);
    variant = "k_sample";
  }

  json j = test_result_json(result);
  j["command"] = "energy-test";
  j["variant"] = variant;
  j["groups"] = group_size_block(enc, sample.labels);
  j["manifest"] = manifest_block(manifest);
  emit(j, cmd.out);
}

void run_cluster(const ClusterCmd& cmd) {
  ClusteringOptions opt;
  opt.k = cmd.k;
  if (cmd.heuristic == "hartigan")
    opt.heuristic = ClusterHeuristic::hartigan;
  else if (cmd.heuristic == "lloyd")
    opt.heuristic = ClusterHeuristic::lloyd;
  else
    throw UsageError("--heuristic must be hartigan or lloyd");
  opt.restarts = cmd.restarts;
  opt.max_iter = cmd.max_iter;
  opt.seed = cmd.seed;
  opt.squared_distance = cmd.squared;
  opt.threads = resolve_threads(cmd.threads);

  RunManifest manifest;
  manifest.command = "cluster";
  manifest.parameters.emplace_back("k", std::to_string(cmd.k));
  manifest.parameters.emplace_back("heuristic", cmd.heuristic);
  manifest.parameters.emplace_back("restarts", std::to_string(cmd.restarts));
  manifest.parameters.emplace_back("max_iter", std::to_string(cmd.max_iter));
  manifest.parameters.emplace_back("squared", cmd.squared ? "true" : "false");
  manifest.seed = cmd.seed;
  manifest.input_digests.emplace_back(cmd.quantiles, file_digest_hex(cmd.quantiles));

  const std::vector<QuantileFunction> qs = read_quantile_csv(cmd.quantiles);
  const std::vector<std::string> ids = quantile_ids(qs);
  const DistanceMatrix dm = distance_matrix(qs, opt.threads);
  const ClusteringResult result = kgroups_cluster(dm, opt);

  if (!cmd.labels_out.empty()) {
    write_labels_csv(cmd.labels_out, ids, result.labels);
    write_manifest_sidecar(cmd.labels_out, manifest);
  }

  std::vector<std::size_t> sizes(cmd.k, 0);
  for (std::size_t g : result.labels) ++sizes[g];
  json labels = json::object();
  for (std::size_t i = 0; i < ids.size(); ++i) labels[ids[i]] = result.labels[i] + 1;

  json j;
  j["command"] = "cluster";
  j["k"] = cmd.k;
  j["heuristic"] = cmd.heuristic;
  j["within_objective"] = result.within_objective;
  j["iterations"] = result.iterations;
  j["restarts"] = result.restarts_used;
  j["cluster_sizes"] = sizes;
  j["labels"] = labels;
  j["seed"] = result.seed;
  if (!cmd.labels_out.empty()) j["labels_out"] = cmd.labels_out;
  j["manifest"] = manifest_block(manifest);
  emit(j, cmd.out);
}

std::vector<double> read_boundary_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::io_failure, "cannot open cutoff file: " + path);
  std::vector<double> out;
  std::string token;
  while (in >> token) {
    for (std::string& piece : split_commas(token)) {
      if (piece.empty()) continue;
      try {
        std::size_t used = 0;
        const double v = std::stod(piece, &used);
        if (used != piece.size()) throw std::invalid_argument(piece);
        out.push_back(v);
      } catch (const std::exception&) {
        raise(Errc::unparseable_row, "bad cutoff value: " + piece);
      }
    }
  }
  return out;
}

void run_tir(const TirCmd& cmd) {
  RunManifest manifest;
  manifest.command = "tir";
  append_ingest_parameters(manifest, cmd.in);
  manifest.parameters.emplace_back("cutoffs", cmd.cutoffs);
  manifest.parameters.emplace_back("zero_repair", format_double(cmd.zero_repair));
  manifest.input_digests.emplace_back(cmd.in.input, file_digest_hex(cmd.in.input));

  const CohortLoad load = load_cohort(cmd.in);

  CutoffSpec spec;
  if (cmd.cutoffs == "ada") {
    spec = ada_cutoffs();
  } else if (cmd.cutoffs == "deciles") {
    std::vector<std::string> mask;
    if (!cmd.normo_ids.empty()) {
      mask = read_id_list(cmd.normo_ids);
      manifest.input_digests.emplace_back(cmd.normo_ids, file_digest_hex(cmd.normo_ids));
    } else {
      for (const CgmSeries& s : load.series) mask.push_back(s.subject_id);
    }
    spec.boundaries = decile_cutoffs(load.series, mask);
    spec.closure = CellClosure::right_closed;
  } else {
    spec.boundaries = read_boundary_file(cmd.cutoffs);
    spec.closure = CellClosure::right_closed;
    manifest.input_digests.emplace_back(cmd.cutoffs, file_digest_hex(cmd.cutoffs));
  }

  std::vector<Composition> comps;
  comps.reserve(load.series.size());
  for (const CgmSeries& s : load.series)
    comps.push_back(tir_composition(s, spec, cmd.zero_repair));
  write_composition_csv(cmd.out, comps);
  write_manifest_sidecar(cmd.out, manifest);

  if (!cmd.ilr_out.empty()) {
    std::vector<std::string> ids;
    std::vector<std::vector<double>> coords;
    for (const Composition& c : comps) {
      ids.push_back(c.subject_id);
      coords.push_back(ilr_transform(c));
    }
    std::vector<std::string> cols;
    for (std::size_t j = 1; j < spec.boundaries.size() + 1; ++j)
      cols.push_back("ilr_" + std::to_string(j));
    write_feature_csv(cmd.ilr_out, cols, ids, coords);
    write_manifest_sidecar(cmd.ilr_out, manifest);
  }

  json j;
  j["command"] = "tir";
  j["subjects"] = comps.size();
  j["cells"] = spec.boundaries.size() + 1;
  j["boundaries"] = spec.boundaries;
  j["closure"] = spec.closure == CellClosure::left_closed ? "left_closed" : "right_closed";
  j["discarded_subjects"] = load.discarded_subjects;
  j["out"] = cmd.out;
  j["manifest"] = manifest_block(manifest);
  emit(j);
}

void run_simulate(const SimulateCmd& cmd) {
  CohortConfig config;
  config.n_subjects = cmd.subjects;
  config.days = cmd.days;
  config.interval = minutes_to_seconds(cmd.interval_minutes, "--interval-minutes");
  config.noise_sd = cmd.noise_sd;
  config.seed = cmd.seed;
  if (!cmd.mix.empty()) {
    const std::vector<std::string> parts = split_commas(cmd.mix);
    if (parts.size() != 3) throw UsageError("--mix needs three comma-separated weights");
    double total = 0.0;
    std::array<double, 3> w{};
    for (std::size_t i = 0; i < 3; ++i) {
      try {
        w[i] = std::stod(parts[i]);
      } catch (const std::exception&) {
        throw UsageError("--mix weights must be numeric");
      }
      if (!(w[i] >= 0.0)) throw UsageError("--mix weights must be nonnegative");
      total += w[i];
    }
    if (!(total > 0.0)) throw UsageError("--mix weights must not all be zero");
    for (double& x : w) x /= total;
    config.archetype_mix = w;
  }

  RunManifest manifest;
  manifest.command = "simulate";
  manifest.parameters.emplace_back("subjects", std::to_string(cmd.subjects));
  manifest.parameters.emplace_back("days", std::to_string(cmd.days));
  manifest.parameters.emplace_back("interval_minutes", format_double(cmd.interval_minutes));
  manifest.parameters.emplace_back("mix", format_double(config.archetype_mix[0]) + "," +
                                              format_double(config.archetype_mix[1]) + "," +
                                              format_double(config.archetype_mix[2]));
  manifest.parameters.emplace_back("noise_sd", format_double(cmd.noise_sd));
  manifest.seed = cmd.seed;

  const SimulatedCohort cohort = simulate_cohort(config, resolve_threads(cmd.threads));

  std::error_code ec;
  std::filesystem::create_directories(cmd.out_dir, ec);
  if (ec) raise(Errc::io_failure, "cannot create output directory: " + cmd.out_dir);
  const std::string cgm_path = cmd.out_dir + "/cgm.csv";
  const std::string bio_path = cmd.out_dir + "/biomarkers.csv";
  write_cgm_csv(cgm_path, cohort.series);
  write_manifest_sidecar(cgm_path, manifest);

  std::ofstream bio(bio_path);
  if (!bio) raise(Errc::io_failure, "cannot open output file: " + bio_path);
  bio << "subject_id,archetype,level,circadian_amp,sigma_dev,meal_amp_1,meal_amp_2,meal_amp_3,"
         "a1c_like,variability_like,homa_like\n";
  for (const SubjectTruth& t : cohort.truths) {
    bio << t.subject_id << ',' << archetype_name(t.archetype) << ',' << format_double(t.level)
        << ',' << format_double(t.circadian_amp) << ',' << format_double(t.sigma_dev);
    for (double a : t.meal_amps) bio << ',' << format_double(a);
    bio << ',' << format_double(t.a1c_like) << ',' << format_double(t.variability_like) << ','
        << format_double(t.homa_like) << '\n';
  }
  if (!bio) raise(Errc::io_failure, "write failed: " + bio_path);
  bio.close();
  write_manifest_sidecar(bio_path, manifest);

  std::size_t records = 0;
  for (const CgmSeries& s : cohort.series) records += s.records.size();
  json counts = json::object();
  for (const SubjectTruth& t : cohort.truths) {
    const std::string name = archetype_name(t.archetype);
    counts[name] = counts.value(name, 0) + 1;
  }

  json j;
  j["command"] = "simulate";
  j["subjects"] = cohort.series.size();
  j["days"] = cmd.days;
  j["records"] = records;
  j["archetype_counts"] = counts;
  j["cgm_out"] = cgm_path;
  j["biomarkers_out"] = bio_path;
  j["manifest"] = manifest_block(manifest);
  emit(j);
}

void run_report(const ReportCmd& cmd) {
  const std::vector<std::string> cols = split_commas(cmd.biomarker_cols);
  if (cols.empty() || cols.front().empty())
    throw UsageError("--biomarker-cols needs a comma-separated column list");

  RunManifest manifest;
  manifest.command = "report";
  append_ingest_parameters(manifest, cmd.in);
  manifest.parameters.emplace_back("biomarker_cols", cmd.biomarker_cols);
  manifest.parameters.emplace_back("grid_points", std::to_string(cmd.grid_points));
  manifest.parameters.emplace_back("neighbors", std::to_string(cmd.neighbors));
  manifest.input_digests.emplace_back(cmd.in.input, file_digest_hex(cmd.in.input));
  manifest.input_digests.emplace_back(cmd.biomarkers, file_digest_hex(cmd.biomarkers));

  const CohortLoad load = load_cohort(cmd.in);
  const Table biomarkers = read_table_csv(cmd.biomarkers);

  std::vector<std::string> mask;
  std::string mask_source = "all_subjects";
  if (!cmd.normo_ids.empty()) {
    mask = read_id_list(cmd.normo_ids);
    manifest.input_digests.emplace_back(cmd.normo_ids, file_digest_hex(cmd.normo_ids));
    mask_source = "id_list";
  } else if (!cmd.normo_col.empty() && biomarkers.column_index(cmd.normo_col).has_value()) {
    const std::vector<std::string> values = biomarkers.string_column(cmd.normo_col);
    for (std::size_t r = 0; r < biomarkers.ids.size(); ++r)
      if (values[r] == cmd.normo_value) mask.push_back(biomarkers.ids[r]);
    mask_source = cmd.normo_col + "==" + cmd.normo_value;
  }

  ReportOptions opt;
  opt.prob_grid_size = cmd.grid_points;
  opt.knn_k = cmd.neighbors;
  opt.threads = resolve_threads(cmd.threads);
  const ReportResult result = compare_representations(load.series, biomarkers, cols, mask, opt);

  json rows = json::array();
  for (const BiomarkerComparison& c : result.comparisons) {
    json r;
    r["biomarker"] = c.biomarker;
    r["r2_glucodensity"] = c.r2_glucodensity;
    r["nw_bandwidth"] = c.nw_bandwidth;
    r["r2_tir_decile"] = c.r2_tir_decile;
    r["r2_tir_ada"] = c.r2_tir_ada;
    r["r2_mean_glucose"] = c.r2_mean_glucose;
    rows.push_back(std::move(r));
  }

  if (!cmd.table_out.empty()) {
    std::ofstream tab(cmd.table_out);
    if (!tab) raise(Errc::io_failure, "cannot open output file: " + cmd.table_out);
    tab << "biomarker,method,r2\n";
    for (const BiomarkerComparison& c : result.comparisons) {
      tab << c.biomarker << ",glucodensity_nw," << format_double(c.r2_glucodensity) << "\n";
      tab << c.biomarker << ",tir_decile_knn," << format_double(c.r2_tir_decile) << "\n";
      tab << c.biomarker << ",tir_ada_knn," << format_double(c.r2_tir_ada) << "\n";
      tab << c.biomarker << ",mean_glucose_linear," << format_double(c.r2_mean_glucose) << "\n";
    }
    if (!tab) raise(Errc::io_failure, "write failed: " + cmd.table_out);
    tab.close();
    write_manifest_sidecar(cmd.table_out, manifest);
  }

  json j;
  j["command"] = "report";
  j["n"] = result.subject_ids.size();
  j["normo_mask"] = mask_source;
  j["decile_boundaries"] = result.decile_boundaries;
  j["biomarkers"] = rows;
  j["discarded_subjects"] = load.discarded_subjects;
  if (!cmd.table_out.empty()) j["table_out"] = cmd.table_out;
  j["manifest"] = manifest_block(manifest);
  emit(j, cmd.out);
}

// ---- Wiring ----

void add_threads_flag(CLI::App* cmd, int& slot) {
  cmd->add_option("--threads", slot,
                  "worker threads; 0 means DISTREP_THREADS or 1. Results do not depend on it");
}

void register_subcommands(CLI::App& app) {
  auto ingest = std::make_shared<IngestCmd>();
  CLI::App* c = app.add_subcommand("ingest", "Parse and clean a CGM CSV");
  add_ingest_flags(c, ingest->in);
  c->add_option("--out", ingest->out, "write the cleaned cohort as CGM CSV");
  c->add_option("--rejects-out", ingest->rejects_out, "write rejected rows as CSV");
  c->callback([ingest] { run_ingest(*ingest); });

  auto density = std::make_shared<DensityCmd>();
  c = app.add_subcommand("density", "Estimate per-subject glucodensities");
  add_ingest_flags(c, density->in);
  c->add_option("--kernel", density->kernel, "gaussian | epanechnikov [gaussian]");
  c->add_option("--selector", density->selector, "rot | lscv [rot]");
  c->add_option("--bandwidth", density->bandwidth, "fixed bandwidth; 0 selects automatically");
  c->add_option("--grid-lo", density->grid_lo, "support grid start [40]");
  c->add_option("--grid-hi", density->grid_hi, "support grid end [400]");
  c->add_option("--grid-points", density->grid_points, "support grid size [721]");
  c->add_option("--out", density->out, "density CSV")->required();
  c->callback([density] { run_density(*density); });

  auto quant = std::make_shared<QuantileCmd>();
  c = app.add_subcommand("quantile", "Per-subject quantile functions");
  c->add_option("--input", quant->in.input, "CGM CSV (empirical quantiles)");
  c->add_option("--density-input", quant->density_input, "density CSV (inverted CDF)");
  c->add_option("--timestamp-format", quant->in.timestamp_format,
                "strptime-style timestamp layout; default ISO-8601");
  c->add_option("--interval-minutes", quant->in.interval_minutes,
                "nominal spacing between readings [5]");
  c->add_option("--max-gap-minutes", quant->in.max_gap_minutes,
                "per-day total gap budget before the day is discarded [120]");
  c->add_option("--range-lo", quant->in.range_lo, "lowest plausible reading [40]");
  c->add_option("--range-hi", quant->in.range_hi, "highest plausible reading [400]");
  c->add_option("-m,--grid-points", quant->grid_points, "probability grid size [500]");
  c->add_option("--out", quant->out, "quantile CSV")->required();
  c->callback([quant] { run_quantile(*quant); });

  auto distmat = std::make_shared<DistmatCmd>();
  c = app.add_subcommand("distmat", "Pairwise 2-Wasserstein distance matrix");
  c->add_option("--quantiles", distmat->quantiles, "quantile CSV")->required();
  c->add_option("--out", distmat->out, "distance matrix CSV");
  c->add_option("--binary-out", distmat->binary_out, "compact binary distance matrix");
  add_threads_flag(c, distmat->threads);
  c->callback([distmat] { run_distmat(*distmat); });

  auto fmean = std::make_shared<FrechetMeanCmd>();
  c = app.add_subcommand("frechet-mean", "Wasserstein barycenter and Frechet variance");
  c->add_option("--quantiles", fmean->quantiles, "quantile CSV")->required();
  c->add_option("--out", fmean->out, "barycenter quantile CSV")->required();
  c->callback([fmean] { run_frechet_mean(*fmean); });

  auto rs = std::make_shared<RegressScalarCmd>();
  c = app.add_subcommand("regress-scalar",
                         "Kernel regression of a scalar response on glucodensities");
  c->add_option("--quantiles", rs->quantiles, "quantile CSV")->required();
  c->add_option("--table", rs->table, "subject table CSV with the response column")->required();
  c->add_option("--response", rs->response, "response column name")->required();
  c->add_option("--bandwidth", rs->bandwidth, "kernel bandwidth; 0 selects by leave-one-out CV");
  add_threads_flag(c, rs->threads);
  c->add_option("--out", rs->out, "mirror the result JSON to a file");
  c->callback([rs] { run_regress_scalar(*rs); });

  auto rd = std::make_shared<RegressDensityCmd>();
  c = app.add_subcommand("regress-density",
                         "Global Frechet regression of glucodensities on covariates");
  c->add_option("--quantiles", rd->quantiles, "quantile CSV (training responses)")->required();
  c->add_option("--table", rd->table, "subject table CSV with covariate columns")->required();
  c->add_option("--covariates", rd->covariates, "comma-separated covariate columns")->required();
  c->add_option("--predict-table", rd->predict_table,
                "table of covariate rows to predict at; default: training rows");
  c->add_option("--floor", rd->floor, "support floor for fitted quantiles [40]");
  add_threads_flag(c, rd->threads);
  c->add_option("--out", rd->out, "fitted quantile CSV");
  c->add_option("--summary-out", rd->summary_out, "mirror the result JSON to a file");
  c->callback([rd] { run_regress_density(*rd); });

  auto an = std::make_shared<AnovaCmd>();
  c = app.add_subcommand("anova", "Bootstrap-calibrated Frechet ANOVA across groups");
  c->add_option("--quantiles", an->quantiles, "quantile CSV")->required();
  c->add_option("--table", an->table, "subject table CSV with the group column")->required();
  c->add_option("--groups", an->groups, "group column name [group]");
  c->add_option("--reps", an->reps, "bootstrap replicates [1000]");
  c->add_option("--seed", an->seed, "RNG seed")->required();
  add_threads_flag(c, an->threads);
  c->add_option("--out", an->out, "mirror the result JSON to a file");
  c->callback([an] { run_anova(*an); });

  auto en = std::make_shared<EnergyCmd>();
  c = app.add_subcommand("energy-test", "Energy-distance permutation test across groups");
  c->add_option("--quantiles", en->quantiles, "quantile CSV")->required();
  c->add_option("--table", en->table, "subject table CSV with the group column")->required();
  c->add_option("--groups", en->groups, "group column name [group]");
  c->add_option("--reps", en->reps, "permutations [999]");
  c->add_option("--seed", en->seed, "RNG seed")->required();
  add_threads_flag(c, en->threads);
  c->add_option("--out", en->out, "mirror the result JSON to a file");
  c->callback([en] { run_energy(*en); });

  auto cl = std::make_shared<ClusterCmd>();
  c = app.add_subcommand("cluster", "k-groups clustering of glucodensities");
  c->add_option("--quantiles", cl->quantiles, "quantile CSV")->required();
  c->add_option("-k,--clusters", cl->k, "number of clusters")->required();
  c->add_option("--heuristic", cl->heuristic, "hartigan | lloyd [hartigan]");
  c->add_option("--restarts", cl->restarts, "restarts [20]");
  c->add_option("--max-iter", cl->max_iter, "iteration cap per restart [100]");
  c->add_flag("--squared", cl->squared, "cluster on squared distances");
  c->add_option("--seed", cl->seed, "RNG seed")->required();
  add_threads_flag(c, cl->threads);
  c->add_option("--labels-out", cl->labels_out, "labels CSV");
  c->add_option("--out", cl->out, "mirror the result JSON to a file");
  c->callback([cl] { run_cluster(*cl); });

  auto tir = std::make_shared<TirCmd>();
  c = app.add_subcommand("tir", "Time-in-range compositions (and ilr coordinates)");
  add_ingest_flags(c, tir->in);
  c->add_option("--cutoffs", tir->cutoffs, "ada | deciles | <file with boundaries> [ada]");
  c->add_option("--normo-ids", tir->normo_ids,
                "id list file pooling the reference records for decile cutoffs");
  c->add_option("--zero-repair", tir->zero_repair, "mass added to empty cells [1e-6]");
  c->add_option("--out", tir->out, "composition CSV")->required();
  c->add_option("--ilr-out", tir->ilr_out, "ilr coordinate CSV");
  c->callback([tir] { run_tir(*tir); });

  auto sim = std::make_shared<SimulateCmd>();
  c = app.add_subcommand("simulate", "Seeded synthetic CGM cohort with planted biomarkers");
  c->add_option("--subjects", sim->subjects, "cohort size [100]");
  c->add_option("--days", sim->days, "monitoring days, 2..6 [4]");
  c->add_option("--interval-minutes", sim->interval_minutes, "reading spacing [5]");
  c->add_option("--mix", sim->mix,
                "archetype weights normo,pre,diab; normalized to sum 1 [equal]");
  c->add_option("--noise-sd", sim->noise_sd, "sensor noise SD in mg/dL [2]");
  c->add_option("--seed", sim->seed, "RNG seed")->required();
  add_threads_flag(c, sim->threads);
  c->add_option("--out-dir", sim->out_dir, "directory for cgm.csv and biomarkers.csv")
      ->required();
  c->callback([sim] { run_simulate(*sim); });

  auto rep = std::make_shared<ReportCmd>();
  c = app.add_subcommand("report",
                         "Compare glucodensity, time-in-range, and mean-glucose regressions");
  add_ingest_flags(c, rep->in);
  c->add_option("--biomarkers", rep->biomarkers, "subject table CSV with biomarker columns")
      ->required();
  c->add_option("--biomarker-cols", rep->biomarker_cols,
                "comma-separated biomarker columns [a1c_like,variability_like,homa_like]");
  c->add_option("--normo-col", rep->normo_col,
                "table column marking the decile reference group [archetype]");
  c->add_option("--normo-value", rep->normo_value, "value marking reference rows [normo]");
  c->add_option("--normo-ids", rep->normo_ids, "id list file overriding --normo-col");
  c->add_option("-m,--grid-points", rep->grid_points, "probability grid size [500]");
  c->add_option("--neighbors", rep->neighbors, "kNN neighbor count [10]");
  add_threads_flag(c, rep->threads);
  c->add_option("--out", rep->out, "mirror the result JSON to a file");
  c->add_option("--table-out", rep->table_out, "plot-ready long-form CSV (biomarker,method,r2)");
  c->callback([rep] { run_report(*rep); });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Glucodensity analysis of continuous glucose monitoring time series"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  register_subcommands(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    const json err{{"error", "usage"}, {"message", single_line(e.what())}};
    std::cerr << err.dump() << "\n";
    return 2;
  } catch (const UsageError& e) {
    const json err{{"error", "usage"}, {"message", single_line(e.what())}};
    std::cerr << err.dump() << "\n";
    return 2;
  } catch (const Error& e) {
    const json err{{"error", e.code_name()}, {"message", single_line(e.what())}};
    std::cerr << err.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    const json err{{"error", "internal"}, {"message", single_line(e.what())}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 0;
}
