#include "distrep/io.hpp"

#include <bit>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "distrep/errors.hpp"
#include "distrep/numeric.hpp"
#include "distrep/timeutil.hpp"

static_assert(std::endian::native == std::endian::little,
              "binary distance files assume a little-endian host");

namespace distrep {

namespace {

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::io_failure, "cannot open " + path + " for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::io_failure, "cannot open " + path);
  return in;
}

bool split_line(const std::string& line, std::vector<std::string>& out) {
  out.clear();
  std::string field;
  bool quoted = false;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && field.empty()) {
      quoted = true;
    } else if (c == ',') {
      out.push_back(field);
      field.clear();
    } else {
      field.push_back(c);
    }
    ++i;
  }
  if (quoted) return false;
  out.push_back(field);
  return true;
}

std::string read_line_or_fail(std::istream& in, const std::string& path) {
  std::string line;
  if (!std::getline(in, line)) raise(Errc::empty_input, path + " has no content");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

double parse_double_or_fail(const std::string& s, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    raise(Errc::unparseable_row, "cannot parse number '" + s + "' in " + where);
  }
  return v;
}

// Shared reader for the grid-plus-columns layout of quantile/density files.
void read_grid_csv(const std::string& path, const std::string& grid_header,
                   std::vector<std::string>& ids, std::vector<double>& grid,
                   std::vector<std::vector<double>>& columns) {
  std::ifstream in = open_in(path);
  std::string line = read_line_or_fail(in, path);
  std::vector<std::string> fields;
  if (!split_line(line, fields) || fields.size() < 2 || fields[0] != grid_header) {
    raise(Errc::malformed_header, path + ": expected header " + grid_header + ",<id>,...");
  }
  ids.assign(fields.begin() + 1, fields.end());
  columns.assign(ids.size(), {});
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!split_line(line, fields) || fields.size() != ids.size() + 1) {
      raise(Errc::unparseable_row,
            path + ":" + std::to_string(line_no) + ": wrong field count");
    }
    const std::string where = path + ":" + std::to_string(line_no);
    grid.push_back(parse_double_or_fail(fields[0], where));
    for (std::size_t c = 0; c < ids.size(); ++c) {
      columns[c].push_back(parse_double_or_fail(fields[c + 1], where));
    }
  }
  if (grid.empty()) raise(Errc::empty_input, path + " has no data rows");
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

std::string file_digest_hex(const std::string& path) {
  std::ifstream in = open_in(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string bytes = buffer.str();
  const std::uint64_t h = fnv1a64(bytes.data(), bytes.size());
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

std::string manifest_json(const RunManifest& manifest) {
  nlohmann::json j;
  j["command"] = manifest.command;
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [k, v] : manifest.parameters) params[k] = v;
  j["parameters"] = params;
  nlohmann::json digests = nlohmann::json::object();
  for (const auto& [k, v] : manifest.input_digests) digests[k] = v;
  j["input_digests"] = digests;
  if (manifest.seed) j["seed"] = *manifest.seed;
  j["tool_version"] = manifest.tool_version;
  return j.dump();
}

void write_manifest_sidecar(const std::string& path, const RunManifest& manifest) {
  std::ofstream out = open_out(path + ".manifest.json");
  out << manifest_json(manifest) << "\n";
  if (!out) raise(Errc::io_failure, "failed writing " + path + ".manifest.json");
}

void write_quantile_csv(const std::string& path, std::span<const QuantileFunction> qs) {
  if (qs.empty()) raise(Errc::empty_sample, "no quantile functions to write");
  std::ofstream out = open_out(path);
  out << "p";
  for (const auto& q : qs) out << ',' << csv_escape(q.subject_id);
  out << '\n';
  const std::size_t m = qs[0].probs.size();
  for (const auto& q : qs) {
    if (q.probs.size() != m) raise(Errc::grid_mismatch, "mixed probability grids");
  }
  for (std::size_t k = 0; k < m; ++k) {
    out << format_double(qs[0].probs[k]);
    for (const auto& q : qs) out << ',' << format_double(q.values[k]);
    out << '\n';
  }
  if (!out) raise(Errc::io_failure, "failed writing " + path);
}

std::vector<QuantileFunction> read_quantile_csv(const std::string& path) {
  std::vector<std::string> ids;
  std::vector<double> grid;
  std::vector<std::vector<double>> columns;
  read_grid_csv(path, "p", ids, grid, columns);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] > 0.0 && grid[k] < 1.0)) {
      raise(Errc::invalid_argument, path + ": probabilities must lie in (0, 1)");
    }
    if (k > 0 && !(grid[k] > grid[k - 1])) {
      raise(Errc::invalid_argument, path + ": probability grid must increase");
    }
  }
  std::vector<QuantileFunction> qs(ids.size());
  for (std::size_t c = 0; c < ids.size(); ++c) {
    qs[c].subject_id = ids[c];
    qs[c].probs = grid;
    qs[c].values = std::move(columns[c]);
  }
  return qs;
}

void write_density_csv(const std::string& path, std::span<const Glucodensity> ds) {
  if (ds.empty()) raise(Errc::empty_sample, "no densities to write");
  std::ofstream out = open_out(path);
  out << "glucose";
  for (const auto& d : ds) out << ',' << csv_escape(d.subject_id);
  out << '\n';
  const std::size_t m = ds[0].grid.size();
  for (const auto& d : ds) {
    if (d.grid.size() != m) raise(Errc::grid_mismatch, "mixed support grids");
  }
  for (std::size_t k = 0; k < m; ++k) {
    out << format_double(ds[0].grid[k]);
    for (const auto& d : ds) out << ',' << format_double(d.density[k]);
    out << '\n';
  }
  if (!out) raise(Errc::io_failure, "failed writing " + path);
}

std::vector<Glucodensity> read_density_csv(const std::string& path) {
  std::vector<std::string> ids;
  std::vector<double> grid;
  std::vector<std::vector<double>> columns;
  read_grid_csv(path, "glucose", ids, grid, columns);
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] > grid[k - 1])) {
      raise(Errc::invalid_argument, path + ": support grid must increase");
    }
  }
  std::vector<Glucodensity> ds(ids.size());
  for (std::size_t c = 0; c < ids.size(); ++c) {
    ds[c].subject_id = ids[c];
    ds[c].grid = grid;
    ds[c].density = std::move(columns[c]);
    ds[c].sample_size = 0;  // unknown from the file
  }
  return ds;
}

void write_cgm_csv(const std::string& path, std::span<const CgmSeries> series) {
  std::ofstream out = open_out(path);
  out << "subject_id,timestamp,glucose\n";
  for (const CgmSeries& s : series) {
    for (const CgmRecord& r : s.records) {
      out << csv_escape(r.subject_id) << ',' << format_iso8601(r.timestamp) << ','
          << format_double(r.glucose) << '\n';
    }
  }
  if (!out) raise(Errc::io_failure, "failed writing " + path);
}

void write_labels_csv(const std::string& path, std::span<const std::string> ids,
                      std::span<const std::size_t> labels) {
  if (ids.size() != labels.size()) raise(Errc::dimension_mismatch, "ids/labels size mismatch");
  std::ofstream out = open_out(path);
  out << "subject_id,label\n";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out << csv_escape(ids[i]) << ',' << labels[i] + 1 << '\n';
  }
  if (!out) raise(Errc::io_failure, "failed writing " + path);
}

void write_distance_csv(const std::string& path, const DistanceMatrix& dm) {
  std::ofstream out = open_out(path);
  out << "id";
  for (std::size_t j = 0; j < dm.size(); ++j) {
    out << ',' << csv_escape(j < dm.ids.size() ? dm.ids[j] : std::to_string(j + 1));
  }
  out << '\n';
  for (std::size_t i = 0; i < dm.size(); ++i) {
    out << csv_escape(i < dm.ids.size() ? dm.ids[i] : std::to_string(i + 1));
    for (std::size_t j = 0; j < dm.size(); ++j) out << ',' << format_double(dm.at(i, j));
    out << '\n';
  }
  if (!out) raise(Errc::io_failure, "failed writing " + path);
}

void write_distance_binary(const std::string& path, const DistanceMatrix& dm) {
  std::ofstream out = open_out(path);
  out.write("DSTM", 4);
  const std::uint64_t n = dm.size();
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  for (std::size_t i = 1; i < dm.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const double v = dm.at(i, j);
      out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
  }
  if (!out) raise(Errc::io_failure, "failed writing " + path);
}

DistanceMatrix read_distance_binary(const std::string& path) {
  std::ifstream in = open_in(path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "DSTM", 4) != 0) {
    raise(Errc::malformed_header, path + " is not a DSTM file");
  }
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  if (!in) raise(Errc::malformed_header, path + ": truncated header");
  DistanceMatrix dm(static_cast<std::size_t>(n));
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      double v = 0.0;
      in.read(reinterpret_cast<char*>(&v), sizeof(v));
      if (!in) raise(Errc::unparseable_row, path + ": truncated distance data");
      dm.set(i, j, v);
    }
  }
  return dm;
}

void write_composition_csv(const std::string& path, std::span<const Composition> comps) {
  if (comps.empty()) raise(Errc::empty_sample, "no compositions to write");
  std::ofstream out = open_out(path);
  out << "subject_id";
  for (std::size_t c = 0; c < comps[0].parts.size(); ++c) out << ",cell_" << c + 1;
  out << '\n';
  for (const Composition& comp : comps) {
    if (comp.parts.size() != comps[0].parts.size()) {
      raise(Errc::dimension_mismatch, "mixed composition sizes");
    }
    out << csv_escape(comp.subject_id);
    for (const double p : comp.parts) out << ',' << format_double(p);
    out << '\n';
  }
  if (!out) raise(Errc::io_failure, "failed writing " + path);
}

void write_feature_csv(const std::string& path, std::span<const std::string> columns,
                       std::span<const std::string> ids,
                       std::span<const std::vector<double>> rows) {
  if (ids.size() != rows.size()) raise(Errc::dimension_mismatch, "ids/rows size mismatch");
  std::ofstream out = open_out(path);
  out << "subject_id";
  for (const std::string& c : columns) out << ',' << csv_escape(c);
  out << '\n';
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (rows[i].size() != columns.size()) {
      raise(Errc::dimension_mismatch, "row width mismatch at " + ids[i]);
    }
    out << csv_escape(ids[i]);
    for (const double v : rows[i]) out << ',' << format_double(v);
    out << '\n';
  }
  if (!out) raise(Errc::io_failure, "failed writing " + path);
}

std::optional<std::size_t> Table::column_index(const std::string& name) const {
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c] == name) return c;
  }
  return std::nullopt;
}

std::vector<double> Table::numeric_column(const std::string& name) const {
  const auto idx = column_index(name);
  if (!idx) raise(Errc::invalid_argument, "table has no column '" + name + "'");
  std::vector<double> out;
  out.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.push_back(parse_double_or_fail(rows[r][*idx], "column " + name + ", row " +
                                                          std::to_string(r + 2)));
  }
  return out;
}

std::vector<std::string> Table::string_column(const std::string& name) const {
  const auto idx = column_index(name);
  if (!idx) raise(Errc::invalid_argument, "table has no column '" + name + "'");
  std::vector<std::string> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row[*idx]);
  return out;
}

Table read_table_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line = read_line_or_fail(in, path);
  std::vector<std::string> fields;
  if (!split_line(line, fields) || fields.empty() || fields[0] != "subject_id") {
    raise(Errc::malformed_header, path + ": expected header subject_id,<col>,...");
  }
  Table table;
  table.columns.assign(fields.begin() + 1, fields.end());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!split_line(line, fields) || fields.size() != table.columns.size() + 1) {
      raise(Errc::unparseable_row,
            path + ":" + std::to_string(line_no) + ": wrong field count");
    }
    table.ids.push_back(fields[0]);
    table.rows.emplace_back(fields.begin() + 1, fields.end());
  }
  if (table.ids.empty()) raise(Errc::empty_input, path + " has no data rows");
  return table;
}

}  // namespace distrep
