#include "distrep/ingest.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

#include "distrep/errors.hpp"
#include "distrep/timeutil.hpp"

namespace distrep {

namespace {

// Splits one CSV record. Supports double-quoted fields with "" escapes.
// Returns false on unbalanced quotes.
bool csv_split(const std::string& line, std::vector<std::string>& out) {
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

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

}  // namespace

ParseResult parse_cgm_csv(std::istream& input, const CsvFormatSpec& format) {
  std::string line;
  if (!std::getline(input, line)) raise(Errc::empty_input, "input has no content");
  line = strip_cr(line);

  std::vector<std::string> fields;
  if (!csv_split(line, fields) || fields.size() != 3 || fields[0] != "subject_id" ||
      fields[1] != "timestamp" || fields[2] != "glucose") {
    raise(Errc::malformed_header, "expected header subject_id,timestamp,glucose");
  }

  ParseResult result;
  std::map<std::string, std::vector<CgmRecord>> by_subject;
  std::size_t line_number = 1;
  while (std::getline(input, line)) {
    ++line_number;
    line = strip_cr(line);
    if (line.empty()) continue;
    if (!csv_split(line, fields)) {
      result.rejected.push_back({line_number, "unbalanced quotes"});
      continue;
    }
    if (fields.size() != 3) {
      result.rejected.push_back({line_number, "expected 3 fields"});
      continue;
    }
    if (fields[0].empty()) {
      result.rejected.push_back({line_number, "empty subject_id"});
      continue;
    }
    std::optional<Instant> ts = format.timestamp_format.empty()
                                    ? parse_iso8601(fields[1])
                                    : parse_with_format(fields[1], format.timestamp_format);
    if (!ts) {
      result.rejected.push_back({line_number, "unparseable timestamp"});
      continue;
    }
    double glucose = 0.0;
    if (!parse_double(fields[2], glucose)) {
      result.rejected.push_back({line_number, "unparseable glucose"});
      continue;
    }
    by_subject[fields[0]].push_back({fields[0], *ts, glucose});
  }

  for (auto& [id, records] : by_subject) {
    std::stable_sort(records.begin(), records.end(),
                     [](const CgmRecord& a, const CgmRecord& b) { return a.timestamp < b.timestamp; });
    CgmSeries s;
    s.subject_id = id;
    s.records = std::move(records);
    s.nominal_interval = format.nominal_interval;
    result.series.push_back(std::move(s));
  }
  return result;
}

ParseResult parse_cgm_csv_file(const std::string& path, const CsvFormatSpec& format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::io_failure, "cannot open " + path);
  return parse_cgm_csv(in, format);
}

CgmSeries clean_series(const CgmSeries& series, const CleanOptions& options) {
  if (series.records.empty()) raise(Errc::empty_series, "clean_series: no records");
  if (series.nominal_interval <= 0) {
    raise(Errc::invalid_argument, "nominal_interval must be positive");
  }

  std::vector<CgmRecord> recs = series.records;
  std::stable_sort(recs.begin(), recs.end(),
                   [](const CgmRecord& a, const CgmRecord& b) { return a.timestamp < b.timestamp; });

  std::vector<CgmRecord> kept;
  kept.reserve(recs.size());
  for (const CgmRecord& r : recs) {
    if (r.glucose < options.range_lo || r.glucose > options.range_hi) continue;
    if (!kept.empty() && kept.back().timestamp == r.timestamp) continue;
    kept.push_back(r);
  }

  // Accumulate each day's gap budget over within-day consecutive spacings.
  std::map<std::int64_t, Instant> gap_total;
  for (std::size_t i = 1; i < kept.size(); ++i) {
    const std::int64_t day = day_index(kept[i - 1].timestamp);
    if (day_index(kept[i].timestamp) != day) continue;
    const Instant spacing = kept[i].timestamp - kept[i - 1].timestamp;
    if (spacing > series.nominal_interval) gap_total[day] += spacing;
  }

  CgmSeries out;
  out.subject_id = series.subject_id;
  out.nominal_interval = series.nominal_interval;
  for (const CgmRecord& r : kept) {
    const auto it = gap_total.find(day_index(r.timestamp));
    if (it != gap_total.end() && it->second > options.max_daily_gap) continue;
    out.records.push_back(r);
  }
  if (out.records.empty()) raise(Errc::all_data_discarded, "no records survive cleaning");
  return out;
}

}  // namespace distrep
