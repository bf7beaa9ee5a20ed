#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "distrep/types.hpp"

namespace distrep {

// Input-layout options for CGM CSV files. The header must always be
// subject_id,timestamp,glucose; only the timestamp layout is configurable.
struct CsvFormatSpec {
  // Empty means ISO-8601 (YYYY-MM-DD[T| ]HH:MM[:SS][Z]); otherwise a
  // strptime-style pattern using %Y %m %d %H %M %S.
  std::string timestamp_format;
  // Expected spacing between consecutive readings, seconds.
  Instant nominal_interval = 300;
};

struct RejectedRow {
  std::size_t line_number = 0;  // 1-based, counting the header as line 1
  std::string reason;
};

struct ParseResult {
  std::vector<CgmSeries> series;  // sorted by subject_id, records time-sorted
  std::vector<RejectedRow> rejected;
};

// Parses a CGM CSV stream. Rows with unparseable fields are collected in
// `rejected` with their line numbers; structural problems throw
// (malformed_header, empty_input).
ParseResult parse_cgm_csv(std::istream& input, const CsvFormatSpec& format = {});
ParseResult parse_cgm_csv_file(const std::string& path, const CsvFormatSpec& format = {});

struct CleanOptions {
  Instant max_daily_gap = 7200;  // seconds
  double range_lo = 40.0;
  double range_hi = 400.0;
};

// Applies the cleaning rules, in order: drop out-of-range values, drop
// duplicate timestamps (keeping the first), then discard every calendar day
// (UTC) whose within-day acquisition gaps total more than max_daily_gap.
// A gap is a consecutive-record spacing strictly greater than
// nominal_interval, and the full spacing counts toward the day's budget;
// spacings that straddle midnight belong to no day. Throws all_data_discarded
// if no records survive.
CgmSeries clean_series(const CgmSeries& series, const CleanOptions& options = {});

}  // namespace distrep
