#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "distrep/types.hpp"

namespace distrep {

// Days since 1970-01-01 for a proleptic Gregorian civil date.
std::int64_t days_from_civil(int year, int month, int day);

// Inverse of days_from_civil.
void civil_from_days(std::int64_t days, int& year, int& month, int& day);

// Parses an ISO-8601 UTC timestamp: YYYY-MM-DD[T| ]HH:MM[:SS][Z].
// Returns nullopt on malformed input.
std::optional<Instant> parse_iso8601(const std::string& text);

// Parses with a strptime-style pattern (%Y %m %d %H %M %S supported).
// Used when inputs carry a nonstandard timestamp layout.
std::optional<Instant> parse_with_format(const std::string& text, const std::string& format);

// Formats as YYYY-MM-DDTHH:MM:SSZ.
std::string format_iso8601(Instant t);

// Floor division, correct for negative numerators.
inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// Calendar-day index (UTC) of an instant.
inline std::int64_t day_index(Instant t) { return floor_div(t, kSecondsPerDay); }

}  // namespace distrep
