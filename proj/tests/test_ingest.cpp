#include "doctest.h"

#include <set>
#include <sstream>

#include "distrep/ingest.hpp"
#include "distrep/timeutil.hpp"
#include "test_util.hpp"

using namespace distrep;
using testutil::regular_series;
using testutil::thrown_code;

namespace {

// 2024-03-01T00:00:00Z
constexpr Instant kDay0 = 19783 * kSecondsPerDay;

bool same_records(const CgmSeries& a, const CgmSeries& b) {
  if (a.records.size() != b.records.size()) return false;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    if (a.records[i].timestamp != b.records[i].timestamp) return false;
    if (a.records[i].glucose != b.records[i].glucose) return false;
  }
  return true;
}

std::set<std::int64_t> day_set(const CgmSeries& s) {
  std::set<std::int64_t> days;
  for (const CgmRecord& r : s.records) days.insert(day_index(r.timestamp));
  return days;
}

}  // namespace

TEST_CASE("csv parsing splits subjects and sorts records") {
  std::istringstream in(
      "subject_id,timestamp,glucose\n"
      "B,2024-03-01T00:05:00Z,90\n"
      "A,2024-03-01T00:05:00Z,110\n"
      "A,2024-03-01T00:00:00Z,100\n"
      "B,2024-03-01 00:00:00,95\n");
  const ParseResult r = parse_cgm_csv(in);
  REQUIRE(r.series.size() == 2);
  CHECK(r.rejected.empty());
  CHECK(r.series[0].subject_id == "A");
  CHECK(r.series[1].subject_id == "B");
  REQUIRE(r.series[0].records.size() == 2);
  CHECK(r.series[0].records[0].glucose == 100.0);
  CHECK(r.series[0].records[1].glucose == 110.0);
  CHECK(r.series[1].records[0].timestamp == kDay0);
}

TEST_CASE("csv parsing collects rejected rows with line numbers") {
  std::istringstream in(
      "subject_id,timestamp,glucose\n"
      "A,2024-03-01T00:00:00Z,100\n"
      "A,2024-03-01T00:05:00Z\n"
      "A,not-a-time,100\n"
      "A,2024-03-01T00:10:00Z,abc\n"
      ",2024-03-01T00:15:00Z,100\n"
      "A,2024-03-01T00:20:00Z,120\n");
  const ParseResult r = parse_cgm_csv(in);
  REQUIRE(r.series.size() == 1);
  CHECK(r.series[0].records.size() == 2);
  REQUIRE(r.rejected.size() == 4);
  CHECK(r.rejected[0].line_number == 3);
  CHECK(r.rejected[1].line_number == 4);
  CHECK(r.rejected[2].line_number == 5);
  CHECK(r.rejected[3].line_number == 6);
  for (const RejectedRow& rr : r.rejected) CHECK(!rr.reason.empty());
}

TEST_CASE("csv parsing handles quoted fields") {
  std::istringstream in(
      "subject_id,timestamp,glucose\n"
      "\"subject, one\",2024-03-01T00:00:00Z,100\n"
      "\"say \"\"hi\"\"\",2024-03-01T00:00:00Z,110\n");
  const ParseResult r = parse_cgm_csv(in);
  REQUIRE(r.series.size() == 2);
  CHECK(r.series[0].subject_id == "say \"hi\"");
  CHECK(r.series[1].subject_id == "subject, one");
}

TEST_CASE("csv parsing rejects structural problems") {
  std::istringstream empty("");
  CHECK(thrown_code([&] { parse_cgm_csv(empty); }) == Errc::empty_input);
  std::istringstream bad_header("id,time,value\nA,2024-03-01T00:00:00Z,100\n");
  CHECK(thrown_code([&] { parse_cgm_csv(bad_header); }) == Errc::malformed_header);
  std::istringstream header_only("subject_id,timestamp,glucose\n");
  CHECK(parse_cgm_csv(header_only).series.empty());
}

TEST_CASE("custom timestamp format") {
  CsvFormatSpec fmt;
  fmt.timestamp_format = "%Y%m%d%H%M%S";
  std::istringstream in(
      "subject_id,timestamp,glucose\n"
      "A,20240301000000,100\n"
      "A,2024-03-01T00:05:00Z,101\n");
  const ParseResult r = parse_cgm_csv(in, fmt);
  REQUIRE(r.series.size() == 1);
  REQUIRE(r.series[0].records.size() == 1);
  CHECK(r.series[0].records[0].timestamp == kDay0);
  REQUIRE(r.rejected.size() == 1);
  CHECK(r.rejected[0].line_number == 3);
}

TEST_CASE("iso8601 parsing variants and validation") {
  CHECK(parse_iso8601("2024-03-01T00:00:00Z") == kDay0);
  CHECK(parse_iso8601("2024-03-01 00:00:00") == kDay0);
  CHECK(parse_iso8601("2024-03-01T00:00") == kDay0);
  CHECK(parse_iso8601("2024-02-29T00:00:00Z").has_value());   // leap day
  CHECK(!parse_iso8601("2023-02-29T00:00:00Z").has_value());  // not a leap year
  CHECK(!parse_iso8601("2024-13-01T00:00:00Z").has_value());
  CHECK(!parse_iso8601("2024-03-01T24:00:00Z").has_value());
  CHECK(format_iso8601(kDay0) == "2024-03-01T00:00:00Z");
}

TEST_CASE("cleaning drops out-of-range values inclusively") {
  const CgmSeries s = regular_series("A", kDay0, 300,
                                     {39.9, 40.0, 100.0, 400.0, 400.1, 120.0});
  const CgmSeries c = clean_series(s);
  REQUIRE(c.records.size() == 4);
  CHECK(c.records[0].glucose == 40.0);
  CHECK(c.records[3].glucose == 120.0);
}

TEST_CASE("cleaning keeps the first of duplicate timestamps") {
  CgmSeries s = regular_series("A", kDay0, 300, {100.0, 110.0, 120.0});
  s.records.push_back({"A", kDay0 + 300, 999.0});  // later duplicate of index 1
  std::swap(s.records[2], s.records[3]);           // scramble input order
  const CgmSeries c = clean_series(s);
  REQUIRE(c.records.size() == 3);
  CHECK(c.records[1].glucose == 110.0);
}

TEST_CASE("a three-hour gap discards exactly that day") {
  // 4 full days at 5 min cadence; on day 1 drop 10:00-12:55 (gap 3 h 5 min).
  std::vector<double> values;
  CgmSeries s;
  s.subject_id = "A";
  s.nominal_interval = 300;
  for (int day = 0; day < 4; ++day)
    for (int k = 0; k < 288; ++k) {
      const Instant t = kDay0 + day * kSecondsPerDay + k * 300;
      const int minute_of_day = k * 5;
      if (day == 1 && minute_of_day >= 600 && minute_of_day < 780) continue;
      s.records.push_back({"A", t, 100.0 + (k % 7)});
    }
  const CgmSeries c = clean_series(s);
  CHECK(day_set(s) == std::set<std::int64_t>{19783, 19784, 19785, 19786});
  CHECK(day_set(c) == std::set<std::int64_t>{19783, 19785, 19786});
  CHECK(c.records.size() == 3 * 288);
}

TEST_CASE("gap budget accumulates within a day") {
  // Three separate 50-min gaps: total 9000 s > 7200 s, each alone under budget.
  CgmSeries s;
  s.subject_id = "A";
  s.nominal_interval = 300;
  for (int k = 0; k < 288; ++k) {
    const int minute_of_day = k * 5;
    const bool in_gap = (minute_of_day >= 300 && minute_of_day < 345) ||
                        (minute_of_day >= 600 && minute_of_day < 645) ||
                        (minute_of_day >= 900 && minute_of_day < 945);
    if (in_gap) continue;
    s.records.push_back({"A", kDay0 + k * 300, 100.0});
  }
  CHECK(thrown_code([&] { clean_series(s); }) == Errc::all_data_discarded);

  // Two such gaps total 6000 s: kept.
  CgmSeries s2;
  s2.subject_id = "A";
  s2.nominal_interval = 300;
  for (int k = 0; k < 288; ++k) {
    const int minute_of_day = k * 5;
    const bool in_gap = (minute_of_day >= 300 && minute_of_day < 345) ||
                        (minute_of_day >= 600 && minute_of_day < 645);
    if (in_gap) continue;
    s2.records.push_back({"A", kDay0 + k * 300, 100.0});
  }
  CHECK(clean_series(s2).records.size() == s2.records.size());
}

TEST_CASE("a gap exactly at the budget is kept") {
  CgmSeries s;
  s.subject_id = "A";
  s.nominal_interval = 300;
  // Records at 00:00..01:00, then one gap of exactly 2 h, then 03:00 onward.
  for (int k = 0; k <= 12; ++k) s.records.push_back({"A", kDay0 + k * 300, 100.0});
  for (int k = 36; k < 288; ++k) s.records.push_back({"A", kDay0 + k * 300, 100.0});
  const CgmSeries c = clean_series(s);
  CHECK(c.records.size() == s.records.size());
}

TEST_CASE("cleaning is idempotent and outputs a subset") {
  Rng rng(99);
  CgmSeries s;
  s.subject_id = "A";
  s.nominal_interval = 300;
  for (int day = 0; day < 3; ++day)
    for (int k = 0; k < 288; ++k) {
      if (day == 1 && k > 100 && k < 160) continue;  // ~5 h gap
      s.records.push_back({"A", kDay0 + day * kSecondsPerDay + k * 300,
                           rng.uniform(30.0, 410.0)});
    }
  const CgmSeries once = clean_series(s);
  const CgmSeries twice = clean_series(once);
  CHECK(same_records(once, twice));

  std::set<std::pair<Instant, double>> original;
  for (const CgmRecord& r : s.records) original.insert({r.timestamp, r.glucose});
  for (const CgmRecord& r : once.records)
    CHECK(original.count({r.timestamp, r.glucose}) == 1);
}

TEST_CASE("day decisions are local to the day") {
  auto build = [](bool gap_on_day2) {
    CgmSeries s;
    s.subject_id = "A";
    s.nominal_interval = 300;
    for (int day = 0; day < 3; ++day)
      for (int k = 0; k < 288; ++k) {
        if (day == 1 && k >= 120 && k < 160) continue;  // always broken
        if (gap_on_day2 && day == 2 && k >= 100 && k < 140) continue;
        s.records.push_back({"A", kDay0 + day * kSecondsPerDay + k * 300, 100.0 + day});
      }
    return s;
  };
  const CgmSeries a = clean_series(build(false));
  const CgmSeries b = clean_series(build(true));
  auto day0 = [](const CgmSeries& s) {
    std::vector<double> v;
    for (const CgmRecord& r : s.records)
      if (day_index(r.timestamp) == 19783) v.push_back(r.glucose);
    return v;
  };
  CHECK(day_set(a).count(19784) == 0);
  CHECK(day_set(b).count(19784) == 0);
  CHECK(day0(a) == day0(b));
}

TEST_CASE("cleaning failure modes") {
  CgmSeries empty;
  empty.subject_id = "A";
  CHECK(thrown_code([&] { clean_series(empty); }) == Errc::empty_series);

  const CgmSeries junk = regular_series("A", kDay0, 300, {10.0, 20.0, 500.0});
  CHECK(thrown_code([&] { clean_series(junk); }) == Errc::all_data_discarded);
}
