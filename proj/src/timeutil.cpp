#include "distrep/timeutil.hpp"

#include <cctype>
#include <cstdio>

namespace distrep {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Reads exactly `width` digits starting at pos; advances pos on success.
bool read_fixed_int(const std::string& s, std::size_t& pos, int width, int& out) {
  if (pos + static_cast<std::size_t>(width) > s.size()) return false;
  int v = 0;
  for (int i = 0; i < width; ++i) {
    const char c = s[pos + static_cast<std::size_t>(i)];
    if (!is_digit(c)) return false;
    v = v * 10 + (c - '0');
  }
  pos += static_cast<std::size_t>(width);
  out = v;
  return true;
}

bool valid_date(int y, int m, int d) {
  if (m < 1 || m > 12 || d < 1) return false;
  static const int mdays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  int dmax = mdays[m - 1];
  const bool leap = (y % 4 == 0 && y % 100 != 0) || (y % 400 == 0);
  if (m == 2 && leap) dmax = 29;
  return d <= dmax;
}

}  // namespace

std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                       static_cast<unsigned>(d) - 1u;
  const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& year, int& month, int& day) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  day = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  month = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
  year = static_cast<int>(y + (month <= 2));
}

std::optional<Instant> parse_iso8601(const std::string& text) {
  std::size_t pos = 0;
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, se = 0;
  if (!read_fixed_int(text, pos, 4, y)) return std::nullopt;
  if (pos >= text.size() || text[pos] != '-') return std::nullopt;
  ++pos;
  if (!read_fixed_int(text, pos, 2, mo)) return std::nullopt;
  if (pos >= text.size() || text[pos] != '-') return std::nullopt;
  ++pos;
  if (!read_fixed_int(text, pos, 2, d)) return std::nullopt;
  if (pos >= text.size() || (text[pos] != 'T' && text[pos] != ' ')) return std::nullopt;
  ++pos;
  if (!read_fixed_int(text, pos, 2, h)) return std::nullopt;
  if (pos >= text.size() || text[pos] != ':') return std::nullopt;
  ++pos;
  if (!read_fixed_int(text, pos, 2, mi)) return std::nullopt;
  if (pos < text.size() && text[pos] == ':') {
    ++pos;
    if (!read_fixed_int(text, pos, 2, se)) return std::nullopt;
  }
  if (pos < text.size() && text[pos] == 'Z') ++pos;
  if (pos != text.size()) return std::nullopt;
  if (!valid_date(y, mo, d) || h > 23 || mi > 59 || se > 60) return std::nullopt;
  return days_from_civil(y, mo, d) * kSecondsPerDay + h * 3600 + mi * 60 + se;
}

std::optional<Instant> parse_with_format(const std::string& text, const std::string& format) {
  std::size_t pos = 0;
  int y = 1970, mo = 1, d = 1, h = 0, mi = 0, se = 0;
  for (std::size_t fi = 0; fi < format.size(); ++fi) {
    const char fc = format[fi];
    if (fc == '%' && fi + 1 < format.size()) {
      const char code = format[++fi];
      bool ok = true;
      switch (code) {
        case 'Y': ok = read_fixed_int(text, pos, 4, y); break;
        case 'm': ok = read_fixed_int(text, pos, 2, mo); break;
        case 'd': ok = read_fixed_int(text, pos, 2, d); break;
        case 'H': ok = read_fixed_int(text, pos, 2, h); break;
        case 'M': ok = read_fixed_int(text, pos, 2, mi); break;
        case 'S': ok = read_fixed_int(text, pos, 2, se); break;
        case '%':
          ok = pos < text.size() && text[pos] == '%';
          if (ok) ++pos;
          break;
        default: return std::nullopt;
      }
      if (!ok) return std::nullopt;
    } else {
      if (pos >= text.size() || text[pos] != fc) return std::nullopt;
      ++pos;
    }
  }
  if (pos != text.size()) return std::nullopt;
  if (!valid_date(y, mo, d) || h > 23 || mi > 59 || se > 60) return std::nullopt;
  return days_from_civil(y, mo, d) * kSecondsPerDay + h * 3600 + mi * 60 + se;
}

std::string format_iso8601(Instant t) {
  const std::int64_t days = floor_div(t, kSecondsPerDay);
  std::int64_t rem = t - days * kSecondsPerDay;
  int y = 0, mo = 0, d = 0;
  civil_from_days(days, y, mo, d);
  const int h = static_cast<int>(rem / 3600);
  rem %= 3600;
  const int mi = static_cast<int>(rem / 60);
  const int se = static_cast<int>(rem % 60);
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", y, mo, d, h, mi, se);
  return std::string(buf);
}

}  // namespace distrep
