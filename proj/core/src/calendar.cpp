#include "netting/calendar.hpp"

#include <charconv>
#include <cstdio>

#include "netting/error.hpp"

namespace netting {

namespace {

bool read_digits(std::string_view s, std::size_t pos, std::size_t n, int& out) {
  if (pos + n > s.size()) return false;
  for (std::size_t i = pos; i < pos + n; ++i)
    if (s[i] < '0' || s[i] > '9') return false;
  auto [p, ec] = std::from_chars(s.data() + pos, s.data() + pos + n, out);
  return ec == std::errc{} && p == s.data() + pos + n;
}

std::chrono::year_month_day parse_ymd(std::string_view s) {
  int y = 0, m = 0, d = 0;
  if (s.size() < 10 || !read_digits(s, 0, 4, y) || s[4] != '-' || !read_digits(s, 5, 2, m) ||
      s[7] != '-' || !read_digits(s, 8, 2, d))
    throw Error(ErrorCode::InvalidDate, "not an ISO-8601 date: '" + std::string(s) + "'");
  std::chrono::year_month_day ymd{std::chrono::year(y), std::chrono::month(unsigned(m)),
                                  std::chrono::day(unsigned(d))};
  if (!ymd.ok()) throw Error(ErrorCode::InvalidDate, "no such date: '" + std::string(s) + "'");
  return ymd;
}

}  // namespace

Date::Date(int year, unsigned month, unsigned day) {
  std::chrono::year_month_day ymd{std::chrono::year(year), std::chrono::month(month),
                                  std::chrono::day(day)};
  if (!ymd.ok()) throw Error(ErrorCode::InvalidDate, "no such date");
  days_ = std::chrono::sys_days(ymd);
}

Date Date::parse(std::string_view iso) {
  if (iso.size() != 10)
    throw Error(ErrorCode::InvalidDate, "not an ISO-8601 date: '" + std::string(iso) + "'");
  return Date(std::chrono::sys_days(parse_ymd(iso)));
}

std::string Date::iso() const {
  std::chrono::year_month_day ymd(days_);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()),
                unsigned(ymd.day()));
  return buf;
}

Timestamp Timestamp::parse(std::string_view iso) {
  // Accepts "YYYY-MM-DDTHH:MM:SSZ"; a bare date means midnight UTC.
  if (iso.size() == 10) return start_of(Date::parse(iso));
  auto ymd = parse_ymd(iso);
  int hh = 0, mm = 0, ss = 0;
  if (iso.size() != 20 || iso[10] != 'T' || !read_digits(iso, 11, 2, hh) || iso[13] != ':' ||
      !read_digits(iso, 14, 2, mm) || iso[16] != ':' || !read_digits(iso, 17, 2, ss) ||
      iso[19] != 'Z' || hh > 23 || mm > 59 || ss > 59)
    throw Error(ErrorCode::InvalidDate, "not an ISO-8601 UTC timestamp: '" + std::string(iso) + "'");
  using namespace std::chrono;
  return Timestamp(sys_seconds(sys_days(ymd)) + hours(hh) + minutes(mm) + std::chrono::seconds(ss));
}

Timestamp Timestamp::now() {
  return Timestamp(std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()));
}

std::string Timestamp::iso() const {
  using namespace std::chrono;
  auto day = floor<days>(secs_);
  hh_mm_ss hms(secs_ - day);
  std::string out = Date(day).iso();
  char buf[16];
  std::snprintf(buf, sizeof buf, "T%02d:%02d:%02dZ", int(hms.hours().count()),
                int(hms.minutes().count()), int(hms.seconds().count()));
  return out + buf;
}

}  // namespace netting
