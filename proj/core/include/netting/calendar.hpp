#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace netting {

// Calendar date, ISO-8601 "YYYY-MM-DD".
class Date {
 public:
  constexpr Date() = default;
  constexpr explicit Date(std::chrono::sys_days days) : days_(days) {}
  Date(int year, unsigned month, unsigned day);

  static Date parse(std::string_view iso);
  std::string iso() const;

  constexpr std::chrono::sys_days days() const { return days_; }
  Date plus_days(long n) const { return Date(days_ + std::chrono::days(n)); }

  friend long days_between(Date from, Date to) {
    return (to.days_ - from.days_).count();
  }
  friend constexpr auto operator<=>(const Date&, const Date&) = default;

 private:
  std::chrono::sys_days days_{};
};

// UTC instant at second resolution, ISO-8601 "YYYY-MM-DDTHH:MM:SSZ".
class Timestamp {
 public:
  constexpr Timestamp() = default;
  constexpr explicit Timestamp(std::chrono::sys_seconds s) : secs_(s) {}

  static Timestamp parse(std::string_view iso);
  static Timestamp start_of(Date d) { return Timestamp(std::chrono::sys_seconds(d.days())); }
  static Timestamp now();

  std::string iso() const;
  Date date() const { return Date(std::chrono::floor<std::chrono::days>(secs_)); }
  constexpr std::chrono::sys_seconds seconds() const { return secs_; }

  friend constexpr auto operator<=>(const Timestamp&, const Timestamp&) = default;

 private:
  std::chrono::sys_seconds secs_{};
};

}  // namespace netting
