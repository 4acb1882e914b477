#include "netting/cost_model.hpp"

#include <cstdio>
#include <sstream>

#include "netting/error.hpp"

namespace netting::cost {

namespace {

void check_fraction(const Decimal& f, const std::string& what, const std::string& level) {
  if (f.is_negative() || f > Decimal(1))
    throw Error(ErrorCode::InvalidFraction,
                "level " + level + ": " + what + " = " + f.str() + " is outside [0,1]");
}

void check(const LevelParams& p) {
  check_fraction(p.reviewed, "reviewed", p.level);
  check_fraction(p.complex, "complex", p.level);
  auto bad = [&](const std::string& what) {
    throw Error(ErrorCode::InvalidParameters, "level " + p.level + ": " + what);
  };
  if (p.banks.is_negative() || p.opinions.is_negative()) bad("negative count");
  if (p.costSimpleDays.is_negative()) bad("negative simple-review cost");
  if (p.costComplexDays < p.costSimpleDays) bad("complex-review cost below simple-review cost");
}

}  // namespace

std::vector<LevelParams> reference_levels() {
  auto level = [](std::string name, std::int64_t banks, const char* reviewed) {
    return LevelParams{std::move(name), Decimal(banks), Decimal(300), Decimal::parse(reviewed),
                       Decimal::parse("0.5"), Decimal(2), Decimal::parse("0.25")};
  };
  return {level("1", 20, "0.8"), level("2", 56, "0.4"), level("3", 162, "0.1"),
          level("4", 649, "0.05")};
}

CostReport total_cost(std::span<const LevelParams> levels, std::optional<Decimal> dayRate) {
  if (levels.empty()) throw Error(ErrorCode::InvalidParameters, "no levels given");
  CostReport r;
  for (const auto& p : levels) {
    check(p);
    LevelCost c;
    c.level = p.level;
    c.reviews = p.banks * p.opinions * p.reviewed;
    c.perReviewDays = p.complex * p.costComplexDays + (Decimal(1) - p.complex) * p.costSimpleDays;
    c.days = c.reviews * c.perReviewDays;
    r.reviewsTotal += c.reviews;
    r.totalDays += c.days;
    r.levels.push_back(std::move(c));
  }
  if (dayRate) {
    if (dayRate->is_negative()) throw Error(ErrorCode::InvalidParameters, "negative day rate");
    r.dayRate = dayRate;
    r.monetized = r.totalDays * *dayRate;
  }
  return r;
}

Decimal CostReport::share_percent(const std::string& level, int digits) const {
  for (const auto& l : levels)
    if (l.level == level)
      return totalDays.is_zero() ? Decimal(0)
                                 : Decimal::divide(l.days * Decimal(100), totalDays, digits);
  throw Error(ErrorCode::InvalidParameters, "no level '" + level + "'");
}

std::string format_table(const CostReport& report) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-8s %12s %14s %14s %8s\n", "LEVEL", "REVIEWS",
                "DAYS/REVIEW", "DAYS", "SHARE");
  out << line;
  for (const auto& l : report.levels) {
    std::string share = report.share_percent(l.level).fixed(2) + "%";
    std::snprintf(line, sizeof line, "%-8s %12s %14s %14s %8s\n", l.level.c_str(),
                  l.reviews.str().c_str(), l.perReviewDays.str().c_str(),
                  l.days.fixed(2).c_str(), share.c_str());
    out << line;
  }
  if (report.monetized)
    out << "COST " << report.monetized->fixed(2) << " at " << report.dayRate->str()
        << " per day\n";
  out << "TOTAL " << report.reviewsTotal.str() << " reviews, " << report.totalDays.fixed(2)
      << " days\n";
  return out.str();
}

}  // namespace netting::cost
