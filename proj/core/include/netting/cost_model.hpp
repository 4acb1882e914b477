#pragma once

// Sector-wide annual cost of re-structuring netting opinions:
//
//   TC_d = sum over levels L of
//          banks_L * opinions_L * reviewed_L *
//          (complex_L * cost_C + (1 - complex_L) * cost_S)
//
// Everything is exact decimal arithmetic; rounding happens only on display.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "netting/decimal.hpp"

namespace netting::cost {

struct LevelParams {
  std::string level;
  Decimal banks;
  Decimal opinions;
  Decimal reviewed;  // fraction in [0,1]
  Decimal complex;   // fraction in [0,1]
  Decimal costComplexDays;
  Decimal costSimpleDays;
};

struct LevelCost {
  std::string level;
  Decimal reviews;
  Decimal perReviewDays;
  Decimal days;
};

struct CostReport {
  std::vector<LevelCost> levels;
  Decimal reviewsTotal;
  Decimal totalDays;  // TC_d
  std::optional<Decimal> dayRate;
  std::optional<Decimal> monetized;

  // Percentage of TC_d coming from `level`, rounded half-up to `digits`.
  Decimal share_percent(const std::string& level, int digits = 2) const;
};

// The published four-level US parameter set (Level 5 excluded).
// Levels 3 and 4 understate the global sector.
std::vector<LevelParams> reference_levels();

// Throws InvalidFraction for fractions outside [0,1], InvalidParameters otherwise.
CostReport total_cost(std::span<const LevelParams> levels,
                      std::optional<Decimal> dayRate = std::nullopt);

// Per-level table ending in "TOTAL <reviews> reviews, <days> days".
std::string format_table(const CostReport& report);

}  // namespace netting::cost
