#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "netting/cnl.hpp"

namespace netting::risk {

// Probabilities are integer basis points: 10000 bp = 100%.
using Bp = std::int32_t;
inline constexpr Bp kCertain = 10000;

// Closed interval [lo, hi] of probability in basis points.
class ProbRange {
 public:
  // Throws InvalidRange unless 0 <= lo <= hi <= 10000.
  ProbRange(Bp lo, Bp hi);
  static ProbRange full() { return ProbRange(0, kCertain); }

  Bp lo() const { return lo_; }
  Bp hi() const { return hi_; }
  Bp width() const { return hi_ - lo_; }

  friend bool operator==(const ProbRange&, const ProbRange&) = default;

 private:
  Bp lo_;
  Bp hi_;
};

// Probability range of the opposite event: [10000 - hi, 10000 - lo].
ProbRange complement(ProbRange r);

// Empty (nullopt) when the ranges are disjoint.
std::optional<ProbRange> intersect(ProbRange a, ProbRange b);

// Institution-owned total map from likelihood to probability range.
class LikelihoodMapping {
 public:
  // 0-100, 0-0, 1-64, 51-100, 100-100 percent.
  static LikelihoodMapping standard();

  ProbRange at(cnl::Likelihood l) const { return ranges_[std::size_t(l)]; }
  LikelihoodMapping with(cnl::Likelihood l, ProbRange r) const;

  friend bool operator==(const LikelihoodMapping&, const LikelihoodMapping&) = default;

 private:
  LikelihoodMapping();
  std::array<ProbRange, 5> ranges_;
};

ProbRange map_likelihood(cnl::Likelihood l, const LikelihoodMapping& m);

// "64", "0.5", "51.25" -> bp. At most two fractional digits, 0..100; else InvalidMapping.
Bp percent_to_bp(std::string_view percent);
// Shortest exact percent text: 100 -> "1", 50 -> "0.5", 7450 -> "74.5".
std::string bp_to_percent(Bp bp);

}  // namespace netting::risk
