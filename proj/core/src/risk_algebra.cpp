#include "netting/risk_algebra.hpp"

#include <algorithm>

#include "netting/decimal.hpp"
#include "netting/error.hpp"

namespace netting::risk {

ProbRange::ProbRange(Bp lo, Bp hi) : lo_(lo), hi_(hi) {
  if (lo < 0 || hi > kCertain || lo > hi)
    throw Error(ErrorCode::InvalidRange,
                "invalid probability range [" + std::to_string(lo) + "," + std::to_string(hi) + "]");
}

ProbRange complement(ProbRange r) { return ProbRange(kCertain - r.hi(), kCertain - r.lo()); }

std::optional<ProbRange> intersect(ProbRange a, ProbRange b) {
  Bp lo = std::max(a.lo(), b.lo());
  Bp hi = std::min(a.hi(), b.hi());
  if (lo > hi) return std::nullopt;
  return ProbRange(lo, hi);
}

LikelihoodMapping::LikelihoodMapping()
    : ranges_{ProbRange::full(), ProbRange::full(), ProbRange::full(), ProbRange::full(),
              ProbRange::full()} {}

LikelihoodMapping LikelihoodMapping::standard() {
  using cnl::Likelihood;
  LikelihoodMapping m;
  m.ranges_[std::size_t(Likelihood::UnknownWhether)] = ProbRange(0, 10000);
  m.ranges_[std::size_t(Likelihood::DefinitelyNotTheCaseThat)] = ProbRange(0, 0);
  m.ranges_[std::size_t(Likelihood::PossibleThat)] = ProbRange(100, 6400);
  m.ranges_[std::size_t(Likelihood::MoreLikelyThanNotThat)] = ProbRange(5100, 10000);
  m.ranges_[std::size_t(Likelihood::DefinitelyTheCaseThat)] = ProbRange(10000, 10000);
  return m;
}

LikelihoodMapping LikelihoodMapping::with(cnl::Likelihood l, ProbRange r) const {
  LikelihoodMapping m = *this;
  m.ranges_[std::size_t(l)] = r;
  return m;
}

ProbRange map_likelihood(cnl::Likelihood l, const LikelihoodMapping& m) { return m.at(l); }

Bp percent_to_bp(std::string_view percent) {
  Decimal d;
  try {
    d = Decimal::parse(percent);
  } catch (const Error&) {
    throw Error(ErrorCode::InvalidMapping, "not a percentage: '" + std::string(percent) + "'");
  }
  if (d.scale() > 2)
    throw Error(ErrorCode::InvalidMapping,
                "percentage has more than 2 decimal places: '" + std::string(percent) + "'");
  Decimal bp = d * Decimal(100);
  if (bp.is_negative() || bp > Decimal(kCertain))
    throw Error(ErrorCode::InvalidMapping, "percentage out of [0,100]: '" + std::string(percent) + "'");
  return Bp(bp.mantissa());
}

std::string bp_to_percent(Bp bp) { return Decimal::from_parts(bp, 2).str(); }

}  // namespace netting::risk
