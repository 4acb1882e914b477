#include "netting/exposure.hpp"

#include <limits>

#include "netting/error.hpp"

namespace netting::exposure {

namespace {

std::int64_t add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r))
    throw Error(ErrorCode::Overflow, "portfolio sum exceeds 64-bit range");
  return r;
}

std::int64_t negate(std::int64_t a) {
  if (a == std::numeric_limits<std::int64_t>::min())
    throw Error(ErrorCode::Overflow, "cannot negate minimum 64-bit value");
  return -a;
}

}  // namespace

ExposureReport compute_exposures(std::span<const Trade> portfolio) {
  ExposureReport r;
  if (!portfolio.empty()) r.currency = portfolio.front().currency;
  for (const auto& t : portfolio) {
    if (t.currency != r.currency)
      throw Error(ErrorCode::CurrencyMismatch,
                  "trade '" + t.id + "' is in " + t.currency + ", portfolio is " + r.currency);
    r.netValueToA = add(r.netValueToA, t.mtm);
    if (t.mtm > 0) r.grossExposureA = add(r.grossExposureA, t.mtm);
    if (t.mtm < 0) r.grossExposureB = add(r.grossExposureB, negate(t.mtm));
  }
  if (r.netValueToA > 0) r.netExposureA = r.netValueToA;
  if (r.netValueToA < 0) r.netExposureB = negate(r.netValueToA);
  return r;
}

}  // namespace netting::exposure
