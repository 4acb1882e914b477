#pragma once

#include <cstdint>
#include <span>
#include <string>

namespace netting::exposure {

// Mark-to-market in minor currency units from party A's perspective
// (positive: in-the-money to A).
struct Trade {
  std::string id;
  std::int64_t mtm = 0;
  std::string currency;
};

struct ExposureReport {
  std::string currency;
  std::int64_t netValueToA = 0;
  std::int64_t netExposureA = 0;    // max(0, net)
  std::int64_t netExposureB = 0;    // max(0, -net)
  std::int64_t grossExposureA = 0;  // sum of positive MTMs
  std::int64_t grossExposureB = 0;  // sum of |negative MTMs|
  friend bool operator==(const ExposureReport&, const ExposureReport&) = default;
};

// Net vs gross close-out exposures. Throws CurrencyMismatch or Overflow.
ExposureReport compute_exposures(std::span<const Trade> portfolio);

}  // namespace netting::exposure
