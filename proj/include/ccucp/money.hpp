#pragma once

#include <cmath>
#include <cstdint>

namespace ccucp {

// Costs are exact fixed-point values in thousandths of a dollar, so coefficients
// like 0.125 $/MW survive arithmetic without float drift.
using Money = std::int64_t;

inline Money money_from_double(double dollars) {
  return static_cast<Money>(std::llround(dollars * 1000.0));
}

inline double money_to_double(Money m) { return static_cast<double>(m) / 1000.0; }

}  // namespace ccucp
