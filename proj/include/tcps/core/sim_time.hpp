#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>

namespace tcps {

// Virtual clock resolution. Integer nanoseconds keep event ordering exact:
// a feedback packet due at exactly the operator's wake-up time is never
// misclassified because of floating-point accumulation.
using SimTime = std::chrono::nanoseconds;

inline SimTime from_ms(double ms) {
  return SimTime(static_cast<std::int64_t>(std::llround(ms * 1e6)));
}

inline double to_ms(SimTime t) { return static_cast<double>(t.count()) / 1e6; }

}  // namespace tcps
