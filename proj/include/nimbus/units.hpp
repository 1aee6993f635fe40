#pragma once

namespace nimbus {

/// Simulated time, fractional milliseconds.
using Millis = double;

inline constexpr Millis kMsPerHour = 3.6e6;
inline constexpr int kHoursPerDay = 24;

}  // namespace nimbus
