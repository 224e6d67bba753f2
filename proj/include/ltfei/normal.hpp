#pragma once

#include <cmath>
#include <numbers>

namespace ltfei {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;  // 1/sqrt(2 pi)

/// Standard normal density.
inline double normal_pdf(double x) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

/// Standard normal CDF through erfc, accurate in both tails.
inline double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Pr[|Z| >= a] for Z ~ N(0,1), a >= 0.
inline double normal_two_sided_tail(double a) noexcept { return std::erfc(a / std::numbers::sqrt2); }

}  // namespace ltfei
