#pragma once

// Exact distributional quantities of Rademacher sums sum_j a_j x_j, obtained
// by enumerating all 2^m sign patterns (or, for equal weights, from the
// binomial law). These are the measured sides of the bound checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "ltfei/errors.hpp"
#include "ltfei/exact_sum.hpp"
#include "ltfei/normal.hpp"

namespace ltfei {

/// Largest number of summands enumerated exactly.
inline constexpr unsigned kMaxEnumeratedTerms = 24;

namespace detail {

inline void require_enumerable(std::size_t m) {
  if (m > kMaxEnumeratedTerms) throw ArityError("too many summands for exact enumeration");
}

inline double l2_norm(std::span<const double> a) {
  double scale = 0.0;
  for (double v : a) scale = std::fmax(scale, std::fabs(v));
  if (scale == 0.0) return 0.0;
  double ss = 0.0;
  for (double v : a) ss += (v / scale) * (v / scale);
  return scale * std::sqrt(ss);
}

}  // namespace detail

/// E_x |sum_j a_j x_j|.
inline double rademacher_abs_mean(std::span<const double> a) {
  detail::require_enumerable(a.size());
  const exact::SignedSumTable sums(0.0, a);
  long double total = 0.0L;
  for (std::uint64_t k = 0; k < sums.size(); ++k) total += std::fabs(sums.approx(k));
  return static_cast<double>(total / static_cast<long double>(sums.size()));
}

/// Pr_x[|sum_j a_j x_j| <= alpha], exact.
inline double rademacher_interval_probability(std::span<const double> a, double alpha) {
  detail::require_enumerable(a.size());
  detail::require(alpha >= 0.0, "alpha must be nonnegative");
  const exact::SignedSumTable sums(0.0, a);
  const std::uint64_t hits = sums.count_le(alpha) - sums.count_lt(-alpha);
  return static_cast<double>(hits) / static_cast<double>(sums.size());
}

/// sup_x |Pr[sum_j a_j x_j / ||a||_2 < x] - Phi(x)|, exact over all atoms
/// (both one-sided limits of the step CDF are compared at every atom).
inline double rademacher_cdf_sup_distance(std::span<const double> a) {
  detail::require_enumerable(a.size());
  const double norm = detail::l2_norm(a);
  detail::require(norm > 0.0, "weights must not all be zero");
  const exact::SignedSumTable sums(0.0, a);
  std::vector<double> z(sums.size());
  for (std::uint64_t k = 0; k < sums.size(); ++k) z[k] = sums.approx(k);
  std::sort(z.begin(), z.end());
  const double total = static_cast<double>(z.size());
  double worst = 0.0;
  std::size_t k = 0;
  while (k < z.size()) {
    std::size_t end = k;
    while (end < z.size() && z[end] == z[k]) ++end;
    const double phi = normal_cdf(z[k] / norm);
    const double left = static_cast<double>(k) / total;
    const double right = static_cast<double>(end) / total;
    worst = std::max({worst, std::fabs(left - phi), std::fabs(right - phi)});
    k = end;
  }
  return worst;
}

/// Pr[S = s] for S = sum of m independent +-1 signs and s = 2k - m.
inline double binomial_sign_sum_pmf(std::uint64_t m, std::int64_t s) {
  const auto mm = static_cast<std::int64_t>(m);
  if (s < -mm || s > mm || ((s + mm) & 1) != 0) return 0.0;
  const double k = static_cast<double>((s + mm) / 2);
  const double md = static_cast<double>(m);
  const double log_p =
      std::lgamma(md + 1.0) - std::lgamma(k + 1.0) - std::lgamma(md - k + 1.0) - md * std::numbers::ln2;
  return std::exp(log_p);
}

/// Pr[lo < S <= hi] (or lo <= S when `closed_left`) for S a sum of m signs.
inline double binomial_sign_sum_interval(std::uint64_t m, double lo, double hi, bool closed_left) {
  const auto mm = static_cast<std::int64_t>(m);
  const auto first = static_cast<std::int64_t>(std::max<double>(std::ceil(lo), static_cast<double>(-mm)));
  const auto last = static_cast<std::int64_t>(std::min<double>(std::floor(hi), static_cast<double>(mm)));
  double p = 0.0;
  for (std::int64_t s = first; s <= last; ++s) {
    if (!closed_left && static_cast<double>(s) <= lo) continue;
    p += binomial_sign_sum_pmf(m, s);
  }
  return p;
}

/// sup_x |Pr[S / sqrt(m) < x] - Phi(x)| for S a sum of m independent signs,
/// checking both one-sided limits at every atom.
inline double binomial_cdf_sup_distance(std::uint64_t m) {
  detail::require(m >= 1, "need at least one summand");
  const double root = std::sqrt(static_cast<double>(m));
  const auto mm = static_cast<std::int64_t>(m);
  long double below = 0.0L;
  double worst = 0.0;
  for (std::int64_t s = -mm; s <= mm; s += 2) {
    const double phi = normal_cdf(static_cast<double>(s) / root);
    const long double above = below + binomial_sign_sum_pmf(m, s);
    worst = std::max({worst, std::fabs(static_cast<double>(below) - phi), std::fabs(static_cast<double>(above) - phi)});
    below = above;
  }
  return worst;
}

}  // namespace ltfei
