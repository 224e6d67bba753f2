#pragma once

// Exact sign decisions for sums of doubles.
//
// Threshold functions compare a weighted sum against zero (or against +-|w_i|).
// Rounded evaluation can disagree with the real-valued sign when the sum sits
// within a few ulps of the threshold, and then the truth table and the
// interval form of the influence no longer match. Every comparison here is
// decided exactly: a floating-point estimate is accepted when it clears a
// rigorous forward error bound, otherwise the sum is recomputed as a
// non-overlapping floating-point expansion (two-sum chains), whose sign is the
// sign of its largest component.

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "ltfei/errors.hpp"

namespace ltfei::exact {

/// Error-free transformation: a + b == s + e exactly.
inline void two_sum(double a, double b, double& s, double& e) noexcept {
  s = a + b;
  const double bv = s - a;
  const double av = s - bv;
  e = (a - av) + (b - bv);
}

/// Accumulates doubles into an exact expansion (components increasing in
/// magnitude, non-overlapping, zeros eliminated).
class ExpansionAccumulator {
 public:
  void clear() noexcept { components_.clear(); }

  void add(double value) {
    scratch_.clear();
    double q = value;
    for (double h : components_) {
      double s, e;
      two_sum(q, h, s, e);
      if (e != 0.0) scratch_.push_back(e);
      q = s;
    }
    if (q != 0.0) scratch_.push_back(q);
    components_.swap(scratch_);
  }

  /// Sign of the exact accumulated value: -1, 0 or +1.
  [[nodiscard]] int sign() const noexcept {
    if (components_.empty()) return 0;
    return components_.back() > 0.0 ? 1 : -1;
  }

  /// Nearest-double approximation of the exact value.
  [[nodiscard]] double estimate() const noexcept {
    double s = 0.0;
    for (double c : components_) s += c;
    return s;
  }

  [[nodiscard]] std::size_t size() const noexcept { return components_.size(); }

 private:
  std::vector<double> components_;
  std::vector<double> scratch_;
};

/// Exact sign of the sum of `terms`.
inline int sign_of_sum(std::span<const double> terms) {
  ExpansionAccumulator acc;
  for (double t : terms) acc.add(t);
  return acc.sign();
}

/// Bound on |fl(sum) - sum| for any summation order over `count` terms whose
/// absolute values sum to `abs_mass`. Uses gamma_k = k u / (1 - k u) with a
/// factor-two margin; addition of doubles cannot underflow, so the bound is
/// purely relative.
inline double summation_error_bound(std::size_t count, double abs_mass) noexcept {
  constexpr double u = std::numeric_limits<double>::epsilon() / 2.0;
  const double k = static_cast<double>(count + 1);
  return 2.0 * (k * u / (1.0 - k * u)) * abs_mass * (1.0 + 4.0 * u);
}

/// All 2^m values c + sum_j a_j x_j, x_j = +1 iff bit j of the index is set.
///
/// Values are assembled from two half tables (meet in the middle), so scanning
/// every index costs one addition per index. Comparisons against a threshold
/// are exact.
class SignedSumTable {
 public:
  static constexpr unsigned kMaxTerms = 40;

  SignedSumTable(double constant, std::span<const double> weights)
      : constant_(constant), weights_(weights.begin(), weights.end()) {
    if (weights_.size() > kMaxTerms) {
      throw ArityError("signed-sum enumeration supports at most 40 terms");
    }
    const unsigned m = static_cast<unsigned>(weights_.size());
    lo_bits_ = m / 2;
    lo_ = build(constant_, std::span<const double>(weights_).first(lo_bits_));
    hi_ = build(0.0, std::span<const double>(weights_).subspan(lo_bits_));
    abs_mass_ = std::fabs(constant_);
    for (double w : weights_) abs_mass_ += std::fabs(w);
    lo_mask_ = (std::uint64_t{1} << lo_bits_) - 1;
  }

  [[nodiscard]] std::size_t terms() const noexcept { return weights_.size(); }
  [[nodiscard]] std::uint64_t size() const noexcept { return std::uint64_t{1} << weights_.size(); }

  /// Rounded value at index k.
  [[nodiscard]] double approx(std::uint64_t k) const noexcept {
    return lo_[k & lo_mask_] + hi_[k >> lo_bits_];
  }

  /// Exact sign of (c + sum_j a_j x_j(k) - t).
  [[nodiscard]] int sign_minus(std::uint64_t k, double t) const {
    const double d = approx(k) - t;
    const double bound = summation_error_bound(weights_.size() + 2, abs_mass_ + std::fabs(t));
    if (d > bound) return 1;
    if (d < -bound) return -1;
    return exact_sign_minus(k, t);
  }

  /// Number of indices whose value is <= t.
  [[nodiscard]] std::uint64_t count_le(double t) const {
    std::uint64_t count = 0;
    const std::uint64_t n = size();
    for (std::uint64_t k = 0; k < n; ++k) count += sign_minus(k, t) <= 0 ? 1 : 0;
    return count;
  }

  /// Number of indices whose value is < t.
  [[nodiscard]] std::uint64_t count_lt(double t) const {
    std::uint64_t count = 0;
    const std::uint64_t n = size();
    for (std::uint64_t k = 0; k < n; ++k) count += sign_minus(k, t) < 0 ? 1 : 0;
    return count;
  }

  /// Number of indices with lo < value <= hi (half-open on the left).
  [[nodiscard]] std::uint64_t count_in_half_open(double lo, double hi) const {
    std::uint64_t count = 0;
    const std::uint64_t n = size();
    for (std::uint64_t k = 0; k < n; ++k) {
      if (sign_minus(k, lo) > 0 && sign_minus(k, hi) <= 0) ++count;
    }
    return count;
  }

  /// For each alpha in `alphas`, the number of indices with |value| <= alpha,
  /// from a single scan.
  [[nodiscard]] std::vector<std::uint64_t> count_abs_le(std::span<const double> alphas) const {
    std::vector<std::uint64_t> counts(alphas.size(), 0);
    std::vector<double> bounds(alphas.size());
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      bounds[a] = summation_error_bound(weights_.size() + 2, abs_mass_ + std::fabs(alphas[a]));
    }
    const std::uint64_t n = size();
    for (std::uint64_t k = 0; k < n; ++k) {
      const double v = std::fabs(approx(k));
      for (std::size_t a = 0; a < alphas.size(); ++a) {
        if (v < alphas[a] - bounds[a]) {
          ++counts[a];
        } else if (v <= alphas[a] + bounds[a]) {
          if (exact_sign_minus(k, alphas[a]) <= 0 && exact_sign_minus(k, -alphas[a]) >= 0) ++counts[a];
        }
      }
    }
    return counts;
  }

 private:
  static std::vector<double> build(double start, std::span<const double> w) {
    std::vector<double> table(std::size_t{1} << w.size());
    table[0] = start;
    std::size_t filled = 1;
    for (double wj : w) {
      // entries with bit j clear take x_j = -1, with bit j set x_j = +1
      for (std::size_t k = 0; k < filled; ++k) {
        const double base = table[k];
        table[k] = base - wj;
        table[k + filled] = base + wj;
      }
      filled *= 2;
    }
    return table;
  }

  int exact_sign_minus(std::uint64_t k, double t) const {
    thread_local ExpansionAccumulator acc;
    acc.clear();
    acc.add(constant_);
    for (std::size_t j = 0; j < weights_.size(); ++j) {
      acc.add(((k >> j) & 1U) != 0 ? weights_[j] : -weights_[j]);
    }
    acc.add(-t);
    return acc.sign();
  }

  double constant_;
  std::vector<double> weights_;
  unsigned lo_bits_ = 0;
  std::uint64_t lo_mask_ = 0;
  std::vector<double> lo_;
  std::vector<double> hi_;
  double abs_mass_ = 0.0;
};

}  // namespace ltfei::exact
