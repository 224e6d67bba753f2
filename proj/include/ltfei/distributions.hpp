#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <nlohmann/json.hpp>

#include "ltfei/errors.hpp"
#include "ltfei/normal.hpp"
#include "ltfei/rng.hpp"

namespace ltfei {

enum class DistributionKind { uniform, normal, truncated_normal };

inline std::string to_string(DistributionKind k) {
  switch (k) {
    case DistributionKind::uniform:
      return "uniform";
    case DistributionKind::normal:
      return "normal";
    case DistributionKind::truncated_normal:
      return "truncated_normal";
  }
  return "unknown";
}

/// Moments of the variance-1 (standardized) law, plus the raw variance.
struct Moments {
  double variance = 0.0;  ///< Var[w] of the raw distribution
  double mu3 = 0.0;       ///< E|w|^3, standardized
  double sigma2 = 0.0;    ///< StdDev(w^2), standardized
  double sigma3 = 0.0;    ///< StdDev(|w|^3), standardized
};

/// Pr[|Z| >= a] >= 2 phi(a) (1/a - 1/a^3), the Mills-ratio lower bound for N(0,1).
inline double normal_tail_lower_bound(double a) {
  detail::require(a > 0.0, "tail bound needs a > 0");
  return 2.0 * normal_pdf(a) * (1.0 / a - 1.0 / (a * a * a));
}

namespace detail {

/// Relative accuracy demanded from moment quadrature.
inline constexpr double kQuadratureTolerance = 1e-8;

/// Integral of z^r phi(z) over [0, b] by adaptive Gauss-Kronrod.
inline double half_normal_partial_moment(int r, double b) {
  double error = 0.0;
  auto integrand = [r](double z) { return std::pow(z, r) * normal_pdf(z); };
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, b, 15, 1e-14, &error);
  if (!(std::isfinite(value)) || error > kQuadratureTolerance * std::fabs(value)) {
    throw ConvergenceError("moment quadrature did not converge (r=" + std::to_string(r) + ")");
  }
  return value;
}

}  // namespace detail

/// Symmetric weight law for random LTFs: uniform on [-a, a], N(0, 1), or
/// N(0, 1) conditioned on |w| <= b. Sampling, moments and tails are offered
/// for the raw law and for its rescaling to unit variance ("standardized").
class WeightDistribution {
 public:
  static WeightDistribution uniform(double half_width = 1.0) {
    detail::require(half_width > 0.0 && std::isfinite(half_width), "uniform half-width must be positive");
    return WeightDistribution(DistributionKind::uniform, half_width);
  }
  static WeightDistribution normal() { return WeightDistribution(DistributionKind::normal, 1.0); }
  static WeightDistribution truncated_normal(double bound) {
    detail::require(bound > 0.0 && std::isfinite(bound), "truncation bound must be positive");
    return WeightDistribution(DistributionKind::truncated_normal, bound);
  }

  /// {"kind": "normal" | "uniform" | "truncated_normal", "param": real}
  static WeightDistribution from_json(const nlohmann::json& j) {
    detail::require(j.is_object() && j.contains("kind"), "distribution config needs a \"kind\"");
    const auto kind = j.at("kind").get<std::string>();
    const bool has_param = j.contains("param") && !j.at("param").is_null();
    if (kind == "normal") return normal();
    if (kind == "uniform") return uniform(has_param ? j.at("param").get<double>() : 1.0);
    if (kind == "truncated_normal") {
      detail::require(has_param, "truncated_normal requires \"param\" (the bound b)");
      return truncated_normal(j.at("param").get<double>());
    }
    throw ValidationError("unknown distribution kind \"" + kind + "\"");
  }

  [[nodiscard]] nlohmann::json to_json() const { return {{"kind", to_string(kind_)}, {"param", param_}}; }
  [[nodiscard]] std::string label() const {
    if (kind_ == DistributionKind::normal) return "normal";
    std::ostringstream os;
    os << to_string(kind_) << '(' << param_ << ')';
    return os.str();
  }

  [[nodiscard]] DistributionKind kind() const noexcept { return kind_; }
  [[nodiscard]] double param() const noexcept { return param_; }

  [[nodiscard]] double raw_variance() const noexcept { return raw_m2_; }
  /// Multiplier mapping raw draws to unit variance.
  [[nodiscard]] double standardizing_scale() const noexcept { return 1.0 / std::sqrt(raw_m2_); }

  /// E|w|^r of the raw law for r in {2, 3, 4, 6}.
  [[nodiscard]] double raw_abs_moment(int r) const {
    switch (r) {
      case 2:
        return raw_m2_;
      case 3:
        return raw_m3_;
      case 4:
        return raw_m4_;
      case 6:
        return raw_m6_;
      default:
        throw ValidationError("only absolute moments 2, 3, 4, 6 are tabulated");
    }
  }

  [[nodiscard]] Moments moments() const {
    Moments m;
    m.variance = raw_m2_;
    const double v = raw_m2_;
    m.mu3 = raw_m3_ / std::pow(v, 1.5);
    m.sigma2 = std::sqrt(raw_m4_ / (v * v) - 1.0);
    m.sigma3 = std::sqrt(raw_m6_ / (v * v * v) - m.mu3 * m.mu3);
    return m;
  }

  template <class Urbg>
  [[nodiscard]] double sample_raw(Urbg& g) const {
    switch (kind_) {
      case DistributionKind::uniform: {
        std::uniform_real_distribution<double> u(-param_, param_);
        return u(g);
      }
      case DistributionKind::normal: {
        std::normal_distribution<double> z;
        return z(g);
      }
      case DistributionKind::truncated_normal: {
        std::normal_distribution<double> z;
        for (;;) {
          const double v = z(g);
          if (std::fabs(v) <= param_) return v;
        }
      }
    }
    return 0.0;
  }

  template <class Urbg>
  [[nodiscard]] double sample_standardized(Urbg& g) const {
    return sample_raw(g) * standardizing_scale();
  }

  /// `count` independent draws, deterministic in the stream state.
  template <class Urbg>
  [[nodiscard]] std::vector<double> sample(Urbg& g, std::size_t count, bool standardized = true) const {
    detail::require(count >= 1, "sample count must be at least 1");
    std::vector<double> out(count);
    for (double& v : out) v = standardized ? sample_standardized(g) : sample_raw(g);
    return out;
  }

  /// p_{D,1}(alpha) = Pr[|w| >= alpha] under the standardized law.
  [[nodiscard]] double tail_ge(double alpha) const {
    detail::require(alpha >= 0.0, "alpha must be nonnegative");
    if (alpha == 0.0) return 1.0;
    const double t = alpha / standardizing_scale();  // raw threshold
    switch (kind_) {
      case DistributionKind::uniform:
        return t >= param_ ? 0.0 : 1.0 - t / param_;
      case DistributionKind::normal:
        return normal_two_sided_tail(t);
      case DistributionKind::truncated_normal: {
        if (t >= param_) return 0.0;
        const double outside = normal_two_sided_tail(param_);
        return (normal_two_sided_tail(t) - outside) / (1.0 - outside);
      }
    }
    return 0.0;
  }

  /// p_{D,n}(alpha) = Pr[max_{i<=n} |w_i| >= alpha] = 1 - (1 - p_{D,1}(alpha))^n.
  [[nodiscard]] double p_max_ge(std::uint64_t n, double alpha) const {
    detail::require(n >= 1, "n must be at least 1");
    const double p = tail_ge(alpha);
    if (p >= 1.0) return 1.0;
    return -std::expm1(static_cast<double>(n) * std::log1p(-p));
  }

 private:
  WeightDistribution(DistributionKind kind, double param) : kind_(kind), param_(param) {
    switch (kind_) {
      case DistributionKind::uniform: {
        // E|w|^r = a^r / (r + 1) on [-a, a]
        const double a = param_;
        raw_m2_ = a * a / 3.0;
        raw_m3_ = a * a * a / 4.0;
        raw_m4_ = std::pow(a, 4) / 5.0;
        raw_m6_ = std::pow(a, 6) / 7.0;
        break;
      }
      case DistributionKind::normal:
        // E|Z|^r = sqrt(2/pi) (r-1)!! for odd r, (r-1)!! for even r
        raw_m2_ = 1.0;
        raw_m3_ = 2.0 * std::sqrt(2.0 / std::numbers::pi);
        raw_m4_ = 3.0;
        raw_m6_ = 15.0;
        break;
      case DistributionKind::truncated_normal: {
        const double mass = detail::half_normal_partial_moment(0, param_);
        raw_m2_ = detail::half_normal_partial_moment(2, param_) / mass;
        raw_m3_ = detail::half_normal_partial_moment(3, param_) / mass;
        raw_m4_ = detail::half_normal_partial_moment(4, param_) / mass;
        raw_m6_ = detail::half_normal_partial_moment(6, param_) / mass;
        break;
      }
    }
  }

  DistributionKind kind_;
  double param_;
  double raw_m2_ = 1.0;
  double raw_m3_ = 0.0;
  double raw_m4_ = 0.0;
  double raw_m6_ = 0.0;
};

}  // namespace ltfei
