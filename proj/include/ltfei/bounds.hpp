#pragma once

// Influence lower bounds for threshold functions and the probability
// estimates behind them. Everything here is a closed-form evaluator; the
// exact quantities they are checked against live in rademacher.hpp and ltf.hpp.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ltfei/distributions.hpp"
#include "ltfei/errors.hpp"
#include "ltfei/ltf.hpp"
#include "ltfei/normal.hpp"
#include "ltfei/rademacher.hpp"

namespace ltfei {

/// Coefficients of the Berry-Esseen error l/sqrt(2 pi) + 3.4106 l^(4/3) for
/// symmetric Bernoulli sums. Overridable so checks can be run against
/// deliberately broken bounds.
struct BerryEsseenConstants {
  double linear = kInvSqrt2Pi;
  double power = 3.4106;
};

struct SideCondition {
  std::string condition;
  bool satisfied = false;
};

struct BoundReport {
  std::string name;
  double value = 0.0;
  std::vector<SideCondition> side_conditions;
  std::map<std::string, double> parameters;

  /// Influences are nonnegative, so a negative bound carries no information.
  [[nodiscard]] double clamped() const noexcept { return std::max(0.0, value); }
  [[nodiscard]] bool nonvacuous() const noexcept { return value > 0.0; }

  [[nodiscard]] bool condition(const std::string& name_) const {
    for (const auto& c : side_conditions) {
      if (c.condition == name_) return c.satisfied;
    }
    throw ValidationError("bound report has no side condition \"" + name_ + "\"");
  }

  [[nodiscard]] nlohmann::json to_json() const {
    nlohmann::json conds = nlohmann::json::array();
    for (const auto& c : side_conditions) conds.push_back({{"condition", c.condition}, {"satisfied", c.satisfied}});
    return {{"name", name}, {"value", value}, {"clamped", clamped()}, {"side_conditions", conds},
            {"parameters", parameters}};
  }
};

namespace detail {

inline void require_finite(const BoundReport& r) {
  if (!std::isfinite(r.value)) throw ValidationError("bound \"" + r.name + "\" evaluated to a non-finite value");
}

struct PowerSums {
  double squares = 0.0;  // sum a_j^2
  double cubes = 0.0;    // sum |a_j|^3
  std::size_t count = 0;
};

inline PowerSums power_sums(std::span<const double> a) {
  PowerSums s;
  s.count = a.size();
  for (double v : a) {
    const double m = std::fabs(v);
    s.squares += m * m;
    s.cubes += m * m * m;
  }
  return s;
}

/// Lyapunov ratio sum|a|^3 / (sum a^2)^(3/2), scale-free evaluation.
inline double lyapunov_ratio(std::span<const double> a) {
  double scale = 0.0;
  for (double v : a) scale = std::fmax(scale, std::fabs(v));
  require(scale > 0.0, "weights must not all be zero");
  double sq = 0.0;
  double cu = 0.0;
  for (double v : a) {
    const double m = std::fabs(v) / scale;
    sq += m * m;
    cu += m * m * m;
  }
  return cu / std::pow(sq, 1.5);
}

/// Terms of the interval lower bound expressed through the power sums of the
/// summands: variance V = sum a^2, Lyapunov ratio L.
struct IntervalTerms {
  double linear = 0.0;        // alpha / sqrt(2 pi V) - c_lin * L
  double cubic = 0.0;         // -alpha^3 / (6 sqrt(2 pi) V^(3/2))
  double berry_esseen = 0.0;  // -c_pow * L^(4/3)
};

inline IntervalTerms interval_terms(double alpha, double variance, double lyapunov,
                                    const BerryEsseenConstants& c) {
  IntervalTerms t;
  const double sd = std::sqrt(variance);
  t.linear = kInvSqrt2Pi * alpha / sd - c.linear * lyapunov;
  t.cubic = -kInvSqrt2Pi * alpha * alpha * alpha / (6.0 * variance * sd);
  t.berry_esseen = -c.power * std::pow(lyapunov, 4.0 / 3.0);
  return t;
}

}  // namespace detail

/// inf(f) >= sqrt(sum_{i=0}^n w_i^2) / (2 sqrt(2) max_i |w_i|) - 1.
inline BoundReport khintchine_lower_bound(std::span<const double> weights) {
  const double mnw = max_normalized_weight(weights);  // throws on the zero vector
  BoundReport r;
  r.name = "khintchine";
  r.value = 1.0 / (2.0 * std::numbers::sqrt2 * mnw) - 1.0;
  double max_abs = 0.0;
  for (double w : weights) max_abs = std::fmax(max_abs, std::fabs(w));
  r.parameters = {{"l2_norm", detail::l2_norm(weights)}, {"max_abs_weight", max_abs}, {"max_normalized_weight", mnw}};
  r.side_conditions = {{"nonvacuous", r.value > 0.0}};
  detail::require_finite(r);
  return r;
}

struct KhintchineCheck {
  double expectation = 0.0;  ///< E_x |sum w_i x_i|, exact enumeration
  double l2_norm = 0.0;
  double bound = 0.0;        ///< ||w||_2 / sqrt(2)
  bool holds = false;        ///< expectation >= bound up to 1e-12 relative
};

/// Khintchine's inequality E|sum w_i x_i| >= ||w||_2 / sqrt(2), checked by enumeration.
inline KhintchineCheck khintchine_expectation_check(std::span<const double> weights,
                                                    unsigned max_terms = kDefaultMaxArity) {
  if (weights.size() > max_terms) throw ArityError("too many weights for exact expectation");
  KhintchineCheck c;
  c.l2_norm = detail::l2_norm(weights);
  detail::require(c.l2_norm > 0.0, "weights must not all be zero");
  c.expectation = rademacher_abs_mean(weights);
  c.bound = c.l2_norm / std::numbers::sqrt2;
  c.holds = c.expectation >= c.bound - 1e-12 * c.l2_norm;
  return c;
}

struct BerryEsseenError {
  double bound = 0.0;
  double lyapunov_ratio = 0.0;
};

/// sup_x |Pr[S/||a|| < x] - Phi(x)| <= l/sqrt(2 pi) + 3.4106 l^(4/3),
/// l = sum|a_j|^3 / (sum a_j^2)^(3/2), for S = sum_j a_j x_j.
inline BerryEsseenError shevtsova_error(std::span<const double> a, const BerryEsseenConstants& c = {}) {
  BerryEsseenError e;
  e.lyapunov_ratio = detail::lyapunov_ratio(a);
  e.bound = c.linear * e.lyapunov_ratio + c.power * std::pow(e.lyapunov_ratio, 4.0 / 3.0);
  return e;
}

/// Lower bound on (1/2) Pr[|sum_j a_j x_j| <= alpha] for the m = |a| summands
/// a (the weights other than coordinate i):
///   (alpha - A/B) / sqrt(2 pi m B) - alpha^3 / (6 sqrt(2 pi) (m B)^(3/2))
///   - 3.4106 A^(4/3) / (m^(2/3) B^2),
/// with A = sum|a|^3 / m and B = sum a^2 / m. The second term comes from
/// Phi(x) - 1/2 >= (x - x^3/6) / sqrt(2 pi).
inline BoundReport interval_probability_lb(std::span<const double> others, double alpha,
                                           const BerryEsseenConstants& c = {}) {
  detail::require(alpha > 0.0, "alpha must be positive");
  detail::require(!others.empty(), "need at least one other weight");
  const auto sums = detail::power_sums(others);
  detail::require(sums.squares > 0.0, "other weights must not all be zero");
  const double m = static_cast<double>(sums.count);
  const double lyap = detail::lyapunov_ratio(others);
  const auto t = detail::interval_terms(alpha, sums.squares, lyap, c);

  BoundReport r;
  r.name = "interval_probability";
  r.value = t.linear + t.cubic + t.berry_esseen;
  r.parameters = {{"alpha", alpha},
                  {"m", m},
                  {"A", sums.cubes / m},
                  {"B", sums.squares / m},
                  {"A_over_B", sums.cubes / sums.squares},
                  {"lyapunov_ratio", lyap},
                  {"term_linear", t.linear},
                  {"term_cubic", t.cubic},
                  {"term_berry_esseen", t.berry_esseen}};
  r.side_conditions = {{"alpha_exceeds_A_over_B", alpha > sums.cubes / sums.squares},
                       {"nonvacuous", r.value > 0.0}};
  detail::require_finite(r);
  return r;
}

/// Which weights enter A_i and B_i of the per-coordinate bound.
enum class IndexConvention {
  all_weights,       ///< j in {0..n} \ {i} (threshold included), divided by n - 1
  coordinates_only,  ///< j in {1..n} \ {i}, divided by n - 1; a proven bound when w_0 = 0
};

inline std::string to_string(IndexConvention c) {
  return c == IndexConvention::all_weights ? "all_weights" : "coordinates_only";
}

/// The summands entering coordinate i's bound under the given convention.
inline std::vector<double> convention_weights(std::span<const double> weights, unsigned i, IndexConvention conv) {
  std::vector<double> out;
  out.reserve(weights.size());
  for (std::size_t j = conv == IndexConvention::all_weights ? 0 : 1; j < weights.size(); ++j) {
    if (j != i) out.push_back(weights[j]);
  }
  return out;
}

/// inf_i(f) >= (|w_i| - A_i/B_i) / (2 sqrt(2 pi (n-1) B_i))
///             - |w_i|^3 / (6 sqrt(2 pi) ((n-1) B_i)^(3/2))
///             - 3.4106 A_i^(4/3) / ((n-1)^(2/3) B_i^2).
///
/// Compared with interval_probability_lb at alpha = |w_i| over the same
/// summands, only the first term is halved. The value depends on the
/// summands only through their power sums, so the n - 1 divisor cancels.
inline BoundReport per_coordinate_lb(std::span<const double> weights, unsigned i, IndexConvention conv,
                                     const BerryEsseenConstants& c = {}) {
  detail::require(weights.size() >= 3, "per-coordinate bound needs n >= 2");
  detail::require(i >= 1 && i < weights.size(), "coordinate index out of range");
  const auto others = convention_weights(weights, i, conv);
  const auto sums = detail::power_sums(others);
  if (!(sums.squares > 0.0)) throw ValidationError("B_i = 0: every other weight is zero");
  const double n_minus_1 = static_cast<double>(weights.size() - 2);
  const double wi = std::fabs(weights[i]);
  const double lyap = detail::lyapunov_ratio(others);

  BoundReport r;
  r.name = "per_coordinate_" + to_string(conv);
  const auto t = detail::interval_terms(wi, sums.squares, lyap, c);
  r.value = 0.5 * t.linear + t.cubic + t.berry_esseen;
  r.parameters["term_half_linear"] = 0.5 * t.linear;
  r.parameters["term_cubic"] = t.cubic;
  r.parameters["term_berry_esseen"] = t.berry_esseen;
  r.parameters["abs_w_i"] = wi;
  r.parameters["A_i"] = sums.cubes / n_minus_1;
  r.parameters["B_i"] = sums.squares / n_minus_1;
  r.parameters["A_over_B"] = sums.cubes / sums.squares;
  r.parameters["lyapunov_ratio"] = lyap;
  r.parameters["i"] = static_cast<double>(i);
  r.side_conditions = {{"first_term_positive", wi > sums.cubes / sums.squares},
                       {"threshold_zero", weights[0] == 0.0 || conv == IndexConvention::all_weights},
                       {"nonvacuous", r.value > 0.0}};
  detail::require_finite(r);
  return r;
}

/// Sum over i of the clamped per-coordinate bounds, from shared power sums so
/// the cost is O(n). Coordinates whose other weights are all zero, and LTFs
/// with n < 2, have no bound and contribute 0.
inline double sum_clamped_per_coordinate_lb(std::span<const double> weights, IndexConvention conv,
                                            const BerryEsseenConstants& c = {}) {
  if (weights.size() < 3) return 0.0;
  double scale = 0.0;
  for (double w : weights) scale = std::fmax(scale, std::fabs(w));
  if (scale == 0.0) return 0.0;
  const std::size_t first = conv == IndexConvention::all_weights ? 0 : 1;
  long double sq = 0.0L;
  long double cu = 0.0L;
  for (std::size_t j = first; j < weights.size(); ++j) {
    const long double m = std::fabs(weights[j]) / scale;
    sq += m * m;
    cu += m * m * m;
  }
  double total = 0.0;
  for (std::size_t i = 1; i < weights.size(); ++i) {
    const long double m = std::fabs(weights[i]) / scale;
    const double osq = static_cast<double>(sq - m * m);
    const double ocu = static_cast<double>(cu - m * m * m);
    if (!(osq > 0.0)) continue;
    const double lyap = ocu / std::pow(osq, 1.5);
    const double wi = static_cast<double>(m);
    const auto t = detail::interval_terms(wi, osq, lyap, c);
    total += std::max(0.0, 0.5 * t.linear + t.cubic + t.berry_esseen);
  }
  return total;
}

/// theta = (alpha - mu3 (1 + 2 delta / (1 - delta))) / sqrt(2 pi (1 + delta)).
inline double theta(double alpha, double delta, double mu3) {
  detail::require(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
  return (alpha - mu3 * (1.0 + 2.0 * delta / (1.0 - delta))) / std::sqrt(2.0 * std::numbers::pi * (1.0 + delta));
}

/// alpha = mu3 (2 + 2 delta / (1 - delta)), one unit of mu3 beyond theta's zero.
inline double mu3_margin_alpha(double mu3, double delta) {
  detail::require(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
  return mu3 * (2.0 + 2.0 * delta / (1.0 - delta));
}

/// Influence lower bound for a homogeneous LTF on n coordinates whose
/// weights are i.i.d. draws of the standardized law `d`.
///
/// On the event that (1-delta)(n-1) <= sum_{j!=i} w_j^2 <= (1+delta)(n-1) and
/// sum_{j!=i} |w_j|^3 <= (1+delta) mu3 (n-1), every coordinate with
/// |w_i| >= alpha satisfies
///   inf_i >= theta/sqrt(n) - alpha^3 / (6 sqrt(2 pi) ((1-delta)(n-1))^(3/2))
///            - 3.4106 ((1+delta) mu3)^(4/3) / ((n-1)^(2/3) (1-delta)^2)  =: margin.
/// With at least (n/2) p_{D,1}(alpha) such coordinates the bound is
/// (n/2) p margin. `value` is that bound; `asymptotic_form` is p theta sqrt(n).
/// The success probability is 1 - e^{-delta^2 n mu3^2 / sigma3}
/// - 2 e^{-delta^2 n / sigma2} - 2 e^{-(n/4) p^2}.
inline BoundReport lb_random_certificate(const WeightDistribution& d, std::uint64_t n, double alpha, double delta,
                                         const BerryEsseenConstants& c = {}) {
  detail::require(n >= 2, "certificate needs n >= 2");
  detail::require(alpha > 0.0, "alpha must be positive");
  const Moments mom = d.moments();
  const double th = theta(alpha, delta, mom.mu3);
  const double p = d.tail_ge(alpha);
  const double nd = static_cast<double>(n);
  const double n1 = nd - 1.0;

  const double lead = th / std::sqrt(nd);
  const double cubic = kInvSqrt2Pi * alpha * alpha * alpha / (6.0 * std::pow((1.0 - delta) * n1, 1.5));
  const double be =
      c.power * std::pow((1.0 + delta) * mom.mu3, 4.0 / 3.0) / (std::pow(n1, 2.0 / 3.0) * (1.0 - delta) * (1.0 - delta));
  const double margin = lead - cubic - be;

  const double fail_cubes = std::exp(-delta * delta * nd * mom.mu3 * mom.mu3 / mom.sigma3);
  const double fail_squares = 2.0 * std::exp(-delta * delta * nd / mom.sigma2);
  const double fail_count = 2.0 * std::exp(-(nd / 4.0) * p * p);
  const double success = 1.0 - fail_cubes - fail_squares - fail_count;

  BoundReport r;
  r.name = "random_ltf_certificate";
  r.value = 0.5 * nd * p * margin;
  r.parameters = {{"n", nd},
                  {"alpha", alpha},
                  {"delta", delta},
                  {"mu3", mom.mu3},
                  {"sigma2", mom.sigma2},
                  {"sigma3", mom.sigma3},
                  {"theta", th},
                  {"tail_mass", p},
                  {"min_large_coordinates", 0.5 * nd * p},
                  {"margin_leading", lead},
                  {"margin_cubic", -cubic},
                  {"margin_berry_esseen", -be},
                  {"margin", margin},
                  {"asymptotic_form", p * th * std::sqrt(nd)},
                  {"failure_cubes", fail_cubes},
                  {"failure_squares", fail_squares},
                  {"failure_count", fail_count},
                  {"success_probability", success}};
  r.side_conditions = {{"theta_positive", th > 0.0},
                       {"tail_mass_positive", p > 0.0},
                       {"margin_positive", margin > 0.0},
                       {"success_probability_positive", success > 0.0},
                       {"nonvacuous", r.value > 0.0}};
  detail::require_finite(r);
  return r;
}

struct CountInterval {
  double lo = 0.0;
  double hi = 0.0;
  double probability = 0.0;  ///< lower bound on Pr[lo <= X <= hi]
};

/// For X ~ Bin(n, p): Pr[np/2 <= X <= 3np/2] >= 1 - 2 e^{-n p^2 / 4}.
inline CountInterval chernoff_count_interval(std::uint64_t n, double p) {
  detail::require(n >= 1, "n must be at least 1");
  detail::require(p > 0.0 && p <= 1.0, "p must lie in (0, 1]");
  const double nd = static_cast<double>(n);
  return {0.5 * nd * p, 1.5 * nd * p, 1.0 - 2.0 * std::exp(-0.25 * nd * p * p)};
}

struct BernsteinEvents {
  bool squares_ok = false;  ///< (1-delta) m <= sum w^2 <= (1+delta) m
  bool cubes_ok = false;    ///< sum |w|^3 <= (1+delta) mu3 m
  bool ratio_ok = false;    ///< A/B <= (1 + 2 delta/(1-delta)) mu3
};

/// Concentration events on a concrete sample of m = |weights| standardized weights.
inline BernsteinEvents bernstein_event_check(std::span<const double> weights, double delta, double mu3) {
  detail::require(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
  detail::require(!weights.empty(), "need at least one weight");
  const auto s = detail::power_sums(weights);
  const double m = static_cast<double>(s.count);
  BernsteinEvents e;
  e.squares_ok = (1.0 - delta) * m <= s.squares && s.squares <= (1.0 + delta) * m;
  e.cubes_ok = s.cubes <= (1.0 + delta) * mu3 * m;
  e.ratio_ok = s.squares > 0.0 && s.cubes / s.squares <= (1.0 + 2.0 * delta / (1.0 - delta)) * mu3;
  return e;
}

/// H(f) <= C sqrt(n) for every LTF; C is an input, not a known constant.
inline double entropy_upper_bound(std::uint64_t n, double C) {
  detail::require(C > 0.0, "C must be positive");
  return C * std::sqrt(static_cast<double>(n));
}

}  // namespace ltfei
