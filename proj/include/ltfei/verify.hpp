#pragma once

// Soundness suite: every closed-form bound is compared with the exact
// quantity it claims to bound, on random LTFs small enough to enumerate and
// on equal-weight families whose exact values follow from the binomial law.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ltfei/bounds.hpp"
#include "ltfei/errors.hpp"
#include "ltfei/ltf.hpp"
#include "ltfei/rademacher.hpp"
#include "ltfei/rng.hpp"
#include "ltfei/spectrum.hpp"

namespace ltfei {

/// Slack allowed when a bound is compared with an exact value.
inline constexpr double kSoundnessTolerance = 1e-9;

/// Tally of one inequality lhs <= rhs over many cases.
struct CheckResult {
  std::string name;
  std::string lhs_name;
  std::string rhs_name;
  std::uint64_t cases = 0;
  std::uint64_t violations = 0;
  std::uint64_t nonvacuous = 0;                                ///< cases whose lower bound is positive
  double min_slack = std::numeric_limits<double>::infinity();  ///< min of (rhs - lhs)
  nlohmann::json counterexample;                               ///< first violation, if any

  explicit CheckResult(std::string name_, std::string lhs = "bound", std::string rhs = "exact")
      : name(std::move(name_)), lhs_name(std::move(lhs)), rhs_name(std::move(rhs)) {}

  [[nodiscard]] bool passed() const noexcept { return violations == 0; }

  /// Records lhs <= rhs up to `tol`; `describe` builds the counterexample
  /// for the first failure.
  template <class Describe>
  void observe(double lhs, double rhs, double tol, Describe&& describe, bool informative) {
    ++cases;
    if (informative) ++nonvacuous;
    const double slack = rhs - lhs;
    min_slack = std::min(min_slack, slack);
    if (!(slack >= -tol)) {
      if (violations == 0) {
        counterexample = describe();
        counterexample[lhs_name] = lhs;
        counterexample[rhs_name] = rhs;
      }
      ++violations;
    }
  }

  /// A lower bound checked against the exact value it bounds.
  template <class Describe>
  void observe_lower(double bound, double exact, double tol, Describe&& describe) {
    observe(bound, exact, tol, std::forward<Describe>(describe), bound > 0.0);
  }

  void merge(const CheckResult& other) {
    if (violations == 0 && other.violations > 0) counterexample = other.counterexample;
    cases += other.cases;
    violations += other.violations;
    nonvacuous += other.nonvacuous;
    min_slack = std::min(min_slack, other.min_slack);
  }

  [[nodiscard]] nlohmann::json to_json() const {
    nlohmann::json j = {{"name", name},
                        {"cases", cases},
                        {"violations", violations},
                        {"relation", lhs_name + " <= " + rhs_name},
                        {"nonvacuous", nonvacuous},
                        {"min_slack", cases ? nlohmann::json(min_slack) : nlohmann::json(nullptr)},
                        {"passed", passed()}};
    if (!passed()) j["counterexample"] = counterexample;
    return j;
  }
};

struct VerifyOptions {
  std::uint64_t trials = 300;
  std::uint64_t seed = 1;
  unsigned n_max = 16;
  BerryEsseenConstants constants;
  bool large_scale = true;
};

struct VerifyReport {
  std::vector<CheckResult> checks;

  [[nodiscard]] bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed(); });
  }
  [[nodiscard]] const CheckResult& check(const std::string& name) const {
    for (const auto& c : checks) {
      if (c.name == name) return c;
    }
    throw ValidationError("no check named \"" + name + "\"");
  }
  [[nodiscard]] nlohmann::json to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks) arr.push_back(c.to_json());
    return {{"passed", passed()}, {"checks", arr}};
  }
};

enum class WeightStyle { gaussian, small_integers, homogeneous_gaussian };

/// A random test LTF on n coordinates. Small integer weights make zero sums
/// (ties) common.
inline Ltf random_test_ltf(CounterStream& s, unsigned n, WeightStyle style) {
  std::vector<double> w(n + 1);
  std::normal_distribution<double> z;
  for (unsigned j = 0; j <= n; ++j) {
    if (style == WeightStyle::small_integers) {
      w[j] = static_cast<double>(static_cast<int>(s() % 7) - 3);
    } else {
      w[j] = z(s);
    }
  }
  if (style == WeightStyle::homogeneous_gaussian) w[0] = 0.0;
  if (std::all_of(w.begin() + 1, w.end(), [](double v) { return v == 0.0; })) w[1] = 1.0;
  return Ltf(std::move(w));
}

namespace detail {

inline nlohmann::json describe(const Ltf& f, unsigned i = 0, double alpha = 0.0) {
  nlohmann::json j = {{"weights", f.weights()}};
  if (i) j["i"] = i;
  if (alpha > 0.0) j["alpha"] = alpha;
  return j;
}

inline unsigned draw_arity(CounterStream& s, unsigned lo, unsigned hi) {
  return lo + static_cast<unsigned>(s() % (hi - lo + 1));
}

}  // namespace detail

/// Multipliers of the root-mean-square weight forming the fixed alpha grid.
inline constexpr double kAlphaGrid[] = {0.25, 0.5, 1.0, 2.0, 4.0};

/// Khintchine-type total bound, per-coordinate bounds under both index
/// conventions, and the interval bound, checked on `trials` random LTFs with
/// 2 <= n <= n_max. Styles cycle through gaussian, tied integer, and
/// homogeneous gaussian weights.
inline std::vector<CheckResult> check_random_ltf_bounds(std::uint64_t trials, unsigned n_max, std::uint64_t seed,
                                                        const BerryEsseenConstants& c = {}) {
  detail::require(n_max >= 2 && n_max <= 20, "n_max must lie in [2, 20]");
  CheckResult kh{"khintchine_total"};
  CheckResult all{"per_coordinate_all_weights"};
  CheckResult coords{"per_coordinate_coordinates_only"};
  CheckResult interval{"interval_probability"};
  for (std::uint64_t t = 0; t < trials; ++t) {
    CounterStream s(derive_key(seed, {0x5A, t}));
    const auto style = static_cast<WeightStyle>(t % 3);
    const unsigned n = detail::draw_arity(s, 2, n_max);
    const Ltf f = random_test_ltf(s, n, style);
    const auto flips = influence_combinatorial(to_boolean_function(f, n_max));

    kh.observe_lower(khintchine_lower_bound(f.weights()).clamped(), flips.total, kSoundnessTolerance,
               [&] { return detail::describe(f); });

    for (unsigned i = 1; i <= n; ++i) {
      const double exact = flips.per_coordinate[i - 1];
      const auto others = weights_excluding(f, i);
      const bool others_zero = std::all_of(others.begin(), others.end(), [](double v) { return v == 0.0; });
      if (!(others_zero && f.threshold() == 0.0)) {
        all.observe_lower(per_coordinate_lb(f.weights(), i, IndexConvention::all_weights, c).clamped(), exact,
                    kSoundnessTolerance, [&] { return detail::describe(f, i); });
      }
      if (others_zero) continue;
      if (f.threshold() == 0.0) {
        coords.observe_lower(per_coordinate_lb(f.weights(), i, IndexConvention::coordinates_only, c).clamped(), exact,
                       kSoundnessTolerance, [&] { return detail::describe(f, i); });
      }

      const double rms = detail::l2_norm(others) / std::sqrt(static_cast<double>(others.size()));
      std::vector<double> alphas;
      if (f.weight(i) != 0.0) alphas.push_back(std::fabs(f.weight(i)));
      for (double g : kAlphaGrid) alphas.push_back(g * rms);
      const exact::SignedSumTable sums(0.0, others);
      const auto counts = sums.count_abs_le(alphas);
      for (std::size_t a = 0; a < alphas.size(); ++a) {
        const double half_prob = 0.5 * static_cast<double>(counts[a]) / static_cast<double>(sums.size());
        interval.observe_lower(interval_probability_lb(others, alphas[a], c).clamped(), half_prob, kSoundnessTolerance,
                         [&] {
                           auto j = detail::describe(f, i, alphas[a]);
                           j["summands"] = others;
                           return j;
                         });
      }
    }
  }
  return {kh, all, coords, interval};
}

/// E|sum w_i x_i| >= ||w||_2 / sqrt(2) for random unit vectors, 1 <= n <= n_max.
inline CheckResult check_khintchine_expectation(std::uint64_t trials, unsigned n_max, std::uint64_t seed) {
  detail::require(n_max >= 1 && n_max <= kMaxEnumeratedTerms, "n_max out of range");
  CheckResult r{"khintchine_expectation"};
  std::normal_distribution<double> z;
  for (std::uint64_t t = 0; t < trials; ++t) {
    CounterStream s(derive_key(seed, {0x4B, t}));
    const unsigned n = detail::draw_arity(s, 1, n_max);
    std::vector<double> w(n);
    for (double& v : w) v = z(s);
    const double norm = detail::l2_norm(w);
    if (norm == 0.0) continue;
    for (double& v : w) v /= norm;
    const auto k = khintchine_expectation_check(w, n_max);
    r.observe_lower(k.bound, k.expectation, 1e-12 * k.l2_norm, [&] { return nlohmann::json{{"weights", w}}; });
  }
  return r;
}

struct ShevtsovaCase {
  std::string kind;  ///< "equal" or "gaussian"
  unsigned n = 0;
  double distance = 0.0;
  double bound = 0.0;
};

/// Exact CDF distance against the Berry-Esseen error for equal weights and
/// `random_per_n` gaussian weight vectors at each n.
inline CheckResult check_shevtsova(std::span<const unsigned> ns, unsigned random_per_n, std::uint64_t seed,
                                   const BerryEsseenConstants& c = {}, std::vector<ShevtsovaCase>* cases = nullptr) {
  CheckResult r{"shevtsova", "distance", "bound"};
  std::normal_distribution<double> z;
  for (unsigned n : ns) {
    std::vector<std::vector<double>> vectors{std::vector<double>(n, 1.0)};
    CounterStream s(derive_key(seed, {0x53, n}));
    for (unsigned k = 0; k < random_per_n; ++k) {
      std::vector<double> a(n);
      for (double& v : a) v = z(s);
      vectors.push_back(std::move(a));
    }
    for (std::size_t v = 0; v < vectors.size(); ++v) {
      const auto& a = vectors[v];
      const double dist = rademacher_cdf_sup_distance(a);
      const double bound = shevtsova_error(a, c).bound;
      if (cases) cases->push_back({v == 0 ? "equal" : "gaussian", n, dist, bound});
      r.observe(dist, bound, kSoundnessTolerance, [&] { return nlohmann::json{{"summands", a}}; }, bound < 1.0);
    }
  }
  return r;
}

/// inf_i(g) <= 2 inf_i(f) and inf(f) >= (inf(g) - 1)/2 for g = homogenize(f),
/// on random gaussian LTFs with 1 <= n <= n_max. With tied integer weights
/// the per-coordinate inequality can fail, so they are not drawn here.
inline std::vector<CheckResult> check_homogenization(std::uint64_t trials, unsigned n_max, std::uint64_t seed) {
  detail::require(n_max >= 1 && n_max < kDefaultMaxArity, "n_max out of range");
  CheckResult per{"homogenization_per_coordinate", "inf_i(g)", "2 inf_i(f)"};
  CheckResult total{"homogenization_total", "(inf(g) - 1)/2", "inf(f)"};
  for (std::uint64_t t = 0; t < trials; ++t) {
    CounterStream s(derive_key(seed, {0x48, t}));
    const unsigned n = detail::draw_arity(s, 1, n_max);
    const Ltf f = random_test_ltf(s, n, WeightStyle::gaussian);
    const Ltf g = homogenize(f);
    const auto inf_f = influence_combinatorial(to_boolean_function(f));
    const auto inf_g = influence_combinatorial(to_boolean_function(g));
    for (unsigned i = 1; i <= n; ++i) {
      // coordinate x_i of f is coordinate i + 1 of g (x_0 comes first)
      const double gi = inf_g.per_coordinate[i];
      per.observe(gi, 2.0 * inf_f.per_coordinate[i - 1], 1e-12, [&] { return detail::describe(f, i); }, true);
    }
    total.observe((inf_g.total - 1.0) / 2.0, inf_f.total, 1e-12, [&] { return detail::describe(f); }, true);
  }
  return {per, total};
}

/// Equal-weight families far beyond enumeration, where the bounds are
/// positive. Exact values come from the binomial law of a sum of m signs.
inline std::vector<CheckResult> check_large_scale(const BerryEsseenConstants& c = {}) {
  CheckResult interval{"interval_probability_binomial"};
  CheckResult coordinate{"per_coordinate_binomial"};
  CheckResult kh{"khintchine_binomial"};
  CheckResult be{"shevtsova_binomial", "distance", "bound"};
  const std::uint64_t sizes[] = {99, 1000, 10001, 100000, 1000000};
  const double multipliers[] = {0.5, 1.0, 2.0};
  for (std::uint64_t m : sizes) {
    const double root = std::sqrt(static_cast<double>(m));
    const std::vector<double> ones(m, 1.0);
    for (double g : multipliers) {
      const double alpha = g * root;
      const double exact = 0.5 * binomial_sign_sum_interval(m, -alpha, alpha, true);
      interval.observe_lower(interval_probability_lb(ones, alpha, c).clamped(), exact, kSoundnessTolerance,
                             [&] { return nlohmann::json{{"m", m}, {"alpha", alpha}}; });

      // f = sign(K x_1 + x_2 + ... + x_{m+1}): inf_1 = Pr[-K < S_m <= K]
      std::vector<double> w(m + 2, 1.0);
      w[0] = 0.0;
      w[1] = alpha;
      const double inf1 = binomial_sign_sum_interval(m, -alpha, alpha, false);
      for (auto conv : {IndexConvention::all_weights, IndexConvention::coordinates_only}) {
        coordinate.observe_lower(per_coordinate_lb(w, 1, conv, c).clamped(), inf1, kSoundnessTolerance, [&] {
          return nlohmann::json{{"m", m}, {"K", alpha}, {"convention", to_string(conv)}};
        });
      }
    }
    // majority on m coordinates: x_i is pivotal iff the other m - 1 signs sum into (-1, 1]
    std::vector<double> maj(m + 1, 1.0);
    maj[0] = 0.0;
    const double total = static_cast<double>(m) * binomial_sign_sum_interval(m - 1, -1.0, 1.0, false);
    kh.observe_lower(khintchine_lower_bound(maj).clamped(), total, kSoundnessTolerance,
                     [&] { return nlohmann::json{{"m", m}}; });

    const double bound = shevtsova_error(ones, c).bound;
    be.observe(binomial_cdf_sup_distance(m), bound, kSoundnessTolerance, [&] { return nlohmann::json{{"m", m}}; },
               bound < 1.0);
  }
  return {interval, coordinate, kh, be};
}

/// The full suite behind `verify`.
inline VerifyReport verify_bounds(const VerifyOptions& o) {
  detail::require(o.trials >= 1, "trials must be at least 1");
  detail::require(o.n_max >= 2 && o.n_max <= kDefaultMaxArity, "n_max must lie in [2, 20]");
  VerifyReport r;
  for (auto& c : check_random_ltf_bounds(o.trials, o.n_max, o.seed, o.constants)) r.checks.push_back(std::move(c));
  r.checks.push_back(check_khintchine_expectation(o.trials, o.n_max, o.seed));
  std::vector<unsigned> ns;
  for (unsigned n : {4U, 8U, 12U, 16U, 20U}) {
    if (n <= o.n_max) ns.push_back(n);
  }
  r.checks.push_back(check_shevtsova(ns, 2, o.seed, o.constants));
  for (auto& c : check_homogenization(o.trials, std::min(10U, o.n_max), o.seed)) r.checks.push_back(std::move(c));
  if (o.large_scale) {
    for (auto& c : check_large_scale(o.constants)) r.checks.push_back(std::move(c));
  }
  return r;
}

}  // namespace ltfei
