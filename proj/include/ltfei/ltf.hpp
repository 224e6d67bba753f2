#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ltfei/boolean_function.hpp"
#include "ltfei/errors.hpp"
#include "ltfei/exact_sum.hpp"

namespace ltfei {

/// Largest dimension accepted for a weight vector (excluding w_0).
inline constexpr std::size_t kMaxLtfArity = std::size_t{1} << 24;

/// f(x) = sign(w_0 + w_1 x_1 + ... + w_n x_n) with sign(0) = -1.
class Ltf {
 public:
  /// `weights` holds (w_0, w_1, ..., w_n). Degenerate vectors with
  /// w_1 = ... = w_n = 0 are rejected unless `allow_degenerate`.
  explicit Ltf(std::vector<double> weights, bool allow_degenerate = false) : weights_(std::move(weights)) {
    if (weights_.size() < 2) throw ValidationError("an LTF needs w_0 and at least one coordinate weight");
    if (weights_.size() - 1 > kMaxLtfArity) throw ArityError("LTF arity exceeds the supported maximum");
    bool any_nonzero = false;
    for (std::size_t j = 0; j < weights_.size(); ++j) {
      if (!std::isfinite(weights_[j])) throw ValidationError("weight w_" + std::to_string(j) + " is not finite");
      if (j > 0 && weights_[j] != 0.0) any_nonzero = true;
    }
    if (!any_nonzero && !allow_degenerate) {
      throw ValidationError("all coordinate weights are zero (constant function); pass allow_degenerate to accept");
    }
  }

  [[nodiscard]] unsigned arity() const noexcept { return static_cast<unsigned>(weights_.size() - 1); }
  [[nodiscard]] double threshold() const noexcept { return weights_[0]; }
  /// w_i for 0 <= i <= n.
  [[nodiscard]] double weight(std::size_t i) const { return weights_.at(i); }
  [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }
  [[nodiscard]] std::span<const double> coordinate_weights() const noexcept {
    return std::span<const double>(weights_).subspan(1);
  }

  [[nodiscard]] nlohmann::json to_json() const { return {{"n", arity()}, {"weights", weights_}}; }

  static Ltf from_json(const nlohmann::json& j, bool allow_degenerate = false) {
    std::vector<double> w;
    if (j.is_array()) {
      w = j.get<std::vector<double>>();
    } else if (j.is_object() && j.contains("weights")) {
      w = j.at("weights").get<std::vector<double>>();
      if (j.contains("n") && j.at("n").get<std::size_t>() + 1 != w.size()) {
        throw ValidationError("\"n\" does not match the number of weights minus one");
      }
    } else {
      throw ValidationError("LTF JSON must be an array or an object with \"weights\"");
    }
    return Ltf(std::move(w), allow_degenerate);
  }

  friend bool operator==(const Ltf&, const Ltf&) = default;

 private:
  std::vector<double> weights_;
};

/// Value at x in {+1,-1}^n; the threshold comparison is exact.
inline int eval(const Ltf& f, std::span<const int> x) {
  if (x.size() != f.arity()) throw ValidationError("input length does not match LTF arity");
  thread_local exact::ExpansionAccumulator acc;
  double approx = f.threshold();
  double mass = std::fabs(f.threshold());
  const auto w = f.coordinate_weights();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] != 1 && x[i] != -1) throw ValidationError("input entries must be +1 or -1");
    approx += x[i] == 1 ? w[i] : -w[i];
    mass += std::fabs(w[i]);
  }
  const double bound = exact::summation_error_bound(x.size() + 1, mass);
  if (approx > bound) return 1;
  if (approx < -bound) return -1;
  acc.clear();
  acc.add(f.threshold());
  for (std::size_t i = 0; i < x.size(); ++i) acc.add(x[i] == 1 ? w[i] : -w[i]);
  return acc.sign() > 0 ? 1 : -1;
}

/// Truth table of f over all 2^n inputs.
inline BooleanFunction to_boolean_function(const Ltf& f, unsigned max_arity = kDefaultMaxArity) {
  if (f.arity() > max_arity) throw ArityError("LTF arity exceeds truth-table limit");
  BooleanFunction table(f.arity(), max_arity);
  const exact::SignedSumTable sums(f.threshold(), f.coordinate_weights());
  const std::uint64_t size = sums.size();
  for (std::uint64_t k = 0; k < size; ++k) table.set_bit(k, sums.sign_minus(k, 0.0) > 0);
  return table;
}

/// Weights of the other coordinates: (w_1, ..., w_n) without w_i, 1 <= i <= n.
inline std::vector<double> weights_excluding(const Ltf& f, unsigned i) {
  if (i < 1 || i > f.arity()) throw ValidationError("coordinate index out of range");
  std::vector<double> out;
  out.reserve(f.arity() - 1);
  for (unsigned j = 1; j <= f.arity(); ++j) {
    if (j != i) out.push_back(f.weight(j));
  }
  return out;
}

/// Inf_i(f) = Pr[-|w_i| < w_0 + sum_{j != i} w_j x_j <= |w_i|], enumerating
/// the 2^(n-1) assignments of the other coordinates with exact comparisons.
inline double influence_i_exact(const Ltf& f, unsigned i, unsigned max_arity = kDefaultMaxArity) {
  if (i < 1 || i > f.arity()) throw ValidationError("coordinate index out of range");
  if (f.arity() > max_arity + 1) throw ArityError("LTF arity exceeds enumeration limit");
  const auto others = weights_excluding(f, i);
  const exact::SignedSumTable sums(f.threshold(), others);
  const double a = std::fabs(f.weight(i));
  const std::uint64_t hits = sums.count_le(a) - sums.count_le(-a);
  return static_cast<double>(hits) / static_cast<double>(sums.size());
}

inline std::vector<double> influences_exact(const Ltf& f, unsigned max_arity = kDefaultMaxArity) {
  std::vector<double> out(f.arity());
  for (unsigned i = 1; i <= f.arity(); ++i) out[i - 1] = influence_i_exact(f, i, max_arity);
  return out;
}

/// g(x_0, ..., x_n) = sign(sum_{i=0}^n w_i x_i): the threshold becomes the
/// weight of a new leading variable x_0.
inline Ltf homogenize(const Ltf& f) {
  if (f.arity() + 1 > kMaxLtfArity) throw ArityError("homogenized LTF exceeds the supported arity");
  std::vector<double> w;
  w.reserve(f.weights().size() + 1);
  w.push_back(0.0);
  w.insert(w.end(), f.weights().begin(), f.weights().end());
  return Ltf(std::move(w), true);
}

/// max_i |w_i| / ||w||_2 over indices 0..n.
inline double max_normalized_weight(std::span<const double> weights) {
  double scale = 0.0;
  for (double w : weights) scale = std::fmax(scale, std::fabs(w));
  if (scale == 0.0) throw ValidationError("zero weight vector cannot be normalized");
  double ss = 0.0;
  for (double w : weights) ss += (w / scale) * (w / scale);
  return 1.0 / std::sqrt(ss);
}

/// True when every weight of the unit-l2-normalized vector (w_0..w_n) is at most tau.
inline bool is_tau_regular(const Ltf& f, double tau) {
  if (!(tau > 0.0)) throw ValidationError("tau must be positive");
  return max_normalized_weight(f.weights()) <= tau;
}

}  // namespace ltfei
