#pragma once

// Monte Carlo estimators for dimensions beyond exact enumeration. Samples are
// split into fixed-size blocks, block b drawing from stream.child(b), so the
// result depends only on (stream key, samples, block size) and never on the
// number of threads.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "ltfei/errors.hpp"
#include "ltfei/exact_sum.hpp"
#include "ltfei/ltf.hpp"
#include "ltfei/normal.hpp"
#include "ltfei/rademacher.hpp"
#include "ltfei/rng.hpp"

namespace ltfei {

struct Estimate {
  double value = 0.0;
  double half_width = 0.0;
  std::uint64_t samples = 0;
  double confidence = 0.0;
  std::string method;
  std::uint64_t seed = 0;  ///< key of the stream the estimate was drawn from

  [[nodiscard]] double lo() const noexcept { return value - half_width; }
  [[nodiscard]] double hi() const noexcept { return value + half_width; }
  [[nodiscard]] bool covers(double x) const noexcept { return lo() <= x && x <= hi(); }

  [[nodiscard]] nlohmann::json to_json() const {
    return {{"value", value},   {"half_width", half_width}, {"samples", samples},
            {"confidence", confidence}, {"method", method}, {"seed", seed}};
  }

  friend bool operator==(const Estimate&, const Estimate&) = default;
};

struct McOptions {
  std::uint64_t samples = 100000;
  double confidence = 0.99;
  unsigned threads = 1;
  std::uint64_t block_size = 4096;
};

/// sqrt(ln(2 / (1 - confidence)) / (2 N)), the Hoeffding half-width for a
/// mean of N variables in [0, 1]; the same expression is the DKW band.
inline double hoeffding_half_width(std::uint64_t samples, double confidence) {
  detail::require(samples >= 1, "samples must be at least 1");
  detail::require(confidence > 0.0 && confidence < 1.0, "confidence must lie in (0, 1)");
  return std::sqrt(std::log(2.0 / (1.0 - confidence)) / (2.0 * static_cast<double>(samples)));
}

namespace detail {

inline void validate(const McOptions& o) {
  require(o.samples >= 1, "samples must be at least 1");
  require(o.confidence > 0.0 && o.confidence < 1.0, "confidence must lie in (0, 1)");
  require(o.block_size >= 1, "block size must be at least 1");
}

/// Runs body(block_index, count) for every block, possibly in
/// parallel. Callers write per-block partials into preallocated slots.
template <class Body>
void for_each_block(const McOptions& o, Body&& body) {
  const std::uint64_t blocks = (o.samples + o.block_size - 1) / o.block_size;
  auto run = [&](std::uint64_t b) {
    const std::uint64_t first = b * o.block_size;
    body(b, std::min(o.block_size, o.samples - first));
  };
  const unsigned threads = std::max(1U, std::min<unsigned>(o.threads, static_cast<unsigned>(blocks)));
  if (threads == 1) {
    for (std::uint64_t b = 0; b < blocks; ++b) run(b);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::uint64_t b = next++; b < blocks; b = next++) run(b);
    });
  }
  for (auto& th : pool) th.join();
}

/// A uniform point of {+1,-1}^n, one bit per coordinate (set bit = +1).
class RandomCube {
 public:
  explicit RandomCube(std::size_t n) : bits_((n + 63) / 64) {}
  void draw(CounterStream& s) {
    for (auto& w : bits_) w = s();
  }
  [[nodiscard]] bool plus(std::size_t j) const noexcept { return (bits_[j >> 6] >> (j & 63)) & 1U; }

 private:
  std::vector<std::uint64_t> bits_;
};

/// Weighted sum S = w_0 + sum_j w_j x_j at a sampled point, with the data
/// needed to certify signs of S + c for small corrections c.
struct PointSum {
  double sum = 0.0;
  double mass = 0.0;

  void compute(const Ltf& f, const RandomCube& x) {
    const auto w = f.coordinate_weights();
    sum = f.threshold();
    mass = std::fabs(sum);
    for (std::size_t j = 0; j < w.size(); ++j) {
      sum += x.plus(j) ? w[j] : -w[j];
      mass += std::fabs(w[j]);
    }
  }

  /// Exact sign of S - 2 w_i x_i (i 1-based) when `flip`, else of S.
  /// sign(0) = -1, so the return value is +1 or -1.
  [[nodiscard]] int sign(const Ltf& f, const RandomCube& x, std::size_t i, bool flip) const {
    const double wi = flip ? f.weight(i) : 0.0;
    const double xi = flip && !x.plus(i - 1) ? -1.0 : 1.0;
    const double approx = sum - 2.0 * wi * xi;
    const double bound = exact::summation_error_bound(f.arity() + 3, mass + 2.0 * std::fabs(wi));
    if (approx > bound) return 1;
    if (approx < -bound) return -1;
    thread_local exact::ExpansionAccumulator acc;
    acc.clear();
    acc.add(f.threshold());
    const auto w = f.coordinate_weights();
    for (std::size_t j = 0; j < w.size(); ++j) {
      const bool p = x.plus(j) != (flip && j == i - 1);
      acc.add(p ? w[j] : -w[j]);
    }
    return acc.sign() > 0 ? 1 : -1;
  }

  [[nodiscard]] bool sensitive(const Ltf& f, const RandomCube& x, std::size_t i) const {
    return sign(f, x, i, false) != sign(f, x, i, true);
  }
};

inline Estimate make_estimate(double value, double half_width, const McOptions& o, std::string method,
                              const CounterStream& s) {
  Estimate e;
  e.value = value;
  e.half_width = half_width;
  e.samples = o.samples;
  e.confidence = o.confidence;
  e.method = std::move(method);
  e.seed = s.key();
  return e;
}

}  // namespace detail

/// Per-coordinate influence estimates for the listed coordinates (1-based),
/// all read off the same sampled inputs.
inline std::vector<Estimate> mc_influences(const Ltf& f, std::span<const unsigned> coordinates, const McOptions& o,
                                           const CounterStream& stream) {
  detail::validate(o);
  for (unsigned i : coordinates) {
    detail::require(i >= 1 && i <= f.arity(), "coordinate index out of range");
  }
  const std::uint64_t blocks = (o.samples + o.block_size - 1) / o.block_size;
  std::vector<std::vector<std::uint64_t>> partial(blocks, std::vector<std::uint64_t>(coordinates.size(), 0));
  detail::for_each_block(o, [&](std::uint64_t b, std::uint64_t count) {
    CounterStream s = stream.child(b);
    detail::RandomCube x(f.arity());
    detail::PointSum ps;
    auto& hits = partial[b];
    for (std::uint64_t t = 0; t < count; ++t) {
      x.draw(s);
      ps.compute(f, x);
      for (std::size_t c = 0; c < coordinates.size(); ++c) hits[c] += ps.sensitive(f, x, coordinates[c]) ? 1 : 0;
    }
  });
  const double hw = hoeffding_half_width(o.samples, o.confidence);
  std::vector<Estimate> out;
  out.reserve(coordinates.size());
  for (std::size_t c = 0; c < coordinates.size(); ++c) {
    std::uint64_t total = 0;
    for (const auto& p : partial) total += p[c];
    out.push_back(detail::make_estimate(static_cast<double>(total) / static_cast<double>(o.samples), hw, o,
                                        "hoeffding_influence_i", stream));
  }
  return out;
}

/// Frequency of f(x) != f(x^i) over uniformly drawn x.
inline Estimate mc_influence_i(const Ltf& f, unsigned i, const McOptions& o, const CounterStream& stream) {
  const unsigned coords[] = {i};
  return mc_influences(f, coords, o, stream).front();
}

/// Mean number of sensitive coordinates; the half-width is n times the
/// Hoeffding half-width since the count lies in [0, n].
inline Estimate mc_total_influence(const Ltf& f, const McOptions& o, const CounterStream& stream) {
  detail::validate(o);
  const std::uint64_t blocks = (o.samples + o.block_size - 1) / o.block_size;
  std::vector<std::uint64_t> partial(blocks, 0);
  detail::for_each_block(o, [&](std::uint64_t b, std::uint64_t count) {
    CounterStream s = stream.child(b);
    detail::RandomCube x(f.arity());
    detail::PointSum ps;
    std::uint64_t hits = 0;
    for (std::uint64_t t = 0; t < count; ++t) {
      x.draw(s);
      ps.compute(f, x);
      for (std::size_t i = 1; i <= f.arity(); ++i) hits += ps.sensitive(f, x, i) ? 1 : 0;
    }
    partial[b] = hits;
  });
  std::uint64_t total = 0;
  for (auto p : partial) total += p;
  const double n = static_cast<double>(f.arity());
  return detail::make_estimate(static_cast<double>(total) / static_cast<double>(o.samples),
                               n * hoeffding_half_width(o.samples, o.confidence), o, "hoeffding_total_influence",
                               stream);
}

/// max over an even grid on [-6, 6] of |F_N(x) - Phi(x)|, F_N the empirical
/// CDF (strict inequality) of sum_j a_j x_j / ||a||_2. The DKW inequality
/// gives the half-width.
inline Estimate mc_cdf_sup_distance(std::span<const double> a, unsigned grid_points, const McOptions& o,
                                    const CounterStream& stream) {
  detail::validate(o);
  detail::require(grid_points >= 2, "grid needs at least two points");
  const double norm = detail::l2_norm(a);
  detail::require(norm > 0.0, "weights must not all be zero");
  std::vector<double> grid(grid_points);
  for (unsigned g = 0; g < grid_points; ++g) grid[g] = -6.0 + 12.0 * g / (grid_points - 1);

  const std::uint64_t blocks = (o.samples + o.block_size - 1) / o.block_size;
  // histogram[g] counts samples whose first grid point strictly above them is g
  std::vector<std::vector<std::uint64_t>> partial(blocks, std::vector<std::uint64_t>(grid_points + 1, 0));
  detail::for_each_block(o, [&](std::uint64_t b, std::uint64_t count) {
    CounterStream s = stream.child(b);
    detail::RandomCube x(a.size());
    auto& hist = partial[b];
    for (std::uint64_t t = 0; t < count; ++t) {
      x.draw(s);
      double z = 0.0;
      for (std::size_t j = 0; j < a.size(); ++j) z += x.plus(j) ? a[j] : -a[j];
      z /= norm;
      ++hist[static_cast<std::size_t>(std::upper_bound(grid.begin(), grid.end(), z) - grid.begin())];
    }
  });
  std::vector<std::uint64_t> hist(grid_points + 1, 0);
  for (const auto& p : partial) {
    for (std::size_t g = 0; g <= grid_points; ++g) hist[g] += p[g];
  }
  double worst = 0.0;
  std::uint64_t below = 0;
  for (unsigned g = 0; g < grid_points; ++g) {
    below += hist[g];
    const double ecdf = static_cast<double>(below) / static_cast<double>(o.samples);
    worst = std::max(worst, std::fabs(ecdf - normal_cdf(grid[g])));
  }
  return detail::make_estimate(worst, hoeffding_half_width(o.samples, o.confidence), o, "dkw_cdf_sup_distance",
                               stream);
}

}  // namespace ltfei
