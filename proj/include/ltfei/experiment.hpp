#pragma once

// Random-LTF experiments: configuration, per-trial measurement, and per-n
// summaries. Each trial draws its weights from streams keyed by
// (master_seed, n, trial_id, coordinate), so records do not depend on the
// order or the number of worker threads.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "ltfei/bounds.hpp"
#include "ltfei/distributions.hpp"
#include "ltfei/errors.hpp"
#include "ltfei/estimators.hpp"
#include "ltfei/ltf.hpp"
#include "ltfei/records.hpp"
#include "ltfei/rng.hpp"
#include "ltfei/spectrum.hpp"
#include "ltfei/toml_lite.hpp"

namespace ltfei {

/// Agreement tolerance between the three exact influence computations.
inline constexpr double kExactAgreementTolerance = 1e-9;

struct AlphaPolicy {
  enum class Kind { mu3_margin, fixed };
  Kind kind = Kind::mu3_margin;
  double value = 0.0;  ///< used by `fixed`

  [[nodiscard]] double resolve(double mu3, double delta) const {
    return kind == Kind::fixed ? value : mu3_margin_alpha(mu3, delta);
  }

  /// "mu3_margin" or {"fixed": value}
  static AlphaPolicy from_json(const nlohmann::json& j) {
    AlphaPolicy p;
    if (j.is_string()) {
      if (j.get<std::string>() != "mu3_margin") {
        throw ValidationError("alpha_policy must be \"mu3_margin\" or {\"fixed\": value}");
      }
      return p;
    }
    if (j.is_object() && j.size() == 1 && j.contains("fixed") && j.at("fixed").is_number()) {
      p.kind = Kind::fixed;
      p.value = j.at("fixed").get<double>();
      detail::require(p.value > 0.0 && std::isfinite(p.value), "fixed alpha must be positive");
      return p;
    }
    throw ValidationError("alpha_policy must be \"mu3_margin\" or {\"fixed\": value}");
  }

  [[nodiscard]] nlohmann::json to_json() const {
    if (kind == Kind::fixed) return {{"fixed", value}};
    return "mu3_margin";
  }
};

/// Everything analyze() needs besides the LTF itself.
struct AnalysisOptions {
  unsigned exact_limit = kDefaultMaxArity;
  double delta = 0.1;
  AlphaPolicy alpha_policy;
  /// Law the weights are assumed to come from; only the random-LTF
  /// certificate columns depend on it.
  WeightDistribution distribution = WeightDistribution::normal();
  McOptions mc;
  BerryEsseenConstants constants;
};

struct ExperimentConfig {
  WeightDistribution distribution = WeightDistribution::normal();
  std::vector<std::uint64_t> n_values;
  std::uint64_t trials_per_n = 1;
  std::uint64_t master_seed = 0;
  unsigned exact_limit = kDefaultMaxArity;
  double delta = 0.1;
  AlphaPolicy alpha_policy;
  int entropy_log_base = 2;
  std::string output_path;
  OutputFormat format = OutputFormat::csv;
  unsigned threads = 1;
  std::uint64_t mc_samples = 100000;
  double confidence = 0.99;
  std::optional<double> entropy_constant;  ///< C in H(f) <= C sqrt(n), if the caller wants it checked

  void validate() const {
    detail::require(!n_values.empty(), "n_values must not be empty");
    std::set<std::uint64_t> seen;
    for (auto n : n_values) {
      detail::require(n >= 1, "every n must be at least 1");
      detail::require(n <= kMaxLtfArity - 1, "n exceeds the supported arity");
      detail::require(seen.insert(n).second, "n_values contains a duplicate");
    }
    detail::require(trials_per_n >= 1, "trials_per_n must be at least 1");
    detail::require(exact_limit >= 1 && exact_limit <= kDefaultMaxArity, "exact_limit must lie in [1, 20]");
    detail::require(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
    detail::require(entropy_log_base == 2, "entropy_log_base is fixed to 2");
    detail::require(threads >= 1, "threads must be at least 1");
    detail::require(mc_samples >= 1, "mc_samples must be at least 1");
    detail::require(confidence > 0.0 && confidence < 1.0, "confidence must lie in (0, 1)");
    if (entropy_constant) detail::require(*entropy_constant > 0.0, "entropy_constant must be positive");
    if (alpha_policy.kind == AlphaPolicy::Kind::fixed) detail::require(alpha_policy.value > 0.0, "alpha must be positive");
  }

  static ExperimentConfig from_json(const nlohmann::json& j) {
    detail::require(j.is_object(), "experiment config must be an object");
    static const std::set<std::string> known = {
        "distribution", "n_values",  "trials_per_n", "master_seed", "exact_limit",      "delta",
        "alpha_policy", "entropy_log_base", "output", "threads",    "mc_samples",       "confidence",
        "entropy_constant"};
    for (const auto& [key, _] : j.items()) {
      if (!known.count(key)) throw ValidationError("unknown config key \"" + key + "\"");
    }
    ExperimentConfig c;
    try {
      detail::require(j.contains("distribution"), "config needs \"distribution\"");
      c.distribution = WeightDistribution::from_json(j.at("distribution"));
      detail::require(j.contains("n_values") && j.at("n_values").is_array(), "config needs an array \"n_values\"");
      for (const auto& v : j.at("n_values")) {
        detail::require(v.is_number_integer() && v.get<std::int64_t>() >= 1, "n_values entries must be positive integers");
        c.n_values.push_back(v.get<std::uint64_t>());
      }
      auto count = [&](const char* key, auto& dst) {
        if (!j.contains(key)) return;
        const auto& v = j.at(key);
        detail::require(v.is_number_integer() && v.get<std::int64_t>() >= 0,
                        std::string("\"") + key + "\" must be a nonnegative integer");
        dst = v.get<std::remove_reference_t<decltype(dst)>>();
      };
      count("trials_per_n", c.trials_per_n);
      count("exact_limit", c.exact_limit);
      count("threads", c.threads);
      count("mc_samples", c.mc_samples);
      if (j.contains("master_seed")) {
        const auto& v = j.at("master_seed");
        detail::require(v.is_number_integer(), "\"master_seed\" must be an integer");
        c.master_seed = v.is_number_unsigned() ? v.get<std::uint64_t>()
                                               : static_cast<std::uint64_t>(v.get<std::int64_t>());
      }
      if (j.contains("delta")) c.delta = j.at("delta").get<double>();
      if (j.contains("confidence")) c.confidence = j.at("confidence").get<double>();
      if (j.contains("alpha_policy")) c.alpha_policy = AlphaPolicy::from_json(j.at("alpha_policy"));
      if (j.contains("entropy_log_base")) c.entropy_log_base = j.at("entropy_log_base").get<int>();
      if (j.contains("entropy_constant")) c.entropy_constant = j.at("entropy_constant").get<double>();
      if (j.contains("output")) {
        const auto& o = j.at("output");
        detail::require(o.is_object(), "\"output\" must be an object");
        for (const auto& [key, _] : o.items()) {
          if (key != "path" && key != "format") throw ValidationError("unknown output key \"" + key + "\"");
        }
        if (o.contains("path")) c.output_path = o.at("path").get<std::string>();
        if (o.contains("format")) c.format = parse_format(o.at("format").get<std::string>());
      }
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(std::string("malformed experiment config: ") + e.what());
    }
    c.validate();
    return c;
  }

  [[nodiscard]] AnalysisOptions analysis_options() const {
    AnalysisOptions o;
    o.exact_limit = exact_limit;
    o.delta = delta;
    o.alpha_policy = alpha_policy;
    o.distribution = distribution;
    o.mc.samples = mc_samples;
    o.mc.confidence = confidence;
    o.mc.threads = 1;  // parallelism is across trials
    return o;
  }
};

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open \"" + path + "\"");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("failed reading \"" + path + "\"");
  return ss.str();
}

/// Reads a JSON (.json) or TOML (anything else) experiment config.
inline ExperimentConfig load_experiment_config(const std::string& path) {
  const std::string text = read_text_file(path);
  const bool json = std::filesystem::path(path).extension() == ".json";
  nlohmann::json j;
  if (json) {
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
  } else {
    j = parse_toml(text);
  }
  return ExperimentConfig::from_json(j);
}

/// FNV-1a over the bit patterns of the weights.
inline std::string weights_digest(std::span<const double> weights) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (double w : weights) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &w, sizeof bits);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xFFU;
      h *= 0x100000001B3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Measures one LTF: exact spectrum and influences when n <= exact_limit,
/// Monte Carlo influence otherwise; every bound; the FEI / FMEI ratios.
inline ExperimentRecord analyze(const Ltf& f, const AnalysisOptions& o, const CounterStream& mc_stream) {
  detail::require(o.delta > 0.0 && o.delta < 1.0, "delta must lie in (0, 1)");
  const unsigned n = f.arity();
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  ExperimentRecord r;
  r.n = n;
  r.distribution = o.distribution.label();
  r.weights_digest = weights_digest(f.weights());
  r.tau_regular = is_tau_regular(f, 2.0 / std::sqrt(static_cast<double>(n) + 1.0));

  const double mu3 = o.distribution.moments().mu3;
  r.alpha = o.alpha_policy.resolve(mu3, o.delta);
  std::vector<unsigned> large;
  for (unsigned i = 1; i <= n; ++i) {
    if (std::fabs(f.weight(i)) >= r.alpha) large.push_back(i);
  }
  r.large_weight_count = large.size();

  if (n <= o.exact_limit) {
    r.path = "exact";
    const auto table = to_boolean_function(f, o.exact_limit);
    const auto spectrum = wht(table);
    r.entropy_bits = entropy(spectrum);
    r.min_entropy_bits = min_entropy(spectrum);
    const auto flips = influence_combinatorial(table);
    r.influence = flips.total;
    r.per_coordinate = flips.per_coordinate;
    const double spectral = influence_spectral(spectrum);
    const auto interval = influences_exact(f, o.exact_limit);
    bool agree = std::fabs(spectral - flips.total) <= kExactAgreementTolerance;
    for (unsigned i = 0; i < n; ++i) agree = agree && interval[i] == flips.per_coordinate[i];
    r.exact_agreement = agree;
    for (unsigned i : large) r.large_weight_influence += flips.per_coordinate[i - 1];
    if (r.influence > 0.0) {
      r.fei_ratio = *r.entropy_bits / r.influence;
      r.fmei_ratio = *r.min_entropy_bits / r.influence;
    }
  } else {
    r.path = "estimate";
    const auto total = mc_total_influence(f, o.mc, mc_stream.child(0));
    r.influence = total.value;
    r.influence_half_width = total.half_width;
    if (!large.empty()) {
      // union bound: each coordinate at confidence 1 - (1 - c)/k keeps the sum at c
      McOptions each = o.mc;
      each.confidence = 1.0 - (1.0 - o.mc.confidence) / static_cast<double>(large.size());
      double hw = 0.0;
      for (const auto& e : mc_influences(f, large, each, mc_stream.child(1))) {
        r.large_weight_influence += e.value;
        hw += e.half_width;
      }
      r.large_weight_half_width = hw;
    } else {
      r.large_weight_half_width = 0.0;
    }
  }
  r.inf_over_sqrt_n = r.influence / sqrt_n;

  const auto kh = khintchine_lower_bound(f.weights());
  r.khintchine_bound = kh.value;
  r.khintchine_clamped = kh.clamped();
  r.sum_lb_all_weights = sum_clamped_per_coordinate_lb(f.weights(), IndexConvention::all_weights, o.constants);
  r.sum_lb_coordinates_only =
      sum_clamped_per_coordinate_lb(f.weights(), IndexConvention::coordinates_only, o.constants);

  // The certificate is for homogeneous LTFs with i.i.d. weights: here g on
  // n + 1 variables with weights (w_0, ..., w_n), and inf(f) >= (inf(g) - 1)/2.
  const auto cert = lb_random_certificate(o.distribution, std::uint64_t{n} + 1, r.alpha, o.delta, o.constants);
  r.theta = cert.parameters.at("theta");
  r.certificate = (cert.value - 1.0) / 2.0;
  r.certificate_asymptotic = (cert.parameters.at("asymptotic_form") - 1.0) / 2.0;
  r.certificate_success_probability = cert.parameters.at("success_probability");
  return r;
}

/// Stream key of trial `trial_id` at dimension n.
inline std::uint64_t trial_key(std::uint64_t master_seed, std::uint64_t n, std::uint64_t trial_id) {
  return derive_key(master_seed, {n, trial_id});
}

/// w_0..w_n of one trial; weight j comes from its own stream.
inline std::vector<double> sample_trial_weights(const WeightDistribution& d, std::uint64_t key, std::uint64_t n) {
  std::vector<double> w(n + 1);
  for (std::uint64_t j = 0; j <= n; ++j) {
    CounterStream s(derive_key(key, {j}));
    w[j] = d.sample_standardized(s);
  }
  return w;
}

inline ExperimentRecord run_trial(const ExperimentConfig& c, std::uint64_t n, std::uint64_t trial_id) {
  const std::uint64_t key = trial_key(c.master_seed, n, trial_id);
  const Ltf f(sample_trial_weights(c.distribution, key, n), true);
  ExperimentRecord r = analyze(f, c.analysis_options(), CounterStream(derive_key(key, {~std::uint64_t{0}})));
  r.trial_id = trial_id;
  r.seed = key;
  return r;
}

struct SummaryRow {
  std::uint64_t n = 0;
  std::uint64_t trials = 0;
  std::uint64_t exact_trials = 0;
  std::optional<double> max_fei_ratio;
  std::optional<double> mean_fei_ratio;
  std::optional<double> max_fmei_ratio;
  double min_inf_over_sqrt_n = std::numeric_limits<double>::infinity();
  std::optional<double> c_obs_sqrt_n;  ///< max H(f) / sqrt(n)
  double exact_agreement_fraction = 0.0;
  double tau_regular_fraction = 0.0;
  double khintchine_nonvacuous_fraction = 0.0;
  double khintchine_sound_fraction = 0.0;
  double all_weights_nonvacuous_fraction = 0.0;
  double all_weights_sound_fraction = 0.0;
  double coordinates_only_nonvacuous_fraction = 0.0;
  double coordinates_only_sound_fraction = 0.0;
  std::uint64_t certificate_nonvacuous_trials = 0;
  std::optional<double> certificate_sound_fraction;  ///< among non-vacuous trials
  double certificate_success_probability = 0.0;
  std::optional<double> entropy_constant;
  std::optional<double> entropy_bound_fraction;  ///< H(f) <= C sqrt(n)

  [[nodiscard]] nlohmann::json to_json() const {
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    return {{"n", n},
            {"trials", trials},
            {"exact_trials", exact_trials},
            {"max_fei_ratio", opt(max_fei_ratio)},
            {"mean_fei_ratio", opt(mean_fei_ratio)},
            {"max_fmei_ratio", opt(max_fmei_ratio)},
            {"min_inf_over_sqrt_n", min_inf_over_sqrt_n},
            {"c_obs_sqrt_n", opt(c_obs_sqrt_n)},
            {"exact_agreement_fraction", exact_agreement_fraction},
            {"tau_regular_fraction", tau_regular_fraction},
            {"khintchine_nonvacuous_fraction", khintchine_nonvacuous_fraction},
            {"khintchine_sound_fraction", khintchine_sound_fraction},
            {"all_weights_nonvacuous_fraction", all_weights_nonvacuous_fraction},
            {"all_weights_sound_fraction", all_weights_sound_fraction},
            {"coordinates_only_nonvacuous_fraction", coordinates_only_nonvacuous_fraction},
            {"coordinates_only_sound_fraction", coordinates_only_sound_fraction},
            {"certificate_nonvacuous_trials", certificate_nonvacuous_trials},
            {"certificate_sound_fraction", opt(certificate_sound_fraction)},
            {"certificate_success_probability", certificate_success_probability},
            {"entropy_constant", opt(entropy_constant)},
            {"entropy_bound_fraction", opt(entropy_bound_fraction)}};
  }
};

/// A bound is sound on a record when it does not exceed the measured
/// influence, allowing the confidence half-width on the estimate path.
inline bool bound_respected(const ExperimentRecord& r, double bound) {
  const double slack = r.influence_half_width.value_or(0.0) + kExactAgreementTolerance;
  return bound <= r.influence + slack;
}

inline SummaryRow summarize(std::uint64_t n, std::span<const ExperimentRecord> records,
                            std::optional<double> entropy_constant = std::nullopt) {
  SummaryRow s;
  s.n = n;
  s.entropy_constant = entropy_constant;
  double fei_sum = 0.0;
  std::uint64_t fei_count = 0;
  std::uint64_t agree = 0, tau = 0, kh_nv = 0, kh_ok = 0, aw_nv = 0, aw_ok = 0, co_nv = 0, co_ok = 0;
  std::uint64_t cert_ok = 0, entropy_ok = 0;
  for (const auto& r : records) {
    ++s.trials;
    if (r.path == "exact") {
      ++s.exact_trials;
      agree += r.exact_agreement ? 1 : 0;
      const double h_sqrt = *r.entropy_bits / std::sqrt(static_cast<double>(r.n));
      s.c_obs_sqrt_n = std::max(s.c_obs_sqrt_n.value_or(h_sqrt), h_sqrt);
      if (entropy_constant) {
        entropy_ok += *r.entropy_bits <= entropy_upper_bound(r.n, *entropy_constant) ? 1 : 0;
      }
    }
    if (r.fei_ratio) {
      s.max_fei_ratio = std::max(s.max_fei_ratio.value_or(*r.fei_ratio), *r.fei_ratio);
      fei_sum += *r.fei_ratio;
      ++fei_count;
    }
    if (r.fmei_ratio) s.max_fmei_ratio = std::max(s.max_fmei_ratio.value_or(*r.fmei_ratio), *r.fmei_ratio);
    s.min_inf_over_sqrt_n = std::min(s.min_inf_over_sqrt_n, r.inf_over_sqrt_n);
    tau += r.tau_regular ? 1 : 0;
    kh_nv += r.khintchine_bound > 0.0 ? 1 : 0;
    kh_ok += bound_respected(r, r.khintchine_clamped) ? 1 : 0;
    aw_nv += r.sum_lb_all_weights > 0.0 ? 1 : 0;
    aw_ok += bound_respected(r, r.sum_lb_all_weights) ? 1 : 0;
    co_nv += r.sum_lb_coordinates_only > 0.0 ? 1 : 0;
    co_ok += bound_respected(r, r.sum_lb_coordinates_only) ? 1 : 0;
    if (r.certificate > 0.0) {
      ++s.certificate_nonvacuous_trials;
      cert_ok += bound_respected(r, r.certificate) ? 1 : 0;
    }
    s.certificate_success_probability = r.certificate_success_probability;
  }
  const double t = static_cast<double>(s.trials);
  if (fei_count) s.mean_fei_ratio = fei_sum / static_cast<double>(fei_count);
  s.exact_agreement_fraction = s.exact_trials ? static_cast<double>(agree) / static_cast<double>(s.exact_trials) : 0.0;
  s.tau_regular_fraction = static_cast<double>(tau) / t;
  s.khintchine_nonvacuous_fraction = static_cast<double>(kh_nv) / t;
  s.khintchine_sound_fraction = static_cast<double>(kh_ok) / t;
  s.all_weights_nonvacuous_fraction = static_cast<double>(aw_nv) / t;
  s.all_weights_sound_fraction = static_cast<double>(aw_ok) / t;
  s.coordinates_only_nonvacuous_fraction = static_cast<double>(co_nv) / t;
  s.coordinates_only_sound_fraction = static_cast<double>(co_ok) / t;
  if (s.certificate_nonvacuous_trials) {
    s.certificate_sound_fraction =
        static_cast<double>(cert_ok) / static_cast<double>(s.certificate_nonvacuous_trials);
  }
  if (entropy_constant && s.exact_trials) {
    s.entropy_bound_fraction = static_cast<double>(entropy_ok) / static_cast<double>(s.exact_trials);
  }
  return s;
}

struct ExperimentResult {
  std::vector<ExperimentRecord> records;  ///< sorted by (n, trial_id)
  std::vector<SummaryRow> summary;        ///< ascending n

  [[nodiscard]] nlohmann::json summary_json() const {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& s : summary) out.push_back(s.to_json());
    return out;
  }
};

inline ExperimentResult run_experiment(const ExperimentConfig& c) {
  c.validate();
  std::vector<std::uint64_t> ns = c.n_values;
  std::sort(ns.begin(), ns.end());
  struct Item {
    std::uint64_t n;
    std::uint64_t trial;
  };
  std::vector<Item> items;
  items.reserve(ns.size() * c.trials_per_n);
  for (auto n : ns) {
    for (std::uint64_t t = 0; t < c.trials_per_n; ++t) items.push_back({n, t});
  }

  ExperimentResult out;
  out.records.resize(items.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t k = next++; k < items.size(); k = next++) {
      try {
        out.records[k] = run_trial(c, items[k].n, items[k].trial);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = items.size();
      }
    }
  };
  const unsigned threads = std::max(1U, std::min<unsigned>(c.threads, static_cast<unsigned>(items.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::size_t begin = 0;
  for (auto n : ns) {
    const std::span<const ExperimentRecord> block(out.records.data() + begin, c.trials_per_n);
    out.summary.push_back(summarize(n, block, c.entropy_constant));
    begin += c.trials_per_n;
  }
  return out;
}

}  // namespace ltfei
