// ltfei: command-line front end.
//
//   ltfei analyze    --weights '[0,1,1,1]'
//   ltfei experiment --config configs/normal_n16.toml
//   ltfei bounds     --weights 0,1,1,1 --alpha 1 --delta 0.1
//   ltfei verify     --trials 300 --seed 1
//
// Exit codes: 0 ok, 1 validation error, 2 soundness violation, 3 I/O error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ltfei/ltfei.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitSoundness = 2;
constexpr int kExitIo = 3;

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::string> format;
  std::string out;
};

/// Accepts a JSON array, an LTF object {"n", "weights"}, an inline list
/// "0,1,1,1", or @path to a file holding any of these.
ltfei::Ltf parse_weights(std::string text, bool allow_degenerate) {
  if (!text.empty() && text[0] == '@') text = ltfei::read_text_file(text.substr(1));
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (text[first] == '[' || text[first] == '{')) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ltfei::ValidationError(std::string("weights are not valid JSON: ") + e.what());
    }
    try {
      return ltfei::Ltf::from_json(j, allow_degenerate);
    } catch (const nlohmann::json::exception& e) {
      throw ltfei::ValidationError(std::string("bad weights JSON: ") + e.what());
    }
  }
  std::vector<double> w;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t\r\n");
    const auto e = item.find_last_not_of(" \t\r\n");
    if (b == std::string::npos) throw ltfei::ValidationError("empty entry in weight list");
    w.push_back(ltfei::detail::parse_double(item.substr(b, e - b + 1)));
  }
  return ltfei::Ltf(std::move(w), allow_degenerate);
}

ltfei::WeightDistribution parse_distribution(const std::string& text) {
  if (text.empty()) return ltfei::WeightDistribution::normal();
  if (text[0] == '{') {
    try {
      return ltfei::WeightDistribution::from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
      throw ltfei::ValidationError(std::string("bad distribution JSON: ") + e.what());
    }
  }
  // kind or kind:param
  const auto colon = text.find(':');
  nlohmann::json j = {{"kind", text.substr(0, colon)}};
  if (colon != std::string::npos) j["param"] = ltfei::detail::parse_double(text.substr(colon + 1));
  return ltfei::WeightDistribution::from_json(j);
}

/// Writes `body` to --out, or to stdout when no path is given.
void write_output(const std::string& path, const std::string& body) {
  if (path.empty() || path == "-") {
    std::cout << body;
    std::cout.flush();
    if (!std::cout) throw ltfei::IoError("failed writing to stdout");
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ltfei::IoError("cannot open \"" + path + "\" for writing");
  out << body;
  out.flush();
  if (!out) throw ltfei::IoError("failed writing \"" + path + "\"");
}

std::string emit_to_string(const std::vector<ltfei::ExperimentRecord>& records, ltfei::OutputFormat format) {
  std::ostringstream os;
  ltfei::emit(os, records, format);
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fourier entropy, influence and influence bounds of linear threshold functions"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--seed", g.seed, "Master seed (overrides a config's master_seed)");
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--format", g.format, "Record format")->check(CLI::IsMember({"csv", "jsonl"}));
  app.add_option("--out", g.out, "Output path (default: stdout)");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Spectral and bound report for one LTF");
  std::string a_weights;
  unsigned a_exact_limit = ltfei::kDefaultMaxArity;
  double a_delta = 0.1;
  std::optional<double> a_alpha;
  std::string a_distribution;
  std::uint64_t a_samples = 100000;
  double a_confidence = 0.99;
  bool a_allow_degenerate = false;
  analyze->add_option("--weights", a_weights, "w_0..w_n as JSON, inline list, or @file")->required();
  analyze->add_option("--exact-limit", a_exact_limit, "Largest n analyzed exactly");
  analyze->add_option("--delta", a_delta, "Concentration slack used by the certificate");
  analyze->add_option("--alpha", a_alpha, "Large-weight threshold (default: mu3 margin)");
  analyze->add_option("--distribution", a_distribution, "Assumed weight law: normal, uniform[:a], truncated_normal:b");
  analyze->add_option("--samples", a_samples, "Monte Carlo samples beyond the exact limit");
  analyze->add_option("--confidence", a_confidence, "Confidence of Monte Carlo intervals");
  analyze->add_flag("--allow-degenerate", a_allow_degenerate, "Accept all-zero coordinate weights");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Random-LTF experiment from a TOML or JSON config");
  std::string e_config;
  std::string e_summary;
  experiment->add_option("--config", e_config, "Config path (.toml or .json)")->required();
  experiment->add_option("--summary", e_summary, "Write the per-n summary JSON here (default: stderr)");

  // bounds
  auto* bounds = app.add_subcommand("bounds", "Evaluate every lower bound for one LTF");
  std::string b_weights;
  std::optional<double> b_alpha;
  double b_delta = 0.1;
  std::string b_distribution;
  bool b_allow_degenerate = false;
  bounds->add_option("--weights", b_weights, "w_0..w_n as JSON, inline list, or @file")->required();
  bounds->add_option("--alpha", b_alpha, "Interval half-width / large-weight threshold (default: mu3 margin)");
  bounds->add_option("--delta", b_delta, "Concentration slack");
  bounds->add_option("--distribution", b_distribution, "Weight law for the random-LTF certificate");
  bounds->add_flag("--allow-degenerate", b_allow_degenerate, "Accept all-zero coordinate weights");

  // verify
  auto* verify = app.add_subcommand("verify", "Check every bound against exact enumeration");
  std::uint64_t v_trials = ltfei::VerifyOptions{}.trials;
  unsigned v_n_max = ltfei::VerifyOptions{}.n_max;
  double v_linear = ltfei::BerryEsseenConstants{}.linear;
  double v_power = ltfei::BerryEsseenConstants{}.power;
  bool v_skip_large = false;
  verify->add_option("--trials", v_trials, "Random LTFs per check");
  verify->add_option("--n-max", v_n_max, "Largest n enumerated");
  verify->add_option("--be-linear", v_linear, "Berry-Esseen linear coefficient (fault injection)");
  verify->add_option("--be-power", v_power, "Berry-Esseen l^(4/3) coefficient (fault injection)");
  verify->add_flag("--skip-large", v_skip_large, "Skip the equal-weight binomial families");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    const auto format = ltfei::parse_format(g.format.value_or("csv"));

    if (*analyze) {
      const auto f = parse_weights(a_weights, a_allow_degenerate);
      ltfei::AnalysisOptions o;
      o.exact_limit = a_exact_limit;
      ltfei::detail::require(a_exact_limit >= 1 && a_exact_limit <= ltfei::kDefaultMaxArity,
                             "exact limit must lie in [1, 20]");
      o.delta = a_delta;
      if (a_alpha) {
        o.alpha_policy.kind = ltfei::AlphaPolicy::Kind::fixed;
        o.alpha_policy.value = *a_alpha;
        ltfei::detail::require(*a_alpha > 0.0, "alpha must be positive");
      }
      o.distribution = parse_distribution(a_distribution);
      o.mc.samples = a_samples;
      o.mc.confidence = a_confidence;
      o.mc.threads = g.threads.value_or(1);
      if (f.arity() > a_exact_limit) {
        std::cerr << "warning: n = " << f.arity() << " exceeds the exact limit " << a_exact_limit
                  << "; reporting Monte Carlo estimates without entropy\n";
      }
      const std::uint64_t seed = g.seed.value_or(0);
      auto r = ltfei::analyze(f, o, ltfei::CounterStream(ltfei::derive_key(seed, {f.arity()})));
      r.seed = seed;
      write_output(g.out, emit_to_string({r}, format));
      return kExitOk;
    }

    if (*experiment) {
      auto c = ltfei::load_experiment_config(e_config);
      if (g.seed) c.master_seed = *g.seed;
      if (g.threads) c.threads = *g.threads;
      if (g.format) c.format = format;
      if (!g.out.empty()) c.output_path = g.out;
      c.validate();
      const auto result = ltfei::run_experiment(c);
      write_output(c.output_path, emit_to_string(result.records, c.format));
      const std::string summary = result.summary_json().dump(2) + "\n";
      if (e_summary.empty()) {
        std::cerr << summary;
      } else {
        write_output(e_summary, summary);
      }
      return kExitOk;
    }

    if (*bounds) {
      const auto f = parse_weights(b_weights, b_allow_degenerate);
      const auto d = parse_distribution(b_distribution);
      const double alpha = b_alpha.value_or(ltfei::mu3_margin_alpha(d.moments().mu3, b_delta));
      ltfei::detail::require(alpha > 0.0, "alpha must be positive");
      nlohmann::json out;
      out["weights"] = f.weights();
      out["alpha"] = alpha;
      out["delta"] = b_delta;
      out["khintchine"] = ltfei::khintchine_lower_bound(f.weights()).to_json();
      nlohmann::json per = nlohmann::json::array();
      nlohmann::json interval = nlohmann::json::array();
      for (unsigned i = 1; i <= f.arity(); ++i) {
        nlohmann::json entry = {{"i", i}};
        for (auto conv : {ltfei::IndexConvention::all_weights, ltfei::IndexConvention::coordinates_only}) {
          try {
            entry[ltfei::to_string(conv)] = ltfei::per_coordinate_lb(f.weights(), i, conv).to_json();
          } catch (const ltfei::ValidationError& e) {
            entry[ltfei::to_string(conv)] = {{"error", e.what()}};
          }
        }
        per.push_back(entry);
        const auto others = ltfei::weights_excluding(f, i);
        try {
          auto rep = ltfei::interval_probability_lb(others, alpha).to_json();
          rep["i"] = i;
          interval.push_back(rep);
        } catch (const ltfei::ValidationError& e) {
          interval.push_back({{"i", i}, {"error", e.what()}});
        }
      }
      out["per_coordinate"] = per;
      out["interval_probability"] = interval;
      const auto coords = f.coordinate_weights();
      if (std::any_of(coords.begin(), coords.end(), [](double w) { return w != 0.0; })) {
        const auto be = ltfei::shevtsova_error(coords);
        out["shevtsova"] = {{"bound", be.bound}, {"lyapunov_ratio", be.lyapunov_ratio}};
      }
      if (f.arity() >= 2) {
        out["random_certificate"] = ltfei::lb_random_certificate(d, f.arity(), alpha, b_delta).to_json();
        out["random_certificate"]["distribution"] = d.to_json();
      }
      write_output(g.out, (format == ltfei::OutputFormat::jsonl ? out.dump() : out.dump(2)) + "\n");
      return kExitOk;
    }

    if (*verify) {
      ltfei::VerifyOptions o;
      o.trials = v_trials;
      o.seed = g.seed.value_or(o.seed);
      o.n_max = v_n_max;
      o.constants.linear = v_linear;
      o.constants.power = v_power;
      o.large_scale = !v_skip_large;
      const auto report = ltfei::verify_bounds(o);
      write_output(g.out, report.to_json().dump(2) + "\n");
      if (!report.passed()) {
        for (const auto& c : report.checks) {
          if (!c.passed()) {
            std::cerr << "soundness violation in " << c.name << " (" << c.violations << " of " << c.cases
                      << " cases); counterexample: " << c.counterexample.dump() << "\n";
          }
        }
        return kExitSoundness;
      }
      return kExitOk;
    }
  } catch (const ltfei::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ltfei::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}
