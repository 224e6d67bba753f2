// Acceptance suite: one line per criterion, "[PASS]" or "[FAIL]", with the
// measured quantities and the tolerances they were held to. Exit status is
// nonzero if any criterion fails.
//
//   ltfei_acceptance [path/to/ltfei]
//
// With the CLI path, criterion 10 also compares `experiment` output files
// written by separate processes.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "ltfei/ltfei.hpp"

using namespace ltfei;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit_s;  // 0 = none
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string tally(const CheckResult& c) {
  std::ostringstream os;
  os << c.name << ": cases=" << c.cases << " violations=" << c.violations << " nonvacuous=" << c.nonvacuous
     << " min_slack=" << (c.cases ? fmt("%.3g", c.min_slack) : std::string("n/a"));
  return os.str();
}

Ltf random_ltf(CounterStream& s, unsigned n, bool integer) {
  std::normal_distribution<double> z;
  std::vector<double> w(n + 1);
  for (double& v : w) v = integer ? static_cast<double>(static_cast<int>(s() % 5) - 2) : z(s);
  bool any = false;
  for (unsigned j = 1; j <= n; ++j) any = any || w[j] != 0.0;
  if (!any) w[1] = 1.0;
  return Ltf(std::move(w));
}

// 1. Parseval within 1e-9 and spectral = flip-count influence within 1e-9,
//    1000 random LTFs at each n in 4..12.
Outcome parseval() {
  constexpr double tol = 1e-9;
  double worst_parseval = 0.0, worst_influence = 0.0;
  std::uint64_t count = 0;
  for (unsigned n = 4; n <= 12; ++n) {
    for (std::uint64_t t = 0; t < 1000; ++t) {
      CounterStream s(derive_key(101, {n, t}));
      const auto f = to_boolean_function(random_ltf(s, n, t % 2 == 1));
      const auto spectrum = wht(f);
      worst_parseval = std::max(worst_parseval, std::fabs(spectrum.squared_mass() - 1.0));
      worst_influence =
          std::max(worst_influence, std::fabs(influence_spectral(spectrum) - influence_combinatorial(f).total));
      ++count;
    }
  }
  return {worst_parseval <= tol && worst_influence <= tol,
          std::to_string(count) + " LTFs; max |sum f^2 - 1| = " + fmt("%.2e", worst_parseval) +
              ", max |spectral - flips| = " + fmt("%.2e", worst_influence) + " (tol 1e-9)"};
}

// 2. Interval-count influences equal truth-table influences exactly,
//    1000 random LTFs with n <= 12, half with tied integer weights.
Outcome interval_identity() {
  std::uint64_t mismatches = 0, coords = 0, tied = 0;
  for (std::uint64_t t = 0; t < 1000; ++t) {
    CounterStream s(derive_key(102, {t}));
    const unsigned n = 1 + static_cast<unsigned>(s() % 12);
    const bool integer = t % 2 == 0;
    const Ltf f = random_ltf(s, n, integer);
    const auto table = to_boolean_function(f);
    const auto flips = influence_combinatorial(table);
    const auto interval = influences_exact(f);
    for (unsigned i = 0; i < n; ++i) {
      ++coords;
      mismatches += interval[i] != flips.per_coordinate[i] ? 1 : 0;
    }
    // count inputs with a zero sum, where sign(0) = -1 decides the value
    if (integer) {
      const exact::SignedSumTable sums(f.threshold(), f.coordinate_weights());
      for (std::uint64_t k = 0; k < sums.size(); ++k) tied += sums.sign_minus(k, 0.0) == 0 ? 1 : 0;
    }
  }
  return {mismatches == 0 && tied > 0, std::to_string(coords) + " coordinates; mismatches = " +
                                           std::to_string(mismatches) + " (exact equality); zero-sum inputs = " +
                                           std::to_string(tied)};
}

// 3. E|sum w_i x_i| >= 1/sqrt(2) for 10^4 random unit vectors, n <= 16.
Outcome khintchine_expectation() {
  const auto c = check_khintchine_expectation(10000, 16, 103);
  return {c.passed() && c.cases == 10000, tally(c) + " (tol 1e-12)"};
}

// 4. Clamped bounds never exceed exact values (+1e-9) over 10^4 random LTFs, n <= 16.
//    The per-coordinate and interval bounds are never positive at that size,
//    so the equal-weight families with m up to 10^6 summands are checked too.
Outcome bound_soundness() {
  bool ok = true;
  std::string d;
  for (const auto& c : check_random_ltf_bounds(10000, 16, 104)) {
    ok = ok && c.passed() && c.cases > 0;
    d += (d.empty() ? "" : "; ") + tally(c);
  }
  d += " | binomial families: ";
  for (const auto& c : check_large_scale()) {
    ok = ok && c.passed() && c.nonvacuous > 0;
    d += tally(c) + "; ";
  }
  return {ok, d + "(tol 1e-9)"};
}

// 5. Exact CDF distance <= Berry-Esseen bound at n in {8, 12, 16, 20}.
Outcome shevtsova() {
  std::vector<ShevtsovaCase> cases;
  const std::vector<unsigned> ns{8, 12, 16, 20};
  const auto c = check_shevtsova(ns, 3, 105, {}, &cases);
  std::ostringstream os;
  os << tally(c) << " (tol 1e-9); slack by case:";
  for (const auto& k : cases) os << " " << k.kind << "@" << k.n << "=" << fmt("%.4f", k.bound - k.distance);
  return {c.passed() && c.cases == ns.size() * 4, os.str()};
}

// 6. Homogenization inequalities for 10^4 random non-homogeneous LTFs, n <= 10.
Outcome homogenization() {
  const auto checks = check_homogenization(10000, 10, 106);
  bool ok = true;
  std::string d;
  for (const auto& c : checks) {
    ok = ok && c.passed();
    d += (d.empty() ? "" : "; ") + tally(c);
  }
  return {ok, d + " (tol 1e-12)"};
}

// Composite Simpson on [0, 40] of 2 z^r phi(z), i.e. E|Z|^r.
double simpson_abs_moment(int r) {
  const int panels = 400000;
  const double b = 40.0, h = b / panels;
  auto f = [r](double z) { return 2.0 * std::pow(z, r) * normal_pdf(z); };
  double s = f(0.0) + f(b);
  for (int k = 1; k < panels; ++k) s += (k % 2 ? 4.0 : 2.0) * f(k * h);
  return s * h / 3.0;
}

// 7. Normal moment closed forms against quadrature (1e-6) and 10^6 samples (5 SE).
Outcome normal_moments() {
  const double mu3 = 2.0 * std::numbers::sqrt2 / std::sqrt(std::numbers::pi);
  const double s2sq = 2.0, s3sq = 15.0 - 8.0 / std::numbers::pi;
  const double q3 = simpson_abs_moment(3), q4 = simpson_abs_moment(4), q6 = simpson_abs_moment(6);
  const double e_mu3 = std::fabs(q3 - mu3), e_s2 = std::fabs((q4 - 1.0) - s2sq), e_s3 = std::fabs((q6 - q3 * q3) - s3sq);
  const auto m = WeightDistribution::normal().moments();
  const double e_impl = std::max({std::fabs(m.mu3 - mu3), std::fabs(m.sigma2 * m.sigma2 - s2sq),
                                  std::fabs(m.sigma3 * m.sigma3 - s3sq)});
  const bool quad_ok = std::max({e_mu3, e_s2, e_s3, e_impl}) <= 1e-6;

  CounterStream s(derive_key(107, {}));
  const auto d = WeightDistribution::normal();
  const std::size_t count = 1000000;
  long double a2 = 0, a3 = 0, a4 = 0, a6 = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const double w = std::fabs(d.sample_standardized(s));
    const double w2 = w * w;
    a2 += w2;
    a3 += w2 * w;
    a4 += w2 * w2;
    a6 += w2 * w2 * w2;
  }
  const double nn = static_cast<double>(count);
  const double m2 = static_cast<double>(a2) / nn, m3 = static_cast<double>(a3) / nn;
  const double m4 = static_cast<double>(a4) / nn, m6 = static_cast<double>(a6) / nn;
  // standard errors from the closed-form variances of w^2 and |w|^3
  const double z2 = std::fabs(m2 - 1.0) / std::sqrt(s2sq / nn);
  const double z3 = std::fabs(m3 - mu3) / std::sqrt(s3sq / nn);
  const double m4_var = 105.0 - 9.0;  // Var(w^4) = E w^8 - (E w^4)^2
  const double z4 = std::fabs(m4 - 3.0) / std::sqrt(m4_var / nn);
  const double m6_var = 10395.0 - 225.0;  // E w^12 - (E w^6)^2
  const double z6 = std::fabs(m6 - 15.0) / std::sqrt(m6_var / nn);
  const double zmax = std::max({z2, z3, z4, z6});
  return {quad_ok && zmax <= 5.0,
          "quadrature errors mu3=" + fmt("%.1e", e_mu3) + " sigma2^2=" + fmt("%.1e", e_s2) + " sigma3^2=" +
              fmt("%.1e", e_s3) + " implementation=" + fmt("%.1e", e_impl) + " (tol 1e-6); sample |z| max = " +
              fmt("%.2f", zmax) + " over 1e6 draws (tol 5 SE)"};
}

ExperimentConfig n16_config(const WeightDistribution& d, std::uint64_t seed) {
  ExperimentConfig c;
  c.distribution = d;
  c.n_values = {16};
  c.trials_per_n = 1000;
  c.master_seed = seed;
  return c;
}

// 8. n = 16, 1000 trials for uniform and normal weights.
Outcome random_ltf_experiment() {
  bool ok = true;
  std::ostringstream os;
  for (const auto& d : {WeightDistribution::uniform(1.0), WeightDistribution::normal()}) {
    const auto a = run_experiment(n16_config(d, 108));
    const auto b = run_experiment(n16_config(d, 208));
    const auto& sa = a.summary.front();
    const auto& sb = b.summary.front();
    // (a) Khintchine on every trial, exact influences
    std::uint64_t kh_fail = 0;
    for (const auto& r : a.records) kh_fail += r.influence + 1e-9 >= r.khintchine_clamped ? 0 : 1;
    for (const auto& r : b.records) kh_fail += r.influence + 1e-9 >= r.khintchine_clamped ? 0 : 1;
    // (b) certificate holds at least as often as its success probability, among non-vacuous trials
    const std::uint64_t nv = sa.certificate_nonvacuous_trials + sb.certificate_nonvacuous_trials;
    bool cert_ok = true;
    std::string cert;
    if (nv == 0) {
      cert = "certificate vacuous on all 2000 trials (value " + fmt("%.3g", a.records.front().certificate) +
             "), nothing to check";
    } else {
      std::uint64_t held = 0;
      for (const auto* res : {&a, &b}) {
        for (const auto& r : res->records) held += (r.certificate > 0.0 && r.influence >= r.certificate) ? 1 : 0;
      }
      const double frac = static_cast<double>(held) / static_cast<double>(nv);
      cert_ok = frac >= sa.certificate_success_probability;
      cert = "certificate held on " + fmt("%.4f", frac) + " of " + std::to_string(nv) + " non-vacuous trials vs " +
             fmt("%.4f", sa.certificate_success_probability);
    }
    // (c) max H / sqrt(n) finite and within 10% across the two seed batches
    const double ca = *sa.c_obs_sqrt_n, cb = *sb.c_obs_sqrt_n;
    const double rel = std::fabs(ca - cb) / std::max(ca, cb);
    const bool stable = std::isfinite(ca) && std::isfinite(cb) && rel <= 0.10;
    ok = ok && kh_fail == 0 && cert_ok && stable;
    os << d.label() << ": max H/Inf=" << fmt("%.4f", sa.max_fei_ratio.value_or(NAN)) << "/"
       << fmt("%.4f", sb.max_fei_ratio.value_or(NAN)) << " min Inf/sqrt(n)=" << fmt("%.4f", sa.min_inf_over_sqrt_n)
       << "/" << fmt("%.4f", sb.min_inf_over_sqrt_n) << " khintchine failures=" << kh_fail << "; " << cert
       << "; max H/sqrt(n)=" << fmt("%.4f", ca) << " vs " << fmt("%.4f", cb) << " (rel diff " << fmt("%.3f", rel)
       << ", tol 0.10). ";
  }
  return {ok, os.str()};
}

// 9. Chernoff coverage of [np/2, 3np/2] over 10^5 Bernoulli-sum draws.
Outcome chernoff() {
  bool ok = true;
  std::ostringstream os;
  for (auto [n, p] : {std::pair<std::uint64_t, double>{100, 0.3}, {200, 0.5}}) {
    const auto iv = chernoff_count_interval(n, p);
    CounterStream s(derive_key(109, {n}));
    const std::uint64_t draws = 100000;
    std::uint64_t inside = 0;
    for (std::uint64_t t = 0; t < draws; ++t) {
      std::uint64_t x = 0;
      for (std::uint64_t j = 0; j < n; ++j) x += uniform01(s) < p ? 1 : 0;
      const double xd = static_cast<double>(x);
      inside += (iv.lo <= xd && xd <= iv.hi) ? 1 : 0;
    }
    const double cov = static_cast<double>(inside) / static_cast<double>(draws);
    ok = ok && cov >= iv.probability;
    os << "(n=" << n << ", p=" << p << "): coverage " << fmt("%.5f", cov) << " >= " << fmt("%.5f", iv.probability)
       << "; ";
  }
  return {ok, os.str()};
}

std::string render(const ExperimentResult& r) {
  std::ostringstream os;
  emit(os, r.records, OutputFormat::csv);
  os << r.summary_json().dump() << '\n';
  return os.str();
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 10. Byte-identical output across runs and thread counts.
Outcome determinism(const std::string& cli) {
  ExperimentConfig c;
  c.distribution = WeightDistribution::uniform(1.0);
  c.n_values = {5, 12, 30};
  c.trials_per_n = 8;
  c.master_seed = 110;
  c.mc_samples = 5000;
  std::vector<std::string> outputs;
  for (unsigned t : {1U, 1U, 2U, 4U}) {
    c.threads = t;
    outputs.push_back(render(run_experiment(c)));
  }
  bool ok = true;
  for (const auto& o : outputs) ok = ok && o == outputs.front();
  std::string d = "library: 4 runs (threads 1,1,2,4) identical=" + std::string(ok ? "yes" : "no");

  if (!cli.empty()) {
    const auto dir = std::filesystem::temp_directory_path() / ("ltfei_acceptance_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    const auto cfg = dir / "config.toml";
    std::ofstream(cfg) << "master_seed = 110\nn_values = [5, 12, 30]\ntrials_per_n = 8\nmc_samples = 5000\n"
                          "[distribution]\nkind = \"uniform\"\nparam = 1.0\n";
    std::vector<std::string> files;
    bool ran = true;
    int k = 0;
    for (unsigned t : {1U, 1U, 4U}) {
      for (const char* format : {"csv", "jsonl"}) {
        const auto out = dir / ("out" + std::to_string(k++) + "." + format);
        const std::string cmd = "\"" + cli + "\" experiment --config \"" + cfg.string() + "\" --threads " +
                                std::to_string(t) + " --format " + format + " --out \"" + out.string() +
                                "\" --summary \"" + out.string() + ".summary\"";
        ran = ran && std::system(cmd.c_str()) == 0;
        files.push_back(slurp(out) + slurp(out.string() + ".summary"));
      }
    }
    bool same = ran;
    for (std::size_t i = 2; i < files.size(); ++i) same = same && files[i] == files[i % 2];
    std::filesystem::remove_all(dir);
    ok = ok && same && !files[0].empty();
    d += "; CLI: 3 runs x {csv, jsonl} (threads 1,1,4) identical=" + std::string(same ? "yes" : "no");
  }
  return {ok, d};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const std::vector<Criterion> criteria = {
      {1, "parseval_and_transform", 30, parseval},
      {2, "interval_influence_identity", 0, interval_identity},
      {3, "khintchine_expectation", 0, khintchine_expectation},
      {4, "bound_soundness", 0, bound_soundness},
      {5, "berry_esseen_distance", 120, shevtsova},
      {6, "homogenization_reduction", 0, homogenization},
      {7, "normal_moments", 0, normal_moments},
      {8, "random_ltf_experiment_n16", 300, random_ltf_experiment},
      {9, "chernoff_count_coverage", 0, chernoff},
      {10, "determinism", 0, [&] { return determinism(cli); }},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool pass = o.pass;
    std::string timing = fmt("%.1fs", secs);
    if (c.time_limit_s > 0) {
      timing += " (limit " + fmt("%.0fs", c.time_limit_s) + ")";
      pass = pass && secs <= c.time_limit_s;
    }
    failed += pass ? 0 : 1;
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << c.id << " " << c.name << " " << timing << ": " << o.detail
              << std::endl;
  }
  std::cout << (failed ? "FAILED " : "PASSED ") << (criteria.size() - failed) << "/" << criteria.size() << std::endl;
  return failed ? 1 : 0;
}
