#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "ltfei/experiment.hpp"
#include "ltfei/records.hpp"
#include "ltfei/toml_lite.hpp"

using namespace ltfei;

namespace {

ExperimentRecord sample_record() {
  ExperimentRecord r;
  r.n = 3;
  r.trial_id = 7;
  r.seed = 0xFFFFFFFFFFFFFFFFULL;
  r.distribution = "normal(1)";
  r.weights_digest = "0123456789abcdef";
  r.path = "exact";
  r.entropy_bits = 2.0;
  r.min_entropy_bits = 2.0;
  r.influence = 1.5;
  r.per_coordinate = {0.5, 0.5, 0.1 + 0.2};
  r.exact_agreement = true;
  r.khintchine_bound = -0.3876275643042054;
  r.alpha = 1.0 / 3.0;
  r.fei_ratio = 4.0 / 3.0;
  r.inf_over_sqrt_n = 1.5 / std::sqrt(3.0);
  r.tau_regular = true;
  r.certificate = -1e-300;
  return r;
}

AnalysisOptions exact_options() {
  AnalysisOptions o;
  return o;
}

ExperimentConfig small_config(unsigned threads) {
  ExperimentConfig c;
  c.n_values = {6, 4, 22};
  c.trials_per_n = 5;
  c.master_seed = 2024;
  c.threads = threads;
  c.mc_samples = 2000;
  c.entropy_constant = 2.0;
  return c;
}

}  // namespace

TEST(Records, CsvRoundTrip) {
  const auto r = sample_record();
  auto e = r;
  e.path = "estimate";
  e.entropy_bits.reset();
  e.min_entropy_bits.reset();
  e.per_coordinate.clear();
  e.influence_half_width = 0.015;
  e.large_weight_half_width = 0.0;
  e.distribution = "uniform(1), \"quoted\"";
  std::ostringstream os;
  emit(os, {r, e}, OutputFormat::csv);
  std::istringstream is(os.str());
  const auto back = parse_csv(is);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0], r);
  EXPECT_EQ(back[1], e);
}

TEST(Records, JsonlRoundTrip) {
  const auto r = sample_record();
  std::ostringstream os;
  emit(os, {r, r}, OutputFormat::jsonl);
  std::istringstream is(os.str());
  const auto back = parse_jsonl(is);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0], r);
  const auto j = nlohmann::json::parse(to_jsonl_line(r));
  EXPECT_TRUE(j["influence_half_width"].is_null());
  EXPECT_TRUE(j["per_coordinate"].is_array());
  EXPECT_TRUE(j["exact_agreement"].is_boolean());
  EXPECT_EQ(j["seed"].get<std::uint64_t>(), 0xFFFFFFFFFFFFFFFFULL);
}

TEST(Records, OneRecordCsvHasTwoLines) {
  std::ostringstream os;
  emit(os, {sample_record()}, OutputFormat::csv);
  const std::string text = os.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
  EXPECT_EQ(text.substr(0, text.find('\n')), csv_header());
  EXPECT_EQ(csv_header().rfind("n,trial_id,seed,", 0), 0u);
}

TEST(Records, FormatParsingAndBadInput) {
  EXPECT_EQ(parse_format("csv"), OutputFormat::csv);
  EXPECT_EQ(parse_format("jsonl"), OutputFormat::jsonl);
  EXPECT_THROW(parse_format("xml"), ValidationError);
  std::istringstream wrong_header("a,b\n1,2\n");
  EXPECT_THROW(parse_csv(wrong_header), ValidationError);
}

TEST(Toml, ParsesConfigSubset) {
  const auto j = parse_toml(R"(# comment
master_seed = 1_000
delta = 0.1
n_values = [
  8, 12,  # trailing comment
  16,
]
alpha_policy = { fixed = 2.5 }

[distribution]
kind = "uniform"
param = 1.0

[output]
path = "out\\run.csv"
format = "csv"
)");
  EXPECT_EQ(j["master_seed"], 1000);
  EXPECT_EQ(j["n_values"], nlohmann::json({8, 12, 16}));
  EXPECT_EQ(j["alpha_policy"]["fixed"], 2.5);
  EXPECT_EQ(j["distribution"]["kind"], "uniform");
  EXPECT_EQ(j["output"]["path"], "out\\run.csv");
  const auto dotted = parse_toml("[a.b]\nc.d = true\n");
  EXPECT_EQ(dotted["a"]["b"]["c"]["d"], true);
}

TEST(Toml, Errors) {
  EXPECT_THROW(parse_toml("a = 1\na = 2\n"), ValidationError);
  EXPECT_THROW(parse_toml("a = \n"), ValidationError);
  EXPECT_THROW(parse_toml("a = inf\n"), ValidationError);
  EXPECT_THROW(parse_toml("a = \"unterminated\n"), ValidationError);
  EXPECT_THROW(parse_toml("[t\n"), ValidationError);
  try {
    parse_toml("x = 1\ny = ?\n");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
}

TEST(Config, FromJsonAndValidation) {
  const auto ok = nlohmann::json::parse(R"({"distribution": {"kind": "normal"}, "n_values": [4, 8],
      "trials_per_n": 3, "master_seed": 5, "output": {"format": "jsonl"}})");
  const auto c = ExperimentConfig::from_json(ok);
  EXPECT_EQ(c.n_values, (std::vector<std::uint64_t>{4, 8}));
  EXPECT_EQ(c.format, OutputFormat::jsonl);
  EXPECT_EQ(c.alpha_policy.kind, AlphaPolicy::Kind::mu3_margin);

  auto bad = ok;
  bad["trials_per_n"] = 0;
  EXPECT_THROW(ExperimentConfig::from_json(bad), ValidationError);
  bad = ok;
  bad["n_values"] = nlohmann::json::array();
  EXPECT_THROW(ExperimentConfig::from_json(bad), ValidationError);
  bad = ok;
  bad["n_values"] = {4, 4};
  EXPECT_THROW(ExperimentConfig::from_json(bad), ValidationError);
  bad = ok;
  bad["colour"] = "red";
  EXPECT_THROW(ExperimentConfig::from_json(bad), ValidationError);
  bad = ok;
  bad["delta"] = 1.5;
  EXPECT_THROW(ExperimentConfig::from_json(bad), ValidationError);
  bad = ok;
  bad["entropy_log_base"] = 10;
  EXPECT_THROW(ExperimentConfig::from_json(bad), ValidationError);
  bad = ok;
  bad["alpha_policy"] = "loose";
  EXPECT_THROW(ExperimentConfig::from_json(bad), ValidationError);
  bad = ok;
  bad["delta"] = "small";
  EXPECT_THROW(ExperimentConfig::from_json(bad), ValidationError);
}

TEST(Config, MissingFileIsIoError) {
  EXPECT_THROW(load_experiment_config("/nonexistent/config.toml"), IoError);
}

TEST(Analyze, Maj3) {
  const auto r = analyze(Ltf({0, 1, 1, 1}), exact_options(), CounterStream(1));
  EXPECT_EQ(r.path, "exact");
  EXPECT_NEAR(*r.entropy_bits, 2.0, 1e-12);
  EXPECT_DOUBLE_EQ(r.influence, 1.5);
  EXPECT_NEAR(*r.fei_ratio, 4.0 / 3.0, 1e-12);
  EXPECT_TRUE(r.exact_agreement);
  EXPECT_EQ(r.per_coordinate, (std::vector<double>{0.5, 0.5, 0.5}));
  EXPECT_FALSE(r.influence_half_width.has_value());
  EXPECT_LE(r.khintchine_clamped, r.influence);
  EXPECT_LE(r.sum_lb_all_weights, r.influence);
}

TEST(Analyze, DictatorHasZeroRatio) {
  const auto r = analyze(Ltf({0, 1}), exact_options(), CounterStream(1));
  EXPECT_DOUBLE_EQ(r.influence, 1.0);
  EXPECT_DOUBLE_EQ(*r.entropy_bits, 0.0);
  EXPECT_DOUBLE_EQ(*r.fei_ratio, 0.0);
}

TEST(Analyze, ConstantHasNoRatio) {
  const auto r = analyze(Ltf({5, 1, 1}), exact_options(), CounterStream(1));
  EXPECT_DOUBLE_EQ(r.influence, 0.0);
  EXPECT_FALSE(r.fei_ratio.has_value());
  EXPECT_FALSE(r.fmei_ratio.has_value());
}

TEST(Analyze, EstimatePathAboveExactLimit) {
  AnalysisOptions o;
  o.exact_limit = 4;
  o.mc.samples = 20000;
  o.alpha_policy.kind = AlphaPolicy::Kind::fixed;
  o.alpha_policy.value = 1.0;
  const Ltf f({0, 1, 1, 1, 1, 1, 1, 1});
  const auto r = analyze(f, o, CounterStream(3));
  EXPECT_EQ(r.path, "estimate");
  EXPECT_FALSE(r.entropy_bits.has_value());
  ASSERT_TRUE(r.influence_half_width.has_value());
  // MAJ7 total influence 7 * C(6,3)/64 = 140/64
  EXPECT_NEAR(r.influence, 140.0 / 64.0, *r.influence_half_width);
  EXPECT_EQ(r.large_weight_count, 7u);
  EXPECT_NEAR(r.large_weight_influence, 140.0 / 64.0, *r.large_weight_half_width);
}

TEST(Experiment, DeterministicAcrossThreadCounts) {
  const auto one = run_experiment(small_config(1));
  const auto four = run_experiment(small_config(4));
  ASSERT_EQ(one.records.size(), 15u);
  EXPECT_EQ(one.records, four.records);
  EXPECT_EQ(one.summary_json(), four.summary_json());
  std::ostringstream a, b;
  emit(a, one.records, OutputFormat::csv);
  emit(b, four.records, OutputFormat::csv);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(one.records.front().n, 4u);
  EXPECT_EQ(one.records.back().path, "estimate");
}

TEST(Experiment, TrialsDependOnlyOnSeedNAndTrialId) {
  auto c = small_config(1);
  const auto full = run_experiment(c);
  c.n_values = {6};
  c.trials_per_n = 2;
  const auto part = run_experiment(c);
  EXPECT_EQ(part.records[1], full.records[6]);
}

TEST(Experiment, SummaryFractions) {
  const auto res = run_experiment(small_config(1));
  ASSERT_EQ(res.summary.size(), 3u);
  for (const auto& s : res.summary) {
    EXPECT_EQ(s.trials, 5u);
    EXPECT_DOUBLE_EQ(s.khintchine_sound_fraction, 1.0);
    EXPECT_DOUBLE_EQ(s.all_weights_sound_fraction, 1.0);
  }
  EXPECT_DOUBLE_EQ(res.summary[0].exact_agreement_fraction, 1.0);
  EXPECT_TRUE(res.summary[0].entropy_bound_fraction.has_value());
  EXPECT_EQ(res.summary[2].exact_trials, 0u);
  EXPECT_FALSE(res.summary[2].c_obs_sqrt_n.has_value());
}

TEST(Digest, StableAndSensitive) {
  const std::vector<double> w{0.0, 1.0};
  EXPECT_EQ(weights_digest(w).size(), 16u);
  EXPECT_EQ(weights_digest(w), weights_digest(std::vector<double>{0.0, 1.0}));
  EXPECT_NE(weights_digest(w), weights_digest(std::vector<double>{-0.0, 1.0}));
}
