#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "ltfei/boolean_function.hpp"
#include "ltfei/ltf.hpp"
#include "ltfei/spectrum.hpp"
#include "oracles.hpp"

using namespace ltfei;

namespace {

BooleanFunction maj3() { return from_truth_values(3, std::vector<int>{-1, -1, -1, 1, -1, 1, 1, 1}); }

BooleanFunction parity(unsigned n) {
  std::vector<int> v(std::size_t{1} << n);
  for (std::size_t k = 0; k < v.size(); ++k) {
    int p = 1;
    for (unsigned i = 1; i <= n; ++i) p *= oracle::x_of(k, i);
    v[k] = p;
  }
  return from_truth_values(n, v);
}

}  // namespace

TEST(TruthValues, DictatorEncoding) {
  const auto f = from_truth_values(1, std::vector<int>{-1, 1});
  EXPECT_EQ(f.value(0), -1);
  EXPECT_EQ(f.value(1), 1);
  EXPECT_EQ(input_vector(1, 1), (std::vector<int>{1}));
}

TEST(TruthValues, ConstantAndParity) {
  const auto c = from_truth_values(2, std::vector<int>{1, 1, 1, 1});
  EXPECT_EQ(c.count_ones(), 4u);
  // x1 x2 at k = 0..3: (-1,-1) (+1,-1) (-1,+1) (+1,+1)
  const auto p = from_truth_values(2, std::vector<int>{1, -1, -1, 1});
  EXPECT_EQ(p, parity(2));
}

TEST(TruthValues, Errors) {
  EXPECT_THROW(from_truth_values(2, std::vector<int>{1, 1, 1}), ValidationError);
  EXPECT_THROW(from_truth_values(2, std::vector<int>{1, 0, 1, 1}), ValidationError);
  EXPECT_THROW(from_truth_values(3, std::vector<int>(8, 1), 2), ArityError);
  EXPECT_THROW(BooleanFunction(21), ArityError);
  EXPECT_THROW(BooleanFunction(0), ValidationError);
}

TEST(TruthValues, HexRoundTrip) {
  const auto f = maj3();
  EXPECT_EQ(f.to_hex(), "e8");
  EXPECT_EQ(BooleanFunction::from_hex(3, "e8"), f);
  std::mt19937_64 g(5);
  for (unsigned n : {1u, 2u, 5u, 7u, 10u}) {
    BooleanFunction h(n);
    for (std::uint64_t k = 0; k < h.size(); ++k) h.set_bit(k, g() & 1U);
    EXPECT_EQ(BooleanFunction::from_hex(n, h.to_hex()), h);
  }
  EXPECT_THROW(BooleanFunction::from_hex(3, "e"), ValidationError);
  EXPECT_THROW(BooleanFunction::from_hex(3, "zz"), ValidationError);
}

TEST(Wht, BasisCharacters) {
  const auto d = wht(from_truth_values(1, std::vector<int>{-1, 1}));
  EXPECT_DOUBLE_EQ(d[1], 1.0);
  EXPECT_DOUBLE_EQ(d[0], 0.0);
  const auto p = wht(parity(4));
  for (std::uint64_t S = 0; S < 16; ++S) EXPECT_DOUBLE_EQ(std::fabs(p[S]), S == 15 ? 1.0 : 0.0);
}

TEST(Wht, Maj3MatchesDefinition) {
  const auto s = wht(maj3());
  EXPECT_DOUBLE_EQ(s[1], 0.5);
  EXPECT_DOUBLE_EQ(s[2], 0.5);
  EXPECT_DOUBLE_EQ(s[4], 0.5);
  EXPECT_DOUBLE_EQ(s[7], -0.5);
  EXPECT_DOUBLE_EQ(s[0], 0.0);
  EXPECT_DOUBLE_EQ(s[3], 0.0);
}

TEST(Wht, RandomFunctionsMatchDefinition) {
  std::mt19937_64 g(11);
  for (unsigned n = 1; n <= 8; ++n) {
    std::vector<int> v(std::size_t{1} << n);
    for (int& x : v) x = (g() & 1U) ? 1 : -1;
    const auto s = wht(from_truth_values(n, v));
    const auto ref = oracle::fourier_by_definition(v, n);
    for (std::size_t S = 0; S < ref.size(); ++S) EXPECT_NEAR(s[S], ref[S], 1e-15) << "n=" << n << " S=" << S;
    EXPECT_NEAR(s.squared_mass(), 1.0, 1e-12);
  }
}

TEST(Wht, UnnormalizedTransformIsInvolutionUpToScale) {
  std::mt19937_64 g(3);
  std::vector<double> a(256);
  for (double& x : a) x = (g() & 1U) ? 1.0 : -1.0;
  auto b = a;
  fwht_inplace(b);
  fwht_inplace(b);
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_DOUBLE_EQ(b[k], 256.0 * a[k]);
  std::vector<double> bad(3);
  EXPECT_THROW(fwht_inplace(bad), ValidationError);
}

TEST(Entropy, Examples) {
  EXPECT_DOUBLE_EQ(entropy(wht(from_truth_values(1, std::vector<int>{-1, 1}))), 0.0);
  EXPECT_NEAR(entropy(wht(maj3())), 2.0, 1e-12);
  // bent function x1x2 xor x3x4 (as +-1 product of ANDs) has all 16 squares equal
  std::vector<int> v(16);
  for (std::size_t k = 0; k < 16; ++k) {
    const bool a = (k & 1) && (k & 2);
    const bool b = (k & 4) && (k & 8);
    v[k] = (a != b) ? -1 : 1;
  }
  EXPECT_NEAR(entropy(wht(from_truth_values(4, v))), 4.0, 1e-12);
}

TEST(Entropy, RejectsNonParsevalSpectrum) {
  FourierSpectrum s(1, {0.5, 0.5});
  EXPECT_THROW((void)entropy(s), ValidationError);
  EXPECT_THROW((void)min_entropy(s), ValidationError);
}

TEST(MinEntropy, Examples) {
  EXPECT_DOUBLE_EQ(min_entropy(wht(from_truth_values(1, std::vector<int>{-1, 1}))), 0.0);
  EXPECT_NEAR(min_entropy(wht(maj3())), 2.0, 1e-12);
  EXPECT_DOUBLE_EQ(min_entropy(wht(from_truth_values(2, std::vector<int>{1, 1, 1, 1}))), 0.0);
}

TEST(Influence, SpectralExamples) {
  EXPECT_DOUBLE_EQ(influence_spectral(wht(from_truth_values(1, std::vector<int>{-1, 1}))), 1.0);
  for (unsigned n : {2u, 5u, 9u}) EXPECT_NEAR(influence_spectral(wht(parity(n))), n, 1e-12);
  EXPECT_NEAR(influence_spectral(wht(maj3())), 1.5, 1e-12);
}

TEST(Influence, CombinatorialExamples) {
  const auto d = influence_combinatorial(from_truth_values(2, std::vector<int>{-1, 1, -1, 1}));
  EXPECT_EQ(d.per_coordinate, (std::vector<double>{1.0, 0.0}));
  EXPECT_DOUBLE_EQ(d.total, 1.0);
  const auto m = influence_combinatorial(maj3());
  EXPECT_EQ(m.per_coordinate, (std::vector<double>{0.5, 0.5, 0.5}));
  EXPECT_DOUBLE_EQ(m.total, 1.5);
  const auto c = influence_combinatorial(from_truth_values(3, std::vector<int>(8, -1)));
  EXPECT_EQ(c.per_coordinate, (std::vector<double>(3, 0.0)));
}

TEST(Influence, PackedFlipCountsMatchNaiveFlipping) {
  std::mt19937_64 g(99);
  for (unsigned n = 1; n <= 12; ++n) {
    std::vector<int> v(std::size_t{1} << n);
    for (int& x : v) x = (g() % 3 == 0) ? 1 : -1;
    const auto packed = influence_combinatorial(from_truth_values(n, v));
    EXPECT_EQ(packed.per_coordinate, oracle::influences_by_flipping(v, n)) << "n=" << n;
  }
}

TEST(Influence, SpectralEqualsCombinatorialOnRandomLtfs) {
  std::mt19937_64 g(2024);
  std::normal_distribution<double> z;
  for (unsigned n = 1; n <= 12; ++n) {
    for (int t = 0; t < 20; ++t) {
      std::vector<double> w(n + 1);
      for (double& x : w) x = z(g);
      const auto f = to_boolean_function(Ltf(w));
      const auto s = wht(f);
      EXPECT_NEAR(s.squared_mass(), 1.0, kParsevalTolerance);
      EXPECT_NEAR(influence_spectral(s), influence_combinatorial(f).total, 1e-9);
      const double h = entropy(s);
      EXPECT_GE(h, 0.0);
      EXPECT_LE(h, n + 1e-12);
      EXPECT_LE(min_entropy(s), h + 1e-12);
    }
  }
}
