#pragma once

// Slow, definition-level reference implementations used only by tests.

#include <cmath>
#include <cstdint>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace oracle {

using Rational = boost::multiprecision::cpp_rational;

/// x_i for input index k (bit i-1 set <=> x_i = +1).
inline int x_of(std::uint64_t k, unsigned i) { return ((k >> (i - 1)) & 1U) ? 1 : -1; }

/// Exact rational value of a double.
inline Rational to_rational(double v) {
  int exp = 0;
  const double mant = std::frexp(v, &exp);
  // mant * 2^53 is an integer
  const auto scaled = static_cast<long long>(std::ldexp(mant, 53));
  Rational r(scaled);
  exp -= 53;
  Rational p(1);
  for (int e = 0; e < std::abs(exp); ++e) p *= 2;
  return exp >= 0 ? Rational(r * p) : Rational(r / p);
}

/// sign(w_0 + sum w_i x_i) with sign(0) = -1, in exact rational arithmetic.
inline int ltf_value(const std::vector<double>& w, std::uint64_t k) {
  Rational s = to_rational(w[0]);
  for (unsigned i = 1; i < w.size(); ++i) s += x_of(k, i) * to_rational(w[i]);
  return s > 0 ? 1 : -1;
}

inline std::vector<int> ltf_table(const std::vector<double>& w) {
  const unsigned n = static_cast<unsigned>(w.size() - 1);
  std::vector<int> t(std::size_t{1} << n);
  for (std::uint64_t k = 0; k < t.size(); ++k) t[k] = ltf_value(w, k);
  return t;
}

/// f^(S) = 2^-n sum_x f(x) prod_{i in S} x_i, straight from the definition.
inline std::vector<double> fourier_by_definition(const std::vector<int>& values, unsigned n) {
  const std::size_t size = std::size_t{1} << n;
  std::vector<double> c(size, 0.0);
  for (std::size_t S = 0; S < size; ++S) {
    long long acc = 0;
    for (std::size_t k = 0; k < size; ++k) {
      int chi = 1;
      for (unsigned i = 1; i <= n; ++i) {
        if ((S >> (i - 1)) & 1U) chi *= x_of(k, i);
      }
      acc += values[k] * chi;
    }
    c[S] = static_cast<double>(acc) / static_cast<double>(size);
  }
  return c;
}

/// Pr_x[f(x) != f(x^i)] by flipping each input.
inline std::vector<double> influences_by_flipping(const std::vector<int>& values, unsigned n) {
  std::vector<double> inf(n, 0.0);
  for (unsigned i = 1; i <= n; ++i) {
    std::uint64_t c = 0;
    for (std::uint64_t k = 0; k < values.size(); ++k) c += values[k] != values[k ^ (std::uint64_t{1} << (i - 1))];
    inf[i - 1] = static_cast<double>(c) / static_cast<double>(values.size());
  }
  return inf;
}

}  // namespace oracle
