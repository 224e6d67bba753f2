#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "ltfei/boolean_function.hpp"
#include "ltfei/errors.hpp"

namespace ltfei {

/// Tolerance for Parseval's identity on spectra of +-1 functions.
inline constexpr double kParsevalTolerance = 1e-9;

/// Normalized Fourier coefficients indexed by subset bitmask (bit i-1 <=> i in S).
class FourierSpectrum {
 public:
  FourierSpectrum(unsigned arity, std::vector<double> coeffs) : arity_(arity), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != (std::size_t{1} << arity_)) throw ValidationError("spectrum size must be 2^arity");
  }

  [[nodiscard]] unsigned arity() const noexcept { return arity_; }
  [[nodiscard]] std::span<const double> coeffs() const noexcept { return coeffs_; }
  [[nodiscard]] double operator[](std::uint64_t subset) const noexcept { return coeffs_[subset]; }

  /// Sum of squared coefficients.
  [[nodiscard]] double squared_mass() const noexcept {
    double s = 0.0;
    for (double c : coeffs_) s += c * c;
    return s;
  }

  void require_parseval(double tolerance = kParsevalTolerance) const {
    const double mass = squared_mass();
    if (!(std::fabs(mass - 1.0) <= tolerance)) {
      throw ValidationError("spectrum violates Parseval: squared mass = " + std::to_string(mass));
    }
  }

 private:
  unsigned arity_;
  std::vector<double> coeffs_;
};

/// Unnormalized in-place fast Walsh-Hadamard transform, O(n 2^n).
/// Applying it twice multiplies the input by 2^n.
inline void fwht_inplace(std::span<double> a) {
  const std::size_t n = a.size();
  if (n == 0 || !std::has_single_bit(n)) throw ValidationError("transform length must be a power of two");
  for (std::size_t h = 1; h < n; h <<= 1) {
    for (std::size_t i = 0; i < n; i += h << 1) {
      for (std::size_t j = i; j < i + h; ++j) {
        const double x = a[j];
        const double y = a[j + h];
        a[j] = x + y;
        a[j + h] = x - y;
      }
    }
  }
}

/// f^(S) = 2^-n sum_x f(x) prod_{i in S} x_i.
///
/// Index k has x_i = +1 on set bits, so prod_{i in S} x_i = (-1)^{|S \ k|}.
/// The butterfly computes sum_k f(k) (-1)^{|S & k|}; reversing the table
/// (k -> ~k) turns that into the required character sign.
inline FourierSpectrum wht(const BooleanFunction& f) {
  const std::uint64_t size = f.size();
  const std::uint64_t mask = size - 1;
  std::vector<double> a(size);
  for (std::uint64_t k = 0; k < size; ++k) a[k] = static_cast<double>(f.value(k ^ mask));
  fwht_inplace(a);
  const double scale = 1.0 / static_cast<double>(size);
  for (double& c : a) c *= scale;
  return FourierSpectrum(f.arity(), std::move(a));
}

/// Fourier entropy in bits: sum_S f^(S)^2 log2(1 / f^(S)^2), with 0 log 0 = 0.
/// Under the natural logarithm every value (and any fitted constant) scales by ln 2.
inline double entropy(const FourierSpectrum& s) {
  s.require_parseval();
  double h = 0.0;
  for (double c : s.coeffs()) {
    const double p = c * c;
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

/// min_S log2(1 / f^(S)^2).
inline double min_entropy(const FourierSpectrum& s) {
  s.require_parseval();
  double best = 0.0;
  for (double c : s.coeffs()) best = std::fmax(best, c * c);
  if (best == 0.0) throw ValidationError("all-zero spectrum has no min-entropy");
  return -std::log2(best);
}

/// sum_S |S| f^(S)^2.
inline double influence_spectral(const FourierSpectrum& s) {
  double total = 0.0;
  const auto coeffs = s.coeffs();
  for (std::uint64_t subset = 0; subset < coeffs.size(); ++subset) {
    total += static_cast<double>(std::popcount(subset)) * coeffs[subset] * coeffs[subset];
  }
  return total;
}

struct InfluenceProfile {
  double total = 0.0;
  std::vector<double> per_coordinate;
};

/// Flip counts on the packed table: Inf_i(f) = Pr_x[f(x) != f(x^i)].
inline std::vector<std::uint64_t> sensitive_input_counts(const BooleanFunction& f) {
  const unsigned n = f.arity();
  const auto words = f.words();
  std::vector<std::uint64_t> counts(n, 0);
  const std::uint64_t valid = n >= 6 ? ~std::uint64_t{0} : ((std::uint64_t{1} << f.size()) - 1);
  for (unsigned i = 0; i < n; ++i) {
    std::uint64_t c = 0;
    if (i < 6) {
      // positions with bit i clear, paired with position + 2^i in the same word
      static constexpr std::uint64_t kLowHalf[6] = {0x5555555555555555ULL, 0x3333333333333333ULL,
                                                    0x0F0F0F0F0F0F0F0FULL, 0x00FF00FF00FF00FFULL,
                                                    0x0000FFFF0000FFFFULL, 0x00000000FFFFFFFFULL};
      const unsigned shift = 1U << i;
      for (std::uint64_t w : words) {
        c += 2 * static_cast<std::uint64_t>(std::popcount((w ^ (w >> shift)) & kLowHalf[i] & valid));
      }
    } else {
      const std::size_t stride = std::size_t{1} << (i - 6);
      for (std::size_t a = 0; a < words.size(); ++a) {
        c += static_cast<std::uint64_t>(std::popcount(words[a] ^ words[a ^ stride]));
      }
    }
    counts[i] = c;
  }
  return counts;
}

inline InfluenceProfile influence_combinatorial(const BooleanFunction& f) {
  const auto counts = sensitive_input_counts(f);
  InfluenceProfile out;
  out.per_coordinate.resize(counts.size());
  const double scale = 1.0 / static_cast<double>(f.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    out.per_coordinate[i] = static_cast<double>(counts[i]) * scale;
    out.total += out.per_coordinate[i];
  }
  return out;
}

}  // namespace ltfei
