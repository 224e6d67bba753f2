#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ltfei/errors.hpp"

namespace ltfei {

/// Default upper limit on the arity of explicit truth tables (2^20 entries).
inline constexpr unsigned kDefaultMaxArity = 20;

/// Bit-packed truth table of f : {+1,-1}^n -> {+1,-1}.
///
/// Input index k encodes x_i = +1 iff bit (i-1) of k is set; table bit k is 1
/// iff f(x) = +1. Every module uses this encoding.
class BooleanFunction {
 public:
  /// Constant -1 function of the given arity.
  explicit BooleanFunction(unsigned arity, unsigned max_arity = kDefaultMaxArity) : arity_(arity) {
    if (arity == 0) throw ValidationError("arity must be at least 1");
    if (arity > max_arity) {
      throw ArityError("arity " + std::to_string(arity) + " exceeds limit " + std::to_string(max_arity));
    }
    words_.assign(word_count(arity), 0);
  }

  [[nodiscard]] unsigned arity() const noexcept { return arity_; }
  [[nodiscard]] std::uint64_t size() const noexcept { return std::uint64_t{1} << arity_; }

  [[nodiscard]] bool bit(std::uint64_t k) const noexcept { return ((words_[k >> 6] >> (k & 63)) & 1U) != 0; }
  /// f(x) as +1/-1 for input index k.
  [[nodiscard]] int value(std::uint64_t k) const noexcept { return bit(k) ? 1 : -1; }

  void set_bit(std::uint64_t k, bool on) noexcept {
    const std::uint64_t mask = std::uint64_t{1} << (k & 63);
    if (on) {
      words_[k >> 6] |= mask;
    } else {
      words_[k >> 6] &= ~mask;
    }
  }

  [[nodiscard]] std::span<const std::uint64_t> words() const noexcept { return words_; }

  /// Number of inputs mapped to +1.
  [[nodiscard]] std::uint64_t count_ones() const noexcept {
    std::uint64_t c = 0;
    for (std::uint64_t w : words_) c += static_cast<std::uint64_t>(std::popcount(w));
    return c;
  }

  /// Hex string of the packed table: bytes in ascending input order, bit j of
  /// byte b holds input index 8b + j (little-endian within bytes), each byte
  /// written as two lowercase hex digits, high nibble first.
  [[nodiscard]] std::string to_hex() const {
    static constexpr char digits[] = "0123456789abcdef";
    const std::uint64_t bytes = byte_count(arity_);
    std::string out;
    out.reserve(bytes * 2);
    for (std::uint64_t b = 0; b < bytes; ++b) {
      const auto byte = static_cast<unsigned>((words_[b >> 3] >> (8 * (b & 7))) & 0xFFU);
      out.push_back(digits[byte >> 4]);
      out.push_back(digits[byte & 0xF]);
    }
    return out;
  }

  static BooleanFunction from_hex(unsigned arity, std::string_view hex, unsigned max_arity = kDefaultMaxArity) {
    BooleanFunction f(arity, max_arity);
    const std::uint64_t bytes = byte_count(arity);
    if (hex.size() != bytes * 2) throw ValidationError("hex table length does not match arity");
    auto nibble = [](char c) -> unsigned {
      if (c >= '0' && c <= '9') return static_cast<unsigned>(c - '0');
      if (c >= 'a' && c <= 'f') return static_cast<unsigned>(c - 'a' + 10);
      if (c >= 'A' && c <= 'F') return static_cast<unsigned>(c - 'A' + 10);
      throw ValidationError("invalid hex digit in truth table");
    };
    const std::uint64_t valid = f.size() >= 8 ? 0xFFU : ((1U << f.size()) - 1U);
    for (std::uint64_t b = 0; b < bytes; ++b) {
      const std::uint64_t byte = (nibble(hex[2 * b]) << 4) | nibble(hex[2 * b + 1]);
      if ((byte & ~valid) != 0) throw ValidationError("hex table sets bits beyond 2^arity");
      f.words_[b >> 3] |= byte << (8 * (b & 7));
    }
    return f;
  }

  friend bool operator==(const BooleanFunction&, const BooleanFunction&) = default;

 private:
  static std::size_t word_count(unsigned arity) noexcept {
    return arity <= 6 ? 1 : (std::size_t{1} << (arity - 6));
  }
  static std::uint64_t byte_count(unsigned arity) noexcept {
    return arity <= 3 ? 1 : (std::uint64_t{1} << (arity - 3));
  }

  unsigned arity_;
  std::vector<std::uint64_t> words_;
};

/// Builds a function from its +-1 values listed in input-index order.
inline BooleanFunction from_truth_values(unsigned arity, std::span<const int> values,
                                         unsigned max_arity = kDefaultMaxArity) {
  if (arity == 0) throw ValidationError("arity must be at least 1");
  if (arity > max_arity) {
    throw ArityError("arity " + std::to_string(arity) + " exceeds limit " + std::to_string(max_arity));
  }
  if (values.size() != (std::size_t{1} << arity)) {
    throw ValidationError("expected 2^arity = " + std::to_string(std::size_t{1} << arity) + " values, got " +
                          std::to_string(values.size()));
  }
  BooleanFunction f(arity, max_arity);
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] != 1 && values[k] != -1) {
      throw ValidationError("truth value at index " + std::to_string(k) + " is not +1 or -1");
    }
    f.set_bit(k, values[k] == 1);
  }
  return f;
}

/// Input index k as the +-1 vector (x_1, ..., x_n).
inline std::vector<int> input_vector(std::uint64_t k, unsigned arity) {
  std::vector<int> x(arity);
  for (unsigned i = 0; i < arity; ++i) x[i] = ((k >> i) & 1U) != 0 ? 1 : -1;
  return x;
}

}  // namespace ltfei
