#pragma once

#include <compare>
#include <concepts>
#include <cstdint>
#include <string>
#include <vector>

#include "svsp/bytes.hpp"

namespace svsp::crypto {

// Arbitrary-precision signed integer. 32-bit limbs, little-endian limb
// order, sign-magnitude. Sized for protocol work (moduli up to a few
// thousand bits), not for number-crunching.
class BigInt {
 public:
  BigInt() = default;

  template <std::integral T>
  BigInt(T v) {  // NOLINT: implicit by design, mirrors built-in integers
    if (v == 0) return;
    uint64_t mag;
    if constexpr (std::is_signed_v<T>) {
      negative_ = v < 0;
      mag = negative_ ? ~static_cast<uint64_t>(v) + 1 : static_cast<uint64_t>(v);
    } else {
      mag = static_cast<uint64_t>(v);
    }
    limbs_.push_back(static_cast<uint32_t>(mag));
    if (mag >> 32) limbs_.push_back(static_cast<uint32_t>(mag >> 32));
  }

  static BigInt from_decimal(std::string_view text);  // throws std::invalid_argument
  std::string to_decimal() const;

  // Big-endian magnitude bytes; `width` left-pads with zeros (throws
  // std::length_error if the value does not fit). Zero with width 0 encodes
  // as the empty string. Negative values are not encodable.
  Bytes to_bytes_be(size_t width = 0) const;
  static BigInt from_bytes_be(BytesView data);

  bool is_zero() const { return limbs_.empty(); }
  bool is_negative() const { return negative_; }
  bool is_odd() const { return !limbs_.empty() && (limbs_[0] & 1); }
  // Number of significant bits of the magnitude; 0 for zero.
  size_t bit_length() const;
  bool bit(size_t i) const;

  // Magnitude as uint64, throws std::overflow_error if it does not fit.
  uint64_t to_u64() const;

  BigInt operator-() const;
  BigInt& negate();

  BigInt& operator+=(const BigInt& rhs);
  BigInt& operator-=(const BigInt& rhs);
  BigInt& operator*=(const BigInt& rhs);
  BigInt& operator/=(const BigInt& rhs);  // truncates toward zero
  BigInt& operator%=(const BigInt& rhs);  // remainder has the dividend's sign
  BigInt& operator<<=(size_t bits);
  BigInt& operator>>=(size_t bits);

  friend BigInt operator+(BigInt a, const BigInt& b) { return a += b; }
  friend BigInt operator-(BigInt a, const BigInt& b) { return a -= b; }
  friend BigInt operator*(BigInt a, const BigInt& b) { return a *= b; }
  friend BigInt operator/(BigInt a, const BigInt& b) { return a /= b; }
  friend BigInt operator%(BigInt a, const BigInt& b) { return a %= b; }
  friend BigInt operator<<(BigInt a, size_t bits) { return a <<= bits; }
  friend BigInt operator>>(BigInt a, size_t bits) { return a >>= bits; }

  // Quotient and remainder in one pass; throws std::domain_error on
  // division by zero.
  static void divmod(const BigInt& num, const BigInt& den, BigInt& quot, BigInt& rem);

  friend bool operator==(const BigInt& a, const BigInt& b) {
    return a.negative_ == b.negative_ && a.limbs_ == b.limbs_;
  }
  friend std::strong_ordering operator<=>(const BigInt& a, const BigInt& b);

 private:
  using Limbs = std::vector<uint32_t>;

  void trim();
  static int cmp_mag(const Limbs& a, const Limbs& b);
  static void add_mag(Limbs& a, const Limbs& b);
  static void sub_mag(Limbs& a, const Limbs& b);  // requires |a| >= |b|
  static Limbs mul_mag(const Limbs& a, const Limbs& b);
  static void divmod_mag(const Limbs& num, const Limbs& den, Limbs& quot, Limbs& rem);

  Limbs limbs_;            // no trailing zero limbs
  bool negative_ = false;  // always false for zero
};

}  // namespace svsp::crypto
