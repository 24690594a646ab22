#include "svsp/numtheory.hpp"

#include <array>
#include <stdexcept>

namespace svsp::crypto {

BigInt mod_pow(const BigInt& base, const BigInt& exponent, const BigInt& modulus) {
  if (modulus < BigInt{1}) throw std::domain_error("mod_pow: modulus must be >= 1");
  if (exponent.is_negative()) throw std::domain_error("mod_pow: negative exponent");
  const BigInt one{1};
  if (modulus == one) return BigInt{};

  BigInt result{1};
  BigInt b = base % modulus;
  if (b.is_negative()) b += modulus;
  BigInt e = exponent;
  while (!e.is_zero()) {
    if (e.is_odd()) result = result * b % modulus;
    b = b * b % modulus;
    e >>= 1;
  }
  return result;
}

std::optional<BigInt> mod_inverse(const BigInt& a, const BigInt& m) {
  if (m < BigInt{2}) throw std::domain_error("mod_inverse: modulus must be >= 2");
  // Extended Euclid on (a mod m, m), tracking only the coefficient of a.
  BigInt r0 = a % m;
  if (r0.is_negative()) r0 += m;
  BigInt r1 = m;
  BigInt s0{1}, s1{0};
  while (!r1.is_zero()) {
    BigInt q, rem;
    BigInt::divmod(r0, r1, q, rem);
    BigInt s2 = s0 - q * s1;
    r0 = std::move(r1);
    r1 = std::move(rem);
    s0 = std::move(s1);
    s1 = std::move(s2);
  }
  if (r0 != BigInt{1}) return std::nullopt;
  BigInt inv = s0 % m;
  if (inv.is_negative()) inv += m;
  return inv;
}

BigInt gcd(BigInt a, BigInt b) {
  if (a.is_negative()) a.negate();
  if (b.is_negative()) b.negate();
  while (!b.is_zero()) {
    BigInt q, r;
    BigInt::divmod(a, b, q, r);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

namespace {

constexpr std::array<uint32_t, 68> kSmallPrimes = {
    3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,  41,  43,  47,  53,  59,  61,
    67,  71,  73,  79,  83,  89,  97,  101, 103, 107, 109, 113, 127, 131, 137, 139, 149,
    151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223, 227, 229, 233, 239,
    241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307, 311, 313, 317, 331, 337, 347};

// Witness set deciding primality exactly for all n < 2^64 (Sinclair/Jaeschke).
constexpr std::array<uint32_t, 12> kSmallWitnesses = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

bool miller_rabin_round(const BigInt& n, const BigInt& n_minus_1, const BigInt& d, size_t s,
                        const BigInt& witness) {
  BigInt x = mod_pow(witness, d, n);
  const BigInt one{1};
  if (x == one || x == n_minus_1) return true;
  for (size_t r = 1; r < s; ++r) {
    x = x * x % n;
    if (x == n_minus_1) return true;
  }
  return false;
}

}  // namespace

bool is_probable_prime(const BigInt& n, uint64_t witness_seed) {
  const BigInt two{2};
  if (n < two) return false;
  if (n == two) return true;
  if (!n.is_odd()) return false;
  for (uint32_t p : kSmallPrimes) {
    BigInt bp{p};
    if (n == bp) return true;
    if ((n % bp).is_zero()) return false;
  }

  BigInt n_minus_1 = n - BigInt{1};
  BigInt d = n_minus_1;
  size_t s = 0;
  while (!d.is_odd()) {
    d >>= 1;
    ++s;
  }

  if (n.bit_length() <= 64) {
    for (uint32_t w : kSmallWitnesses) {
      if ((BigInt{w} % n).is_zero()) continue;
      if (!miller_rabin_round(n, n_minus_1, d, s, BigInt{w})) return false;
    }
    return true;
  }

  SplitMix64 rng(witness_seed);
  const BigInt lo{2};
  const BigInt hi = n - two;
  for (int round = 0; round < 32; ++round) {
    BigInt w = random_range(rng, lo, hi);
    if (!miller_rabin_round(n, n_minus_1, d, s, w)) return false;
  }
  return true;
}

BigInt random_bits(SplitMix64& rng, size_t bits) {
  if (bits == 0) return BigInt{};
  size_t bytes = (bits + 7) / 8;
  Bytes buf(bytes);
  rng.fill(buf.data(), buf.size());
  // Mask to the requested width, then force the top bit.
  size_t excess = bytes * 8 - bits;
  buf[0] &= static_cast<uint8_t>(0xFF >> excess);
  buf[0] |= static_cast<uint8_t>(1u << (7 - excess));
  return BigInt::from_bytes_be(buf);
}

BigInt random_range(SplitMix64& rng, const BigInt& lo, const BigInt& hi) {
  if (lo > hi) throw std::invalid_argument("random_range: empty range");
  BigInt span = hi - lo + BigInt{1};
  size_t bits = span.bit_length();
  size_t bytes = (bits + 7) / 8;
  size_t excess = bytes * 8 - bits;
  while (true) {
    Bytes buf(bytes);
    rng.fill(buf.data(), buf.size());
    buf[0] &= static_cast<uint8_t>(0xFF >> excess);
    BigInt candidate = BigInt::from_bytes_be(buf);
    if (candidate < span) return lo + candidate;
  }
}

BigInt random_prime(SplitMix64& rng, size_t bits) {
  if (bits < 2) throw std::invalid_argument("random_prime: need at least 2 bits");
  while (true) {
    BigInt candidate = random_bits(rng, bits);
    if (!candidate.is_odd()) candidate += BigInt{1};
    if (is_probable_prime(candidate)) return candidate;
  }
}

}  // namespace svsp::crypto
