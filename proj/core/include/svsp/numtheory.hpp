#pragma once

#include <optional>

#include "svsp/bigint.hpp"
#include "svsp/rng.hpp"

namespace svsp::crypto {

// base^exponent mod modulus by square-and-multiply; O(log exponent)
// multiplications. Throws std::domain_error when modulus < 1 or the
// exponent is negative.
BigInt mod_pow(const BigInt& base, const BigInt& exponent, const BigInt& modulus);

// Multiplicative inverse of a mod m (m >= 2, else std::domain_error),
// computed with the extended Euclidean algorithm. Returns nullopt when
// gcd(a, m) != 1, in which case no inverse exists.
std::optional<BigInt> mod_inverse(const BigInt& a, const BigInt& m);

BigInt gcd(BigInt a, BigInt b);

// Deterministic Miller-Rabin. Below 2^64 the fixed witness set
// {2,3,5,7,11,13,17,19,23,29,31,37} decides exactly; above that, 32 rounds
// with witnesses drawn from a SplitMix64 stream seeded by `witness_seed`.
bool is_probable_prime(const BigInt& n, uint64_t witness_seed = 0x5eed);

// Uniform value with exactly `bits` significant bits (top bit forced).
BigInt random_bits(SplitMix64& rng, size_t bits);

// Uniform value in [lo, hi], inclusive, by rejection over the bit width.
BigInt random_range(SplitMix64& rng, const BigInt& lo, const BigInt& hi);

// Random prime with exactly `bits` bits (bits >= 2). Candidates have the
// top and low bits forced, then trial division and Miller-Rabin.
BigInt random_prime(SplitMix64& rng, size_t bits);

}  // namespace svsp::crypto
