#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>

#include "svsp/bigint.hpp"
#include "svsp/rng.hpp"

namespace svsp::crypto {

// Peer public value outside [2, p-2]: 0, 1, or p-1 (small-subgroup escapes).
class InvalidPublicValue : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DhParams {
  BigInt prime;
  BigInt generator;

  // Throws std::invalid_argument unless prime is odd and >= 5 and
  // generator lies in [2, prime-2].
  void validate() const;

  // Width of a serialized group element in bytes.
  size_t element_size() const { return (prime.bit_length() + 7) / 8; }
};

// Pinned default group: the 256-bit safe prime 2^255 + 196479 with g = 4
// (a quadratic residue, so the generated subgroup has prime order (p-1)/2).
const DhParams& default_dh_params();

struct DhKeyPair {
  BigInt private_key;  // in [2, p-2]
  BigInt public_key;   // g^private mod p
};

DhKeyPair dh_keygen(const DhParams& params, SplitMix64& rng);
DhKeyPair dh_keygen(const DhParams& params, uint64_t seed);

// SHA-256 of the shared group element, big-endian, element_size() bytes.
using SharedSecret = std::array<uint8_t, 32>;

// Throws InvalidPublicValue if peer_public is not in [2, p-2].
SharedSecret dh_shared(const DhKeyPair& local, const BigInt& peer_public,
                       const DhParams& params);

}  // namespace svsp::crypto
