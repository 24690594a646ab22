#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "svsp/bigint.hpp"

namespace svsp::crypto {

// Modulus too small to carry the length-prefixed block format.
class KeyTooSmall : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A decrypted block whose length prefix does not fit the block capacity.
class MalformedPadding : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RsaPublicKey {
  BigInt n;
  BigInt e;
};

struct RsaKeyPair {
  BigInt p;
  BigInt q;
  BigInt n;
  BigInt phi;
  BigInt e;
  BigInt d;

  RsaPublicKey public_key() const { return {n, e}; }
};

// Deterministic key generation: primes of ceil(bit_length/2) bits each from
// a SplitMix64 stream seeded by `seed`; e is 65537 when that is coprime with
// phi and smaller than it, otherwise the smallest odd e >= 3 that qualifies.
// bit_length must be >= 8.
RsaKeyPair rsa_keygen(unsigned bit_length, uint64_t seed);

// Assemble a key pair from caller-supplied primes and public exponent;
// throws std::invalid_argument when the inputs violate the key invariants.
RsaKeyPair rsa_from_primes(const BigInt& p, const BigInt& q, const BigInt& e);

// c = m^e mod n for 0 <= m < n (std::domain_error otherwise).
BigInt rsa_encrypt_block(const BigInt& m, const RsaPublicKey& key);

// m = c^d mod n for 0 <= c < n (std::domain_error otherwise).
BigInt rsa_decrypt_block(const BigInt& c, const RsaKeyPair& pair);

// Block byte budget B = floor((bitlen(n) - 1) / 8); any B-byte string reads
// as an integer < n. Throws KeyTooSmall when B < 3.
size_t rsa_block_size(const BigInt& n);

// Byte-string encryption: the input is cut into pieces of at most B-2
// bytes; each block is a 2-byte big-endian length, the piece, then zero
// fill to B bytes, encrypted as one integer. Ciphertext blocks are emitted
// big-endian at the fixed width of n. Empty input still produces one block.
std::vector<Bytes> rsa_encrypt_bytes(BytesView data, const RsaPublicKey& key);

// Exact inverse of rsa_encrypt_bytes. Throws MalformedPadding when a block's
// length prefix exceeds B-2, std::domain_error when a block value is >= n.
Bytes rsa_decrypt_bytes(std::span<const Bytes> blocks, const RsaKeyPair& pair);

}  // namespace svsp::crypto
