#include <stdexcept>

#include "doctest.h"
#include "svsp/numtheory.hpp"
#include "svsp/rsa.hpp"

using svsp::Bytes;
using svsp::BytesView;
using svsp::SplitMix64;
using svsp::crypto::BigInt;
namespace crypto = svsp::crypto;

namespace {

// Schoolbook m^e mod n, independent of mod_pow.
uint64_t slow_pow(uint64_t m, uint64_t e, uint64_t n) {
  uint64_t acc = 1;
  for (uint64_t i = 0; i < e; ++i) acc = acc * m % n;
  return acc;
}

}  // namespace

TEST_SUITE_BEGIN("rsa");

TEST_CASE("textbook example p=3 q=11 e=3, exhaustive") {
  auto pair = crypto::rsa_from_primes(BigInt(3), BigInt(11), BigInt(3));
  CHECK(pair.n == BigInt(33));
  CHECK(pair.phi == BigInt(20));
  CHECK(pair.d == BigInt(7));
  for (uint64_t m = 0; m < 33; ++m) {
    BigInt c = crypto::rsa_encrypt_block(BigInt(m), pair.public_key());
    CHECK(c == BigInt(slow_pow(m, 3, 33)));
    CHECK(crypto::rsa_decrypt_block(c, pair) == BigInt(m));
  }
}

TEST_CASE("rsa_from_primes rejects bad inputs") {
  CHECK_THROWS_AS(crypto::rsa_from_primes(BigInt(4), BigInt(11), BigInt(3)),
                  std::invalid_argument);  // p composite
  CHECK_THROWS_AS(crypto::rsa_from_primes(BigInt(3), BigInt(3), BigInt(3)),
                  std::invalid_argument);  // p == q
  CHECK_THROWS_AS(crypto::rsa_from_primes(BigInt(3), BigInt(11), BigInt(4)),
                  std::invalid_argument);  // gcd(e, phi) != 1
}

TEST_CASE("keygen determinism and key invariants") {
  auto a = crypto::rsa_keygen(64, 7);
  auto b = crypto::rsa_keygen(64, 7);
  CHECK(a.n == b.n);
  CHECK(a.d == b.d);
  CHECK(crypto::rsa_keygen(64, 8).n != a.n);

  SplitMix64 seeds(0xD1CE);
  for (int i = 0; i < 50; ++i) {
    unsigned bits = 64 + unsigned(seeds.below(65));  // 64..128
    auto kp = crypto::rsa_keygen(bits, seeds.next());
    CHECK(kp.n == kp.p * kp.q);
    CHECK(kp.p != kp.q);
    CHECK(crypto::is_probable_prime(kp.p));
    CHECK(crypto::is_probable_prime(kp.q));
    CHECK(kp.phi == (kp.p - BigInt(1)) * (kp.q - BigInt(1)));
    CHECK(kp.e * kp.d % kp.phi == BigInt(1));
    CHECK(crypto::gcd(kp.e, kp.phi) == BigInt(1));
    // round-trip a few residues
    SplitMix64 rng(seeds.next());
    for (int j = 0; j < 4; ++j) {
      BigInt m = crypto::random_range(rng, BigInt(0), kp.n - BigInt(1));
      BigInt c = crypto::rsa_encrypt_block(m, kp.public_key());
      CHECK(crypto::rsa_decrypt_block(c, kp) == m);
    }
  }
}

TEST_CASE("block operations reject out-of-range values") {
  auto pair = crypto::rsa_keygen(64, 3);
  CHECK_THROWS_AS(crypto::rsa_encrypt_block(pair.n, pair.public_key()),
                  std::domain_error);
  CHECK_THROWS_AS(crypto::rsa_encrypt_block(BigInt(-1), pair.public_key()),
                  std::domain_error);
  CHECK_THROWS_AS(crypto::rsa_decrypt_block(pair.n, pair), std::domain_error);
}

TEST_CASE("rsa_block_size boundaries") {
  // bitlen 25 -> B = 3, the smallest legal key
  CHECK(crypto::rsa_block_size(BigInt(1) << 24) == 3);
  CHECK_THROWS_AS(crypto::rsa_block_size(BigInt(1) << 23), crypto::KeyTooSmall);
  // 64-bit modulus -> 7-byte blocks, 5-byte capacity
  auto pair = crypto::rsa_keygen(64, 3);
  CHECK(crypto::rsa_block_size(pair.n) == 7);
}

TEST_CASE("byte-string encryption round-trips") {
  auto pair = crypto::rsa_keygen(64, 9);
  size_t block = crypto::rsa_block_size(pair.n);      // 7
  size_t capacity = block - 2;                        // 5
  size_t width = (pair.n.bit_length() + 7) / 8;       // ciphertext width

  SplitMix64 rng(0xAB5E);
  for (size_t len : {size_t(0), size_t(1), capacity - 1, capacity,
                     capacity + 1, 3 * capacity + 1, size_t(300)}) {
    Bytes data(len);
    rng.fill(data);
    auto blocks = crypto::rsa_encrypt_bytes(BytesView(data), pair.public_key());
    size_t expect = len == 0 ? 1 : (len + capacity - 1) / capacity;
    CHECK(blocks.size() == expect);
    for (const Bytes& b : blocks) CHECK(b.size() == width);
    CHECK(crypto::rsa_decrypt_bytes(blocks, pair) == data);
  }
}

TEST_CASE("byte-string decryption flags malformed padding") {
  auto pair = crypto::rsa_keygen(64, 9);
  size_t block = crypto::rsa_block_size(pair.n);
  size_t width = (pair.n.bit_length() + 7) / 8;

  // Forge a block whose length prefix exceeds the capacity.
  Bytes plain(block, 0);
  plain[0] = 0xFF;
  plain[1] = 0xFF;
  BigInt m = BigInt::from_bytes_be(plain);
  REQUIRE(m < pair.n);  // any B-byte string is a valid residue
  BigInt c = crypto::rsa_encrypt_block(m, pair.public_key());
  std::vector<Bytes> forged{c.to_bytes_be(width)};
  CHECK_THROWS_AS(crypto::rsa_decrypt_bytes(forged, pair),
                  crypto::MalformedPadding);

  // A block value >= n is a domain error, not padding.
  std::vector<Bytes> oversized{pair.n.to_bytes_be(width)};
  CHECK_THROWS_AS(crypto::rsa_decrypt_bytes(oversized, pair),
                  std::domain_error);
}

TEST_CASE("keys below the block format minimum are rejected") {
  auto tiny = crypto::rsa_keygen(16, 4);
  Bytes data{1, 2, 3};
  CHECK_THROWS_AS(crypto::rsa_encrypt_bytes(BytesView(data), tiny.public_key()),
                  crypto::KeyTooSmall);
}

TEST_SUITE_END();
