#include "svsp/rsa.hpp"

#include "svsp/numtheory.hpp"
#include "svsp/rng.hpp"

namespace svsp::crypto {

namespace {

BigInt pick_public_exponent(const BigInt& phi) {
  const BigInt one{1};
  const BigInt f4{65537};
  if (f4 < phi && gcd(f4, phi) == one) return f4;
  for (BigInt e{3}; e < phi; e += BigInt{2}) {
    if (gcd(e, phi) == one) return e;
  }
  throw std::invalid_argument("no valid public exponent for this totient");
}

}  // namespace

RsaKeyPair rsa_keygen(unsigned bit_length, uint64_t seed) {
  if (bit_length < 8) throw std::invalid_argument("rsa_keygen: bit_length must be >= 8");
  const size_t prime_bits = (bit_length + 1) / 2;
  SplitMix64 rng(seed);
  while (true) {
    BigInt p = random_prime(rng, prime_bits);
    BigInt q = random_prime(rng, prime_bits);
    while (q == p) q = random_prime(rng, prime_bits);

    BigInt n = p * q;
    BigInt phi = (p - BigInt{1}) * (q - BigInt{1});
    BigInt e;
    try {
      e = pick_public_exponent(phi);
    } catch (const std::invalid_argument&) {
      continue;
    }
    auto d = mod_inverse(e, phi);
    if (!d) continue;
    return RsaKeyPair{std::move(p), std::move(q), std::move(n),
                      std::move(phi), std::move(e), std::move(*d)};
  }
}

RsaKeyPair rsa_from_primes(const BigInt& p, const BigInt& q, const BigInt& e) {
  if (p == q) throw std::invalid_argument("rsa_from_primes: p and q must differ");
  if (!is_probable_prime(p) || !is_probable_prime(q)) {
    throw std::invalid_argument("rsa_from_primes: inputs must be prime");
  }
  BigInt n = p * q;
  BigInt phi = (p - BigInt{1}) * (q - BigInt{1});
  if (e <= BigInt{1} || e >= phi) throw std::invalid_argument("rsa_from_primes: need 1 < e < phi");
  auto d = mod_inverse(e, phi);
  if (!d) throw std::invalid_argument("rsa_from_primes: e not coprime with phi");
  return RsaKeyPair{p, q, std::move(n), std::move(phi), e, std::move(*d)};
}

BigInt rsa_encrypt_block(const BigInt& m, const RsaPublicKey& key) {
  if (m.is_negative() || m >= key.n) throw std::domain_error("rsa_encrypt_block: need 0 <= m < n");
  return mod_pow(m, key.e, key.n);
}

BigInt rsa_decrypt_block(const BigInt& c, const RsaKeyPair& pair) {
  if (c.is_negative() || c >= pair.n) throw std::domain_error("rsa_decrypt_block: need 0 <= c < n");
  return mod_pow(c, pair.d, pair.n);
}

size_t rsa_block_size(const BigInt& n) {
  // B = floor((bitlen(n) - 1) / 8) >= 3 requires bitlen(n) >= 25.
  if (n.bit_length() < 25) throw KeyTooSmall("modulus below the 3-byte block minimum");
  return (n.bit_length() - 1) / 8;
}

std::vector<Bytes> rsa_encrypt_bytes(BytesView data, const RsaPublicKey& key) {
  const size_t block = rsa_block_size(key.n);
  const size_t capacity = block - 2;
  const size_t cipher_width = (key.n.bit_length() + 7) / 8;

  std::vector<Bytes> out;
  size_t off = 0;
  do {
    size_t take = std::min(capacity, data.size() - off);
    Bytes plain;
    plain.reserve(block);
    put_u16(plain, static_cast<uint16_t>(take));
    plain.insert(plain.end(), data.begin() + static_cast<ptrdiff_t>(off),
                 data.begin() + static_cast<ptrdiff_t>(off + take));
    plain.resize(block, 0);
    BigInt c = rsa_encrypt_block(BigInt::from_bytes_be(plain), key);
    out.push_back(c.to_bytes_be(cipher_width));
    off += take;
  } while (off < data.size());
  return out;
}

Bytes rsa_decrypt_bytes(std::span<const Bytes> blocks, const RsaKeyPair& pair) {
  const size_t block = rsa_block_size(pair.n);
  const size_t capacity = block - 2;

  Bytes out;
  for (const Bytes& cipher : blocks) {
    BigInt m = rsa_decrypt_block(BigInt::from_bytes_be(cipher), pair);
    Bytes plain = m.to_bytes_be(block);
    size_t len = static_cast<size_t>(plain[0]) << 8 | plain[1];
    if (len > capacity) throw MalformedPadding("block length prefix exceeds capacity");
    out.insert(out.end(), plain.begin() + 2, plain.begin() + 2 + static_cast<ptrdiff_t>(len));
  }
  return out;
}

}  // namespace svsp::crypto
