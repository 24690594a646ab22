#include "svsp/dh.hpp"

#include "svsp/numtheory.hpp"
#include "svsp/sha256.hpp"

namespace svsp::crypto {

void DhParams::validate() const {
  if (prime < BigInt(5) || !prime.is_odd()) {
    throw std::invalid_argument("dh: prime must be an odd integer >= 5");
  }
  BigInt pm2 = prime;
  pm2 -= BigInt(2);
  if (generator < BigInt(2) || generator > pm2) {
    throw std::invalid_argument("dh: generator must lie in [2, p-2]");
  }
}

const DhParams& default_dh_params() {
  // 2^255 + 196479; both p and (p-1)/2 are prime.
  static const DhParams params = [] {
    DhParams p{
        BigInt::from_decimal(
            "5789604461865809771178549250434395392663499233282028201972"
            "8792003956565016447"),
        BigInt(4),
    };
    p.validate();
    return p;
  }();
  return params;
}

DhKeyPair dh_keygen(const DhParams& params, SplitMix64& rng) {
  params.validate();
  BigInt pm2 = params.prime;
  pm2 -= BigInt(2);
  BigInt priv = random_range(rng, BigInt(2), pm2);
  BigInt pub = mod_pow(params.generator, priv, params.prime);
  return DhKeyPair{std::move(priv), std::move(pub)};
}

DhKeyPair dh_keygen(const DhParams& params, uint64_t seed) {
  SplitMix64 rng(seed);
  return dh_keygen(params, rng);
}

SharedSecret dh_shared(const DhKeyPair& local, const BigInt& peer_public,
                       const DhParams& params) {
  params.validate();
  BigInt pm2 = params.prime;
  pm2 -= BigInt(2);
  if (peer_public < BigInt(2) || peer_public > pm2) {
    throw InvalidPublicValue("dh: peer public value outside [2, p-2]");
  }
  BigInt element = mod_pow(peer_public, local.private_key, params.prime);
  Bytes encoded = element.to_bytes_be(params.element_size());
  return Sha256::of(encoded);
}

}  // namespace svsp::crypto
