#include <string_view>

#include "doctest.h"
#include "support/oracles.hpp"
#include "svsp/rng.hpp"
#include "svsp/sha256.hpp"

using svsp::Bytes;
using svsp::Sha256;
using svsp::SplitMix64;

namespace {

Bytes bytes_of(std::string_view s) {
  return Bytes(s.begin(), s.end());
}

}  // namespace

TEST_SUITE_BEGIN("sha256");

TEST_CASE("FIPS 180 vectors") {
  CHECK(svsp::to_hex(Sha256::of(bytes_of(""))) ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(svsp::to_hex(Sha256::of(bytes_of("abc"))) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(svsp::to_hex(Sha256::of(bytes_of(
            "abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq"))) ==
        "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST_CASE("million 'a' vector") {
  Sha256 h;
  Bytes block(1000, uint8_t('a'));
  for (int i = 0; i < 1000; ++i) h.update(block);
  CHECK(svsp::to_hex(h.finish()) ==
        "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0");
}

TEST_CASE("streaming equals one-shot at awkward boundaries") {
  SplitMix64 rng(0x5A5A);
  Bytes data(1 << 14);
  rng.fill(data);
  // split sizes straddling the 64-byte block boundary
  for (size_t step : {1u, 3u, 63u, 64u, 65u, 127u, 1000u}) {
    Sha256 h;
    for (size_t off = 0; off < data.size(); off += step) {
      size_t n = std::min(step, data.size() - off);
      h.update(svsp::BytesView(data.data() + off, n));
    }
    CHECK(h.finish() == Sha256::of(data));
  }
}

TEST_CASE("agrees with OpenSSL on random buffers") {
  SplitMix64 rng(0xC0FFEE);
  for (int i = 0; i < 300; ++i) {
    Bytes buf(rng.below(2048));
    rng.fill(buf);
    CHECK(Sha256::of(buf) == svsp::testing::openssl_sha256(buf));
  }
}

TEST_SUITE_END();
