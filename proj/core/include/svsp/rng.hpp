#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace svsp {

// SplitMix64 generator. This is the pinned deterministic random stream for
// everything reproducible in the protocol suite: prime candidates, DH private
// keys, nonces, and the simulator's datagram fate draws. The exact constants
// and derived draw rules are documented in PROTOCOL.md so that independent
// implementations produce identical traces.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform value in [0, n). Pinned as next() % n; the modulo bias is
  // irrelevant at the ranges this suite draws from.
  uint64_t below(uint64_t n) { return n <= 1 ? 0 : next() % n; }

  // Uniform double in [0, 1) with 53-bit resolution (next() >> 11) / 2^53.
  double unit() { return static_cast<double>(next() >> 11) / 9007199254740992.0; }

  void fill(uint8_t* out, size_t len) {
    size_t i = 0;
    while (i < len) {
      uint64_t w = next();
      for (int b = 7; b >= 0 && i < len; --b) out[i++] = static_cast<uint8_t>(w >> (8 * b));
    }
  }

  void fill(std::span<uint8_t> out) { fill(out.data(), out.size()); }

 private:
  uint64_t state_;
};

}  // namespace svsp
