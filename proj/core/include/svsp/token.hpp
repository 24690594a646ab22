#pragma once

#include <array>
#include <cstdint>

#include "svsp/dh.hpp"

namespace svsp::token {

using TokenNonce = std::array<uint8_t, 16>;
using TokenValue = std::array<uint8_t, 16>;

struct AckToken {
  uint32_t window_index = 0;
  TokenValue value{};

  bool operator==(const AckToken&) const = default;
};

// value = truncate16(SHA-256(secret ‖ nonce ‖ window_index as u32 BE)).
AckToken derive_token(const crypto::SharedSecret& secret,
                      const TokenNonce& nonce, uint32_t window_index);

enum class VerifyStatus : uint8_t {
  Accept,
  RejectInvalid,  // value is not the derived token for its window, or the
                  // window is not the expected one
  RejectReplay,   // exact re-presentation of an already-accepted token
};

// Accepts tokens strictly in window order: only the expected window's token
// can accept, and each window accepts at most once.  The consumed set is
// therefore the prefix [0, next_window).
class TokenVerifier {
 public:
  TokenVerifier(const crypto::SharedSecret& secret, const TokenNonce& nonce)
      : secret_(secret), nonce_(nonce) {}

  // Mutating: on Accept the expected window advances.
  VerifyStatus verify(const AckToken& token);

  // Same decision as verify, with no state change.
  VerifyStatus peek(const AckToken& token) const;

  uint32_t next_window() const { return next_window_; }

 private:
  crypto::SharedSecret secret_;
  TokenNonce nonce_;
  uint32_t next_window_ = 0;
};

}  // namespace svsp::token
