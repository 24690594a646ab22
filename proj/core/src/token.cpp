#include "svsp/token.hpp"

#include "svsp/bytes.hpp"
#include "svsp/sha256.hpp"

namespace svsp::token {

namespace {

// Constant-time over the full 16 bytes regardless of where they differ.
bool equal_ct(const TokenValue& a, const TokenValue& b) {
  uint8_t diff = 0;
  for (size_t i = 0; i < a.size(); ++i) diff |= a[i] ^ b[i];
  return diff == 0;
}

}  // namespace

AckToken derive_token(const crypto::SharedSecret& secret,
                      const TokenNonce& nonce, uint32_t window_index) {
  Sha256 h;
  h.update(BytesView(secret.data(), secret.size()));
  h.update(BytesView(nonce.data(), nonce.size()));
  Bytes idx;
  put_u32(idx, window_index);
  h.update(idx);
  auto digest = h.finish();

  AckToken token;
  token.window_index = window_index;
  std::copy(digest.begin(), digest.begin() + token.value.size(),
            token.value.begin());
  return token;
}

VerifyStatus TokenVerifier::peek(const AckToken& token) const {
  AckToken expected = derive_token(secret_, nonce_, token.window_index);
  bool value_ok = equal_ct(token.value, expected.value);
  if (token.window_index == next_window_) {
    return value_ok ? VerifyStatus::Accept : VerifyStatus::RejectInvalid;
  }
  // A consumed window's genuine token is a replay; anything else (forged
  // value, or a window not yet reached) is invalid.
  if (token.window_index < next_window_ && value_ok) {
    return VerifyStatus::RejectReplay;
  }
  return VerifyStatus::RejectInvalid;
}

VerifyStatus TokenVerifier::verify(const AckToken& token) {
  VerifyStatus status = peek(token);
  if (status == VerifyStatus::Accept) ++next_window_;
  return status;
}

}  // namespace svsp::token
