#pragma once

#include <memory>
#include <optional>

#include "svsp/dh.hpp"
#include "svsp/metafile.hpp"
#include "svsp/rng.hpp"
#include "svsp/session_common.hpp"
#include "svsp/token.hpp"

namespace svsp::wire {

struct ServerSessionConfig {
  uint16_t chunk_size = 1024;
  uint16_t window_size = 32;
  uint32_t token_timeout_ms = 2000;
  uint32_t max_pokes = 3;
  crypto::DhParams dh = crypto::default_dh_params();
};

// SentMetafile and StreamingWindow are traversed inside a single step (the
// machine has no pacing), so handle() only ever returns with the session in
// a quiescent phase: AwaitHello, AwaitToken, Finished, or Halted.
enum class ServerPhase : uint8_t {
  AwaitHello,
  SentMetafile,
  StreamingWindow,
  AwaitToken,
  Finished,
  Halted,
};

const char* server_phase_name(ServerPhase phase);

struct ServerStats {
  uint64_t chunks_sent = 0;       // every Chunk datagram, retransmits included
  uint64_t retransmits = 0;       // Nack-triggered re-sends
  uint64_t pokes = 0;             // timer-triggered last-chunk re-sends
  uint32_t tokens_accepted = 0;
};

// Pure sans-transport machine: the only randomness (server DH keypair and
// token nonce) is drawn from the seed fixed at construction, so identical
// event sequences yield identical action sequences.
class ServerSession {
 public:
  ServerSession(uint64_t session_id, std::shared_ptr<const Bytes> content,
                const ServerSessionConfig& config, uint64_t seed);

  // now_ms: driver-supplied monotonic milliseconds (virtual in the
  // simulator).  The server machine is time-agnostic today; the parameter
  // keeps both engines on one driver contract.
  Actions handle(const Event& event, uint64_t now_ms = 0);

  uint64_t session_id() const { return session_id_; }
  ServerPhase phase() const { return phase_; }
  // Window whose token is awaited; meaningful in AwaitToken.
  uint32_t awaited_window() const { return window_; }
  std::optional<HaltReason> halt_reason() const { return halt_reason_; }
  const ServerStats& stats() const { return stats_; }
  const SessionMetafile& metafile() const { return meta_; }
  bool terminal() const {
    return phase_ == ServerPhase::Finished || phase_ == ServerPhase::Halted;
  }

 private:
  void on_hello(const HelloMsg& hello, Actions& out);
  void on_token(const AckTokenMsg& msg, Actions& out);
  void on_nack(const NackMsg& msg, Actions& out);
  void on_token_timer(Actions& out);
  void emit_window(uint32_t w, Actions& out);
  void send_chunk(uint32_t seq, Actions& out);
  void advance_or_finish(Actions& out);
  void halt(HaltReason reason, Actions& out);
  void ignore(const char* what, Actions& out);
  ChunkMsg make_chunk(uint32_t seq) const;

  uint64_t session_id_;
  std::shared_ptr<const Bytes> content_;
  ServerSessionConfig config_;
  SplitMix64 rng_;

  ServerPhase phase_ = ServerPhase::AwaitHello;
  uint32_t window_ = 0;
  uint32_t pokes_ = 0;
  SessionMetafile meta_;
  std::optional<token::TokenVerifier> verifier_;
  std::optional<HaltReason> halt_reason_;
  ServerStats stats_;
};

}  // namespace svsp::wire
