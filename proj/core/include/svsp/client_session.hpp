#pragma once

#include <deque>
#include <memory>
#include <optional>
#include <string>

#include "svsp/dh.hpp"
#include "svsp/metafile.hpp"
#include "svsp/rng.hpp"
#include "svsp/rsa.hpp"
#include "svsp/session_common.hpp"
#include "svsp/token.hpp"

namespace svsp::wire {

enum class ClientBehavior : uint8_t {
  Conforming,   // derive and send each window's token
  NoToken,      // full handshake, Nacks, but never an AckToken
  ReplayOld,    // send captured tokens from an earlier session instead
  RepeatToken,  // conforming, but sends the window-0 token twice
};

struct ClientSessionConfig {
  std::string content_name;
  unsigned rsa_bits = 512;
  uint32_t gap_timer_ms = 250;
  uint32_t idle_timeout_ms = 2500;
  uint32_t hello_retries = 3;  // re-sends after the initial Hello
  // A poke can cross an in-flight token; re-sending sooner than this floor
  // would hand the server a benign duplicate it must treat as a replay.
  uint32_t retoken_min_ms = 250;
  ClientBehavior behavior = ClientBehavior::Conforming;
  std::vector<token::TokenValue> replay_tokens;  // ReplayOld source material
  crypto::DhParams dh = crypto::default_dh_params();
};

enum class ClientPhase : uint8_t {
  Idle,  // constructed, StartEvent not yet seen
  SentHello,
  AwaitMetafile,
  Receiving,
  SentToken,
  Done,
  Aborted,
};

const char* client_phase_name(ClientPhase phase);

enum class AbortKind : uint8_t {
  NotFound,    // HelloReply{not_found}
  ServerHalt,  // Halt received; halt_reason says why
  Timeout,     // idle watchdog expired (Hello retries included)
  Internal,    // metafile decrypt/decode failure, content hash mismatch
};

const char* abort_kind_name(AbortKind kind);

struct AbortInfo {
  AbortKind kind = AbortKind::Internal;
  HaltReason halt_reason = HaltReason::Internal;  // valid for ServerHalt
  std::string detail;
};

struct ClientStats {
  uint64_t bytes_received = 0;       // unique chunk payload bytes
  uint32_t chunks_received = 0;      // unique seqs accepted
  uint32_t duplicate_chunks = 0;     // receptions of an already-held seq
  uint32_t crc_failures = 0;
  uint32_t nacks_sent = 0;
  uint32_t tokens_sent = 0;          // re-sends included
  uint32_t hello_sent = 0;
};

// Sans-transport peer of ServerSession.  Feed StartEvent once, then decoded
// messages and timer expiries; all randomness comes from the construction
// seed.  now_ms must be monotonic (virtual in the simulator).
class ClientSession {
 public:
  ClientSession(ClientSessionConfig config, uint64_t seed);

  Actions handle(const Event& event, uint64_t now_ms);

  ClientPhase phase() const { return phase_; }
  bool terminal() const {
    return phase_ == ClientPhase::Done || phase_ == ClientPhase::Aborted;
  }
  uint64_t session_id() const { return session_id_; }  // 0 until bound
  const std::optional<AbortInfo>& abort_info() const { return abort_; }
  const ClientStats& stats() const { return stats_; }
  // Decoded metafile; engaged once the metafile decrypts.
  const std::optional<SessionMetafile>& metafile() const { return meta_; }
  // Assembled content; complete when phase() == Done.
  const Bytes& content() const { return content_buf_; }
  // Tokens this session derived and sent, in window order (replay capture).
  const std::vector<token::AckToken>& tokens_sent() const { return sent_tokens_; }

 private:
  void on_start(Actions& out);
  void send_hello(Actions& out);
  void reset_for_retry();
  void on_hello_reply(uint64_t sid, const HelloReplyMsg& msg, uint64_t now_ms,
                      Actions& out);
  void on_metafile(const MetafileMsg& msg, uint64_t now_ms, Actions& out);
  void on_chunk(const ChunkMsg& msg, uint64_t now_ms, Actions& out);
  void on_fin(const FinMsg& msg, Actions& out);
  void on_halt(const HaltMsg& msg, Actions& out);
  void on_gap_timer(Actions& out);
  void on_idle_timer(Actions& out);
  void metafile_complete(uint64_t now_ms, Actions& out);
  void enter_receiving(uint32_t w, Actions& out);
  void window_complete(uint64_t now_ms, Actions& out);
  void send_token(uint32_t w, uint64_t now_ms, Actions& out);
  void finish_done(const char* how, Actions& out);
  void abort(AbortKind kind, std::string detail, Actions& out,
             HaltReason halt = HaltReason::Internal);
  void ignore(const char* what, Actions& out);
  void stash(uint64_t sid, const Message& msg, Actions& out);
  void drain_stash(uint64_t now_ms, Actions& out);

  bool window_held(uint32_t w) const;
  bool content_complete_and_valid() const;
  std::vector<uint32_t> missing_in_window(uint32_t w, size_t cap) const;

  ClientSessionConfig config_;
  SplitMix64 rng_;
  crypto::RsaKeyPair rsa_;
  crypto::DhKeyPair dh_pair_;

  ClientPhase phase_ = ClientPhase::Idle;
  uint64_t session_id_ = 0;
  uint32_t retries_left_ = 0;
  std::optional<crypto::SharedSecret> secret_;

  // Metafile reassembly.
  std::vector<std::optional<Bytes>> mf_blocks_;
  size_t mf_have_ = 0;

  // Content reassembly.
  std::optional<SessionMetafile> meta_;
  Bytes content_buf_;
  std::vector<bool> have_;
  uint64_t have_count_ = 0;
  uint32_t window_ = 0;

  uint64_t last_token_ms_ = 0;
  std::vector<token::AckToken> sent_tokens_;

  // Messages that arrived ahead of the state that consumes them: keyed by
  // wire session id pre-bind, replayed in arrival order afterwards.
  std::deque<std::pair<uint64_t, Message>> stash_;

  std::optional<AbortInfo> abort_;
  ClientStats stats_;
};

}  // namespace svsp::wire
