#include "svsp/server_session.hpp"

#include <algorithm>

#include "svsp/crc32.hpp"
#include "svsp/rsa.hpp"

namespace svsp::wire {

namespace {

// Blocks per Metafile datagram: header + total/first/count words, then each
// block costs a 2-byte prefix plus its width.
size_t metafile_datagram_budget() { return kMaxDatagram - kHeaderSize - 6; }

}  // namespace

const char* server_phase_name(ServerPhase phase) {
  switch (phase) {
    case ServerPhase::AwaitHello: return "await_hello";
    case ServerPhase::SentMetafile: return "sent_metafile";
    case ServerPhase::StreamingWindow: return "streaming_window";
    case ServerPhase::AwaitToken: return "await_token";
    case ServerPhase::Finished: return "finished";
    case ServerPhase::Halted: return "halted";
  }
  return "unknown";
}

ServerSession::ServerSession(uint64_t session_id,
                             std::shared_ptr<const Bytes> content,
                             const ServerSessionConfig& config, uint64_t seed)
    : session_id_(session_id),
      content_(std::move(content)),
      config_(config),
      rng_(seed) {
  if (!content_) throw std::invalid_argument("server session: null content");
  if (config_.chunk_size < 1 || config_.chunk_size > kMaxChunkPayload) {
    throw std::invalid_argument("server session: chunk_size outside [1, " +
                                std::to_string(kMaxChunkPayload) + "]");
  }
  if (config_.window_size < 1) {
    throw std::invalid_argument("server session: window_size must be >= 1");
  }
  if (config_.token_timeout_ms < 1) {
    throw std::invalid_argument("server session: token timeout must be >= 1");
  }
}

Actions ServerSession::handle(const Event& event, uint64_t /*now_ms*/) {
  Actions out;
  if (const auto* msg_event = std::get_if<MessageEvent>(&event)) {
    std::visit(
        [&](const auto& m) {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, HelloMsg>) {
            on_hello(m, out);
          } else if constexpr (std::is_same_v<T, AckTokenMsg>) {
            on_token(m, out);
          } else if constexpr (std::is_same_v<T, NackMsg>) {
            on_nack(m, out);
          } else {
            // Client-bound message types bounced back by a confused or
            // hostile peer.
            ignore("unexpected message type", out);
          }
        },
        msg_event->msg);
  } else if (const auto* timer = std::get_if<TimerEvent>(&event)) {
    if (timer->kind == TimerKind::Token) {
      on_token_timer(out);
    } else {
      ignore("timer kind not used by server", out);
    }
  }
  // StartEvent: the server machine is driven entirely by Hello.
  return out;
}

void ServerSession::on_hello(const HelloMsg& hello, Actions& out) {
  if (phase_ != ServerPhase::AwaitHello) {
    ignore("hello outside AwaitHello", out);
    return;
  }
  try {
    crypto::DhKeyPair dh_pair = crypto::dh_keygen(config_.dh, rng_);
    crypto::SharedSecret secret =
        crypto::dh_shared(dh_pair, hello.dh_public, config_.dh);

    token::TokenNonce nonce;
    rng_.fill(nonce.data(), nonce.size());
    meta_ = build_metafile(as_view(*content_), config_.chunk_size,
                           config_.window_size, nonce);
    verifier_.emplace(secret, nonce);

    out.push_back(SendAction{
        session_id_, HelloReplyMsg{dh_pair.public_key, HelloStatus::Ok}});

    crypto::RsaPublicKey client_key{hello.rsa_n, hello.rsa_e};
    Bytes plain = encode_metafile(meta_);
    std::vector<Bytes> blocks = crypto::rsa_encrypt_bytes(as_view(plain), client_key);
    if (blocks.size() > 0xFFFF) throw EncodeError("metafile block count");

    phase_ = ServerPhase::SentMetafile;
    size_t index = 0;
    while (index < blocks.size()) {
      MetafileMsg msg;
      msg.total_blocks = static_cast<uint16_t>(blocks.size());
      msg.first_index = static_cast<uint16_t>(index);
      size_t budget = metafile_datagram_budget();
      while (index < blocks.size() && budget >= 2 + blocks[index].size()) {
        budget -= 2 + blocks[index].size();
        msg.blocks.push_back(std::move(blocks[index]));
        ++index;
      }
      if (msg.blocks.empty()) throw EncodeError("metafile block over MTU");
      out.push_back(SendAction{session_id_, std::move(msg)});
    }
  } catch (const std::exception& e) {
    out.push_back(LogAction{LogLevel::Warn,
                            std::string("handshake failed: ") + e.what()});
    halt(HaltReason::Internal, out);
    return;
  }

  if (meta_.total_chunks == 0) {
    out.push_back(SendAction{session_id_, FinMsg{meta_.content_sha256}});
    phase_ = ServerPhase::Finished;
    return;
  }
  phase_ = ServerPhase::StreamingWindow;
  emit_window(0, out);
  window_ = 0;
  pokes_ = 0;
  out.push_back(ArmTimerAction{TimerKind::Token, config_.token_timeout_ms});
  phase_ = ServerPhase::AwaitToken;
}

void ServerSession::on_token(const AckTokenMsg& msg, Actions& out) {
  if (phase_ != ServerPhase::AwaitToken) {
    ignore("token outside AwaitToken", out);
    return;
  }
  switch (verifier_->verify(token::AckToken{msg.window_index, msg.value})) {
    case token::VerifyStatus::Accept:
      ++stats_.tokens_accepted;
      out.push_back(LogAction{
          LogLevel::Debug,
          "token accepted for window " + std::to_string(msg.window_index)});
      advance_or_finish(out);
      break;
    case token::VerifyStatus::RejectInvalid:
      halt(HaltReason::TokenInvalid, out);
      break;
    case token::VerifyStatus::RejectReplay:
      halt(HaltReason::Replay, out);
      break;
  }
}

void ServerSession::on_nack(const NackMsg& msg, Actions& out) {
  if (phase_ != ServerPhase::AwaitToken) {
    ignore("nack outside AwaitToken", out);
    return;
  }
  // Only the window already released may be re-sent; anything else in the
  // list is a gating probe and is dropped.
  uint64_t lo = static_cast<uint64_t>(window_) * config_.window_size;
  uint64_t hi = std::min<uint64_t>(lo + config_.window_size,
                                   meta_.total_chunks);
  bool probed = false;
  for (uint32_t seq : msg.missing_seqs) {
    if (seq >= lo && seq < hi) {
      send_chunk(seq, out);
      ++stats_.retransmits;
    } else {
      probed = true;
    }
  }
  if (probed) {
    out.push_back(LogAction{LogLevel::Warn,
                            "nack listed seqs outside the open window"});
  }
}

void ServerSession::on_token_timer(Actions& out) {
  if (phase_ != ServerPhase::AwaitToken) {
    ignore("token timer outside AwaitToken", out);
    return;
  }
  if (pokes_ < config_.max_pokes) {
    // Poke: re-send the window's last chunk to provoke a Nack or token.
    uint64_t hi = std::min<uint64_t>(
        (static_cast<uint64_t>(window_) + 1) * config_.window_size,
        meta_.total_chunks);
    send_chunk(static_cast<uint32_t>(hi - 1), out);
    ++pokes_;
    ++stats_.pokes;
    out.push_back(ArmTimerAction{TimerKind::Token, config_.token_timeout_ms});
  } else {
    halt(HaltReason::TokenTimeout, out);
  }
}

void ServerSession::advance_or_finish(Actions& out) {
  if (window_ + 1 >= meta_.window_count()) {
    out.push_back(CancelTimerAction{TimerKind::Token});
    out.push_back(SendAction{session_id_, FinMsg{meta_.content_sha256}});
    phase_ = ServerPhase::Finished;
    return;
  }
  phase_ = ServerPhase::StreamingWindow;
  ++window_;
  pokes_ = 0;
  emit_window(window_, out);
  out.push_back(ArmTimerAction{TimerKind::Token, config_.token_timeout_ms});
  phase_ = ServerPhase::AwaitToken;
}

void ServerSession::emit_window(uint32_t w, Actions& out) {
  uint64_t lo = static_cast<uint64_t>(w) * config_.window_size;
  uint64_t hi = std::min<uint64_t>(lo + config_.window_size,
                                   meta_.total_chunks);
  for (uint64_t seq = lo; seq < hi; ++seq) {
    send_chunk(static_cast<uint32_t>(seq), out);
  }
}

void ServerSession::send_chunk(uint32_t seq, Actions& out) {
  out.push_back(SendAction{session_id_, make_chunk(seq)});
  ++stats_.chunks_sent;
}

ChunkMsg ServerSession::make_chunk(uint32_t seq) const {
  uint64_t offset = static_cast<uint64_t>(seq) * config_.chunk_size;
  uint64_t len = std::min<uint64_t>(config_.chunk_size,
                                    meta_.content_length - offset);
  ChunkMsg chunk;
  chunk.seq = seq;
  chunk.payload.assign(content_->begin() + offset,
                       content_->begin() + offset + len);
  chunk.crc32 = crc32(as_view(chunk.payload));
  return chunk;
}

void ServerSession::halt(HaltReason reason, Actions& out) {
  out.push_back(CancelTimerAction{TimerKind::Token});
  out.push_back(SendAction{session_id_, HaltMsg{reason}});
  out.push_back(LogAction{LogLevel::Info,
                          std::string("halt: ") + halt_reason_name(reason)});
  phase_ = ServerPhase::Halted;
  halt_reason_ = reason;
}

void ServerSession::ignore(const char* what, Actions& out) {
  out.push_back(LogAction{
      LogLevel::Debug,
      std::string("ignored event (") + what + ") in state " +
          server_phase_name(phase_)});
}

}  // namespace svsp::wire
