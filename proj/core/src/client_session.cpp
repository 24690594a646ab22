#include "svsp/client_session.hpp"

#include <algorithm>

#include "svsp/crc32.hpp"

namespace svsp::wire {

namespace {

constexpr size_t kStashCap = 512;

}  // namespace

const char* client_phase_name(ClientPhase phase) {
  switch (phase) {
    case ClientPhase::Idle: return "idle";
    case ClientPhase::SentHello: return "sent_hello";
    case ClientPhase::AwaitMetafile: return "await_metafile";
    case ClientPhase::Receiving: return "receiving";
    case ClientPhase::SentToken: return "sent_token";
    case ClientPhase::Done: return "done";
    case ClientPhase::Aborted: return "aborted";
  }
  return "unknown";
}

const char* abort_kind_name(AbortKind kind) {
  switch (kind) {
    case AbortKind::NotFound: return "not_found";
    case AbortKind::ServerHalt: return "server_halt";
    case AbortKind::Timeout: return "timeout";
    case AbortKind::Internal: return "internal";
  }
  return "unknown";
}

ClientSession::ClientSession(ClientSessionConfig config, uint64_t seed)
    : config_(std::move(config)), rng_(seed) {
  if (config_.content_name.empty() || config_.content_name.size() > 0xFF) {
    throw std::invalid_argument("client session: content name must be "
                                "1..255 bytes");
  }
  if (config_.rsa_bits < 32) {
    throw std::invalid_argument("client session: rsa_bits must be >= 32 for "
                                "the metafile block scheme");
  }
  if (config_.gap_timer_ms < 1 || config_.idle_timeout_ms < 1) {
    throw std::invalid_argument("client session: timers must be >= 1 ms");
  }
}

Actions ClientSession::handle(const Event& event, uint64_t now_ms) {
  Actions out;
  if (terminal()) {
    ignore("session terminal", out);
    return out;
  }

  if (std::holds_alternative<StartEvent>(event)) {
    on_start(out);
    return out;
  }

  if (const auto* timer = std::get_if<TimerEvent>(&event)) {
    switch (timer->kind) {
      case TimerKind::Gap: on_gap_timer(out); break;
      case TimerKind::Idle: on_idle_timer(out); break;
      case TimerKind::Token: ignore("timer kind not used by client", out); break;
    }
    return out;
  }

  const auto& me = std::get<MessageEvent>(event);
  if (phase_ == ClientPhase::SentHello) {
    if (const auto* reply = std::get_if<HelloReplyMsg>(&me.msg)) {
      on_hello_reply(me.session_id, *reply, now_ms, out);
    } else if (std::holds_alternative<MetafileMsg>(me.msg) ||
               std::holds_alternative<ChunkMsg>(me.msg) ||
               std::holds_alternative<FinMsg>(me.msg)) {
      // Reordering can land stream traffic before the HelloReply that names
      // our session; hold it until we know which session is ours.
      stash(me.session_id, me.msg, out);
    } else {
      ignore("message before session bind", out);
    }
    return out;
  }

  if (me.session_id != session_id_) {
    // Traffic for an orphan session from an earlier Hello retry.
    ignore("foreign session id", out);
    return out;
  }
  out.push_back(ArmTimerAction{TimerKind::Idle, config_.idle_timeout_ms});

  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, MetafileMsg>) {
          on_metafile(m, now_ms, out);
        } else if constexpr (std::is_same_v<T, ChunkMsg>) {
          on_chunk(m, now_ms, out);
        } else if constexpr (std::is_same_v<T, FinMsg>) {
          on_fin(m, out);
        } else if constexpr (std::is_same_v<T, HaltMsg>) {
          on_halt(m, out);
        } else {
          ignore("unexpected message type", out);
        }
      },
      me.msg);
  return out;
}

void ClientSession::on_start(Actions& out) {
  if (phase_ != ClientPhase::Idle) {
    ignore("start already consumed", out);
    return;
  }
  retries_left_ = config_.hello_retries;
  rsa_ = crypto::rsa_keygen(config_.rsa_bits, rng_.next());
  dh_pair_ = crypto::dh_keygen(config_.dh, rng_);
  phase_ = ClientPhase::SentHello;
  send_hello(out);
}

void ClientSession::send_hello(Actions& out) {
  HelloMsg hello;
  hello.content_name = config_.content_name;
  hello.dh_public = dh_pair_.public_key;
  hello.rsa_n = rsa_.n;
  hello.rsa_e = rsa_.e;
  out.push_back(SendAction{0, std::move(hello)});
  ++stats_.hello_sent;
  out.push_back(ArmTimerAction{TimerKind::Idle, config_.idle_timeout_ms});
}

void ClientSession::reset_for_retry() {
  session_id_ = 0;
  secret_.reset();
  mf_blocks_.clear();
  mf_have_ = 0;
  meta_.reset();
  content_buf_.clear();
  have_.clear();
  have_count_ = 0;
  window_ = 0;
  stash_.clear();
  phase_ = ClientPhase::SentHello;
}

void ClientSession::on_hello_reply(uint64_t sid, const HelloReplyMsg& msg,
                                   uint64_t now_ms, Actions& out) {
  if (msg.status == HelloStatus::NotFound) {
    abort(AbortKind::NotFound, "server has no such content", out);
    return;
  }
  try {
    secret_ = crypto::dh_shared(dh_pair_, msg.dh_public, config_.dh);
  } catch (const std::exception& e) {
    abort(AbortKind::Internal, std::string("dh failed: ") + e.what(), out);
    return;
  }
  session_id_ = sid;
  phase_ = ClientPhase::AwaitMetafile;
  out.push_back(LogAction{LogLevel::Info,
                          "session bound: " + std::to_string(sid)});
  out.push_back(ArmTimerAction{TimerKind::Idle, config_.idle_timeout_ms});
  drain_stash(now_ms, out);
}

void ClientSession::on_metafile(const MetafileMsg& msg, uint64_t now_ms,
                                Actions& out) {
  if (phase_ != ClientPhase::AwaitMetafile) {
    ignore("metafile after decode", out);
    return;
  }
  if (msg.total_blocks == 0) {
    ignore("metafile with zero blocks", out);
    return;
  }
  if (mf_blocks_.empty()) {
    mf_blocks_.resize(msg.total_blocks);
  } else if (mf_blocks_.size() != msg.total_blocks) {
    ignore("metafile total_blocks changed", out);
    return;
  }
  for (size_t j = 0; j < msg.blocks.size(); ++j) {
    size_t idx = msg.first_index + j;
    if (!mf_blocks_[idx]) {
      mf_blocks_[idx] = msg.blocks[j];
      ++mf_have_;
    }
  }
  if (mf_have_ == mf_blocks_.size()) metafile_complete(now_ms, out);
}

void ClientSession::metafile_complete(uint64_t now_ms, Actions& out) {
  std::vector<Bytes> blocks;
  blocks.reserve(mf_blocks_.size());
  for (const auto& block : mf_blocks_) blocks.push_back(*block);
  Bytes plain;
  try {
    plain = crypto::rsa_decrypt_bytes(blocks, rsa_);
  } catch (const std::exception& e) {
    abort(AbortKind::Internal, std::string("metafile decrypt: ") + e.what(),
          out);
    return;
  }
  auto meta = decode_metafile(as_view(plain));
  if (!meta || meta->chunk_size > kMaxChunkPayload) {
    abort(AbortKind::Internal, "metafile malformed", out);
    return;
  }
  meta_ = *meta;
  content_buf_.assign(meta_->content_length, 0);
  have_.assign(meta_->total_chunks, false);
  have_count_ = 0;
  out.push_back(LogAction{
      LogLevel::Info, "metafile: " + std::to_string(meta_->content_length) +
                          " bytes in " + std::to_string(meta_->total_chunks) +
                          " chunks"});
  enter_receiving(0, out);
  drain_stash(now_ms, out);
}

void ClientSession::enter_receiving(uint32_t w, Actions& out) {
  window_ = w;
  phase_ = ClientPhase::Receiving;
  if (meta_->total_chunks > 0) {
    out.push_back(ArmTimerAction{TimerKind::Gap, config_.gap_timer_ms});
  }
}

void ClientSession::on_chunk(const ChunkMsg& msg, uint64_t now_ms,
                             Actions& out) {
  if (phase_ == ClientPhase::AwaitMetafile) {
    // Window 0 can overtake the tail of the metafile.
    stash(session_id_, Message(msg), out);
    return;
  }
  if (phase_ != ClientPhase::Receiving && phase_ != ClientPhase::SentToken) {
    ignore("chunk outside streaming", out);
    return;
  }
  if (msg.seq >= meta_->total_chunks) {
    ignore("chunk seq out of range", out);
    return;
  }
  if (crc32(as_view(msg.payload)) != msg.crc32) {
    ++stats_.crc_failures;
    out.push_back(LogAction{LogLevel::Warn,
                            "crc mismatch on chunk " + std::to_string(msg.seq)});
    return;
  }
  uint64_t offset = static_cast<uint64_t>(msg.seq) * meta_->chunk_size;
  uint64_t expect_len =
      std::min<uint64_t>(meta_->chunk_size, meta_->content_length - offset);
  if (msg.payload.size() != expect_len) {
    ++stats_.crc_failures;
    out.push_back(LogAction{LogLevel::Warn,
                            "bad payload length on chunk " +
                                std::to_string(msg.seq)});
    return;
  }
  uint32_t w_of = msg.seq / meta_->window_size;

  if (have_[msg.seq]) {
    ++stats_.duplicate_chunks;
    // A re-sent last chunk of the awaited window is the server poking for a
    // token it never got.  Acknowledging behaviors re-send, unless the token
    // may still be in flight (a poke that crossed it) — a premature
    // duplicate would read as replay.  Withholding behaviors stay silent.
    bool acknowledges = config_.behavior == ClientBehavior::Conforming ||
                        config_.behavior == ClientBehavior::RepeatToken;
    if (acknowledges && phase_ == ClientPhase::SentToken && w_of == window_ &&
        now_ms - last_token_ms_ >= config_.retoken_min_ms) {
      send_token(window_, now_ms, out);
    }
    return;
  }

  if (phase_ == ClientPhase::SentToken && w_of == window_ + 1) {
    // First chunk of the next window: our token was accepted.
    enter_receiving(window_ + 1, out);
  } else if (w_of != window_) {
    ignore("chunk outside the open window", out);
    return;
  }

  std::copy(msg.payload.begin(), msg.payload.end(),
            content_buf_.begin() + offset);
  have_[msg.seq] = true;
  ++have_count_;
  stats_.bytes_received += msg.payload.size();
  ++stats_.chunks_received;

  if (phase_ == ClientPhase::Receiving && window_held(window_)) {
    window_complete(now_ms, out);
  }
}

void ClientSession::window_complete(uint64_t now_ms, Actions& out) {
  out.push_back(CancelTimerAction{TimerKind::Gap});
  switch (config_.behavior) {
    case ClientBehavior::Conforming:
      send_token(window_, now_ms, out);
      break;
    case ClientBehavior::RepeatToken:
      send_token(window_, now_ms, out);
      if (window_ == 0) {
        token::AckToken tok =
            token::derive_token(*secret_, meta_->token_nonce, window_);
        out.push_back(
            SendAction{session_id_, AckTokenMsg{window_, tok.value}});
        ++stats_.tokens_sent;
      }
      break;
    case ClientBehavior::ReplayOld: {
      AckTokenMsg msg;
      msg.window_index = window_;
      if (window_ < config_.replay_tokens.size()) {
        msg.value = config_.replay_tokens[window_];
      }
      out.push_back(SendAction{session_id_, std::move(msg)});
      ++stats_.tokens_sent;
      break;
    }
    case ClientBehavior::NoToken:
      out.push_back(LogAction{LogLevel::Debug,
                              "window complete, withholding token"});
      break;
  }
  phase_ = ClientPhase::SentToken;
}

void ClientSession::send_token(uint32_t w, uint64_t now_ms, Actions& out) {
  token::AckToken tok = token::derive_token(*secret_, meta_->token_nonce, w);
  out.push_back(SendAction{session_id_, AckTokenMsg{w, tok.value}});
  ++stats_.tokens_sent;
  last_token_ms_ = now_ms;
  if (sent_tokens_.empty() || sent_tokens_.back().window_index < w) {
    sent_tokens_.push_back(tok);
  }
}

void ClientSession::on_fin(const FinMsg& msg, Actions& out) {
  if (phase_ == ClientPhase::AwaitMetafile) {
    // Empty content: Fin may overtake the metafile.
    stash(session_id_, Message(msg), out);
    return;
  }
  if (phase_ != ClientPhase::Receiving && phase_ != ClientPhase::SentToken) {
    ignore("fin outside streaming", out);
    return;
  }
  if (have_count_ != meta_->total_chunks) {
    ignore("fin while chunks missing", out);
    return;
  }
  if (Sha256::of(as_view(content_buf_)) != meta_->content_sha256) {
    abort(AbortKind::Internal, "content hash mismatch", out);
    return;
  }
  finish_done("fin verified", out);
}

void ClientSession::on_halt(const HaltMsg& msg, Actions& out) {
  abort(AbortKind::ServerHalt,
        std::string("server halt: ") + halt_reason_name(msg.reason), out,
        msg.reason);
}

void ClientSession::on_gap_timer(Actions& out) {
  if (phase_ != ClientPhase::Receiving) {
    ignore("gap timer outside Receiving", out);
    return;
  }
  std::vector<uint32_t> missing = missing_in_window(window_, kMaxNackSeqs);
  if (!missing.empty()) {
    out.push_back(SendAction{session_id_, NackMsg{std::move(missing)}});
    ++stats_.nacks_sent;
  }
  out.push_back(ArmTimerAction{TimerKind::Gap, config_.gap_timer_ms});
}

void ClientSession::on_idle_timer(Actions& out) {
  if (phase_ == ClientPhase::SentHello ||
      phase_ == ClientPhase::AwaitMetafile) {
    if (retries_left_ > 0) {
      --retries_left_;
      out.push_back(LogAction{LogLevel::Info, "idle: retrying hello"});
      reset_for_retry();
      send_hello(out);
    } else {
      abort(AbortKind::Timeout, "handshake never completed", out);
    }
    return;
  }
  // Streaming phases: the Fin (or the whole tail of the last window's
  // exchange) can be lost after the content itself is already whole.
  if (content_complete_and_valid()) {
    finish_done("idle fallback, content verified", out);
  } else {
    abort(AbortKind::Timeout, "stream stalled", out);
  }
}

void ClientSession::finish_done(const char* how, Actions& out) {
  out.push_back(CancelTimerAction{TimerKind::Gap});
  out.push_back(CancelTimerAction{TimerKind::Idle});
  out.push_back(LogAction{LogLevel::Info, std::string("done: ") + how});
  phase_ = ClientPhase::Done;
}

void ClientSession::abort(AbortKind kind, std::string detail, Actions& out,
                          HaltReason halt) {
  out.push_back(CancelTimerAction{TimerKind::Gap});
  out.push_back(CancelTimerAction{TimerKind::Idle});
  out.push_back(LogAction{LogLevel::Warn, "aborted: " + detail});
  AbortInfo info;
  info.kind = kind;
  info.halt_reason = halt;
  info.detail = std::move(detail);
  abort_ = std::move(info);
  phase_ = ClientPhase::Aborted;
}

void ClientSession::ignore(const char* what, Actions& out) {
  out.push_back(LogAction{
      LogLevel::Debug,
      std::string("ignored event (") + what + ") in state " +
          client_phase_name(phase_)});
}

void ClientSession::stash(uint64_t sid, const Message& msg, Actions& out) {
  if (stash_.size() >= kStashCap) {
    out.push_back(LogAction{LogLevel::Debug, "stash full, dropping"});
    return;
  }
  stash_.emplace_back(sid, msg);
}

void ClientSession::drain_stash(uint64_t now_ms, Actions& out) {
  std::deque<std::pair<uint64_t, Message>> pending;
  pending.swap(stash_);
  for (auto& [sid, msg] : pending) {
    if (terminal()) break;
    if (sid != session_id_) continue;
    if (const auto* mf = std::get_if<MetafileMsg>(&msg)) {
      on_metafile(*mf, now_ms, out);
    } else if (const auto* chunk = std::get_if<ChunkMsg>(&msg)) {
      on_chunk(*chunk, now_ms, out);
    } else if (const auto* fin = std::get_if<FinMsg>(&msg)) {
      on_fin(*fin, out);
    }
  }
}

bool ClientSession::window_held(uint32_t w) const {
  uint64_t lo = static_cast<uint64_t>(w) * meta_->window_size;
  uint64_t hi = std::min<uint64_t>(lo + meta_->window_size,
                                   meta_->total_chunks);
  for (uint64_t seq = lo; seq < hi; ++seq) {
    if (!have_[seq]) return false;
  }
  return true;
}

bool ClientSession::content_complete_and_valid() const {
  return meta_ && have_count_ == meta_->total_chunks &&
         Sha256::of(as_view(content_buf_)) == meta_->content_sha256;
}

std::vector<uint32_t> ClientSession::missing_in_window(uint32_t w,
                                                       size_t cap) const {
  std::vector<uint32_t> missing;
  uint64_t lo = static_cast<uint64_t>(w) * meta_->window_size;
  uint64_t hi = std::min<uint64_t>(lo + meta_->window_size,
                                   meta_->total_chunks);
  for (uint64_t seq = lo; seq < hi && missing.size() < cap; ++seq) {
    if (!have_[seq]) missing.push_back(static_cast<uint32_t>(seq));
  }
  return missing;
}

}  // namespace svsp::wire
