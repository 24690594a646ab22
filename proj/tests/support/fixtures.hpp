#pragma once

// Shared harness pieces for driving the sans-transport state machines in
// unit tests: a protocol-fluent test client, action inspectors, and a
// deterministic two-machine pump with drop hooks and a virtual clock.

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "svsp/client_session.hpp"
#include "svsp/metafile.hpp"
#include "svsp/server_session.hpp"

namespace svsp::testing {

template <typename M>
std::vector<M> sends_of(const wire::Actions& actions) {
  std::vector<M> out;
  for (const wire::Action& action : actions) {
    if (const auto* send = std::get_if<wire::SendAction>(&action)) {
      if (const auto* msg = std::get_if<M>(&send->msg)) out.push_back(*msg);
    }
  }
  return out;
}

inline bool arms_timer(const wire::Actions& actions, wire::TimerKind kind) {
  for (const wire::Action& action : actions) {
    if (const auto* arm = std::get_if<wire::ArmTimerAction>(&action)) {
      if (arm->kind == kind) return true;
    }
  }
  return false;
}

inline bool cancels_timer(const wire::Actions& actions, wire::TimerKind kind) {
  for (const wire::Action& action : actions) {
    if (const auto* c = std::get_if<wire::CancelTimerAction>(&action)) {
      if (c->kind == kind) return true;
    }
  }
  return false;
}

// Hand-rolled peer for ServerSession unit tests: owns the client-side keys,
// speaks the handshake, and turns the server's reply into the shared secret
// and decrypted metafile so tests can mint genuine tokens.
struct TestClient {
  crypto::DhParams dh = crypto::default_dh_params();
  crypto::DhKeyPair dh_pair;
  crypto::RsaKeyPair rsa;
  std::optional<crypto::SharedSecret> secret;
  std::optional<wire::SessionMetafile> meta;

  explicit TestClient(uint64_t seed = 77)
      : dh_pair(crypto::dh_keygen(dh, seed)),
        rsa(crypto::rsa_keygen(64, seed + 1)) {}

  wire::HelloMsg hello(std::string name) const {
    return wire::HelloMsg{std::move(name), dh_pair.public_key, rsa.n, rsa.e};
  }

  // Digests HelloReply and Metafile sends out of a server action batch.
  void absorb(const wire::Actions& actions) {
    std::vector<Bytes> blocks;
    for (const auto& reply : sends_of<wire::HelloReplyMsg>(actions)) {
      secret = crypto::dh_shared(dh_pair, reply.dh_public, dh);
    }
    for (const auto& mf : sends_of<wire::MetafileMsg>(actions)) {
      if (blocks.empty()) blocks.resize(mf.total_blocks);
      for (size_t i = 0; i < mf.blocks.size(); ++i) {
        blocks.at(mf.first_index + i) = mf.blocks[i];
      }
    }
    if (!blocks.empty()) {
      Bytes plain = crypto::rsa_decrypt_bytes(blocks, rsa);
      auto decoded = wire::decode_metafile(as_view(plain));
      if (decoded) meta = *decoded;
    }
  }

  token::AckToken token(uint32_t w) const {
    return token::derive_token(*secret, meta->token_nonce, w);
  }

  wire::AckTokenMsg token_msg(uint32_t w) const {
    token::AckToken tok = token(w);
    return wire::AckTokenMsg{tok.window_index, tok.value};
  }
};

// Runs one ClientSession against one ServerSession with instant delivery,
// a virtual clock for timers, and an optional per-message drop hook.
// Deterministic: delivery is global send order; timers fire only when no
// message is in flight, earliest deadline first (client before server on
// ties, Token < Gap < Idle within a machine).
class LinkedPair {
 public:
  LinkedPair(Bytes content, wire::ServerSessionConfig server_config = {},
             wire::ClientSessionConfig client_config = {},
             uint64_t server_seed = 11, uint64_t client_seed = 22)
      : server(1, std::make_shared<const Bytes>(std::move(content)),
               server_config, server_seed),
        client(std::move(client_config), client_seed) {}

  // Return true to drop the message; toward_server tells the direction.
  std::function<bool(bool toward_server, const wire::Message&)> drop;

  uint64_t now = 0;
  wire::ServerSession server;
  wire::ClientSession client;
  std::vector<wire::Message> delivered_to_client;
  std::vector<wire::Message> delivered_to_server;

  void start() {
    dispatch(false, client.handle(wire::StartEvent{}, now));
  }

  // Pumps until both machines are terminal, the virtual clock passes
  // deadline_ms, or nothing can make progress.
  void run(uint64_t deadline_ms = 600'000) {
    while (now <= deadline_ms) {
      if (!queue_.empty()) {
        auto [toward_server, sid, msg] = std::move(queue_.front());
        queue_.pop_front();
        if (drop && drop(toward_server, msg)) continue;
        if (toward_server) {
          delivered_to_server.push_back(msg);
          dispatch(true, server.handle(wire::MessageEvent{sid, msg}, now));
        } else {
          delivered_to_client.push_back(msg);
          dispatch(false, client.handle(wire::MessageEvent{sid, msg}, now));
        }
        continue;
      }
      if (client.terminal() && server.terminal()) return;
      // Quiescent: advance to the earliest timer.
      bool client_side = false;
      wire::TimerKind kind{};
      uint64_t due = 0;
      if (!next_timer(client_side, kind, due)) return;
      now = std::max(now, due);
      if (client_side) {
        client_timers_.erase(kind);
        dispatch(false, client.handle(wire::TimerEvent{kind}, now));
      } else {
        server_timers_.erase(kind);
        dispatch(true, server.handle(wire::TimerEvent{kind}, now));
      }
    }
  }

 private:
  struct InFlight {
    bool toward_server;
    uint64_t session_id;
    wire::Message msg;
  };

  void dispatch(bool from_server, wire::Actions&& actions) {
    auto& timers = from_server ? server_timers_ : client_timers_;
    for (wire::Action& action : actions) {
      if (auto* send = std::get_if<wire::SendAction>(&action)) {
        queue_.push_back(
            InFlight{!from_server, send->session_id, std::move(send->msg)});
      } else if (auto* arm = std::get_if<wire::ArmTimerAction>(&action)) {
        timers[arm->kind] = now + arm->delay_ms;
      } else if (auto* cancel = std::get_if<wire::CancelTimerAction>(&action)) {
        timers.erase(cancel->kind);
      }
    }
  }

  bool next_timer(bool& client_side, wire::TimerKind& kind, uint64_t& due) {
    bool found = false;
    auto consider = [&](bool is_client, const auto& timers) {
      for (const auto& [k, deadline] : timers) {
        if (!found || deadline < due) {
          found = true;
          client_side = is_client;
          kind = k;
          due = deadline;
        }
      }
    };
    consider(true, client_timers_);
    consider(false, server_timers_);
    return found;
  }

  std::deque<InFlight> queue_;
  std::map<wire::TimerKind, uint64_t> client_timers_;
  std::map<wire::TimerKind, uint64_t> server_timers_;
};

}  // namespace svsp::testing
