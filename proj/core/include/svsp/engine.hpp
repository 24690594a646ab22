#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>

#include "svsp/client_session.hpp"
#include "svsp/server_session.hpp"

namespace svsp::net {

// Timer identity as drivers see it: the server runs one timer per
// (session, kind); the client engine always keys with session 0.
struct TimerKey {
  uint64_t session_id = 0;
  wire::TimerKind kind = wire::TimerKind::Token;

  auto operator<=>(const TimerKey&) const = default;
};

struct ArmRequest {
  TimerKey key;
  uint32_t delay_ms = 0;
};

struct LogLine {
  wire::LogLevel level = wire::LogLevel::Debug;
  std::string text;
};

// What a driver must apply after feeding an engine one input: datagrams to
// put on the wire, timers to (re)arm or cancel, lines to log.
struct EngineOut {
  std::vector<Bytes> send;
  std::vector<ArmRequest> arm;
  std::vector<TimerKey> cancel;
  std::vector<LogLine> logs;
};

using ContentResolver =
    std::function<std::shared_ptr<const Bytes>(const std::string&)>;

// Byte-level server: decodes datagrams, spawns one ServerSession per Hello
// (fresh session id, fresh seed), routes the rest by header session id.
class ServerEngine {
 public:
  ServerEngine(ContentResolver resolver, wire::ServerSessionConfig config,
               uint64_t seed);

  EngineOut on_datagram(BytesView datagram, uint64_t now_ms);
  EngineOut on_timer(const TimerKey& key, uint64_t now_ms);

  const std::map<uint64_t, wire::ServerSession>& sessions() const {
    return sessions_;
  }
  bool all_terminal() const;
  uint64_t decode_errors() const { return decode_errors_; }

  // Drops Finished/Halted sessions; returns their ids so drivers can clear
  // per-session state of their own.
  std::vector<uint64_t> prune_terminal();

 private:
  EngineOut run(wire::ServerSession& session, const wire::Event& event,
                uint64_t now_ms);

  ContentResolver resolver_;
  wire::ServerSessionConfig config_;
  SplitMix64 rng_;
  uint64_t next_session_id_ = 1;
  std::map<uint64_t, wire::ServerSession> sessions_;
  uint64_t decode_errors_ = 0;
};

// Byte-level client: one ClientSession; timers keyed {0, kind}.
class ClientEngine {
 public:
  ClientEngine(wire::ClientSessionConfig config, uint64_t seed);

  EngineOut start(uint64_t now_ms);
  EngineOut on_datagram(BytesView datagram, uint64_t now_ms);
  EngineOut on_timer(const TimerKey& key, uint64_t now_ms);

  const wire::ClientSession& session() const { return session_; }
  uint64_t decode_errors() const { return decode_errors_; }

 private:
  EngineOut run(const wire::Event& event, uint64_t now_ms);

  wire::ClientSession session_;
  uint64_t decode_errors_ = 0;
};

}  // namespace svsp::net
