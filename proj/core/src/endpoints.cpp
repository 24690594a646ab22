#include "svsp/endpoints.hpp"

#include <algorithm>
#include <chrono>
#include <map>

#include "svsp/log.hpp"
#include "svsp/simulator.hpp"

namespace svsp::app {

namespace {

uint64_t steady_ms() {
  return static_cast<uint64_t>(
      std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::steady_clock::now().time_since_epoch())
          .count());
}

// Session id straight from an encoded datagram our own engine produced.
uint64_t peek_session_id(BytesView datagram) {
  uint64_t sid = 0;
  for (size_t i = 4; i < wire::kHeaderSize; ++i) sid = sid << 8 | datagram[i];
  return sid;
}

void emit_logs(const net::EngineOut& out) {
  for (const auto& line : out.logs) log_line(line.level, line.text);
}

void apply_timers(const net::EngineOut& out, uint64_t now,
                  std::map<net::TimerKey, uint64_t>& timers) {
  for (const net::TimerKey& key : out.cancel) timers.erase(key);
  for (const net::ArmRequest& req : out.arm) {
    timers[req.key] = now + req.delay_ms;
  }
}

// Pops every timer due at `now`, earliest first.
std::vector<net::TimerKey> due_timers(std::map<net::TimerKey, uint64_t>& timers,
                                      uint64_t now) {
  std::vector<std::pair<uint64_t, net::TimerKey>> due;
  for (const auto& [key, deadline] : timers) {
    if (deadline <= now) due.emplace_back(deadline, key);
  }
  std::sort(due.begin(), due.end());
  std::vector<net::TimerKey> keys;
  for (const auto& [deadline, key] : due) {
    timers.erase(key);
    keys.push_back(key);
  }
  return keys;
}

uint32_t next_timeout(const std::map<net::TimerKey, uint64_t>& timers,
                      uint64_t now, uint32_t cap_ms) {
  uint64_t best = now + cap_ms;
  for (const auto& [key, deadline] : timers) best = std::min(best, deadline);
  return static_cast<uint32_t>(best > now ? best - now : 0);
}

}  // namespace

const char* fetch_outcome_name(FetchOutcome outcome) {
  switch (outcome) {
    case FetchOutcome::Done: return "done";
    case FetchOutcome::Aborted: return "aborted";
    case FetchOutcome::Halted: return "halted";
  }
  return "unknown";
}

std::string FetchReport::to_key_values() const {
  std::string s;
  s += std::string("outcome=") + fetch_outcome_name(outcome) + "\n";
  if (outcome == FetchOutcome::Halted) {
    s += std::string("halt_reason=") + wire::halt_reason_name(halt_reason) +
         "\n";
  }
  if (outcome == FetchOutcome::Aborted) s += "detail=" + detail + "\n";
  s += "bytes_received=" + std::to_string(bytes_received) + "\n";
  s += "chunks_received=" + std::to_string(chunks_received) + "\n";
  s += "chunks_retransmitted=" + std::to_string(chunks_retransmitted) + "\n";
  s += "nacks_sent=" + std::to_string(nacks_sent) + "\n";
  s += "tokens_sent=" + std::to_string(tokens_sent) + "\n";
  s += "duration_ms=" + std::to_string(duration_ms) + "\n";
  if (outcome == FetchOutcome::Done) {
    s += "sha256=" + to_hex(content_sha256) + "\n";
  }
  return s;
}

FetchReport make_report(const wire::ClientSession& session,
                        uint64_t duration_ms) {
  FetchReport report;
  const wire::ClientStats& stats = session.stats();
  report.bytes_received = stats.bytes_received;
  report.chunks_received = stats.chunks_received;
  report.chunks_retransmitted = stats.duplicate_chunks;
  report.nacks_sent = stats.nacks_sent;
  report.tokens_sent = stats.tokens_sent;
  report.duration_ms = duration_ms;
  if (session.phase() == wire::ClientPhase::Done) {
    report.outcome = FetchOutcome::Done;
    report.content_sha256 = Sha256::of(as_view(session.content()));
    return report;
  }
  const auto& abort = session.abort_info();
  if (abort && abort->kind == wire::AbortKind::ServerHalt) {
    report.outcome = FetchOutcome::Halted;
    report.halt_reason = abort->halt_reason;
    report.detail = abort->detail;
    return report;
  }
  report.outcome = FetchOutcome::Aborted;
  report.detail = abort ? abort->detail : "session never finished";
  return report;
}

FetchReport make_report(const net::SimResult& result) {
  FetchReport report;
  report.bytes_received = result.client_stats.bytes_received;
  report.chunks_received = result.client_stats.chunks_received;
  report.chunks_retransmitted = result.client_stats.duplicate_chunks;
  report.nacks_sent = result.client_stats.nacks_sent;
  report.tokens_sent = result.client_stats.tokens_sent;
  report.duration_ms = result.virtual_ms;
  if (result.client_phase == wire::ClientPhase::Done) {
    report.outcome = FetchOutcome::Done;
    report.content_sha256 = Sha256::of(as_view(result.client_content));
    return report;
  }
  const auto& abort = result.client_abort;
  if (abort && abort->kind == wire::AbortKind::ServerHalt) {
    report.outcome = FetchOutcome::Halted;
    report.halt_reason = abort->halt_reason;
    report.detail = abort->detail;
    return report;
  }
  report.outcome = FetchOutcome::Aborted;
  report.detail = abort ? abort->detail : "session never finished";
  return report;
}

void serve(const ServeConfig& config, const std::atomic<bool>& stop,
           const std::function<void(uint16_t)>& on_ready) {
  ContentStore store(config.content_root);
  net::UdpEndpoint sock(config.bind_addr);
  net::ServerEngine engine(store.resolver(), config.session, config.seed);

  std::map<net::TimerKey, uint64_t> timers;
  std::map<uint64_t, net::Peer> peers;

  log_line(wire::LogLevel::Info,
           "listening on " + sock.local_address() + ", content root " +
               store.root().string());
  if (on_ready) on_ready(sock.local_port());

  auto route = [&](const net::EngineOut& out, const net::Peer& fallback) {
    emit_logs(out);
    for (const Bytes& datagram : out.send) {
      uint64_t sid = peek_session_id(as_view(datagram));
      net::Peer dest = fallback;
      if (sid != 0) {
        auto pinned = peers.find(sid);
        if (pinned == peers.end()) {
          peers.emplace(sid, fallback);
        } else {
          dest = pinned->second;
        }
      }
      try {
        sock.send(as_view(datagram), dest);
      } catch (const net::UdpError& e) {
        log_line(wire::LogLevel::Warn, e.what());
      }
    }
  };

  while (!stop.load(std::memory_order_relaxed)) {
    uint64_t now = steady_ms();
    for (const net::TimerKey& key : due_timers(timers, now)) {
      net::EngineOut out = engine.on_timer(key, now);
      apply_timers(out, now, timers);
      auto pinned = peers.find(key.session_id);
      if (pinned != peers.end()) route(out, pinned->second);
    }
    for (uint64_t sid : engine.prune_terminal()) {
      peers.erase(sid);
      timers.erase(net::TimerKey{sid, wire::TimerKind::Token});
    }

    auto received = sock.receive(next_timeout(timers, now, 200));
    if (!received) continue;
    now = steady_ms();
    auto& [datagram, from] = *received;

    // A session stays pinned to the peer that opened it.
    if (datagram.size() >= wire::kHeaderSize) {
      uint64_t sid = peek_session_id(as_view(datagram));
      auto pinned = peers.find(sid);
      if (sid != 0 && pinned != peers.end() && !(pinned->second == from)) {
        log_line(wire::LogLevel::Warn,
                 "dropping datagram for session " + std::to_string(sid) +
                     " from wrong peer " + from.to_string());
        continue;
      }
    }
    net::EngineOut out = engine.on_datagram(as_view(datagram), now);
    apply_timers(out, now, timers);
    route(out, from);
  }
  log_line(wire::LogLevel::Info, "server stopped");
}

FetchReport fetch(const FetchParams& params, Bytes* content_out,
                  std::vector<token::AckToken>* tokens_out) {
  net::Peer server = net::resolve_peer(params.server_addr);
  bool v6 = server.addr.ss_family == AF_INET6;
  net::UdpEndpoint sock(v6 ? "[::]:0" : "0.0.0.0:0");
  net::ClientEngine engine(params.session, params.seed);

  std::map<net::TimerKey, uint64_t> timers;
  uint64_t started = steady_ms();

  auto apply = [&](const net::EngineOut& out, uint64_t now) {
    emit_logs(out);
    apply_timers(out, now, timers);
    for (const Bytes& datagram : out.send) {
      try {
        sock.send(as_view(datagram), server);
      } catch (const net::UdpError& e) {
        log_line(wire::LogLevel::Warn, e.what());
      }
    }
  };

  apply(engine.start(started), started);

  while (!engine.session().terminal()) {
    uint64_t now = steady_ms();
    if (now - started > params.deadline_ms) {
      log_line(wire::LogLevel::Warn, "fetch wall-clock deadline hit");
      break;
    }
    for (const net::TimerKey& key : due_timers(timers, now)) {
      apply(engine.on_timer(key, now), now);
    }
    if (engine.session().terminal()) break;

    auto received = sock.receive(next_timeout(timers, now, 200));
    if (!received) continue;
    now = steady_ms();
    if (!(received->second == server)) {
      log_line(wire::LogLevel::Debug,
               "ignoring datagram from " + received->second.to_string());
      continue;
    }
    apply(engine.on_datagram(as_view(received->first), now), now);
  }

  uint64_t duration = steady_ms() - started;
  const wire::ClientSession& session = engine.session();
  if (content_out && session.phase() == wire::ClientPhase::Done) {
    *content_out = session.content();
  }
  if (tokens_out) *tokens_out = session.tokens_sent();
  return make_report(session, duration);
}

FetchReport attack_no_token(const std::string& server_addr,
                            const std::string& content_name, uint64_t seed) {
  FetchParams params;
  params.server_addr = server_addr;
  params.session.content_name = content_name;
  params.session.behavior = wire::ClientBehavior::NoToken;
  // Outlast any sane poke schedule: the Halt is the datum this run exists
  // to observe, so the attacker must not trip its own idle watchdog first.
  params.session.idle_timeout_ms = 30'000;
  params.seed = seed;
  return fetch(params);
}

ReplayAttackResult attack_replay(const std::string& server_addr,
                                 const std::string& content_name,
                                 uint64_t seed) {
  ReplayAttackResult result;

  FetchParams capture;
  capture.server_addr = server_addr;
  capture.session.content_name = content_name;
  capture.seed = seed;
  std::vector<token::AckToken> captured;
  result.capture_run = fetch(capture, nullptr, &captured);

  FetchParams replay;
  replay.server_addr = server_addr;
  replay.session.content_name = content_name;
  replay.session.behavior = wire::ClientBehavior::ReplayOld;
  replay.session.idle_timeout_ms = 30'000;
  replay.session.replay_tokens.reserve(captured.size());
  for (const token::AckToken& tok : captured) {
    replay.session.replay_tokens.push_back(tok.value);
  }
  replay.seed = seed + 1;
  result.replay_run = fetch(replay);
  return result;
}

}  // namespace svsp::app
