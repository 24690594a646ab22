#include "svsp/engine.hpp"

#include <algorithm>
#include <iterator>

namespace svsp::net {

namespace {

// Folds a session's actions into driver terms.  timer_session fixes the
// TimerKey a session's timers live under.
void fold_actions(wire::Actions&& actions, uint64_t timer_session,
                  EngineOut& out) {
  for (auto& action : actions) {
    if (auto* send = std::get_if<wire::SendAction>(&action)) {
      out.send.push_back(wire::encode_message(send->session_id, send->msg));
    } else if (auto* arm = std::get_if<wire::ArmTimerAction>(&action)) {
      out.arm.push_back(
          ArmRequest{TimerKey{timer_session, arm->kind}, arm->delay_ms});
    } else if (auto* cancel = std::get_if<wire::CancelTimerAction>(&action)) {
      out.cancel.push_back(TimerKey{timer_session, cancel->kind});
    } else {
      auto& log = std::get<wire::LogAction>(action);
      out.logs.push_back(LogLine{log.level, std::move(log.text)});
    }
  }
}

void append(EngineOut& into, EngineOut&& from) {
  std::move(from.send.begin(), from.send.end(), std::back_inserter(into.send));
  std::move(from.arm.begin(), from.arm.end(), std::back_inserter(into.arm));
  std::move(from.cancel.begin(), from.cancel.end(),
            std::back_inserter(into.cancel));
  std::move(from.logs.begin(), from.logs.end(), std::back_inserter(into.logs));
}

}  // namespace

ServerEngine::ServerEngine(ContentResolver resolver,
                           wire::ServerSessionConfig config, uint64_t seed)
    : resolver_(std::move(resolver)), config_(config), rng_(seed) {}

EngineOut ServerEngine::on_datagram(BytesView datagram, uint64_t now_ms) {
  EngineOut out;
  wire::DecodeResult decoded = wire::decode_message(datagram);
  if (!decoded.ok()) {
    ++decode_errors_;
    out.logs.push_back(
        LogLine{wire::LogLevel::Debug,
                std::string("dropped datagram: ") +
                    wire::decode_status_name(decoded.status) +
                    (decoded.detail.empty() ? "" : " (" + decoded.detail + ")")});
    return out;
  }

  if (const auto* hello = std::get_if<wire::HelloMsg>(&decoded.message.value())) {
    std::shared_ptr<const Bytes> content = resolver_(hello->content_name);
    if (!content) {
      out.send.push_back(wire::encode_message(
          0, wire::HelloReplyMsg{crypto::BigInt(0), wire::HelloStatus::NotFound}));
      out.logs.push_back(LogLine{
          wire::LogLevel::Info,
          "hello for unknown content: " + hello->content_name});
      return out;
    }
    uint64_t sid = next_session_id_++;
    auto it = sessions_
                  .try_emplace(sid, sid, std::move(content), config_,
                               rng_.next())
                  .first;
    out.logs.push_back(LogLine{
        wire::LogLevel::Info, "session " + std::to_string(sid) +
                                  " opened for " + hello->content_name});
    append(out, run(it->second,
                    wire::MessageEvent{decoded.session_id,
                                       std::move(*decoded.message)},
                    now_ms));
    return out;
  }

  auto it = sessions_.find(decoded.session_id);
  if (it == sessions_.end()) {
    out.logs.push_back(LogLine{
        wire::LogLevel::Debug,
        "no session " + std::to_string(decoded.session_id)});
    return out;
  }
  return run(it->second,
             wire::MessageEvent{decoded.session_id, std::move(*decoded.message)},
             now_ms);
}

EngineOut ServerEngine::on_timer(const TimerKey& key, uint64_t now_ms) {
  auto it = sessions_.find(key.session_id);
  if (it == sessions_.end()) return {};
  return run(it->second, wire::TimerEvent{key.kind}, now_ms);
}

EngineOut ServerEngine::run(wire::ServerSession& session,
                            const wire::Event& event, uint64_t now_ms) {
  EngineOut out;
  fold_actions(session.handle(event, now_ms), session.session_id(), out);
  return out;
}

bool ServerEngine::all_terminal() const {
  for (const auto& [id, session] : sessions_) {
    if (!session.terminal()) return false;
  }
  return true;
}

std::vector<uint64_t> ServerEngine::prune_terminal() {
  std::vector<uint64_t> pruned;
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    if (it->second.terminal()) {
      pruned.push_back(it->first);
      it = sessions_.erase(it);
    } else {
      ++it;
    }
  }
  return pruned;
}

ClientEngine::ClientEngine(wire::ClientSessionConfig config, uint64_t seed)
    : session_(std::move(config), seed) {}

EngineOut ClientEngine::start(uint64_t now_ms) {
  return run(wire::StartEvent{}, now_ms);
}

EngineOut ClientEngine::on_datagram(BytesView datagram, uint64_t now_ms) {
  wire::DecodeResult decoded = wire::decode_message(datagram);
  if (!decoded.ok()) {
    ++decode_errors_;
    EngineOut out;
    out.logs.push_back(
        LogLine{wire::LogLevel::Debug,
                std::string("dropped datagram: ") +
                    wire::decode_status_name(decoded.status)});
    return out;
  }
  return run(
      wire::MessageEvent{decoded.session_id, std::move(*decoded.message)},
      now_ms);
}

EngineOut ClientEngine::on_timer(const TimerKey& key, uint64_t now_ms) {
  return run(wire::TimerEvent{key.kind}, now_ms);
}

EngineOut ClientEngine::run(const wire::Event& event, uint64_t now_ms) {
  EngineOut out;
  fold_actions(session_.handle(event, now_ms), 0, out);
  return out;
}

}  // namespace svsp::net
