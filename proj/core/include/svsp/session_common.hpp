#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "svsp/wire.hpp"

namespace svsp::wire {

// One logical timer per kind and session; arming an armed kind re-arms it.
enum class TimerKind : uint8_t {
  Token,  // server: poke/halt deadline while awaiting a token
  Gap,    // client: intra-window Nack cadence
  Idle,   // client: watchdog / Hello retry pacing
};

const char* timer_kind_name(TimerKind kind);

struct StartEvent {};

struct MessageEvent {
  uint64_t session_id = 0;  // from the datagram header
  Message msg;
};

struct TimerEvent {
  TimerKind kind = TimerKind::Token;
};

using Event = std::variant<StartEvent, MessageEvent, TimerEvent>;

struct SendAction {
  uint64_t session_id = 0;
  Message msg;
};

struct ArmTimerAction {
  TimerKind kind = TimerKind::Token;
  uint32_t delay_ms = 0;
};

struct CancelTimerAction {
  TimerKind kind = TimerKind::Token;
};

enum class LogLevel : uint8_t { Debug, Info, Warn };

struct LogAction {
  LogLevel level = LogLevel::Debug;
  std::string text;
};

using Action = std::variant<SendAction, ArmTimerAction, CancelTimerAction,
                            LogAction>;
using Actions = std::vector<Action>;

}  // namespace svsp::wire
