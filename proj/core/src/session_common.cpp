#include "svsp/session_common.hpp"

namespace svsp::wire {

const char* timer_kind_name(TimerKind kind) {
  switch (kind) {
    case TimerKind::Token: return "token";
    case TimerKind::Gap: return "gap";
    case TimerKind::Idle: return "idle";
  }
  return "unknown";
}

}  // namespace svsp::wire
