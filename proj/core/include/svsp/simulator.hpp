#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "svsp/engine.hpp"

namespace svsp::net {

struct NetConditions {
  double loss_prob = 0.0;
  double reorder_prob = 0.0;
  double duplicate_prob = 0.0;
  uint32_t delay_min_ms = 0;
  uint32_t delay_max_ms = 0;
  uint64_t seed = 0;

  // Throws std::invalid_argument on probabilities outside [0,1] or an
  // inverted delay range.
  void validate() const;
};

enum class Direction : uint8_t { ClientToServer = 0, ServerToClient = 1 };
enum class Fate : uint8_t { Delivered = 0, Dropped = 1, Duplicated = 2 };

const char* direction_name(Direction d);
const char* fate_name(Fate f);

// One trace row per datagram copy: a dropped datagram appears exactly once
// (Dropped); a duplicated one appears as Delivered plus one Duplicated row.
// virtual_time_ms is the send instant; rows are totally ordered by
// (virtual_time_ms, insertion index) = trace position.
struct SimEvent {
  uint64_t virtual_time_ms = 0;
  Direction direction = Direction::ClientToServer;
  Bytes datagram;
  Fate fate = Fate::Delivered;

  bool operator==(const SimEvent&) const = default;
};

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SimServerSummary {
  uint64_t session_id = 0;
  wire::ServerPhase phase = wire::ServerPhase::AwaitHello;
  std::optional<wire::HaltReason> halt_reason;
  wire::ServerStats stats;
};

struct SimResult {
  std::vector<SimEvent> trace;
  uint64_t virtual_ms = 0;        // clock when the run went quiescent
  size_t events_processed = 0;

  wire::ClientPhase client_phase = wire::ClientPhase::Idle;
  std::optional<wire::AbortInfo> client_abort;
  wire::ClientStats client_stats;
  Bytes client_content;           // assembled bytes (complete when Done)
  std::vector<token::AckToken> client_tokens;  // replay capture

  std::vector<SimServerSummary> server_sessions;
  std::vector<std::string> logs;  // filled when collect_logs
};

struct SimParams {
  wire::ServerSessionConfig server;
  wire::ClientSessionConfig client;
  NetConditions net;
  std::map<std::string, std::shared_ptr<const Bytes>> content;
  uint64_t server_seed = 2;
  uint64_t client_seed = 1;
  size_t event_budget = 1'000'000;
  bool record_trace = true;
  bool collect_logs = false;
};

// Virtual-clock run of one client against one server engine; pure function
// of its parameters (identical params give byte-identical traces).  Throws
// BudgetExceeded when event_budget is hit before quiescence.
SimResult sim_run(const SimParams& params);

// SHA-256 over a canonical serialization of the trace; equal digests (plus
// equal lengths) make byte-identical traces cheap to assert.
std::string trace_digest(const std::vector<SimEvent>& trace);

}  // namespace svsp::net
