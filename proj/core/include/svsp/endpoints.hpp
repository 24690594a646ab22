#pragma once

#include <atomic>
#include <filesystem>
#include <functional>

#include "svsp/content_store.hpp"
#include "svsp/engine.hpp"
#include "svsp/udp.hpp"

namespace svsp::net {
struct SimResult;
}

namespace svsp::app {

enum class FetchOutcome : uint8_t { Done, Aborted, Halted };

const char* fetch_outcome_name(FetchOutcome outcome);

struct FetchReport {
  FetchOutcome outcome = FetchOutcome::Aborted;
  wire::HaltReason halt_reason = wire::HaltReason::Internal;  // when Halted
  std::string detail;                                         // when Aborted
  uint64_t bytes_received = 0;
  uint32_t chunks_received = 0;
  uint32_t chunks_retransmitted = 0;  // duplicate deliveries observed
  uint32_t nacks_sent = 0;
  uint32_t tokens_sent = 0;
  uint64_t duration_ms = 0;
  Sha256Digest content_sha256{};  // of the assembled bytes, when Done

  // Stable line-oriented key=value form for stdout.
  std::string to_key_values() const;
};

// Collapses a finished client session plus elapsed time into a report.
FetchReport make_report(const wire::ClientSession& session,
                        uint64_t duration_ms);

// Same report shape from a simulator run (duration is the virtual clock).
FetchReport make_report(const net::SimResult& result);

struct ServeConfig {
  std::string bind_addr = "127.0.0.1:4710";
  std::filesystem::path content_root;
  wire::ServerSessionConfig session;
  uint64_t seed = 0;
};

// Blocks until stop becomes true; throws UdpError/std::invalid_argument on
// startup problems.  on_ready (if set) fires once with the bound port.
// Per-session failures are logged, never fatal.
void serve(const ServeConfig& config, const std::atomic<bool>& stop,
           const std::function<void(uint16_t)>& on_ready = {});

struct FetchParams {
  std::string server_addr;
  wire::ClientSessionConfig session;  // content_name must be set
  uint64_t seed = 1;
  // Hard wall-clock cap; the report comes back Aborted if it trips.
  uint32_t deadline_ms = 120'000;
};

// One client session over real UDP.  content_out (if set) receives the
// assembled bytes on Done; tokens_out the tokens sent (replay capture).
FetchReport fetch(const FetchParams& params, Bytes* content_out = nullptr,
                  std::vector<token::AckToken>* tokens_out = nullptr);

// Handshakes honestly, never returns a token, counts what leaks.
FetchReport attack_no_token(const std::string& server_addr,
                            const std::string& content_name, uint64_t seed);

struct ReplayAttackResult {
  FetchReport capture_run;  // the attacker's own legitimate first session
  FetchReport replay_run;   // the second session fed captured tokens
};

// Runs a full legitimate session, then replays its tokens in a fresh one.
ReplayAttackResult attack_replay(const std::string& server_addr,
                                 const std::string& content_name,
                                 uint64_t seed);

}  // namespace svsp::app
