// svsp: one binary for every protocol role (keygen, serve, fetch, attack,
// simulate).  Machine-readable output goes to stdout as key=value lines or
// JSON lines; human diagnostics go to stderr.  Exit codes: 0 ok/contained,
// 2 usage or startup failure, 3 fetch halted by server, 4 fetch aborted.

#include <atomic>
#include <cctype>
#include <charconv>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "svsp/endpoints.hpp"
#include "svsp/log.hpp"
#include "svsp/rsa.hpp"
#include "svsp/simulator.hpp"

namespace app = svsp::app;
namespace net = svsp::net;
namespace wire = svsp::wire;
namespace crypto = svsp::crypto;

using svsp::Bytes;
using svsp::SplitMix64;

namespace {

// Option problems found after CLI11 parsing (missing required values,
// malformed config entries); reported like usage errors, exit 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Every key accepted from a --config file or an SVSP_* environment
// variable, across all subcommands.  Anything else is rejected up front.
const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "attacker", "bind",    "bits",   "chunk_size", "delay",
      "dup",      "leak_bound", "log", "loss",       "max_pokes",
      "mode",     "name",    "out",    "reorder",    "root",
      "seed",     "server",  "size",   "token_timeout_ms",
      "trace",    "window"};
  return keys;
}

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// Fallback option sources.  Precedence is total: a flag given on the
// command line wins, else the SVSP_<KEY> environment variable, else the
// --config file entry, else the built-in default.
struct Overlay {
  std::map<std::string, std::string> file;

  static Overlay load(const std::string& path) {
    Overlay overlay;
    if (path.empty()) return overlay;
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file: " + path);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::string text = trim(line);
      if (text.empty() || text[0] == '#') continue;
      size_t eq = text.find('=');
      if (eq == std::string::npos) {
        throw UsageError(path + ":" + std::to_string(lineno) +
                         ": expected key=value");
      }
      std::string key = trim(text.substr(0, eq));
      if (!known_keys().count(key)) {
        throw UsageError(path + ":" + std::to_string(lineno) +
                         ": unknown config key: " + key);
      }
      overlay.file[key] = trim(text.substr(eq + 1));
    }
    return overlay;
  }

  std::optional<std::string> lookup(const std::string& key) const {
    std::string env_name = "SVSP_";
    for (char c : key) {
      env_name += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    if (const char* v = std::getenv(env_name.c_str())) return std::string(v);
    auto it = file.find(key);
    if (it != file.end()) return it->second;
    return std::nullopt;
  }
};

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw UsageError("bad value for " + key + ": '" + text + "'");
  }
  return value;
}

void fill(const CLI::App& cmd, const std::string& flag, const std::string& key,
          const Overlay& overlay, std::string& slot) {
  if (cmd.count(flag) > 0) return;
  if (auto v = overlay.lookup(key)) slot = *v;
}

template <typename T>
void fill_num(const CLI::App& cmd, const std::string& flag,
              const std::string& key, const Overlay& overlay, T& slot) {
  if (cmd.count(flag) > 0) return;
  if (auto v = overlay.lookup(key)) slot = parse_number<T>(key, *v);
}

template <typename T>
T checked(const char* what, uint64_t value, uint64_t lo, uint64_t hi) {
  if (value < lo || value > hi) {
    throw UsageError(std::string(what) + " must be in [" + std::to_string(lo) +
                     ", " + std::to_string(hi) + "]");
  }
  return static_cast<T>(value);
}

void require(const std::string& value, const char* flag, const char* key) {
  if (!value.empty()) return;
  std::string env_name = "SVSP_";
  for (const char* c = key; *c; ++c) {
    env_name += static_cast<char>(std::toupper(static_cast<unsigned char>(*c)));
  }
  throw UsageError(std::string(flag) + " is required (or " + env_name +
                   " / config '" + key + "')");
}

// "MIN:MAX" in milliseconds.
std::pair<uint32_t, uint32_t> parse_delay(const std::string& text) {
  size_t colon = text.find(':');
  if (colon == std::string::npos) {
    throw UsageError("delay must be MIN:MAX, got '" + text + "'");
  }
  uint32_t lo = parse_number<uint32_t>("delay", text.substr(0, colon));
  uint32_t hi = parse_number<uint32_t>("delay", text.substr(colon + 1));
  return {lo, hi};
}

std::string prefix_lines(const std::string& text, const std::string& prefix) {
  std::string out;
  size_t start = 0;
  while (start < text.size()) {
    size_t nl = text.find('\n', start);
    if (nl == std::string::npos) nl = text.size();
    out += prefix + text.substr(start, nl - start) + "\n";
    start = nl + 1;
  }
  return out;
}

int fetch_exit_code(const app::FetchReport& report) {
  switch (report.outcome) {
    case app::FetchOutcome::Done: return 0;
    case app::FetchOutcome::Halted: return 3;
    case app::FetchOutcome::Aborted: return 4;
  }
  return 4;
}

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop.store(true); }

// ---------------------------------------------------------------- keygen --

struct KeygenOpts {
  uint64_t bits = 0;
  uint64_t seed = 1;
};

int run_keygen(const CLI::App& cmd, const Overlay& overlay, KeygenOpts& opt) {
  fill_num(cmd, "--bits", "bits", overlay, opt.bits);
  fill_num(cmd, "--seed", "seed", overlay, opt.seed);
  if (opt.bits == 0) throw UsageError("--bits is required");
  unsigned bits = checked<unsigned>("--bits", opt.bits, 1, 4096);
  crypto::RsaKeyPair pair = crypto::rsa_keygen(bits, opt.seed);
  std::cout << pair.p.to_decimal() << "\n"
            << pair.q.to_decimal() << "\n"
            << pair.n.to_decimal() << "\n"
            << pair.e.to_decimal() << "\n"
            << pair.d.to_decimal() << "\n";
  return 0;
}

// ----------------------------------------------------------------- serve --

struct ServeOpts {
  std::string root;
  std::string bind = "127.0.0.1:4710";
  uint64_t window = 32;
  uint64_t chunk_size = 1024;
  uint64_t token_timeout_ms = 2000;
  uint64_t max_pokes = 3;
  uint64_t seed = 0;
};

int run_serve(const CLI::App& cmd, const Overlay& overlay, ServeOpts& opt) {
  fill(cmd, "--root", "root", overlay, opt.root);
  fill(cmd, "--bind", "bind", overlay, opt.bind);
  fill_num(cmd, "--window", "window", overlay, opt.window);
  fill_num(cmd, "--chunk-size", "chunk_size", overlay, opt.chunk_size);
  fill_num(cmd, "--token-timeout-ms", "token_timeout_ms", overlay,
           opt.token_timeout_ms);
  fill_num(cmd, "--max-pokes", "max_pokes", overlay, opt.max_pokes);
  bool seeded = cmd.count("--seed") > 0 || overlay.lookup("seed").has_value();
  fill_num(cmd, "--seed", "seed", overlay, opt.seed);
  require(opt.root, "--root", "root");

  app::ServeConfig config;
  config.bind_addr = opt.bind;
  config.content_root = opt.root;
  config.session.window_size = checked<uint16_t>("--window", opt.window, 1, 0xFFFF);
  config.session.chunk_size =
      checked<uint16_t>("--chunk-size", opt.chunk_size, 1, wire::kMaxChunkPayload);
  config.session.token_timeout_ms =
      checked<uint32_t>("--token-timeout-ms", opt.token_timeout_ms, 1, 0xFFFFFFFF);
  config.session.max_pokes =
      checked<uint32_t>("--max-pokes", opt.max_pokes, 0, 0xFFFFFFFF);
  // Unseeded servers must not replay DH keys across restarts.
  config.seed = seeded ? opt.seed : std::random_device{}();

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  app::serve(config, g_stop, [](uint16_t port) {
    app::log_line(wire::LogLevel::Info,
                  "listening on port " + std::to_string(port));
  });
  return 0;
}

// ----------------------------------------------------------------- fetch --

struct FetchOpts {
  std::string server;
  std::string name;
  std::string out;
  uint64_t seed = 1;
};

int run_fetch(const CLI::App& cmd, const Overlay& overlay, FetchOpts& opt) {
  fill(cmd, "--server", "server", overlay, opt.server);
  fill(cmd, "--name", "name", overlay, opt.name);
  fill(cmd, "--out", "out", overlay, opt.out);
  fill_num(cmd, "--seed", "seed", overlay, opt.seed);
  require(opt.server, "--server", "server");
  require(opt.name, "--name", "name");
  require(opt.out, "--out", "out");

  app::FetchParams params;
  params.server_addr = opt.server;
  params.session.content_name = opt.name;
  params.seed = opt.seed;

  Bytes content;
  app::FetchReport report = app::fetch(params, &content);
  if (report.outcome == app::FetchOutcome::Done) {
    std::ofstream out(opt.out, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(content.data()),
              static_cast<std::streamsize>(content.size()));
    if (!out) throw UsageError("cannot write output file: " + opt.out);
  }
  std::cout << report.to_key_values();
  return fetch_exit_code(report);
}

// ---------------------------------------------------------------- attack --

struct AttackOpts {
  std::string mode;
  std::string server;
  std::string name;
  uint64_t seed = 7;
  uint64_t leak_bound = 32768;  // default window 32 x chunk 1024
};

int run_attack(const CLI::App& cmd, const Overlay& overlay, AttackOpts& opt) {
  fill(cmd, "--mode", "mode", overlay, opt.mode);
  fill(cmd, "--server", "server", overlay, opt.server);
  fill(cmd, "--name", "name", overlay, opt.name);
  fill_num(cmd, "--seed", "seed", overlay, opt.seed);
  fill_num(cmd, "--leak-bound", "leak_bound", overlay, opt.leak_bound);
  require(opt.mode, "--mode", "mode");
  require(opt.server, "--server", "server");
  require(opt.name, "--name", "name");

  bool contained = false;
  if (opt.mode == "no-token") {
    app::FetchReport report =
        app::attack_no_token(opt.server, opt.name, opt.seed);
    contained = report.outcome == app::FetchOutcome::Halted &&
                report.halt_reason == wire::HaltReason::TokenTimeout &&
                report.bytes_received <= opt.leak_bound;
    std::cout << report.to_key_values();
    std::cout << "leaked_bytes=" << report.bytes_received << "\n";
  } else if (opt.mode == "replay") {
    app::ReplayAttackResult result =
        app::attack_replay(opt.server, opt.name, opt.seed);
    // A replay only demonstrates anything when the capture session was a
    // legitimate completed fetch.
    contained = result.capture_run.outcome == app::FetchOutcome::Done &&
                result.replay_run.outcome == app::FetchOutcome::Halted &&
                result.replay_run.halt_reason == wire::HaltReason::TokenInvalid &&
                result.replay_run.bytes_received <= opt.leak_bound;
    std::cout << prefix_lines(result.capture_run.to_key_values(), "capture_");
    std::cout << prefix_lines(result.replay_run.to_key_values(), "replay_");
    std::cout << "leaked_bytes=" << result.replay_run.bytes_received << "\n";
  } else {
    throw UsageError("--mode must be no-token or replay");
  }
  std::cout << "contained=" << (contained ? "true" : "false") << "\n";
  return contained ? 0 : 1;
}

// -------------------------------------------------------------- simulate --

struct SimOpts {
  uint64_t seed = 1;
  double loss = 0.0;
  double reorder = 0.0;
  double dup = 0.0;
  std::string delay = "0:0";
  uint64_t size = 1 << 20;
  std::string attacker = "none";
  std::string trace;
};

void write_trace(const std::string& path, const std::vector<net::SimEvent>& trace) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot write trace file: " + path);
  for (const net::SimEvent& ev : trace) {
    nlohmann::ordered_json row;
    row["t"] = ev.virtual_time_ms;
    row["dir"] = ev.direction == net::Direction::ClientToServer ? "c2s" : "s2c";
    row["fate"] = net::fate_name(ev.fate);
    row["len"] = ev.datagram.size();
    row["data"] = svsp::to_hex(ev.datagram);
    out << row.dump() << "\n";
  }
  if (!out) throw UsageError("cannot write trace file: " + path);
}

void print_sim_summary(const net::SimResult& result, bool attacker_run) {
  uint64_t delivered = 0, dropped = 0, duplicated = 0;
  for (const net::SimEvent& ev : result.trace) {
    switch (ev.fate) {
      case net::Fate::Delivered: ++delivered; break;
      case net::Fate::Dropped: ++dropped; break;
      case net::Fate::Duplicated: ++duplicated; break;
    }
  }
  uint64_t retransmits = 0, pokes = 0;
  uint32_t tokens_accepted = 0;
  for (const net::SimServerSummary& s : result.server_sessions) {
    retransmits += s.stats.retransmits;
    pokes += s.stats.pokes;
    tokens_accepted += s.stats.tokens_accepted;
  }
  std::cout << "events=" << result.events_processed << "\n"
            << "datagrams=" << result.trace.size() << "\n"
            << "delivered=" << delivered << "\n"
            << "dropped=" << dropped << "\n"
            << "duplicated=" << duplicated << "\n"
            << "virtual_ms=" << result.virtual_ms << "\n"
            << "server_sessions=" << result.server_sessions.size() << "\n"
            << "retransmissions=" << retransmits << "\n"
            << "pokes=" << pokes << "\n"
            << "tokens_accepted=" << tokens_accepted << "\n"
            << "trace_digest=" << net::trace_digest(result.trace) << "\n";
  if (attacker_run) {
    std::cout << "leaked_bytes=" << result.client_stats.bytes_received << "\n";
  }
  std::cout << app::make_report(result).to_key_values();
}

int run_simulate(const CLI::App& cmd, const Overlay& overlay, SimOpts& opt) {
  fill_num(cmd, "--seed", "seed", overlay, opt.seed);
  fill_num(cmd, "--loss", "loss", overlay, opt.loss);
  fill_num(cmd, "--reorder", "reorder", overlay, opt.reorder);
  fill_num(cmd, "--dup", "dup", overlay, opt.dup);
  fill(cmd, "--delay", "delay", overlay, opt.delay);
  fill_num(cmd, "--size", "size", overlay, opt.size);
  fill(cmd, "--attacker", "attacker", overlay, opt.attacker);
  fill(cmd, "--trace", "trace", overlay, opt.trace);

  net::SimParams params;
  params.net.loss_prob = opt.loss;
  params.net.reorder_prob = opt.reorder;
  params.net.duplicate_prob = opt.dup;
  std::tie(params.net.delay_min_ms, params.net.delay_max_ms) =
      parse_delay(opt.delay);
  params.net.seed = opt.seed;
  params.net.validate();

  // Content depends only on --size so traces differ across seeds for the
  // network reasons under study, not the payload.
  auto blob = std::make_shared<Bytes>(opt.size);
  SplitMix64 content_rng(0x1337F00Dull);
  content_rng.fill(blob->data(), blob->size());
  params.content["sim"] = std::move(blob);
  params.client.content_name = "sim";
  params.client_seed = opt.seed + 1;
  params.server_seed = opt.seed + 2;

  bool attacker_run = opt.attacker != "none";
  if (opt.attacker == "no-token") {
    params.client.behavior = wire::ClientBehavior::NoToken;
  } else if (opt.attacker == "replay") {
    params.client.behavior = wire::ClientBehavior::ReplayOld;
  } else if (attacker_run) {
    throw UsageError("--attacker must be no-token or replay");
  }
  if (attacker_run) {
    // Long enough to watch the server's whole poke schedule end in Halt.
    params.client.idle_timeout_ms =
        (params.server.max_pokes + 2) * params.server.token_timeout_ms;
  }

  if (opt.attacker == "replay") {
    // Capture a legitimate session first; its tokens arm the replay run.
    net::SimParams capture = params;
    capture.client.behavior = wire::ClientBehavior::Conforming;
    capture.client.idle_timeout_ms = wire::ClientSessionConfig{}.idle_timeout_ms;
    capture.record_trace = false;
    net::SimResult captured = net::sim_run(capture);
    std::cout << "capture_outcome="
              << app::fetch_outcome_name(
                     app::make_report(captured).outcome) << "\n";
    for (const auto& tok : captured.client_tokens) {
      params.client.replay_tokens.push_back(tok.value);
    }
    params.net.seed = opt.seed + 1;
    params.client_seed = opt.seed + 3;
    params.server_seed = opt.seed + 4;
  }

  net::SimResult result = net::sim_run(params);
  if (!opt.trace.empty()) write_trace(opt.trace, result.trace);
  print_sim_summary(result, attacker_run);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"svsp: token-gated video streaming over datagrams"};
  cli.require_subcommand(1);

  std::string config_path;
  std::string log_level;
  cli.add_option("--config", config_path, "key=value overrides file");
  cli.add_option("--log", log_level, "stderr log level: debug|info|warn");

  KeygenOpts keygen_opts;
  CLI::App* keygen = cli.add_subcommand(
      "keygen", "print a deterministic RSA keypair: p q n e d, decimal");
  keygen->add_option("--bits", keygen_opts.bits, "modulus size in bits");
  keygen->add_option("--seed", keygen_opts.seed, "generator seed");

  ServeOpts serve_opts;
  CLI::App* serve = cli.add_subcommand("serve", "stream content over UDP");
  serve->add_option("--root", serve_opts.root, "content directory");
  serve->add_option("--bind", serve_opts.bind, "host:port to bind");
  serve->add_option("--window", serve_opts.window, "chunks per token window");
  serve->add_option("--chunk-size", serve_opts.chunk_size, "chunk payload bytes");
  serve->add_option("--token-timeout-ms", serve_opts.token_timeout_ms,
                    "token wait before a poke");
  serve->add_option("--max-pokes", serve_opts.max_pokes,
                    "pokes before halting a silent client");
  serve->add_option("--seed", serve_opts.seed, "deterministic server seed");

  FetchOpts fetch_opts;
  CLI::App* fetch = cli.add_subcommand("fetch", "download one content name");
  fetch->add_option("--server", fetch_opts.server, "server host:port");
  fetch->add_option("--name", fetch_opts.name, "content name");
  fetch->add_option("--out", fetch_opts.out, "output file path");
  fetch->add_option("--seed", fetch_opts.seed, "deterministic client seed");

  AttackOpts attack_opts;
  CLI::App* attack = cli.add_subcommand(
      "attack", "run a protocol-fluent attacker, report containment");
  attack->add_option("--mode", attack_opts.mode, "no-token or replay");
  attack->add_option("--server", attack_opts.server, "server host:port");
  attack->add_option("--name", attack_opts.name, "content name");
  attack->add_option("--seed", attack_opts.seed, "deterministic attacker seed");
  attack->add_option("--leak-bound", attack_opts.leak_bound,
                     "max tolerated leaked bytes (window x chunk)");

  SimOpts sim_opts;
  CLI::App* simulate = cli.add_subcommand(
      "simulate", "in-process run over the deterministic simulator");
  simulate->add_option("--seed", sim_opts.seed, "network fate seed");
  simulate->add_option("--loss", sim_opts.loss, "datagram loss probability");
  simulate->add_option("--reorder", sim_opts.reorder, "reorder probability");
  simulate->add_option("--dup", sim_opts.dup, "duplication probability");
  simulate->add_option("--delay", sim_opts.delay, "one-way delay MIN:MAX ms");
  simulate->add_option("--size", sim_opts.size, "content size in bytes");
  simulate->add_option("--attacker", sim_opts.attacker,
                       "none, no-token, or replay");
  simulate->add_option("--trace", sim_opts.trace,
                       "dump SimEvents as JSON lines to this file");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = cli.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cli.count("--config") == 0) {
      if (const char* v = std::getenv("SVSP_CONFIG")) config_path = v;
    }
    Overlay overlay = Overlay::load(config_path);

    if (cli.count("--log") == 0) {
      log_level = overlay.lookup("log").value_or("info");
    }
    auto level = app::parse_log_level(log_level);
    if (!level) throw UsageError("unknown log level: " + log_level);
    app::set_log_level(*level);

    if (*keygen) return run_keygen(*keygen, overlay, keygen_opts);
    if (*serve) return run_serve(*serve, overlay, serve_opts);
    if (*fetch) return run_fetch(*fetch, overlay, fetch_opts);
    if (*attack) return run_attack(*attack, overlay, attack_opts);
    if (*simulate) return run_simulate(*simulate, overlay, sim_opts);
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "svsp: " << e.what() << "\n";
    return 2;
  } catch (const net::BudgetExceeded& e) {
    std::cerr << "svsp: simulation budget exceeded: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "svsp: " << e.what() << "\n";
    return 2;
  }
}
