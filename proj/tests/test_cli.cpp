// End-to-end tests of the installed CLI surface: each case shells out to
// the real binary (SVSP_CLI_BIN) and asserts on exit codes and stdout keys.

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "svsp/numtheory.hpp"

namespace fs = std::filesystem;
using svsp::crypto::BigInt;

namespace {

struct CmdResult {
  int code = -1;
  std::string output;  // stdout and stderr interleaved
};

// Runs `prefix BIN args` through /bin/sh; prefix carries env assignments.
CmdResult run_cli(const std::string& args, const std::string& prefix = "") {
  std::string command = prefix + (prefix.empty() ? "" : " ") + SVSP_CLI_BIN +
                        " " + args + " 2>&1";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CmdResult result;
  char buffer[4096];
  size_t n;
  while ((n = fread(buffer, 1, sizeof buffer, pipe)) > 0) {
    result.output.append(buffer, n);
  }
  int status = pclose(pipe);
  result.code = WIFEXITED(status) ? WEXITSTATUS(status) : 128;
  return result;
}

CmdResult run_shell(const std::string& script) {
  FILE* pipe = popen((script + " 2>&1").c_str(), "r");
  REQUIRE(pipe != nullptr);
  CmdResult result;
  char buffer[4096];
  size_t n;
  while ((n = fread(buffer, 1, sizeof buffer, pipe)) > 0) {
    result.output.append(buffer, n);
  }
  int status = pclose(pipe);
  result.code = WIFEXITED(status) ? WEXITSTATUS(status) : 128;
  return result;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  size_t start = 0;
  while (start < text.size()) {
    size_t nl = text.find('\n', start);
    if (nl == std::string::npos) nl = text.size();
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

// Value of the first `key=...` line; empty when absent.
std::string value_of(const std::string& output, const std::string& key) {
  for (const std::string& line : lines_of(output)) {
    if (line.rfind(key + "=", 0) == 0) return line.substr(key.size() + 1);
  }
  return "";
}

fs::path temp_dir() {
  fs::path dir = fs::temp_directory_path() /
                 ("svsp-cli-" + std::to_string(::getpid()) + "-" +
                  std::to_string(rand()));
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  REQUIRE(out.good());
  out << text;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("keygen: deterministic, valid, frozen small example") {
  auto a = run_cli("keygen --bits 64 --seed 5");
  auto b = run_cli("keygen --bits 64 --seed 5");
  CHECK(a.code == 0);
  CHECK(a.output == b.output);

  auto key_lines = lines_of(a.output);
  REQUIRE(key_lines.size() >= 5);
  BigInt p = BigInt::from_decimal(key_lines[0]);
  BigInt q = BigInt::from_decimal(key_lines[1]);
  BigInt n = BigInt::from_decimal(key_lines[2]);
  BigInt e = BigInt::from_decimal(key_lines[3]);
  BigInt d = BigInt::from_decimal(key_lines[4]);
  CHECK(n == p * q);
  BigInt phi = (p - BigInt(1)) * (q - BigInt(1));
  CHECK(e * d % phi == BigInt(1));
  CHECK(svsp::crypto::is_probable_prime(p));
  CHECK(svsp::crypto::is_probable_prime(q));

  // different seed, different key
  auto c = run_cli("keygen --bits 64 --seed 6");
  CHECK(c.output != a.output);

  // frozen vector
  auto tiny = run_cli("keygen --bits 16 --seed 1");
  CHECK(tiny.code == 0);
  auto tiny_lines = lines_of(tiny.output);
  REQUIRE(tiny_lines.size() >= 5);
  CHECK(tiny_lines[0] == "191");
  CHECK(tiny_lines[1] == "241");
  CHECK(tiny_lines[2] == "46031");
  CHECK(tiny_lines[3] == "7");
  CHECK(tiny_lines[4] == "19543");
}

TEST_CASE("keygen usage errors") {
  CHECK(run_cli("keygen --bits 4 --seed 1").code == 2);
  CHECK(run_cli("keygen --seed 1").code == 2);  // --bits is required
  CHECK(run_cli("keygen --bits nonsense").code == 2);
  CHECK(run_cli("nosuchcommand").code == 2);
  CHECK(run_cli("").code == 2);  // a subcommand is required
}

TEST_CASE("simulate: clean run, stable trace files") {
  fs::path dir = temp_dir();
  std::string t1 = (dir / "a.jsonl").string();
  std::string t2 = (dir / "b.jsonl").string();

  auto a = run_cli("simulate --seed 42 --size 4096 --trace " + t1);
  auto b = run_cli("simulate --seed 42 --size 4096 --trace " + t2);
  CHECK(a.code == 0);
  CHECK(b.code == 0);
  CHECK(value_of(a.output, "outcome") == "done");
  CHECK(value_of(a.output, "retransmissions") == "0");
  CHECK(value_of(a.output, "dropped") == "0");
  CHECK(value_of(a.output, "server_sessions") == "1");
  CHECK(value_of(a.output, "trace_digest") ==
        value_of(b.output, "trace_digest"));
  CHECK(value_of(a.output, "trace_digest").size() == 64);

  std::string trace = slurp(t1);
  CHECK(trace == slurp(t2));
  CHECK(!trace.empty());
  // every row is a JSON object with the documented keys
  for (const std::string& line : lines_of(trace)) {
    CHECK(line.find("{\"t\":") == 0);
    CHECK(line.find("\"dir\":") != std::string::npos);
    CHECK(line.find("\"fate\":") != std::string::npos);
    CHECK(line.find("\"len\":") != std::string::npos);
    CHECK(line.find("\"data\":") != std::string::npos);
  }

  // a different seed shifts the digest (fresh keys change the datagrams)
  auto c = run_cli("simulate --seed 43 --size 4096");
  CHECK(value_of(c.output, "trace_digest") !=
        value_of(a.output, "trace_digest"));

  fs::remove_all(dir);
}

TEST_CASE("simulate: lossy run still completes") {
  auto r = run_cli(
      "simulate --seed 7 --size 16384 --loss 0.1 --reorder 0.05 "
      "--delay 2:10");
  CHECK(r.code == 0);
  CHECK(value_of(r.output, "outcome") == "done");
  CHECK(value_of(r.output, "dropped") != "0");
}

TEST_CASE("simulate: attacker runs are contained and reported") {
  auto no_token = run_cli("simulate --seed 9 --size 262144 --attacker no-token");
  CHECK(no_token.code == 0);
  CHECK(value_of(no_token.output, "outcome") == "halted");
  CHECK(value_of(no_token.output, "halt_reason") == "token_timeout");
  CHECK(value_of(no_token.output, "tokens_accepted") == "0");
  // one window of the default 32 x 1024 geometry
  CHECK(value_of(no_token.output, "leaked_bytes") == "32768");

  auto replay = run_cli("simulate --seed 9 --size 262144 --attacker replay");
  CHECK(replay.code == 0);
  CHECK(value_of(replay.output, "capture_outcome") == "done");
  CHECK(value_of(replay.output, "outcome") == "halted");
  CHECK(value_of(replay.output, "halt_reason") == "token_invalid");
  CHECK(value_of(replay.output, "leaked_bytes") == "32768");
}

TEST_CASE("simulate usage errors") {
  CHECK(run_cli("simulate --delay 5").code == 2);       // MIN:MAX required
  CHECK(run_cli("simulate --loss 1.5").code == 2);      // out of [0,1]
  CHECK(run_cli("simulate --attacker wat").code == 2);  // unknown mode
}

TEST_CASE("config file, environment, and flags layer in that order") {
  fs::path dir = temp_dir();
  fs::path cfg = dir / "svsp.cfg";
  write_text(cfg, "# comment line\nseed=7\n");

  auto digest_for = [&](const std::string& cmd,
                        const std::string& prefix = "") {
    auto r = run_cli(cmd, prefix);
    CHECK(r.code == 0);
    return value_of(r.output, "trace_digest");
  };

  std::string d7 = digest_for("simulate --seed 7 --size 4096");
  std::string d9 = digest_for("simulate --seed 9 --size 4096");
  std::string d11 = digest_for("simulate --seed 11 --size 4096");
  REQUIRE(d7 != d9);
  REQUIRE(d9 != d11);

  // config alone supplies the seed
  CHECK(digest_for("--config " + cfg.string() + " simulate --size 4096") ==
        d7);
  // environment beats the config file
  CHECK(digest_for("--config " + cfg.string() + " simulate --size 4096",
                   "SVSP_SEED=9") == d9);
  // an explicit flag beats both
  CHECK(digest_for("--config " + cfg.string() +
                       " simulate --seed 11 --size 4096",
                   "SVSP_SEED=9") == d11);
  // the config path itself can come from the environment
  CHECK(digest_for("simulate --size 4096",
                   "SVSP_CONFIG=" + cfg.string()) == d7);

  // unknown keys in a config file are refused, not ignored
  fs::path bad = dir / "bad.cfg";
  write_text(bad, "not_a_key=1\n");
  CHECK(run_cli("--config " + bad.string() + " simulate --size 4096").code ==
        2);
  // so is a missing config file named explicitly
  CHECK(run_cli("--config " + (dir / "absent.cfg").string() +
                " simulate --size 4096").code == 2);

  fs::remove_all(dir);
}

TEST_CASE("serve usage errors") {
  CHECK(run_cli("serve --bind 127.0.0.1:0").code == 2);  // --root required
  auto r = run_cli("serve --root /nonexistent-svsp-dir --bind 127.0.0.1:0");
  CHECK(r.code == 2);
}

TEST_CASE("fetch usage errors") {
  CHECK(run_cli("fetch --server 127.0.0.1:1 --name x").code == 2);  // no --out
  CHECK(run_cli("fetch --name x --out /tmp/x").code == 2);  // no --server
}

TEST_CASE("serve, fetch, and attacks over live UDP") {
  fs::path dir = temp_dir();
  std::string d = dir.string();

  // one scripted session: start a low-timeout server, fetch a 64 KiB clip,
  // run both attack modes against it, then stop it with SIGINT
  std::string script =
      "bin='" + std::string(SVSP_CLI_BIN) + "'; d='" + d + "'; "
      "head -c 65536 /dev/urandom > \"$d/clip.bin\"; "
      "\"$bin\" serve --root \"$d\" --bind 127.0.0.1:0 --seed 4 "
      "--token-timeout-ms 250 > \"$d/serve.log\" 2>&1 & "
      "pid=$!; port=''; i=0; "
      "while [ $i -lt 100 ]; do "
      "  port=$(sed -n 's/.*listening on port \\([0-9]*\\).*/\\1/p' "
      "\"$d/serve.log\"); "
      "  [ -n \"$port\" ] && break; i=$((i+1)); sleep 0.05; "
      "done; "
      "echo port_found=$port; "
      "\"$bin\" fetch --server 127.0.0.1:$port --name clip.bin "
      "--out \"$d/out.bin\" --seed 3; echo fetch_rc=$?; "
      "cmp -s \"$d/clip.bin\" \"$d/out.bin\"; echo cmp_rc=$?; "
      "\"$bin\" fetch --server 127.0.0.1:$port --name absent.bin "
      "--out \"$d/none.bin\" --seed 3; echo missing_rc=$?; "
      "\"$bin\" attack --mode no-token --server 127.0.0.1:$port "
      "--name clip.bin --seed 8; echo no_token_rc=$?; "
      "\"$bin\" attack --mode replay --server 127.0.0.1:$port "
      "--name clip.bin --seed 8; echo replay_rc=$?; "
      "kill -INT $pid; wait $pid; echo serve_rc=$?";

  auto r = run_shell(script);
  INFO(r.output);
  CHECK(value_of(r.output, "port_found") != "");
  CHECK(value_of(r.output, "fetch_rc") == "0");
  CHECK(value_of(r.output, "cmp_rc") == "0");
  CHECK(value_of(r.output, "missing_rc") == "4");   // aborted: not found
  CHECK(value_of(r.output, "no_token_rc") == "0");  // contained
  CHECK(value_of(r.output, "replay_rc") == "0");    // contained
  CHECK(value_of(r.output, "serve_rc") == "0");     // clean SIGINT exit

  // the fetch's stdout report and the attack containment lines are present
  CHECK(value_of(r.output, "outcome") != "");
  CHECK(r.output.find("contained=true") != std::string::npos);
  CHECK(r.output.find("contained=false") == std::string::npos);

  fs::remove_all(dir);
}

TEST_SUITE_END();
