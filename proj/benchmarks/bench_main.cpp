// Microbenchmarks for the hot paths: hashing, checksum, bignum arithmetic,
// the RSA/token primitives, the datagram codec, and whole simulator runs.

#include <benchmark/benchmark.h>

#include <memory>

#include "svsp/crc32.hpp"
#include "svsp/dh.hpp"
#include "svsp/numtheory.hpp"
#include "svsp/rng.hpp"
#include "svsp/rsa.hpp"
#include "svsp/sha256.hpp"
#include "svsp/simulator.hpp"
#include "svsp/token.hpp"
#include "svsp/wire.hpp"

namespace {

using svsp::Bytes;
using svsp::SplitMix64;
using svsp::crypto::BigInt;

Bytes random_bytes(size_t size, uint64_t seed) {
  Bytes data(size);
  SplitMix64 rng(seed);
  rng.fill(data);
  return data;
}

void BM_Sha256(benchmark::State& state) {
  Bytes data = random_bytes(size_t(state.range(0)), 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(svsp::Sha256::of(svsp::as_view(data)));
  }
  state.SetBytesProcessed(int64_t(state.iterations()) * state.range(0));
}
BENCHMARK(BM_Sha256)->Arg(64)->Arg(1024)->Arg(64 << 10);

void BM_Crc32(benchmark::State& state) {
  Bytes data = random_bytes(size_t(state.range(0)), 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(svsp::crc32(svsp::as_view(data)));
  }
  state.SetBytesProcessed(int64_t(state.iterations()) * state.range(0));
}
BENCHMARK(BM_Crc32)->Arg(64)->Arg(1450)->Arg(64 << 10);

void BM_BigIntMul(benchmark::State& state) {
  SplitMix64 rng(3);
  BigInt a = svsp::crypto::random_bits(rng, size_t(state.range(0)));
  BigInt b = svsp::crypto::random_bits(rng, size_t(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(a * b);
  }
}
BENCHMARK(BM_BigIntMul)->Arg(256)->Arg(1024)->Arg(4096);

void BM_ModPow(benchmark::State& state) {
  SplitMix64 rng(4);
  size_t bits = size_t(state.range(0));
  BigInt mod = svsp::crypto::random_bits(rng, bits);
  if (!mod.is_odd()) mod += BigInt(1);
  BigInt base = svsp::crypto::random_bits(rng, bits - 1);
  BigInt exp = svsp::crypto::random_bits(rng, bits);
  for (auto _ : state) {
    benchmark::DoNotOptimize(svsp::crypto::mod_pow(base, exp, mod));
  }
}
BENCHMARK(BM_ModPow)->Arg(256)->Arg(512)->Unit(benchmark::kMicrosecond);

void BM_RsaKeygen(benchmark::State& state) {
  uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        svsp::crypto::rsa_keygen(unsigned(state.range(0)), ++seed));
  }
}
BENCHMARK(BM_RsaKeygen)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_RsaEncryptBlock(benchmark::State& state) {
  auto pair = svsp::crypto::rsa_keygen(512, 7);
  SplitMix64 rng(8);
  BigInt m = svsp::crypto::random_range(rng, BigInt(2), pair.n - BigInt(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(svsp::crypto::rsa_encrypt_block(m, pair.public_key()));
  }
}
BENCHMARK(BM_RsaEncryptBlock)->Unit(benchmark::kMicrosecond);

void BM_RsaDecryptBlock(benchmark::State& state) {
  auto pair = svsp::crypto::rsa_keygen(512, 7);
  SplitMix64 rng(8);
  BigInt m = svsp::crypto::random_range(rng, BigInt(2), pair.n - BigInt(1));
  BigInt c = svsp::crypto::rsa_encrypt_block(m, pair.public_key());
  for (auto _ : state) {
    benchmark::DoNotOptimize(svsp::crypto::rsa_decrypt_block(c, pair));
  }
}
BENCHMARK(BM_RsaDecryptBlock)->Unit(benchmark::kMicrosecond);

void BM_DeriveToken(benchmark::State& state) {
  auto secret = svsp::Sha256::of(svsp::as_view(Bytes{'b', 'e', 'n', 'c', 'h'}));
  svsp::token::TokenNonce nonce{};
  uint32_t window = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(svsp::token::derive_token(secret, nonce, ++window));
  }
}
BENCHMARK(BM_DeriveToken);

void BM_EncodeChunk(benchmark::State& state) {
  svsp::wire::ChunkMsg chunk;
  chunk.seq = 42;
  chunk.payload = random_bytes(size_t(state.range(0)), 9);
  chunk.crc32 = svsp::crc32(svsp::as_view(chunk.payload));
  svsp::wire::Message msg = chunk;
  for (auto _ : state) {
    benchmark::DoNotOptimize(svsp::wire::encode_message(1, msg));
  }
  state.SetBytesProcessed(int64_t(state.iterations()) * state.range(0));
}
BENCHMARK(BM_EncodeChunk)->Arg(1024)->Arg(1450);

void BM_DecodeChunk(benchmark::State& state) {
  svsp::wire::ChunkMsg chunk;
  chunk.seq = 42;
  chunk.payload = random_bytes(size_t(state.range(0)), 10);
  chunk.crc32 = svsp::crc32(svsp::as_view(chunk.payload));
  Bytes datagram = svsp::wire::encode_message(1, chunk);
  for (auto _ : state) {
    benchmark::DoNotOptimize(svsp::wire::decode_message(svsp::as_view(datagram)));
  }
  state.SetBytesProcessed(int64_t(state.iterations()) * state.range(0));
}
BENCHMARK(BM_DecodeChunk)->Arg(1024)->Arg(1450);

// Whole-system rate: one conforming 64 KiB transfer per iteration; the
// counter reports simulator events per second.
void BM_SimulatorRun(benchmark::State& state) {
  auto blob = std::make_shared<const Bytes>(random_bytes(64 << 10, 11));
  int64_t events = 0;
  for (auto _ : state) {
    svsp::net::SimParams params;
    params.content["clip"] = blob;
    params.client.content_name = "clip";
    params.client.rsa_bits = 64;  // keep the handshake out of the numbers
    params.net.seed = 12;
    params.record_trace = false;
    auto result = svsp::net::sim_run(params);
    benchmark::DoNotOptimize(result.virtual_ms);
    events += int64_t(result.events_processed);
  }
  state.counters["events/s"] =
      benchmark::Counter(double(events), benchmark::Counter::kIsRate);
  state.SetBytesProcessed(int64_t(state.iterations()) * (64 << 10));
}
BENCHMARK(BM_SimulatorRun)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
