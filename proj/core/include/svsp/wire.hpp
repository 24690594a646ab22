#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "svsp/bigint.hpp"
#include "svsp/bytes.hpp"
#include "svsp/sha256.hpp"
#include "svsp/token.hpp"

namespace svsp::wire {

using crypto::BigInt;

// Header: magic 0x53 0x56, version, msg_type, session_id u64 BE.
inline constexpr size_t kHeaderSize = 12;
inline constexpr size_t kMaxDatagram = 1472;
// Chunk body overhead: seq u32 + payload length u16 + crc u32.
inline constexpr size_t kMaxChunkPayload = kMaxDatagram - kHeaderSize - 10;

inline constexpr uint8_t kMagic0 = 0x53;
inline constexpr uint8_t kMagic1 = 0x56;
inline constexpr uint8_t kVersion = 0x01;

enum class MsgType : uint8_t {
  Hello = 1,
  HelloReply = 2,
  Metafile = 3,
  Chunk = 4,
  AckToken = 5,
  Nack = 6,
  Halt = 7,
  Fin = 8,
};

enum class HaltReason : uint8_t {
  TokenTimeout = 0,
  TokenInvalid = 1,
  Replay = 2,
  Internal = 3,
};

enum class HelloStatus : uint8_t {
  Ok = 0,
  NotFound = 1,
};

const char* halt_reason_name(HaltReason reason);

struct HelloMsg {
  std::string content_name;  // UTF-8, <= 255 bytes
  BigInt dh_public;
  BigInt rsa_n;
  BigInt rsa_e;

  bool operator==(const HelloMsg&) const = default;
};

struct HelloReplyMsg {
  BigInt dh_public;
  HelloStatus status = HelloStatus::Ok;

  bool operator==(const HelloReplyMsg&) const = default;
};

// One fragment of the RSA-encrypted metafile: blocks [first_index,
// first_index + blocks.size()) out of total_blocks ciphertext blocks.
struct MetafileMsg {
  uint16_t total_blocks = 0;
  uint16_t first_index = 0;
  std::vector<Bytes> blocks;

  bool operator==(const MetafileMsg&) const = default;
};

struct ChunkMsg {
  uint32_t seq = 0;
  Bytes payload;  // <= kMaxChunkPayload
  uint32_t crc32 = 0;

  bool operator==(const ChunkMsg&) const = default;
};

struct AckTokenMsg {
  uint32_t window_index = 0;
  token::TokenValue value{};

  bool operator==(const AckTokenMsg&) const = default;
};

struct NackMsg {
  std::vector<uint32_t> missing_seqs;  // <= 256 entries

  bool operator==(const NackMsg&) const = default;
};

inline constexpr size_t kMaxNackSeqs = 256;

struct HaltMsg {
  HaltReason reason = HaltReason::Internal;

  bool operator==(const HaltMsg&) const = default;
};

struct FinMsg {
  Sha256Digest content_sha256{};

  bool operator==(const FinMsg&) const = default;
};

using Message = std::variant<HelloMsg, HelloReplyMsg, MetafileMsg, ChunkMsg,
                             AckTokenMsg, NackMsg, HaltMsg, FinMsg>;

MsgType message_type(const Message& msg);

class EncodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Header + body, integers big-endian, variable-length fields prefixed by a
// 16-bit length (content_name by 8-bit).  Throws EncodeError when a field
// exceeds its bound or the datagram would exceed kMaxDatagram.
Bytes encode_message(uint64_t session_id, const Message& msg);

enum class DecodeStatus : uint8_t {
  Ok,
  Truncated,
  BadMagic,
  BadVersion,
  BadType,
  BadValue,      // enum byte out of range, inconsistent counts
  BadLength,     // declared length exceeds a bound
  Trailing,      // well-formed message followed by extra bytes
  Oversized,     // input longer than kMaxDatagram
};

const char* decode_status_name(DecodeStatus status);

struct DecodeResult {
  DecodeStatus status = DecodeStatus::Ok;
  std::string detail;              // empty on Ok
  uint64_t session_id = 0;         // valid once the header parsed
  std::optional<Message> message;  // engaged iff status == Ok

  bool ok() const { return status == DecodeStatus::Ok; }
};

// Total on arbitrary input: never throws, never reads out of bounds.
DecodeResult decode_message(BytesView datagram);

}  // namespace svsp::wire
