#include "svsp/wire.hpp"

#include <algorithm>

namespace svsp::wire {

namespace {

void put_prefixed_int(Bytes& out, const BigInt& value, const char* field) {
  if (value.is_negative()) {
    throw EncodeError(std::string(field) + ": negative integer");
  }
  size_t width = (value.bit_length() + 7) / 8;  // minimal, zero -> empty
  if (width > 0xFFFF) {
    throw EncodeError(std::string(field) + ": integer exceeds field bound");
  }
  put_u16(out, static_cast<uint16_t>(width));
  if (width > 0) {
    Bytes raw = value.to_bytes_be(width);
    out.insert(out.end(), raw.begin(), raw.end());
  }
}

void put_prefixed_bytes(Bytes& out, BytesView data, const char* field) {
  if (data.size() > 0xFFFF) {
    throw EncodeError(std::string(field) + ": byte string exceeds 16-bit "
                      "length prefix");
  }
  put_u16(out, static_cast<uint16_t>(data.size()));
  out.insert(out.end(), data.begin(), data.end());
}

struct Cursor {
  BytesView buf;
  size_t pos = 0;

  size_t remaining() const { return buf.size() - pos; }

  bool u8(uint8_t& v) {
    if (remaining() < 1) return false;
    v = buf[pos++];
    return true;
  }

  bool u16(uint16_t& v) {
    if (remaining() < 2) return false;
    v = static_cast<uint16_t>(buf[pos] << 8 | buf[pos + 1]);
    pos += 2;
    return true;
  }

  bool u32(uint32_t& v) {
    if (remaining() < 4) return false;
    v = 0;
    for (int i = 0; i < 4; ++i) v = v << 8 | buf[pos++];
    return true;
  }

  bool u64(uint64_t& v) {
    if (remaining() < 8) return false;
    v = 0;
    for (int i = 0; i < 8; ++i) v = v << 8 | buf[pos++];
    return true;
  }

  bool take(size_t n, BytesView& out) {
    if (remaining() < n) return false;
    out = buf.subspan(pos, n);
    pos += n;
    return true;
  }
};

DecodeResult fail(DecodeStatus status, std::string detail,
                  uint64_t session_id = 0) {
  DecodeResult r;
  r.status = status;
  r.detail = std::move(detail);
  r.session_id = session_id;
  return r;
}

bool read_prefixed_int(Cursor& c, BigInt& out) {
  uint16_t len = 0;
  BytesView raw;
  if (!c.u16(len) || !c.take(len, raw)) return false;
  out = BigInt::from_bytes_be(raw);
  return true;
}

}  // namespace

const char* halt_reason_name(HaltReason reason) {
  switch (reason) {
    case HaltReason::TokenTimeout: return "token_timeout";
    case HaltReason::TokenInvalid: return "token_invalid";
    case HaltReason::Replay: return "replay";
    case HaltReason::Internal: return "internal";
  }
  return "unknown";
}

const char* decode_status_name(DecodeStatus status) {
  switch (status) {
    case DecodeStatus::Ok: return "ok";
    case DecodeStatus::Truncated: return "truncated";
    case DecodeStatus::BadMagic: return "bad_magic";
    case DecodeStatus::BadVersion: return "bad_version";
    case DecodeStatus::BadType: return "bad_type";
    case DecodeStatus::BadValue: return "bad_value";
    case DecodeStatus::BadLength: return "bad_length";
    case DecodeStatus::Trailing: return "trailing_bytes";
    case DecodeStatus::Oversized: return "oversized";
  }
  return "unknown";
}

MsgType message_type(const Message& msg) {
  return std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, HelloMsg>) return MsgType::Hello;
        else if constexpr (std::is_same_v<T, HelloReplyMsg>) return MsgType::HelloReply;
        else if constexpr (std::is_same_v<T, MetafileMsg>) return MsgType::Metafile;
        else if constexpr (std::is_same_v<T, ChunkMsg>) return MsgType::Chunk;
        else if constexpr (std::is_same_v<T, AckTokenMsg>) return MsgType::AckToken;
        else if constexpr (std::is_same_v<T, NackMsg>) return MsgType::Nack;
        else if constexpr (std::is_same_v<T, HaltMsg>) return MsgType::Halt;
        else return MsgType::Fin;
      },
      msg);
}

Bytes encode_message(uint64_t session_id, const Message& msg) {
  Bytes out;
  out.reserve(kHeaderSize + 64);
  out.push_back(kMagic0);
  out.push_back(kMagic1);
  out.push_back(kVersion);
  out.push_back(static_cast<uint8_t>(message_type(msg)));
  put_u64(out, session_id);

  std::visit(
      [&out](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, HelloMsg>) {
          if (m.content_name.size() > 0xFF) {
            throw EncodeError("content_name exceeds 255 bytes");
          }
          out.push_back(static_cast<uint8_t>(m.content_name.size()));
          out.insert(out.end(), m.content_name.begin(), m.content_name.end());
          put_prefixed_int(out, m.dh_public, "dh_public");
          put_prefixed_int(out, m.rsa_n, "rsa_n");
          put_prefixed_int(out, m.rsa_e, "rsa_e");
        } else if constexpr (std::is_same_v<T, HelloReplyMsg>) {
          put_prefixed_int(out, m.dh_public, "dh_public");
          out.push_back(static_cast<uint8_t>(m.status));
        } else if constexpr (std::is_same_v<T, MetafileMsg>) {
          if (m.blocks.size() > 0xFFFF) {
            throw EncodeError("metafile block count exceeds 16-bit field");
          }
          size_t end = m.first_index + m.blocks.size();
          if (end > m.total_blocks) {
            throw EncodeError("metafile block range exceeds total_blocks");
          }
          put_u16(out, m.total_blocks);
          put_u16(out, m.first_index);
          put_u16(out, static_cast<uint16_t>(m.blocks.size()));
          for (const Bytes& block : m.blocks) {
            put_prefixed_bytes(out, block, "metafile block");
          }
        } else if constexpr (std::is_same_v<T, ChunkMsg>) {
          if (m.payload.size() > kMaxChunkPayload) {
            throw EncodeError("chunk payload exceeds datagram budget");
          }
          put_u32(out, m.seq);
          put_prefixed_bytes(out, m.payload, "chunk payload");
          put_u32(out, m.crc32);
        } else if constexpr (std::is_same_v<T, AckTokenMsg>) {
          put_u32(out, m.window_index);
          out.insert(out.end(), m.value.begin(), m.value.end());
        } else if constexpr (std::is_same_v<T, NackMsg>) {
          if (m.missing_seqs.size() > kMaxNackSeqs) {
            throw EncodeError("nack lists more than 256 seqs");
          }
          put_u16(out, static_cast<uint16_t>(m.missing_seqs.size()));
          for (uint32_t seq : m.missing_seqs) put_u32(out, seq);
        } else if constexpr (std::is_same_v<T, HaltMsg>) {
          out.push_back(static_cast<uint8_t>(m.reason));
        } else {  // FinMsg
          out.insert(out.end(), m.content_sha256.begin(),
                     m.content_sha256.end());
        }
      },
      msg);

  if (out.size() > kMaxDatagram) {
    throw EncodeError("encoded datagram exceeds " +
                      std::to_string(kMaxDatagram) + " bytes");
  }
  return out;
}

DecodeResult decode_message(BytesView datagram) {
  if (datagram.size() > kMaxDatagram) {
    return fail(DecodeStatus::Oversized, "datagram exceeds 1472 bytes");
  }
  Cursor c{datagram};
  if (datagram.size() < kHeaderSize) {
    return fail(DecodeStatus::Truncated, "header needs 12 bytes");
  }
  uint8_t m0 = 0, m1 = 0, version = 0, type_byte = 0;
  c.u8(m0);
  c.u8(m1);
  c.u8(version);
  c.u8(type_byte);
  if (m0 != kMagic0 || m1 != kMagic1) {
    return fail(DecodeStatus::BadMagic, "magic is not 53 56");
  }
  if (version != kVersion) {
    return fail(DecodeStatus::BadVersion,
                "version " + std::to_string(version));
  }
  if (type_byte < 1 || type_byte > 8) {
    return fail(DecodeStatus::BadType, "msg_type " + std::to_string(type_byte));
  }
  uint64_t session_id = 0;
  c.u64(session_id);

  DecodeResult r;
  r.session_id = session_id;
  auto truncated = [&](const char* what) {
    return fail(DecodeStatus::Truncated, what, session_id);
  };

  switch (static_cast<MsgType>(type_byte)) {
    case MsgType::Hello: {
      HelloMsg m;
      uint8_t name_len = 0;
      BytesView name;
      if (!c.u8(name_len) || !c.take(name_len, name)) {
        return truncated("hello content_name");
      }
      m.content_name.assign(name.begin(), name.end());
      if (!read_prefixed_int(c, m.dh_public) ||
          !read_prefixed_int(c, m.rsa_n) || !read_prefixed_int(c, m.rsa_e)) {
        return truncated("hello integers");
      }
      r.message = std::move(m);
      break;
    }
    case MsgType::HelloReply: {
      HelloReplyMsg m;
      uint8_t status = 0;
      if (!read_prefixed_int(c, m.dh_public) || !c.u8(status)) {
        return truncated("hello_reply body");
      }
      if (status > 1) {
        return fail(DecodeStatus::BadValue,
                    "hello_reply status " + std::to_string(status),
                    session_id);
      }
      m.status = static_cast<HelloStatus>(status);
      r.message = std::move(m);
      break;
    }
    case MsgType::Metafile: {
      MetafileMsg m;
      uint16_t count = 0;
      if (!c.u16(m.total_blocks) || !c.u16(m.first_index) || !c.u16(count)) {
        return truncated("metafile counts");
      }
      if (static_cast<size_t>(m.first_index) + count > m.total_blocks) {
        return fail(DecodeStatus::BadValue,
                    "metafile block range exceeds total", session_id);
      }
      m.blocks.reserve(count);
      for (uint16_t i = 0; i < count; ++i) {
        uint16_t len = 0;
        BytesView block;
        if (!c.u16(len) || !c.take(len, block)) {
          return truncated("metafile block");
        }
        m.blocks.emplace_back(block.begin(), block.end());
      }
      r.message = std::move(m);
      break;
    }
    case MsgType::Chunk: {
      ChunkMsg m;
      uint16_t len = 0;
      BytesView payload;
      if (!c.u32(m.seq) || !c.u16(len)) return truncated("chunk header");
      if (len > kMaxChunkPayload) {
        return fail(DecodeStatus::BadLength,
                    "chunk payload length " + std::to_string(len), session_id);
      }
      if (!c.take(len, payload) || !c.u32(m.crc32)) {
        return truncated("chunk payload");
      }
      m.payload.assign(payload.begin(), payload.end());
      r.message = std::move(m);
      break;
    }
    case MsgType::AckToken: {
      AckTokenMsg m;
      BytesView value;
      if (!c.u32(m.window_index) || !c.take(m.value.size(), value)) {
        return truncated("ack_token body");
      }
      std::copy(value.begin(), value.end(), m.value.begin());
      r.message = std::move(m);
      break;
    }
    case MsgType::Nack: {
      NackMsg m;
      uint16_t count = 0;
      if (!c.u16(count)) return truncated("nack count");
      if (count > kMaxNackSeqs) {
        return fail(DecodeStatus::BadLength,
                    "nack count " + std::to_string(count), session_id);
      }
      m.missing_seqs.resize(count);
      for (uint16_t i = 0; i < count; ++i) {
        if (!c.u32(m.missing_seqs[i])) return truncated("nack seqs");
      }
      r.message = std::move(m);
      break;
    }
    case MsgType::Halt: {
      uint8_t reason = 0;
      if (!c.u8(reason)) return truncated("halt reason");
      if (reason > 3) {
        return fail(DecodeStatus::BadValue,
                    "halt reason " + std::to_string(reason), session_id);
      }
      r.message = HaltMsg{static_cast<HaltReason>(reason)};
      break;
    }
    case MsgType::Fin: {
      FinMsg m;
      BytesView digest;
      if (!c.take(m.content_sha256.size(), digest)) {
        return truncated("fin digest");
      }
      std::copy(digest.begin(), digest.end(), m.content_sha256.begin());
      r.message = std::move(m);
      break;
    }
  }

  if (c.remaining() != 0) {
    return fail(DecodeStatus::Trailing,
                std::to_string(c.remaining()) + " trailing bytes", session_id);
  }
  return r;
}

}  // namespace svsp::wire
