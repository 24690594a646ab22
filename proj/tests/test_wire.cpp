#include <string>
#include <variant>

#include "doctest.h"
#include "svsp/wire.hpp"

using svsp::Bytes;
using svsp::BytesView;
using svsp::SplitMix64;
using namespace svsp::wire;

namespace {

void expect_status(const Bytes& datagram, DecodeStatus want) {
  auto r = decode_message(BytesView(datagram));
  CHECK_MESSAGE(r.status == want,
                "got ", decode_status_name(r.status), " want ",
                decode_status_name(want));
  CHECK(r.ok() == (want == DecodeStatus::Ok));
  CHECK(r.message.has_value() == (want == DecodeStatus::Ok));
}

// Uniformly random but bound-respecting message of every type.
Message random_message(SplitMix64& rng) {
  switch (rng.below(8)) {
    case 0: {
      HelloMsg m;
      m.content_name.assign(rng.below(256), 'x');
      for (auto& ch : m.content_name) ch = char('a' + rng.below(26));
      m.dh_public = BigInt(rng.next());
      m.rsa_n = BigInt(rng.next()) * BigInt(rng.next());
      m.rsa_e = BigInt(rng.below(100000));
      return m;
    }
    case 1: {
      HelloReplyMsg m;
      m.dh_public = BigInt(rng.next());
      m.status = rng.below(2) ? HelloStatus::NotFound : HelloStatus::Ok;
      return m;
    }
    case 2: {
      MetafileMsg m;
      uint16_t count = uint16_t(rng.below(4));
      m.total_blocks = uint16_t(count + rng.below(20));
      m.first_index =
          uint16_t(rng.below(uint64_t(m.total_blocks - count) + 1));
      for (uint16_t i = 0; i < count; ++i) {
        Bytes b(1 + rng.below(64));
        rng.fill(b);
        m.blocks.push_back(std::move(b));
      }
      return m;
    }
    case 3: {
      ChunkMsg m;
      m.seq = uint32_t(rng.next());
      m.payload.resize(rng.below(kMaxChunkPayload + 1));
      rng.fill(m.payload);
      m.crc32 = uint32_t(rng.next());
      return m;
    }
    case 4: {
      AckTokenMsg m;
      m.window_index = uint32_t(rng.next());
      for (auto& b : m.value) b = uint8_t(rng.next());
      return m;
    }
    case 5: {
      NackMsg m;
      m.missing_seqs.resize(rng.below(kMaxNackSeqs + 1));
      for (auto& s : m.missing_seqs) s = uint32_t(rng.next());
      return m;
    }
    case 6: {
      HaltMsg m;
      m.reason = HaltReason(rng.below(4));
      return m;
    }
    default: {
      FinMsg m;
      for (auto& b : m.content_sha256) b = uint8_t(rng.next());
      return m;
    }
  }
}

}  // namespace

TEST_SUITE_BEGIN("wire");

TEST_CASE("golden halt datagram") {
  Bytes want{0x53, 0x56, 0x01, 0x07, 0x00, 0x00, 0x00, 0x00,
             0x00, 0x00, 0x00, 0x07, 0x00};
  CHECK(encode_message(7, HaltMsg{HaltReason::TokenTimeout}) == want);

  auto r = decode_message(BytesView(want));
  REQUIRE(r.ok());
  CHECK(r.session_id == 7);
  CHECK(std::get<HaltMsg>(*r.message).reason == HaltReason::TokenTimeout);
}

TEST_CASE("golden hello datagram") {
  HelloMsg hello;
  hello.content_name = "a";
  hello.dh_public = BigInt(2);
  hello.rsa_n = BigInt(33);
  hello.rsa_e = BigInt(3);
  Bytes want{
      0x53, 0x56, 0x01, 0x01,                          // magic, ver, type
      0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00,  // session 0
      0x01, 0x61,                                      // name "a"
      0x00, 0x01, 0x02,                                // dh_public = 2
      0x00, 0x01, 0x21,                                // rsa_n = 33
      0x00, 0x01, 0x03,                                // rsa_e = 3
  };
  CHECK(encode_message(0, hello) == want);
  auto r = decode_message(BytesView(want));
  REQUIRE(r.ok());
  CHECK(std::get<HelloMsg>(*r.message) == hello);
}

TEST_CASE("golden chunk datagram") {
  ChunkMsg chunk;
  chunk.seq = 5;
  chunk.payload = {0x68, 0x69};
  chunk.crc32 = 0x0BADF00D;
  Bytes want{
      0x53, 0x56, 0x01, 0x04,                          // type Chunk
      0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x03,  // session 3
      0x00, 0x00, 0x00, 0x05,                          // seq
      0x00, 0x02, 0x68, 0x69,                          // len + payload
      0x0B, 0xAD, 0xF0, 0x0D,                          // crc32 after payload
  };
  CHECK(encode_message(3, chunk) == want);
  auto r = decode_message(BytesView(want));
  REQUIRE(r.ok());
  CHECK(r.session_id == 3);
  CHECK(std::get<ChunkMsg>(*r.message) == chunk);
}

TEST_CASE("golden nack and fin datagrams") {
  NackMsg nack;
  nack.missing_seqs = {7, 300};
  Bytes want_nack{
      0x53, 0x56, 0x01, 0x06,
      0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x05,
      0x00, 0x02,                                      // count
      0x00, 0x00, 0x00, 0x07, 0x00, 0x00, 0x01, 0x2C,  // seqs
  };
  CHECK(encode_message(5, nack) == want_nack);

  FinMsg fin;
  // SHA-256("abc")
  Bytes digest{0xba, 0x78, 0x16, 0xbf, 0x8f, 0x01, 0xcf, 0xea,
               0x41, 0x41, 0x40, 0xde, 0x5d, 0xae, 0x22, 0x23,
               0xb0, 0x03, 0x61, 0xa3, 0x96, 0x17, 0x7a, 0x9c,
               0xb4, 0x10, 0xff, 0x61, 0xf2, 0x00, 0x15, 0xad};
  std::copy(digest.begin(), digest.end(), fin.content_sha256.begin());
  Bytes want_fin{0x53, 0x56, 0x01, 0x08,
                 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x06};
  want_fin.insert(want_fin.end(), digest.begin(), digest.end());
  CHECK(encode_message(6, fin) == want_fin);
  auto r = decode_message(BytesView(want_fin));
  REQUIRE(r.ok());
  CHECK(std::get<FinMsg>(*r.message) == fin);
}

TEST_CASE("every message type round-trips") {
  svsp::token::TokenValue value{};
  for (size_t i = 0; i < value.size(); ++i) value[i] = uint8_t(0x10 + i);

  HelloMsg hello{"movie.bin", BigInt::from_decimal("123456789012345678901"),
                 BigInt::from_decimal("987654321098765432109"), BigInt(65537)};
  MetafileMsg meta{4, 1, {Bytes{1, 2, 3}, Bytes{9, 8, 7, 6, 5}}};
  ChunkMsg chunk{42, Bytes(kMaxChunkPayload, 0xEE), 0x12345678};
  std::vector<Message> cases{
      hello,
      HelloReplyMsg{BigInt(0), HelloStatus::NotFound},
      meta,
      chunk,
      AckTokenMsg{0xDEADBEEF, value},
      NackMsg{{1, 2, 3, 0xFFFFFFFF}},
      HaltMsg{HaltReason::Replay},
      FinMsg{},
  };
  for (uint64_t sid : {uint64_t(0), uint64_t(1), UINT64_MAX}) {
    for (const Message& msg : cases) {
      Bytes wire = encode_message(sid, msg);
      CHECK(wire.size() <= kMaxDatagram);
      auto r = decode_message(BytesView(wire));
      REQUIRE_MESSAGE(r.ok(), decode_status_name(r.status), " ", r.detail);
      CHECK(r.session_id == sid);
      CHECK(*r.message == msg);
    }
  }
}

TEST_CASE("encode rejects out-of-bound fields") {
  HelloMsg hello{std::string(256, 'n'), BigInt(2), BigInt(33), BigInt(3)};
  CHECK_THROWS_AS(encode_message(1, hello), EncodeError);

  ChunkMsg chunk{0, Bytes(kMaxChunkPayload + 1), 0};
  CHECK_THROWS_AS(encode_message(1, chunk), EncodeError);

  NackMsg nack;
  nack.missing_seqs.resize(kMaxNackSeqs + 1);
  CHECK_THROWS_AS(encode_message(1, nack), EncodeError);

  MetafileMsg meta{2, 1, {Bytes{1}, Bytes{2}}};  // 1 + 2 > total 2
  CHECK_THROWS_AS(encode_message(1, meta), EncodeError);

  MetafileMsg fat{1, 0, {Bytes(1500, 0xAA)}};  // datagram would exceed cap
  CHECK_THROWS_AS(encode_message(1, fat), EncodeError);
}

TEST_CASE("decode statuses") {
  // short inputs: truncated before any content checks
  expect_status({}, DecodeStatus::Truncated);
  expect_status(Bytes(5, 0x99), DecodeStatus::Truncated);
  expect_status(Bytes(11, 0x00), DecodeStatus::Truncated);

  Bytes halt = encode_message(7, HaltMsg{HaltReason::TokenTimeout});

  Bytes bad_magic = halt;
  bad_magic[0] = 0x54;
  expect_status(bad_magic, DecodeStatus::BadMagic);

  Bytes bad_version = halt;
  bad_version[2] = 0x02;
  expect_status(bad_version, DecodeStatus::BadVersion);

  Bytes bad_type = halt;
  bad_type[3] = 0x00;
  expect_status(bad_type, DecodeStatus::BadType);
  bad_type[3] = 0x09;
  expect_status(bad_type, DecodeStatus::BadType);

  Bytes bad_reason = halt;
  bad_reason[12] = 0x04;
  expect_status(bad_reason, DecodeStatus::BadValue);

  Bytes trailing = halt;
  trailing.push_back(0x00);
  expect_status(trailing, DecodeStatus::Trailing);

  // valid header, empty body
  Bytes headless(halt.begin(), halt.begin() + 12);
  expect_status(headless, DecodeStatus::Truncated);

  // oversized wins even over garbage content
  expect_status(Bytes(kMaxDatagram + 1, 0xFF), DecodeStatus::Oversized);

  // hello-reply status byte out of range
  Bytes reply = encode_message(1, HelloReplyMsg{BigInt(2), HelloStatus::Ok});
  reply.back() = 0x02;
  expect_status(reply, DecodeStatus::BadValue);

  // chunk whose declared length exceeds the payload bound
  ChunkMsg chunk{1, Bytes{0xAB}, 0};
  Bytes wire = encode_message(1, chunk);
  wire[16] = 0x05;
  wire[17] = 0xAB;  // declared len 0x05AB > 1450
  expect_status(wire, DecodeStatus::BadLength);

  // chunk truncated mid-payload
  Bytes cut = encode_message(1, ChunkMsg{1, Bytes(100, 0x11), 0});
  cut.resize(cut.size() - 20);
  expect_status(cut, DecodeStatus::Truncated);

  // nack count over the bound
  NackMsg nack{{1, 2}};
  Bytes nack_wire = encode_message(1, nack);
  nack_wire[12] = 0x01;
  nack_wire[13] = 0x01;  // declared count 257
  expect_status(nack_wire, DecodeStatus::BadLength);

  // metafile fragment range inconsistent with the total
  MetafileMsg meta{2, 1, {Bytes{1, 2}}};
  Bytes meta_wire = encode_message(1, meta);
  meta_wire[13] = 0x01;  // total_blocks 2 -> 1; first 1 + count 1 > 1
  expect_status(meta_wire, DecodeStatus::BadValue);
}

TEST_CASE("crc is carried, not enforced, by the codec") {
  ChunkMsg chunk{9, Bytes{1, 2, 3, 4}, 0xAABBCCDD};
  Bytes wire = encode_message(2, chunk);
  wire.back() ^= 0x01;  // flip a crc bit
  auto r = decode_message(BytesView(wire));
  REQUIRE(r.ok());
  CHECK(std::get<ChunkMsg>(*r.message).crc32 == 0xAABBCCDC);
}

TEST_CASE("fuzz: random messages round-trip") {
  SplitMix64 rng(0xF022);
  for (int i = 0; i < 2000; ++i) {
    Message msg = random_message(rng);
    uint64_t sid = rng.next();
    Bytes wire = encode_message(sid, msg);
    auto r = decode_message(BytesView(wire));
    REQUIRE_MESSAGE(r.ok(), decode_status_name(r.status), " ", r.detail);
    CHECK(r.session_id == sid);
    CHECK(*r.message == msg);
  }
}

TEST_CASE("fuzz: arbitrary buffers never crash the decoder") {
  SplitMix64 rng(0xDECDE);
  int ok_count = 0;
  for (int i = 0; i < 2000; ++i) {
    Bytes buf(rng.below(1500));
    rng.fill(buf);
    if (i % 3 == 0 && buf.size() >= 4) {
      // steer some inputs past the header checks
      buf[0] = kMagic0;
      buf[1] = kMagic1;
      buf[2] = kVersion;
      buf[3] = uint8_t(1 + rng.below(8));
    }
    auto r = decode_message(BytesView(buf));
    ok_count += r.ok() ? 1 : 0;
    CHECK((r.status == DecodeStatus::Ok) == r.message.has_value());
  }
  // mutated valid encodings
  for (int i = 0; i < 2000; ++i) {
    SplitMix64 gen(i);
    Bytes wire = encode_message(gen.next(), random_message(gen));
    size_t flips = 1 + gen.below(4);
    for (size_t f = 0; f < flips && !wire.empty(); ++f) {
      wire[gen.below(wire.size())] ^= uint8_t(1u << gen.below(8));
    }
    decode_message(BytesView(wire));  // must not throw
  }
  CHECK(ok_count < 2000);  // sanity: garbage mostly fails
}

TEST_CASE("name helpers") {
  CHECK(std::string(halt_reason_name(HaltReason::TokenTimeout)) ==
        "token_timeout");
  CHECK(std::string(halt_reason_name(HaltReason::TokenInvalid)) ==
        "token_invalid");
  CHECK(std::string(halt_reason_name(HaltReason::Replay)) == "replay");
  CHECK(std::string(halt_reason_name(HaltReason::Internal)) == "internal");
  CHECK(std::string(decode_status_name(DecodeStatus::Ok)) == "ok");
  CHECK(std::string(decode_status_name(DecodeStatus::Truncated)) ==
        "truncated");
}

TEST_SUITE_END();
