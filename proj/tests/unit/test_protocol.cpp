#include <gtest/gtest.h>

#include <set>
#include <thread>

#include "matchbook/protocol/codec.hpp"
#include "matchbook/protocol/transport.hpp"
#include "wire_support.hpp"

namespace matchbook {
namespace {

using namespace proto;
using testing::kAllTemplates;
using testing::RandomWire;
using testing::reference_encode;

std::vector<std::uint8_t> hex(std::initializer_list<int> v) { return {v.begin(), v.end()}; }

TEST(Codec, LogoutIsBareHeader) {
  const auto bytes = encode(Frame{1, 7, Logout{}});
  EXPECT_EQ(bytes, hex({20, 0, 0, 0, 7, 0, 1, 0, 1, 0, 0, 0, 7, 0, 0, 0, 0, 0, 0, 0}));
}

TEST(Codec, FrameSizes) {
  EXPECT_EQ(frame_size(TemplateId::NewOrder), 75u);
  EXPECT_EQ(frame_size(TemplateId::OrderAck), 30u);
  EXPECT_EQ(frame_size(TemplateId::ExecutionReport), 60u);
  EXPECT_EQ(frame_size(TemplateId::CancelOrder), 29u);
  EXPECT_EQ(frame_size(TemplateId::Login), 36u);
  EXPECT_EQ(frame_size(TemplateId::LoginResponse), 21u);
  EXPECT_EQ(frame_size(TemplateId::Logout), 20u);
  EXPECT_EQ(frame_size(TemplateId::LogoutResponse), 21u);
  EXPECT_EQ(frame_size(TemplateId::MarketDataUpdate), 74u);
  EXPECT_EQ(frame_size(TemplateId::SessionChange), 25u);
  EXPECT_EQ(frame_size(TemplateId::AdminCommand), 21u);
  EXPECT_EQ(body_size(static_cast<TemplateId>(250)), 0u);
}

TEST(Codec, EncodedLengthDependsOnlyOnTemplate) {
  RandomWire gen(3);
  for (auto id : kAllTemplates) {
    for (int i = 0; i < 50; ++i) EXPECT_EQ(encode(gen.frame(id)).size(), frame_size(id)) << to_string(id);
  }
}

TEST(Codec, NewOrderLayout) {
  NewOrder m{7, Side::Sell, OrderType::Limit, TimeInForce::GTD, 25057, 1000, 400, 0, 0, 0x0102030405060708ull};
  const auto bytes = encode(Frame{42, 3, m});
  ASSERT_EQ(bytes.size(), 75u);
  EXPECT_EQ(bytes[4], 1);                 // template id
  EXPECT_EQ(bytes[24], 1);                // side
  EXPECT_EQ(bytes[25], 1);                // order type
  EXPECT_EQ(bytes[26], 8);                // tif
  EXPECT_EQ(bytes[27] | bytes[28] << 8, 25057);
  EXPECT_EQ(bytes[67], 0x08);
  EXPECT_EQ(bytes[74], 0x01);
}

TEST(Codec, PasswordIsSpacePadded) {
  const auto bytes = encode(Frame{1, 1, Login{2, "test111111"}});
  const std::string wire(bytes.begin() + 24, bytes.end());
  EXPECT_EQ(wire, "test111111  ");
  const auto back = decode(bytes);
  ASSERT_TRUE(back);
  EXPECT_EQ(std::get<Login>(back.frame->body).password, "test111111");
}

TEST(Codec, MatchesOffsetTableEncoder) {
  RandomWire gen(11);
  for (auto id : kAllTemplates) {
    for (int i = 0; i < 2000; ++i) {
      const Frame f = gen.frame(id);
      const auto bytes = encode(f);
      ASSERT_EQ(bytes, reference_encode(f)) << to_string(id);
      const auto back = decode(bytes);
      ASSERT_TRUE(back) << to_string(back.error);
      ASSERT_EQ(*back.frame, f);
    }
  }
}

TEST(Codec, EncodeIntoRejectsShortBuffer) {
  std::array<std::uint8_t, 74> small{};
  EXPECT_THROW(encode_into(Frame{1, 1, NewOrder{}}, small), EncodeError);
  std::array<std::uint8_t, 80> big{};
  EXPECT_EQ(encode_into(Frame{1, 1, NewOrder{}}, big), 75u);
}

TEST(Codec, EncodeRangeErrors) {
  NewOrder neg;
  neg.qty = -1;
  EXPECT_THROW(encode(Frame{1, 1, neg}), EncodeError);
  NewOrder bad_enum;
  bad_enum.tif = static_cast<TimeInForce>(11);
  EXPECT_THROW(encode(Frame{1, 1, bad_enum}), EncodeError);
  EXPECT_THROW(encode(Frame{1, 1, Login{1, "thirteen-char"}}), EncodeError);
  EXPECT_THROW(encode(Frame{1, 1, Login{1, "trailing "}}), EncodeError);
  EXPECT_THROW(encode(Frame{1, 1, Login{1, "tab\there"}}), EncodeError);
  EXPECT_THROW(encode(Frame{1, 1, AdminCommand{static_cast<SessionType>(14)}}), EncodeError);
  MarketDataUpdate md;
  md.flags = 8;
  EXPECT_THROW(encode(Frame{1, 1, md}), EncodeError);
  EXPECT_THROW(encode(Frame{1, 1, OrderAck{1, AckStatus::Rejected, 13}}), EncodeError);
  EXPECT_THROW(encode(Frame{1, 1, ExecutionReport{1, 1, 1, -5, 0}}), EncodeError);
}

TEST(Codec, DecodeErrorsAreDistinct) {
  auto good = encode(Frame{1, 1, CancelOrder{9, Side::Sell}});

  EXPECT_EQ(decode(std::span(good).first(19)).error, DecodeError::TruncatedFrame);
  EXPECT_EQ(decode(std::span(good).first(0)).error, DecodeError::TruncatedFrame);
  EXPECT_EQ(decode(std::span(good).first(25)).error, DecodeError::TruncatedFrame);

  auto unknown = good;
  unknown[4] = 250;
  EXPECT_EQ(decode(unknown).error, DecodeError::UnknownTemplate);
  unknown[4] = 0;
  EXPECT_EQ(decode(unknown).error, DecodeError::UnknownTemplate);

  auto version = good;
  version[6] = 2;
  EXPECT_EQ(decode(version).error, DecodeError::BadVersion);

  auto length = good;
  length[0] = 30;
  EXPECT_EQ(decode(length).error, DecodeError::LengthMismatch);

  auto trailing = good;
  trailing.push_back(0);
  EXPECT_EQ(decode(trailing).error, DecodeError::LengthMismatch);

  auto side = good;
  side[28] = 2;
  EXPECT_EQ(decode(side).error, DecodeError::InvalidField);
}

TEST(Codec, DecodeRejectsOutOfRangeFields) {
  auto order = encode(Frame{1, 1, NewOrder{}});
  auto neg = order;
  neg[34] = 0x80;  // high byte of qty
  EXPECT_EQ(decode(neg).error, DecodeError::InvalidField);
  auto tif = order;
  tif[26] = 11;
  EXPECT_EQ(decode(tif).error, DecodeError::InvalidField);

  auto md = encode(Frame{1, 1, MarketDataUpdate{}});
  md[73] = 0x10;
  EXPECT_EQ(decode(md).error, DecodeError::InvalidField);

  auto login = encode(Frame{1, 1, Login{1, "abc"}});
  login[25] = 0x7f;
  EXPECT_EQ(decode(login).error, DecodeError::InvalidField);
}

// Whatever decode accepts must re-encode to the same bytes.
TEST(Codec, FuzzedInputDecodesOrFailsTyped) {
  RandomWire gen(99);
  auto& rng = gen.rng();
  int accepted = 0;
  for (int i = 0; i < 50000; ++i) {
    std::vector<std::uint8_t> bytes;
    if (i % 2 == 0) {
      bytes.resize(gen.pick(90));
      for (auto& b : bytes) b = static_cast<std::uint8_t>(rng());
    } else {
      bytes = encode(gen.frame(kAllTemplates[gen.pick(std::size(kAllTemplates))]));
      const auto flips = 1 + gen.pick(3);
      for (std::uint64_t k = 0; k < flips; ++k) bytes[gen.pick(bytes.size())] ^= 1u << gen.pick(8);
    }
    const auto r = decode(bytes);
    if (r) {
      ++accepted;
      ASSERT_EQ(r.error, DecodeError::None);
      ASSERT_EQ(encode(*r.frame), bytes);
    } else {
      ASSERT_NE(r.error, DecodeError::None);
    }
  }
  EXPECT_GT(accepted, 0);
}

TEST(Endpoint, ParsesClientDataForm) {
  const auto e = parse_endpoint("udp://localhost:5000", 10);
  EXPECT_EQ(e.host, "localhost");
  EXPECT_EQ(e.port, 5000);
  EXPECT_EQ(e.stream_id, 10);
  EXPECT_EQ(e.url(), "udp://localhost:5000");
}

TEST(Endpoint, RejectsMalformed) {
  for (const char* bad : {"localhost:5000", "tcp://localhost:5000", "udp://localhost", "udp://:5000",
                          "udp://localhost:", "udp://localhost:70000", "udp://localhost:50x"}) {
    EXPECT_THROW(parse_endpoint(bad, 1), std::invalid_argument) << bad;
  }
}

TEST(Sequence, FiveThenSevenIsOneGap) {
  SequenceTracker t;
  EXPECT_EQ(t.observe(5), 0u);
  EXPECT_EQ(t.observe(7), 1u);
  EXPECT_EQ(t.gaps(), 1u);
  EXPECT_EQ(t.observe(6), 0u);
  EXPECT_EQ(t.late(), 1u);
  EXPECT_EQ(t.observe(8), 0u);
  EXPECT_EQ(t.received(), 4u);
}

TEST(Sequence, ExpectedFirstCountsLeadingLoss) {
  SequenceTracker t(1);
  EXPECT_EQ(t.observe(4), 3u);
  EXPECT_EQ(t.gaps(), 3u);
}

TEST(Udp, LoopbackPreservesBytes) {
  auto rx = UdpSocket::bind(Endpoint{"127.0.0.1", 0, 1});
  auto tx = UdpSocket::open();
  const auto to = SocketAddress::resolve(Endpoint{"localhost", rx.local_port(), 1});
  RandomWire gen(5);
  for (auto id : kAllTemplates) {
    const auto bytes = encode(gen.frame(id));
    tx.send_to(to, bytes);
    const auto got = rx.receive(std::chrono::milliseconds(1000));
    ASSERT_TRUE(got);
    EXPECT_EQ(got->bytes, bytes);
    EXPECT_EQ(got->from.port(), tx.local_port());
  }
}

TEST(Udp, ReceiveTimesOut) {
  auto rx = UdpSocket::bind(Endpoint{"127.0.0.1", 0, 1});
  EXPECT_FALSE(rx.receive(std::chrono::milliseconds(20)));
}

TEST(Udp, CloseEndsBlockedReceive) {
  auto rx = UdpSocket::bind(Endpoint{"127.0.0.1", 0, 1});
  std::thread t([&] { std::this_thread::sleep_for(std::chrono::milliseconds(20)); rx.close(); });
  EXPECT_FALSE(rx.receive(std::chrono::milliseconds(2000)));
  t.join();
}

TEST(Udp, GapCounterMatchesInjectedDrops) {
  auto rx = UdpSocket::bind(Endpoint{"127.0.0.1", 0, 1});
  auto tx = UdpSocket::open();
  const auto to = SocketAddress::resolve(Endpoint{"127.0.0.1", rx.local_port(), 1});
  const std::set<std::uint64_t> dropped{1, 2, 17, 40, 41, 42, 99, 150};
  SequenceTracker tracker(1);
  int sent = 0;
  for (std::uint64_t seq = 1; seq <= 200; ++seq) {
    if (dropped.count(seq)) continue;
    tx.send_to(to, encode(Frame{3, seq, SessionChange{1, SessionType::Pause}}));
    ++sent;
  }
  for (int i = 0; i < sent; ++i) {
    const auto got = rx.receive(std::chrono::milliseconds(1000));
    ASSERT_TRUE(got);
    const auto f = decode(got->bytes);
    ASSERT_TRUE(f);
    tracker.observe(f.frame->sequence);
  }
  EXPECT_EQ(tracker.gaps(), dropped.size());
  EXPECT_EQ(tracker.late(), 0u);
}

}  // namespace
}  // namespace matchbook
