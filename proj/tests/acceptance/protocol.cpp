#include <cstring>

#include "acceptance.hpp"
#include "matchbook/protocol/codec.hpp"
#include "matchbook/protocol/transport.hpp"
#include "wire_support.hpp"

namespace matchbook::acceptance {

namespace {

using namespace proto;
using testing::kAllTemplates;
using testing::RandomWire;

Outcome roundtrip() {
  constexpr int kPerVariant = 100'000;
  RandomWire gen(2021);
  Failures f;
  std::uint64_t bytes_total = 0;
  for (auto id : kAllTemplates) {
    for (int i = 0; i < kPerVariant; ++i) {
      const Frame in = gen.frame(id);
      const auto bytes = encode(in);
      bytes_total += bytes.size();
      if (bytes.size() != frame_size(id)) f.add("{} frame is {} bytes", to_string(id), bytes.size());
      if (bytes != testing::reference_encode(in)) {
        f.add("{} #{}: bytes differ from the offset-table encoder", to_string(id), i);
        continue;
      }
      const auto out = decode(bytes);
      if (!out || !(*out.frame == in)) f.add("{} #{}: decode(encode(m)) != m ({})", to_string(id), i, to_string(out.error));
    }
  }
  return f.outcome(fmt::format("{} variants x {} random messages: decode(encode(m)) == m and bytes equal the "
                               "offset-table encoder ({} bytes)",
                               std::size(kAllTemplates), kPerVariant, bytes_total));
}

Outcome fuzz() {
  constexpr int kFrames = 1'000'000;
  RandomWire gen(77);
  auto& rng = gen.rng();
  Failures f;
  int accepted = 0;
  std::array<int, 6> by_error{};
  for (int i = 0; i < kFrames; ++i) {
    std::vector<std::uint8_t> bytes;
    switch (i % 3) {
      case 0:  // noise
        bytes.resize(gen.pick(96));
        for (auto& b : bytes) b = static_cast<std::uint8_t>(rng());
        break;
      case 1: {  // valid frame with a few bits flipped
        bytes = encode(gen.frame(kAllTemplates[gen.pick(std::size(kAllTemplates))]));
        const auto flips = 1 + gen.pick(4);
        for (std::uint64_t k = 0; k < flips; ++k) bytes[gen.pick(bytes.size())] ^= 1u << gen.pick(8);
        break;
      }
      default: {  // well-formed header, random body
        const auto id = kAllTemplates[gen.pick(std::size(kAllTemplates))];
        bytes = encode(gen.frame(id));
        for (std::size_t k = kHeaderSize; k < bytes.size(); ++k) bytes[k] = static_cast<std::uint8_t>(rng());
        break;
      }
    }
    try {
      const auto r = decode(bytes);
      by_error[static_cast<std::size_t>(r.error)]++;
      if (r) {
        ++accepted;
        if (r.error != DecodeError::None) f.add("frame {} accepted with error {}", i, to_string(r.error));
        if (encode(*r.frame) != bytes) f.add("frame {} accepted but re-encodes differently", i);
      } else if (r.error == DecodeError::None) {
        f.add("frame {} refused without a reason", i);
      }
    } catch (const std::exception& e) {
      f.add("frame {} threw: {}", i, e.what());
    }
  }
  return f.outcome(fmt::format("{} fuzzed frames, none crashed or threw; {} accepted and re-encode identically; "
                               "refused: truncated {}, length {}, template {}, version {}, field {}",
                               kFrames, accepted, by_error[1], by_error[2], by_error[3], by_error[4], by_error[5]));
}

Outcome loopback() {
  auto rx = UdpSocket::bind(Endpoint{"127.0.0.1", 0, 1});
  auto tx = UdpSocket::open();
  const auto to = SocketAddress::resolve(Endpoint{"127.0.0.1", rx.local_port(), 1});
  RandomWire gen(303);
  Failures f;

  // Every template, several times over, byte for byte.
  int echoed = 0;
  for (int round = 0; round < 100; ++round) {
    for (auto id : kAllTemplates) {
      const auto bytes = encode(gen.frame(id));
      tx.send_to(to, bytes);
      const auto got = rx.receive(std::chrono::milliseconds(1000));
      if (!got) {
        f.add("{} datagram lost on loopback", to_string(id));
        continue;
      }
      if (got->bytes != bytes) f.add("{} bytes altered in transit", to_string(id));
      ++echoed;
    }
  }

  // Random drops. Each surviving frame is read back before the next is sent,
  // so the socket buffer cannot add losses of its own.
  constexpr std::uint64_t kSequences = 20'000;
  SequenceTracker tracker(1);
  std::uint64_t dropped = 0, reported = 0;
  for (std::uint64_t seq = 1; seq <= kSequences; ++seq) {
    if (gen.pick(100) < 3) {
      ++dropped;
      continue;
    }
    tx.send_to(to, encode(Frame{7, seq, gen.body(kAllTemplates[gen.pick(std::size(kAllTemplates))])}));
    const auto got = rx.receive(std::chrono::milliseconds(1000));
    if (!got) {
      f.add("sequence {} lost on loopback", seq);
      continue;
    }
    const auto d = decode(got->bytes);
    if (!d) {
      f.add("sequence {} did not decode", seq);
      continue;
    }
    reported += tracker.observe(d.frame->sequence);
  }
  // A trailing drop only shows once a later frame arrives.
  tx.send_to(to, encode(Frame{7, kSequences + 1, Logout{}}));
  if (const auto got = rx.receive(std::chrono::milliseconds(1000)); got && decode(got->bytes))
    reported += tracker.observe(decode(got->bytes).frame->sequence);
  else
    f.add("closing frame lost");
  if (tracker.gaps() != dropped || reported != dropped)
    f.add("tracker counted {} gaps ({} reported), {} dropped", tracker.gaps(), reported, dropped);
  if (tracker.late() != 0) f.add("{} frames counted late", tracker.late());
  return f.outcome(fmt::format("{} datagrams over all templates arrived byte-identical; {} random drops in {} "
                               "sequences, {} gaps counted",
                               echoed, dropped, kSequences, tracker.gaps()));
}

}  // namespace

Criterion protocol() {
  return {"protocol",
          "codec round trip, fuzzing, loopback UDP and gap detection",
          {{"roundtrip", roundtrip}, {"fuzz", fuzz}, {"udp_loopback", loopback}}};
}

}  // namespace matchbook::acceptance
