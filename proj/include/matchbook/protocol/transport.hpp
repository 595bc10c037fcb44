#pragma once

#include <netinet/in.h>

#include <atomic>
#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace matchbook::proto {

// `udp://host:port` plus the stream id column that accompanies it in
// ClientData.csv. Streams map one-to-one onto ports here, so the id is
// carried for bookkeeping only.
struct Endpoint {
  std::string host;
  std::uint16_t port{0};
  std::int32_t stream_id{0};

  std::string url() const;
  friend bool operator==(const Endpoint&, const Endpoint&) = default;
};

// Throws std::invalid_argument on anything but udp://host:port.
Endpoint parse_endpoint(std::string_view url, std::int32_t stream_id = 0);

struct SocketAddress {
  sockaddr_in addr{};

  static SocketAddress resolve(const Endpoint& e);  // IPv4; throws std::runtime_error
  std::string to_string() const;
  std::uint16_t port() const { return ntohs(addr.sin_port); }
  friend bool operator==(const SocketAddress& a, const SocketAddress& b) {
    return a.addr.sin_addr.s_addr == b.addr.sin_addr.s_addr && a.addr.sin_port == b.addr.sin_port;
  }
};

struct Datagram {
  std::vector<std::uint8_t> bytes;
  SocketAddress from;
};

// One IPv4 UDP socket. Sends are fire-and-forget, one frame per datagram.
class UdpSocket {
 public:
  // Bound to host:port; port 0 picks an ephemeral port.
  static UdpSocket bind(const Endpoint& local);
  // Send-only socket on an ephemeral port.
  static UdpSocket open();

  UdpSocket(UdpSocket&& other) noexcept;
  UdpSocket& operator=(UdpSocket&& other) noexcept;
  UdpSocket(const UdpSocket&) = delete;
  UdpSocket& operator=(const UdpSocket&) = delete;
  ~UdpSocket();

  // Throws std::system_error on socket errors.
  void send_to(const SocketAddress& to, std::span<const std::uint8_t> bytes);
  // Waits up to `timeout`; absent on timeout or after close().
  std::optional<Datagram> receive(std::chrono::milliseconds timeout);

  std::uint16_t local_port() const;
  bool is_open() const { return fd_ >= 0; }
  // Safe to call from another thread to end a blocked receive.
  void close();

 private:
  explicit UdpSocket(int fd) : fd_(fd) {}
  std::atomic<int> fd_{-1};
};

// Receiver-side sequence accounting. Gaps are counted, never repaired.
class SequenceTracker {
 public:
  // With no first sequence the first frame observed sets the baseline.
  explicit SequenceTracker(std::optional<std::uint64_t> first_expected = std::nullopt)
      : expected_(first_expected) {}

  // Returns how many sequence numbers this arrival shows to be missing.
  std::uint64_t observe(std::uint64_t sequence);

  std::uint64_t gaps() const { return gaps_; }
  std::uint64_t late() const { return late_; }  // duplicates or reordered frames
  std::uint64_t received() const { return received_; }

 private:
  std::optional<std::uint64_t> expected_;
  std::uint64_t gaps_{0};
  std::uint64_t late_{0};
  std::uint64_t received_{0};
};

}  // namespace matchbook::proto
