#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <thread>

#include "matchbook/protocol/codec.hpp"
#include "matchbook/protocol/transport.hpp"

namespace matchbook::gw {

// Outbound side of a gateway. Each destination gets its own sequence
// numbering starting at 1. Send failures are logged and counted, never thrown,
// so one unreachable client cannot stall the others.
class FrameSender {
 public:
  virtual ~FrameSender() = default;
  virtual void send(const proto::Endpoint& to, std::uint32_t client_id, proto::Body body) = 0;
};

class UdpFrameSender final : public FrameSender {
 public:
  UdpFrameSender();
  void send(const proto::Endpoint& to, std::uint32_t client_id, proto::Body body) override;
  std::uint64_t sent() const { return sent_.load(); }
  std::uint64_t failures() const { return failures_.load(); }

 private:
  struct Destination {
    proto::SocketAddress addr;
    std::uint64_t next_seq{1};
  };
  std::mutex mu_;
  proto::UdpSocket socket_;
  std::map<std::string, Destination> destinations_;
  std::atomic<std::uint64_t> sent_{0};
  std::atomic<std::uint64_t> failures_{0};
};

// A bound socket with a receive thread that decodes every datagram and hands
// the frame to the handler. Undecodable datagrams are counted and dropped.
class UdpListener {
 public:
  using Handler = std::function<void(const proto::Frame&, const proto::SocketAddress& from)>;

  UdpListener(const proto::Endpoint& local, Handler handler);
  ~UdpListener();
  UdpListener(const UdpListener&) = delete;
  UdpListener& operator=(const UdpListener&) = delete;

  void stop();
  std::uint16_t port() const { return port_; }
  std::uint64_t received() const { return received_.load(); }
  std::uint64_t decode_errors() const { return decode_errors_.load(); }

 private:
  proto::UdpSocket socket_;
  Handler handler_;
  std::uint16_t port_;
  std::atomic<bool> running_{true};
  std::atomic<std::uint64_t> received_{0};
  std::atomic<std::uint64_t> decode_errors_{0};
  std::thread thread_;
};

}  // namespace matchbook::gw
