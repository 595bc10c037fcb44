#pragma once

#include <mutex>
#include <vector>

#include "matchbook/gateways/registry.hpp"
#include "matchbook/gateways/udp_service.hpp"

namespace matchbook::testing {

// Ephemeral port that was free a moment ago.
inline std::uint16_t free_udp_port() {
  auto s = proto::UdpSocket::bind({"127.0.0.1", 0, 0});
  return s.local_port();
}

inline gw::ClientRecord loopback_client(ClientId id, SecurityId security, std::uint16_t ng_in, std::uint16_t md_in,
                                        std::string password = "pw") {
  auto ep = [](std::uint16_t port, std::int32_t stream) { return proto::Endpoint{"127.0.0.1", port, stream}; };
  return {id, std::move(password), ep(ng_in, 10), ep(free_udp_port(), 10), ep(md_in, 10), ep(free_udp_port(), 10),
          security};
}

struct Sent {
  proto::Endpoint to;
  std::uint32_t client_id;
  proto::Body body;
};

// Captures gateway output instead of sending it.
class RecordingSender final : public gw::FrameSender {
 public:
  void send(const proto::Endpoint& to, std::uint32_t client_id, proto::Body body) override {
    std::lock_guard lk(mu);
    sent.push_back({to, client_id, std::move(body)});
  }

  std::vector<Sent> take() {
    std::lock_guard lk(mu);
    return std::exchange(sent, {});
  }

  template <class M>
  std::vector<M> of(const std::vector<Sent>& v, std::optional<ClientId> client = std::nullopt) {
    std::vector<M> out;
    for (const auto& s : v)
      if (auto* m = std::get_if<M>(&s.body); m && (!client || s.client_id == *client)) out.push_back(*m);
    return out;
  }

  std::mutex mu;
  std::vector<Sent> sent;
};

}  // namespace matchbook::testing
