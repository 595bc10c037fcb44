#include "matchbook/gateways/udp_service.hpp"

#include <spdlog/spdlog.h>

namespace matchbook::gw {

UdpFrameSender::UdpFrameSender() : socket_(proto::UdpSocket::open()) {}

void UdpFrameSender::send(const proto::Endpoint& to, std::uint32_t client_id, proto::Body body) {
  std::lock_guard lk(mu_);
  try {
    std::string key = to.host + ":" + std::to_string(to.port);
    auto it = destinations_.find(key);
    if (it == destinations_.end()) it = destinations_.emplace(key, Destination{proto::SocketAddress::resolve(to)}).first;
    proto::Frame frame{client_id, it->second.next_seq++, std::move(body)};
    socket_.send_to(it->second.addr, proto::encode(frame));
    ++sent_;
  } catch (const std::exception& e) {
    ++failures_;
    spdlog::warn("send to {} failed: {}", to.url(), e.what());
  }
}

UdpListener::UdpListener(const proto::Endpoint& local, Handler handler)
    : socket_(proto::UdpSocket::bind(local)), handler_(std::move(handler)), port_(socket_.local_port()) {
  thread_ = std::thread([this] {
    while (running_.load()) {
      auto dg = socket_.receive(Millis{200});
      if (!dg) continue;
      ++received_;
      auto res = proto::decode(dg->bytes);
      if (!res) {
        ++decode_errors_;
        spdlog::debug("port {}: dropped datagram: {}", port_, proto::to_string(res.error));
        continue;
      }
      try {
        handler_(*res.frame, dg->from);
      } catch (const std::exception& e) {
        spdlog::error("port {}: handler failed: {}", port_, e.what());
      }
    }
  });
}

UdpListener::~UdpListener() { stop(); }

void UdpListener::stop() {
  running_.store(false);
  socket_.close();
  if (thread_.joinable()) thread_.join();
}

}  // namespace matchbook::gw
