#pragma once

#include <atomic>
#include <memory>
#include <mutex>
#include <set>
#include <vector>

#include "json.hpp"
#include "matchbook/gateways/event_store.hpp"
#include "matchbook/gateways/exchange.hpp"
#include "matchbook/gateways/udp_service.hpp"

namespace matchbook::gw {

// Level-1 view of a security as it stands on its matching thread.
proto::MarketDataUpdate make_update(const SecurityState& s);

nlohmann::json to_json(const MatchEvent& e);
nlohmann::json to_json(const proto::MarketDataUpdate& u);
nlohmann::json to_json(const BookSnapshot& s);

// Whether an output changes what market data shows. Rejects alone do not.
bool changes_market(const EngineOutput& out);

// Exchange listener that journals order, trade and session records.
OutputListener journal_listener(EventStore& store);

// Clients subscribe by sending Login to their MDG input and leave with
// Logout. Updates go to the subscribers registered for that security.
class MarketDataGateway {
 public:
  MarketDataGateway(ClientRegistry& registry, FrameSender& sender, EventStore* store = nullptr);
  ~MarketDataGateway();

  OutputListener listener();

  // Binds every distinct MDG input endpoint in the registry.
  void start();
  void stop();
  std::vector<std::uint16_t> bound_ports() const;

  void handle(const proto::Frame& frame);

  // One datagram per subscriber of u.security_id, plus one journal record.
  void publish(const proto::MarketDataUpdate& u, Timestamp at);
  void publish_session(SecurityId security, SessionType session);

  bool subscribed(ClientId id) const;
  std::size_t subscriber_count(SecurityId security) const;
  std::uint64_t published() const { return published_.load(); }

 private:
  ClientRegistry& registry_;
  FrameSender& sender_;
  EventStore* store_;
  mutable std::mutex mu_;
  std::set<ClientId> subscribers_;
  std::vector<std::unique_ptr<UdpListener>> listeners_;
  std::atomic<std::uint64_t> published_{0};
};

}  // namespace matchbook::gw
