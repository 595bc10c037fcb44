#pragma once

#include <filesystem>
#include <memory>
#include <optional>

#include "matchbook/client/sim_manager.hpp"
#include "matchbook/gateways/event_store.hpp"
#include "matchbook/gateways/exchange.hpp"
#include "matchbook/gateways/http_api.hpp"
#include "matchbook/gateways/market_data.hpp"
#include "matchbook/gateways/trading_gateway.hpp"

namespace matchbook::app {

struct ServerConfig {
  std::vector<gw::ClientRecord> clients;
  std::optional<std::filesystem::path> clients_path;  // CRUD writes back here
  std::vector<gw::SecurityRecord> securities;
  std::optional<SessionSchedule> schedule;
  SessionType initial_session{SessionType::ContinuousTrading};
  std::optional<std::filesystem::path> results_dir;
  std::filesystem::path event_log{"events.ndjson"};
  std::size_t event_queue{1 << 16};
  std::optional<int> http_port;  // no console when absent
  std::string http_host{"127.0.0.1"};
  hawkes::HawkesParams hawkes = hawkes::HawkesParams::symmetric(8, 0.1, 0.2, 0.01, 1.0);
  hawkes::SimConfig sim;
  Millis tick_interval{100};

  // ClientData.csv, Stock.csv, and the optional hawkesData.properties and
  // tradingSessionsCron.properties from one directory. Results and the event
  // log go to `out`.
  static ServerConfig from_data_dir(const std::filesystem::path& dir, const std::filesystem::path& out);
};

// The whole venue in one process: matching threads, both gateways, the event
// store, the simulator and the console API.
class Server {
 public:
  explicit Server(ServerConfig config, const Clock& clock = default_clock());
  ~Server();

  void start();
  void stop();

  gw::ClientRegistry& registry() { return *registry_; }
  gw::Exchange& exchange() { return *exchange_; }
  gw::TradingGateway& trading() { return *trading_; }
  gw::MarketDataGateway& market_data() { return *mdg_; }
  gw::EventStore& events() { return *store_; }
  client::SimManager& simulator() { return *sim_; }
  std::optional<int> http_port() const { return bound_http_; }
  const ServerConfig& config() const { return config_; }

 private:
  static const Clock& default_clock();

  ServerConfig config_;
  std::unique_ptr<gw::ClientRegistry> registry_;
  std::unique_ptr<gw::EventStore> store_;
  std::unique_ptr<gw::Exchange> exchange_;
  std::unique_ptr<gw::UdpFrameSender> sender_;
  std::unique_ptr<gw::TradingGateway> trading_;
  std::unique_ptr<gw::MarketDataGateway> mdg_;
  std::unique_ptr<client::SimManager> sim_;
  std::unique_ptr<gw::HttpApi> http_;
  std::optional<int> bound_http_;
  bool running_{false};
};

}  // namespace matchbook::app
