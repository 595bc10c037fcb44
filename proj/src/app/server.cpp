#include "matchbook/app/server.hpp"

#include <spdlog/spdlog.h>

namespace matchbook::app {

namespace fs = std::filesystem;

ServerConfig ServerConfig::from_data_dir(const fs::path& dir, const fs::path& out) {
  ServerConfig c;
  c.clients_path = dir / "ClientData.csv";
  c.clients = gw::ClientRegistry::load(*c.clients_path).all();
  c.securities = gw::load_stocks(dir / "Stock.csv");
  if (fs::exists(dir / "hawkesData.properties")) {
    auto props = Properties::load(dir / "hawkesData.properties");
    c.hawkes = hawkes::params_from_properties(props);
    c.sim = hawkes::SimConfig::from_properties(props);
  }
  c.results_dir = out;
  c.event_log = out / "events.ndjson";
  return c;
}

const Clock& Server::default_clock() {
  static const SystemClock clock;
  return clock;
}

Server::Server(ServerConfig config, const Clock& clock) : config_(std::move(config)) {
  registry_ = std::make_unique<gw::ClientRegistry>(config_.clients, config_.clients_path);
  store_ = std::make_unique<gw::EventStore>(config_.event_log, config_.event_queue);
  gw::ExchangeOptions opts;
  opts.initial_session = config_.initial_session;
  opts.schedule = config_.schedule;
  opts.tick_interval = config_.tick_interval;
  exchange_ = std::make_unique<gw::Exchange>(config_.securities, clock, opts);
  sender_ = std::make_unique<gw::UdpFrameSender>();
  trading_ = std::make_unique<gw::TradingGateway>(*registry_, *exchange_, *sender_,
                                                  gw::TradingGatewayOptions{config_.results_dir});
  mdg_ = std::make_unique<gw::MarketDataGateway>(*registry_, *sender_, store_.get());
  exchange_->add_listener(trading_->listener());
  exchange_->add_listener(mdg_->listener());
  exchange_->add_listener(gw::journal_listener(*store_));
  sim_ = std::make_unique<client::SimManager>(*registry_, config_.hawkes, config_.sim);
  http_ = std::make_unique<gw::HttpApi>(*exchange_, *registry_, *trading_, store_.get(), sim_.get());
}

Server::~Server() { stop(); }

void Server::start() {
  if (running_) return;
  exchange_->start();
  trading_->start();
  mdg_->start();
  if (config_.http_port) bound_http_ = http_->start(config_.http_host, *config_.http_port);
  running_ = true;
}

void Server::stop() {
  if (!running_) return;
  sim_->stop(std::nullopt);
  http_->stop();
  trading_->stop();
  mdg_->stop();
  exchange_->stop();
  store_->flush();
  running_ = false;
}

}  // namespace matchbook::app
