#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>

#include "json.hpp"
#include "matchbook/gateways/event_store.hpp"
#include "matchbook/gateways/exchange.hpp"
#include "matchbook/gateways/trading_gateway.hpp"
#include "matchbook/hawkes/process.hpp"

namespace httplib {
class Server;
}

namespace matchbook::gw {

inline constexpr int kDefaultConsolePort = 8080;

// A request the simulator cannot honour in its current state (HTTP 409).
class SimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Simulator hooks behind /sim and /hawkes. Throw std::invalid_argument for
// bad input and SimError for a conflicting state.
class SimControl {
 public:
  virtual ~SimControl() = default;
  virtual void start(ClientId client, SecurityId security) = 0;
  // All runs when client is empty.
  virtual void stop(std::optional<ClientId> client) = 0;
  virtual void warmup(ClientId client, SecurityId security) = 0;
  virtual nlohmann::json status() const = 0;
  virtual hawkes::HawkesParams params() const = 0;
  virtual void set_params(hawkes::HawkesParams p) = 0;
};

nlohmann::json to_json(const ClientRecord& c, bool with_password);
// Throws std::invalid_argument on missing or malformed fields.
ClientRecord client_from_json(const nlohmann::json& j);
nlohmann::json to_json(const hawkes::HawkesParams& p);
// Accepts the shapes the properties file does: scalar, d values, or d*d.
// Throws hawkes::HawkesError, including for non-stationary parameters.
hawkes::HawkesParams hawkes_from_json(const nlohmann::json& j);

struct HttpResponse {
  int status{200};
  std::string body;
  std::string content_type{"application/json"};
};

// JSON over HTTP for the console. The handlers below are what the routes
// call, so they can be exercised without a socket.
class HttpApi {
 public:
  HttpApi(Exchange& exchange, ClientRegistry& registry, TradingGateway& gateway, EventStore* store = nullptr,
          SimControl* sim = nullptr);
  ~HttpApi();

  // Serves on a background thread; port 0 picks one. Returns the bound port.
  int start(const std::string& host = "127.0.0.1", int port = kDefaultConsolePort);
  void stop();

  HttpResponse get_securities();
  HttpResponse get_lob(const std::string& id, const std::string& depth);
  HttpResponse get_trades(const std::string& id, bool csv);
  HttpResponse get_orders(const std::string& id, bool csv);
  HttpResponse get_clients();
  HttpResponse get_status();
  HttpResponse get_hawkes();
  HttpResponse post_session(const std::string& id, const std::string& body);
  HttpResponse post_sim(const std::string& action, const std::string& body);
  HttpResponse post_clients(const std::string& body);
  HttpResponse post_hawkes(const std::string& body);

 private:
  std::optional<SecurityId> security_of(const std::string& id) const;

  Exchange& exchange_;
  ClientRegistry& registry_;
  TradingGateway& gateway_;
  EventStore* store_;
  SimControl* sim_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace matchbook::gw
