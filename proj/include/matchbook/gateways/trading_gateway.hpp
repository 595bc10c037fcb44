#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <vector>

#include "matchbook/gateways/exchange.hpp"
#include "matchbook/gateways/udp_service.hpp"

namespace matchbook::gw {

struct TradingGatewayOptions {
  // Result files are written here when the last logged-in client logs out.
  std::optional<std::filesystem::path> results_dir;
};

// Files written for one security at the end of a session.
struct ResultFiles {
  std::filesystem::path limit_orders;
  std::filesystem::path trades;
  std::filesystem::path snapshot;
  std::filesystem::path latency;
  std::filesystem::path throughput;
};

ResultFiles result_paths(const std::filesystem::path& dir, SecurityId id);

// Authenticates clients, checks the order fields the engine cannot see, and
// routes orders to the matching threads. Engine output comes back through
// listener() and is turned into OrderAck / ExecutionReport frames for the
// owning client only.
class TradingGateway {
 public:
  TradingGateway(ClientRegistry& registry, Exchange& exchange, FrameSender& sender,
                 TradingGatewayOptions options = {});
  ~TradingGateway();

  // Register with the exchange before it starts.
  OutputListener listener();

  // Binds every distinct NG input endpoint in the registry.
  void start();
  void stop();
  std::vector<std::uint16_t> bound_ports() const;

  // Entry point for decoded frames. `from` is used only to answer a comp id
  // the registry does not know.
  void handle(const proto::Frame& frame, SteadyTime received = std::chrono::steady_clock::now(),
              std::optional<proto::SocketAddress> from = {});
  // AdminCommand frame; the header's client_id names the security.
  // Throws std::out_of_range for an unknown security.
  std::future<AdminResult> admin(const proto::Frame& frame);

  bool logged_in(ClientId id) const;
  std::size_t logged_in_count() const;
  std::uint64_t decode_errors() const;
  std::uint64_t results_written() const { return results_written_.load(); }

  // Writes the result files for every security into dir.
  std::vector<ResultFiles> write_results(const std::filesystem::path& dir);

 private:
  void reply(ClientId client, const std::optional<proto::SocketAddress>& from, proto::Body body);
  void on_login(const proto::Frame& f, const proto::Login& m, const std::optional<proto::SocketAddress>& from);
  void on_logout(const proto::Frame& f, const std::optional<proto::SocketAddress>& from);
  void on_output(const OutputContext& ctx, const EngineOutput& out, const SecurityState& s);

  ClientRegistry& registry_;
  Exchange& exchange_;
  FrameSender& sender_;
  TradingGatewayOptions options_;
  mutable std::mutex mu_;
  std::set<ClientId> sessions_;
  std::vector<std::unique_ptr<UdpListener>> listeners_;
  std::atomic<std::uint64_t> results_written_{0};
};

}  // namespace matchbook::gw
