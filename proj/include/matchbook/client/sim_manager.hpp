#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

#include "matchbook/client/client.hpp"
#include "matchbook/gateways/http_api.hpp"
#include "matchbook/hawkes/flow.hpp"

namespace matchbook::client {

inline constexpr double kWarmupHorizon = 30.0;  // seconds of simulated flow

// Runs one Hawkes simulation per client on its own thread, each through a
// ClientHandle against the live gateways.
class SimManager final : public gw::SimControl {
 public:
  SimManager(const gw::ClientRegistry& registry, hawkes::HawkesParams params, hawkes::SimConfig config,
             ClientOptions options = {});
  ~SimManager() override;

  void start(ClientId client, SecurityId security) override;
  void stop(std::optional<ClientId> client) override;
  void warmup(ClientId client, SecurityId security) override;
  nlohmann::json status() const override;
  hawkes::HawkesParams params() const override;
  void set_params(hawkes::HawkesParams p) override;

  // Blocks until the client's run ends; absent if it never started.
  std::optional<hawkes::RunSummary> wait(ClientId client);
  bool running(ClientId client) const;

 private:
  struct Run {
    SecurityId security{0};
    std::atomic<bool> stop{false};
    std::atomic<bool> done{false};
    bool warmup{false};
    hawkes::RunSummary summary;
    std::thread thread;
  };
  void launch(ClientId client, SecurityId security, double horizon, bool warmup);

  const gw::ClientRegistry& registry_;
  ClientOptions options_;
  mutable std::mutex mu_;
  hawkes::HawkesParams params_;
  hawkes::SimConfig config_;
  std::map<ClientId, std::unique_ptr<Run>> runs_;
};

}  // namespace matchbook::client
