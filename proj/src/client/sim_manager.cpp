#include "matchbook/client/sim_manager.hpp"

#include <spdlog/spdlog.h>

#include "matchbook/perf/throughput.hpp"

namespace matchbook::client {

SimManager::SimManager(const gw::ClientRegistry& registry, hawkes::HawkesParams params, hawkes::SimConfig config,
                       ClientOptions options)
    : registry_(registry), options_(options), params_(std::move(params)), config_(config) {
  params_.validate();
  config_.validate();
}

SimManager::~SimManager() { stop(std::nullopt); }

void SimManager::launch(ClientId client, SecurityId security, double horizon, bool warmup) {
  auto rec = registry_.find(client);
  if (!rec) throw std::invalid_argument("unknown client " + std::to_string(client));
  if (rec->security_id != security)
    throw std::invalid_argument("client " + std::to_string(client) + " trades security " +
                                std::to_string(rec->security_id));
  std::lock_guard lk(mu_);
  auto it = runs_.find(client);
  if (it != runs_.end()) {
    if (!it->second->done) throw gw::SimError("simulation already running for client " + std::to_string(client));
    if (it->second->thread.joinable()) it->second->thread.join();
    runs_.erase(it);
  }
  auto run = std::make_unique<Run>();
  run->security = security;
  run->warmup = warmup;
  hawkes::SimConfig cfg = config_;
  cfg.horizon = horizon;
  Run* r = run.get();
  r->thread = std::thread([this, r, record = *rec, params = params_, cfg] {
    try {
      ClientHandle handle(record, options_);
      auto status = handle.start();
      if (status != proto::LoginStatus::Ok) throw ClientError(std::string("login failed: ") + std::string(proto::to_string(status)));
      HandleFlowClient flow(handle);
      r->summary = hawkes::run_simulation(flow, params, cfg, &r->stop);
      handle.end();
    } catch (const std::exception& e) {
      r->summary.aborted = true;
      r->summary.error = e.what();
      spdlog::error("simulation for client {} failed: {}", record.comp_id, e.what());
    }
    r->done = true;
  });
  runs_.emplace(client, std::move(run));
}

void SimManager::start(ClientId client, SecurityId security) {
  double horizon;
  {
    std::lock_guard lk(mu_);
    horizon = config_.horizon;
  }
  launch(client, security, horizon, false);
}

void SimManager::warmup(ClientId client, SecurityId security) { launch(client, security, kWarmupHorizon, true); }

void SimManager::stop(std::optional<ClientId> client) {
  std::vector<Run*> targets;
  {
    std::lock_guard lk(mu_);
    for (auto& [id, run] : runs_)
      if (!client || id == *client) targets.push_back(run.get());
  }
  for (Run* r : targets) r->stop = true;
  for (Run* r : targets)
    if (r->thread.joinable()) r->thread.join();
}

std::optional<hawkes::RunSummary> SimManager::wait(ClientId client) {
  Run* r = nullptr;
  {
    std::lock_guard lk(mu_);
    auto it = runs_.find(client);
    if (it == runs_.end()) return std::nullopt;
    r = it->second.get();
  }
  if (r->thread.joinable()) r->thread.join();
  return r->summary;
}

bool SimManager::running(ClientId client) const {
  std::lock_guard lk(mu_);
  auto it = runs_.find(client);
  return it != runs_.end() && !it->second->done;
}

nlohmann::json SimManager::status() const {
  std::lock_guard lk(mu_);
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [id, r] : runs_) {
    nlohmann::json j = {{"clientId", id}, {"securityId", r->security}, {"warmup", r->warmup}};
    if (!r->done) {
      j["state"] = "running";
    } else {
      const auto& s = r->summary;
      j["state"] = s.aborted ? "aborted" : "finished";
      j["events"] = s.events;
      j["submitted"] = s.submitted;
      j["accepted"] = s.accepted;
      j["rejected"] = s.rejected;
      j["degraded"] = s.degraded;
      j["updateTimeouts"] = s.update_timeouts;
      if (s.end > s.start && s.submitted > 0) j["throughput"] = perf::throughput(s.submitted, s.end - s.start);
      if (!s.error.empty()) j["error"] = s.error;
    }
    arr.push_back(j);
  }
  return arr;
}

hawkes::HawkesParams SimManager::params() const {
  std::lock_guard lk(mu_);
  return params_;
}

void SimManager::set_params(hawkes::HawkesParams p) {
  p.validate();
  if (p.dimension() != hawkes::kEventTypes) throw hawkes::HawkesError("the order flow needs 8 components");
  std::lock_guard lk(mu_);
  for (const auto& [id, r] : runs_)
    if (!r->done) throw gw::SimError("cannot change parameters while a simulation runs");
  params_ = std::move(p);
}

}  // namespace matchbook::client
