#include "matchbook/gateways/exchange.hpp"

#include <spdlog/spdlog.h>

namespace matchbook::gw {

std::optional<ClientId> SecurityState::owner(OrderId id) const {
  auto it = owners.find(id);
  if (it == owners.end()) return std::nullopt;
  return it->second;
}

Order to_order(const proto::NewOrder& msg, ClientId client) {
  Order o;
  o.client_id = client;
  o.security_id = msg.security_id;
  o.side = msg.side;
  o.order_type = msg.order_type;
  o.tif = msg.tif;
  o.price = Price{msg.price};
  o.qty = Qty{msg.qty};
  o.display_qty = Qty{msg.display_qty};
  o.mes = Qty{msg.mes};
  o.stop_price = Price{msg.stop_price};
  if (msg.expiry != 0) o.expiry = Timestamp{Millis{static_cast<std::int64_t>(msg.expiry)}};
  return o;
}

struct Exchange::Worker {
  explicit Worker(SecurityState s) : state(std::move(s)) {}

  SecurityState state;
  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::function<void(SecurityState&)>> tasks;
  bool stopping{false};
  std::thread thread;
};

Exchange::Exchange(std::vector<SecurityRecord> securities, const Clock& clock, ExchangeOptions options)
    : clock_(clock), options_(std::move(options)) {
  for (auto& rec : securities) {
    SecurityId id = rec.config.security_id;
    if (workers_.count(id)) throw std::invalid_argument("duplicate security " + std::to_string(id));
    workers_.emplace(id, std::make_unique<Worker>(SecurityState(std::move(rec), options_.initial_session)));
  }
}

Exchange::~Exchange() { stop(); }

void Exchange::add_listener(OutputListener listener) {
  if (started_) throw std::logic_error("listeners must be added before start");
  listeners_.push_back(std::move(listener));
}

void Exchange::start() {
  if (started_) return;
  started_ = true;
  Timestamp now = clock_.now();
  for (auto& [id, w] : workers_) {
    if (options_.schedule) w->state.scheduler.emplace(*options_.schedule, now);
    w->stopping = false;
    w->thread = std::thread([this, wp = w.get()] { run(*wp); });
  }
}

void Exchange::stop() {
  for (auto& [id, w] : workers_) {
    {
      std::lock_guard lk(w->mu);
      w->stopping = true;
    }
    w->cv.notify_one();
  }
  for (auto& [id, w] : workers_)
    if (w->thread.joinable()) w->thread.join();
  started_ = false;
}

std::vector<SecurityId> Exchange::securities() const {
  std::vector<SecurityId> ids;
  for (const auto& [id, w] : workers_) ids.push_back(id);
  return ids;
}

const SecurityRecord& Exchange::record(SecurityId id) const {
  auto it = workers_.find(id);
  if (it == workers_.end()) throw std::out_of_range("unknown security " + std::to_string(id));
  return it->second->state.record;
}

void Exchange::post(SecurityId security, std::function<void(SecurityState&)> task) {
  auto it = workers_.find(security);
  if (it == workers_.end()) throw std::out_of_range("unknown security " + std::to_string(security));
  Worker& w = *it->second;
  {
    std::lock_guard lk(w.mu);
    w.tasks.push_back(std::move(task));
  }
  w.cv.notify_one();
}

void Exchange::emit(const OutputContext& ctx, const EngineOutput& out, SecurityState& s) {
  for (const auto& e : out.events) {
    if (const auto* t = std::get_if<TradeEvent>(&e))
      s.trades.push_back({t->trade.trade_id, t->trade.price.value, t->trade.qty.value, t->trade.created_at});
  }
  if (out.events.empty() && out.sessions.empty()) return;
  for (const auto& l : listeners_) l(ctx, out, s);
}

void Exchange::submit(SecurityId security, ClientId client, const proto::NewOrder& msg, SteadyTime received) {
  post(security, [this, client, msg, received](SecurityState& s) {
    Order order = to_order(msg, client);
    Timestamp now = clock_.now();
    ++s.submitted;
    auto wall = std::chrono::system_clock::now();
    if (!s.first_order) s.first_order = wall;
    s.last_order = wall;
    EngineOutput out = s.engine.submit(order, now);
    auto elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - received);
    s.latency.record_clamped(elapsed.count());

    bool ok = false;
    for (const auto& e : out.events) {
      if (const auto* a = std::get_if<Ack>(&e)) {
        ok = true;
        s.owners[a->order_id] = client;
        if (has_limit_price(order.order_type))
          s.limit_orders.push_back({s.id(), a->order_id, now, order.price.value, order.qty.value, order.side});
        break;
      }
    }
    ok ? ++s.accepted : ++s.rejected;
    emit({Cause::NewOrder, client, 0, msg}, out, s);
  });
}

void Exchange::cancel(SecurityId security, ClientId client, OrderId order, Side side) {
  post(security, [this, client, order, side](SecurityState& s) {
    EngineOutput out;
    if (s.owner(order) != client) {
      out.events.push_back(Reject{RejectReason::UnknownOrder, order});
    } else {
      out = s.engine.cancel(order, side, clock_.now());
    }
    emit({Cause::Cancel, client, order, std::nullopt}, out, s);
  });
}

std::future<AdminResult> Exchange::admin(SecurityId security, SessionType target) {
  auto promise = std::make_shared<std::promise<AdminResult>>();
  auto fut = promise->get_future();
  post(security, [this, target, promise](SecurityState& s) {
    AdminResult r = s.engine.admin(target, clock_.now());
    if (r.error) {
      spdlog::info("security {}: admin {} refused: {}", s.id(), static_cast<int>(target), to_string(*r.error));
    } else {
      emit({Cause::Admin, std::nullopt, 0, std::nullopt}, r.output, s);
    }
    promise->set_value(std::move(r));
  });
  return fut;
}

void Exchange::drain() {
  std::vector<std::future<void>> done;
  for (const auto& [id, w] : workers_) done.push_back(query(id, [](const SecurityState&) {}));
  for (auto& f : done) f.get();
}

void Exchange::timer(Worker& w) {
  SecurityState& s = w.state;
  Timestamp now = clock_.now();
  if (s.scheduler) {
    for (const Firing& f : s.scheduler->due(now)) {
      EngineOutput out = s.engine.on_schedule(f.session, now);
      emit({Cause::Schedule, std::nullopt, 0, std::nullopt}, out, s);
    }
  }
  EngineOutput out = s.engine.tick(now);
  emit({Cause::Timer, std::nullopt, 0, std::nullopt}, out, s);
}

void Exchange::run(Worker& w) {
  auto next_tick = std::chrono::steady_clock::now() + options_.tick_interval;
  std::unique_lock lk(w.mu);
  for (;;) {
    w.cv.wait_until(lk, next_tick, [&] { return w.stopping || !w.tasks.empty(); });
    if (w.stopping && w.tasks.empty()) return;
    while (!w.tasks.empty()) {
      auto task = std::move(w.tasks.front());
      w.tasks.pop_front();
      lk.unlock();
      try {
        task(w.state);
      } catch (const std::exception& e) {
        spdlog::error("security {}: task failed: {}", w.state.id(), e.what());
      }
      lk.lock();
    }
    if (std::chrono::steady_clock::now() >= next_tick) {
      lk.unlock();
      try {
        timer(w);
      } catch (const std::exception& e) {
        spdlog::error("security {}: timer failed: {}", w.state.id(), e.what());
      }
      lk.lock();
      next_tick = std::chrono::steady_clock::now() + options_.tick_interval;
    }
  }
}

}  // namespace matchbook::gw
