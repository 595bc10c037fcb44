#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>
#include <unordered_map>
#include <vector>

#include "matchbook/core/clock.hpp"
#include "matchbook/gateways/registry.hpp"
#include "matchbook/perf/csv.hpp"
#include "matchbook/perf/histogram.hpp"
#include "matchbook/protocol/messages.hpp"
#include "matchbook/sessions/engine.hpp"
#include "matchbook/sessions/schedule.hpp"

namespace matchbook::gw {

using SteadyTime = std::chrono::steady_clock::time_point;

// Everything owned by one security's matching thread.
struct SecurityState {
  SecurityRecord record;
  SecurityEngine engine;
  std::unordered_map<OrderId, ClientId> owners;
  std::vector<perf::LimitOrderRow> limit_orders;  // accepted orders carrying a limit price
  std::vector<perf::TradeRow> trades;
  perf::LatencyHistogram latency;
  std::uint64_t submitted{0};
  std::uint64_t accepted{0};
  std::uint64_t rejected{0};
  std::optional<std::chrono::system_clock::time_point> first_order;  // NewOrder arrivals
  std::optional<std::chrono::system_clock::time_point> last_order;
  std::optional<SessionScheduler> scheduler;

  SecurityState(SecurityRecord rec, SessionType initial)
      : record(std::move(rec)), engine(record.config, initial) {}

  SecurityId id() const { return record.config.security_id; }
  std::optional<ClientId> owner(OrderId id) const;
};

enum class Cause : std::uint8_t { NewOrder, Cancel, Admin, Schedule, Timer };

// What produced an EngineOutput.
struct OutputContext {
  Cause cause{Cause::Timer};
  std::optional<ClientId> requester;
  OrderId cancel_target{0};  // Cancel only
  std::optional<proto::NewOrder> order;  // NewOrder only
};

// Called on the matching thread after every non-empty output, with the state
// as it stands once the output has been applied.
using OutputListener = std::function<void(const OutputContext&, const EngineOutput&, const SecurityState&)>;

struct ExchangeOptions {
  SessionType initial_session{SessionType::ContinuousTrading};
  std::optional<SessionSchedule> schedule;
  Millis tick_interval{100};
};

// Maps a decoded NewOrder to an engine order; admit() assigns id and time.
Order to_order(const proto::NewOrder& msg, ClientId client);

// One matching thread per security. All engine work for a security runs on
// its thread in submission order, so a query() issued after a submit() sees
// its effects.
class Exchange {
 public:
  Exchange(std::vector<SecurityRecord> securities, const Clock& clock, ExchangeOptions options = {});
  ~Exchange();
  Exchange(const Exchange&) = delete;
  Exchange& operator=(const Exchange&) = delete;

  // Listeners must be added before start().
  void add_listener(OutputListener listener);
  void start();
  void stop();

  bool has_security(SecurityId id) const { return workers_.count(id) != 0; }
  std::vector<SecurityId> securities() const;
  const SecurityRecord& record(SecurityId id) const;

  // Asynchronous; the security must exist.
  void submit(SecurityId security, ClientId client, const proto::NewOrder& msg, SteadyTime received);
  // Only the owner may cancel; anyone else gets UnknownOrder.
  void cancel(SecurityId security, ClientId client, OrderId order, Side side);
  std::future<AdminResult> admin(SecurityId security, SessionType target);

  // Runs f on the security's matching thread.
  template <class F>
  auto query(SecurityId security, F f) -> std::future<decltype(f(std::declval<const SecurityState&>()))> {
    using R = decltype(f(std::declval<const SecurityState&>()));
    auto task = std::make_shared<std::packaged_task<R(const SecurityState&)>>(std::move(f));
    auto fut = task->get_future();
    post(security, [task](SecurityState& s) { (*task)(s); });
    return fut;
  }

  // Blocks until every task queued so far on every security has run.
  void drain();

 private:
  struct Worker;
  void post(SecurityId security, std::function<void(SecurityState&)> task);
  void emit(const OutputContext& ctx, const EngineOutput& out, SecurityState& s);
  void run(Worker& w);
  void timer(Worker& w);

  const Clock& clock_;
  ExchangeOptions options_;
  std::vector<OutputListener> listeners_;
  std::map<SecurityId, std::unique_ptr<Worker>> workers_;
  bool started_{false};
};

}  // namespace matchbook::gw
