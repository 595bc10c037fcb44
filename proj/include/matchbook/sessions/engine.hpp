#pragma once

#include <deque>
#include <optional>
#include <vector>

#include "matchbook/auction/uncross.hpp"
#include "matchbook/book/order_book.hpp"

namespace matchbook {

inline constexpr auto kVolatilityAuctionDuration = std::chrono::minutes{5};

// Circuit breaker: |last - reference| / reference strictly above the
// tolerance. Evaluated in integer arithmetic where possible so that the
// boundary (exactly the tolerance) is never breached by rounding.
bool volatility_trigger(Price last, Price reference, double tolerance_pct);

struct EngineOutput {
  Events events;
  std::vector<SessionType> sessions;  // session changes in the order they happened

  void append(EngineOutput&& other);
  bool traded() const;
};

enum class AdminError : std::uint8_t {
  SameSession,
  NotAllowed,                 // trigger-only or unschedulable targets
  ReopenRequiresHaltOrPause,
};

std::string_view to_string(AdminError e);

struct AdminResult {
  std::optional<AdminError> error;
  EngineOutput output;
};

struct UncrossRecord {
  Timestamp at;
  SessionType session;  // the call session that ended
  std::optional<Price> price;
  Qty volume;
};

// One security: its book plus the session state machine around it. Every
// call is expected from the security's matching thread.
class SecurityEngine {
 public:
  explicit SecurityEngine(SecurityConfig config = {}, SessionType initial = SessionType::ContinuousTrading);

  EngineOutput submit(Order order, Timestamp now);
  // Cancels are accepted in every session.
  EngineOutput cancel(OrderId id, Side side, Timestamp now);

  // A schedule firing. Manual sessions stay in force until an admin command
  // ends them (a StartOfTrading firing also ends HaltAndClose); firings during
  // a volatility auction take effect when it ends.
  EngineOutput on_schedule(SessionType target, Timestamp now);
  // Operator command.
  AdminResult admin(SessionType target, Timestamp now);
  // Timer work: volatility auction expiry, timed-order expiry, indicative runs.
  EngineOutput tick(Timestamp now);

  const LimitOrderBook& book() const { return book_; }
  LimitOrderBook& book() { return book_; }
  SessionType session() const { return session_; }
  SessionType scheduled_session() const { return scheduled_; }
  std::optional<Price> closing_price() const { return closing_price_; }
  std::optional<Price> static_reference() const { return static_reference_; }
  std::optional<Timestamp> volatility_ends() const { return volatility_ends_; }
  std::optional<auction::ClearingPoint> indicative() const { return indicative_; }
  const std::deque<UncrossRecord>& uncross_log() const { return uncross_log_; }

 private:
  void transition(SessionType target, Timestamp now, EngineOutput& out, bool run_uncross = true);
  void leave(Timestamp now, EngineOutput& out, bool run_uncross);
  void enter(Timestamp now, EngineOutput& out);
  void run_uncross(Timestamp now, std::optional<Price> fixed_price, EngineOutput& out);
  void expire_where(const std::function<bool(const RestingOrder&)>& pred, Location where, Events& out);
  void inject_parked(Timestamp now, EngineOutput& out);
  void store_call(RestingOrder ro);
  void after_continuous_trades(Timestamp now, EngineOutput& out);
  void start_volatility_auction(Timestamp now, EngineOutput& out);
  void maybe_indicative(Timestamp now, bool force);

  LimitOrderBook book_;
  SessionType session_;
  SessionType scheduled_;  // what the schedule last asked for
  std::optional<Price> closing_price_;
  std::optional<Price> static_reference_;
  std::optional<Timestamp> volatility_ends_;
  std::optional<auction::ClearingPoint> indicative_;
  Timestamp last_indicative_{};
  Bbo last_bbo_{};
  std::deque<UncrossRecord> uncross_log_;
};

}  // namespace matchbook
