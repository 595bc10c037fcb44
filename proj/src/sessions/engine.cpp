#include "matchbook/sessions/engine.hpp"

#include <cmath>
#include <set>

#include <spdlog/spdlog.h>

#include "matchbook/core/rules.hpp"

namespace matchbook {
namespace {

constexpr std::size_t kUncrossLogLimit = 256;

bool injects_into(const Order& o, SessionType session) {
  switch (o.tif) {
    case TimeInForce::GFA:
      return is_auction_call(session);
    case TimeInForce::GFX:
      return session == SessionType::IntradayAuctionCall;
    case TimeInForce::ATC:
      return session == SessionType::ClosingAuctionCall;
    case TimeInForce::CPX:
      return session == SessionType::ClosingPriceCross;
    case TimeInForce::OPG:
      return session == SessionType::OpeningAuctionCall;
    default: {
      const auto d = order_disposition(session, o.order_type, o.tif);
      return d == Disposition::Accepted || d == Disposition::AcceptedExpireIfUnfilled;
    }
  }
}

// Sessions where new orders accumulate without matching.
bool accumulates(SessionType s) {
  return is_auction_call(s) || s == SessionType::Pause || s == SessionType::ClosingPriceCross;
}

bool defers_gtt(SessionType s) { return is_auction_call(s) || s == SessionType::ClosingPriceCross; }

auction::AuctionOrder to_auction(const RestingOrder& ro, bool market) {
  return auction::AuctionOrder{ro.order.order_id, ro.order.side, market, market ? Price{0} : ro.order.price,
                               ro.leaves, ro.order.submitted_at};
}

}  // namespace

bool volatility_trigger(Price last, Price reference, double tolerance_pct) {
  if (reference.value <= 0) return false;
  const std::int64_t deviation = std::llabs(last.value - reference.value);
  const double whole = std::floor(tolerance_pct);
  if (whole == tolerance_pct && std::abs(whole) < 1e9) {
    return deviation * 100 > static_cast<std::int64_t>(whole) * reference.value;
  }
  return static_cast<long double>(deviation) * 100 > static_cast<long double>(tolerance_pct) * reference.value;
}

void EngineOutput::append(EngineOutput&& other) {
  events.insert(events.end(), std::make_move_iterator(other.events.begin()),
                std::make_move_iterator(other.events.end()));
  sessions.insert(sessions.end(), other.sessions.begin(), other.sessions.end());
}

bool EngineOutput::traded() const {
  for (const auto& e : events) {
    if (std::holds_alternative<TradeEvent>(e)) return true;
  }
  return false;
}

std::string_view to_string(AdminError e) {
  switch (e) {
    case AdminError::SameSession:
      return "SameSession";
    case AdminError::NotAllowed:
      return "NotAllowed";
    case AdminError::ReopenRequiresHaltOrPause:
      return "ReopenRequiresHaltOrPause";
  }
  return "?";
}

SecurityEngine::SecurityEngine(SecurityConfig config, SessionType initial)
    : book_(config), session_(initial), scheduled_(initial), static_reference_(config.reference_price) {}

EngineOutput SecurityEngine::submit(Order order, Timestamp now) {
  EngineOutput out;
  if (validate_tif_order_combo(order.order_type, order.tif) == Disposition::Rejected) {
    out.events.emplace_back(Reject{RejectReason::InvalidCombo, 0});
    return out;
  }
  const Disposition d = order_disposition(session_, order.order_type, order.tif);
  if (d == Disposition::Rejected) {
    out.events.emplace_back(Reject{RejectReason::SessionRejected, 0});
    return out;
  }
  if (auto rej = book_.admit(order, now)) {
    out.events.emplace_back(*rej);
    return out;
  }
  out.events.emplace_back(Ack{order.order_id});
  RestingOrder ro{order, order.qty};

  if (is_stop(order.order_type)) {
    if (session_ == SessionType::ContinuousTrading) {
      book_.dispatch_continuous(std::move(ro), now, out.events);
      after_continuous_trades(now, out);
    } else {
      book_.add_stop(std::move(ro));
    }
    return out;
  }
  if (d == Disposition::AcceptedParked) {
    book_.park(std::move(ro));
    return out;
  }
  if (session_ == SessionType::ContinuousTrading) {
    book_.dispatch_continuous(std::move(ro), now, out.events);
    after_continuous_trades(now, out);
  } else {
    store_call(std::move(ro));
    maybe_indicative(now, false);
  }
  return out;
}

EngineOutput SecurityEngine::cancel(OrderId id, Side side, Timestamp now) {
  EngineOutput out;
  out.events = book_.cancel(id, side);
  if (accumulates(session_)) maybe_indicative(now, false);
  return out;
}

EngineOutput SecurityEngine::on_schedule(SessionType target, Timestamp now) {
  EngineOutput out;
  if (target == SessionType::VolatilityAuctionCall) {
    // A scheduled entry acts as a trigger and only bites during continuous trading.
    if (session_ == SessionType::ContinuousTrading) start_volatility_auction(now, out);
    return out;
  }
  scheduled_ = target;
  if (session_ == SessionType::VolatilityAuctionCall) return out;
  if (is_manual_session(session_)) {
    const bool reopen_day = session_ == SessionType::HaltAndClose && target == SessionType::StartOfTrading;
    if (!reopen_day) return out;
  }
  if (target == session_) return out;
  transition(target, now, out);
  return out;
}

AdminResult SecurityEngine::admin(SessionType target, Timestamp now) {
  AdminResult r;
  if (target == SessionType::VolatilityAuctionCall || target == SessionType::TradeReporting) {
    r.error = AdminError::NotAllowed;
    return r;
  }
  if (target == session_) {
    r.error = AdminError::SameSession;
    return r;
  }
  if (target == SessionType::ReOpeningAuctionCall && session_ != SessionType::Halt &&
      session_ != SessionType::Pause) {
    r.error = AdminError::ReopenRequiresHaltOrPause;
    return r;
  }
  // Halting or pausing an auction suspends it; the uncross happens on resumption.
  const bool suspend = target == SessionType::Halt || target == SessionType::HaltAndClose ||
                       target == SessionType::Pause;
  spdlog::info("security {}: admin {} -> {}", book_.security_id(), to_string(session_), to_string(target));
  transition(target, now, r.output, !suspend);
  return r;
}

EngineOutput SecurityEngine::tick(Timestamp now) {
  EngineOutput out;
  if (session_ == SessionType::VolatilityAuctionCall && volatility_ends_ && now >= *volatility_ends_) {
    const SessionType resume = scheduled_ == SessionType::VolatilityAuctionCall ? SessionType::ContinuousTrading
                                                                                 : scheduled_;
    transition(resume, now, out);
  }
  SweepOptions opts;
  opts.defer_gtt = defers_gtt(session_);
  auto expired = book_.expire_sweep(now, opts);
  out.events.insert(out.events.end(), expired.begin(), expired.end());
  if (is_auction_call(session_)) maybe_indicative(now, false);
  return out;
}

void SecurityEngine::transition(SessionType target, Timestamp now, EngineOutput& out, bool run_uncross) {
  spdlog::debug("security {}: {} -> {}", book_.security_id(), to_string(session_), to_string(target));
  leave(now, out, run_uncross);
  session_ = target;
  out.sessions.push_back(target);
  enter(now, out);
}

void SecurityEngine::leave(Timestamp now, EngineOutput& out, bool uncross) {
  const SessionType from = session_;
  if (from == SessionType::VolatilityAuctionCall) volatility_ends_.reset();
  if (!uncross) return;

  if (is_auction_call(from)) {
    run_uncross(now, std::nullopt, out);
    // Session-bound remainders: GFA waits for the next auction, the rest expire.
    std::vector<RestingOrder> gfa;
    for (const Location where : {Location::Visible, Location::Hidden, Location::CallMarket}) {
      for (const auto& ro : book_.orders(where)) {
        if (ro.order.tif == TimeInForce::GFA) gfa.push_back(ro);
      }
    }
    for (auto& ro : gfa) {
      book_.remove(ro.order.order_id);
      book_.park(std::move(ro));
    }
    expire_where([](const RestingOrder&) { return true; }, Location::CallMarket, out.events);
    const auto session_bound = [](const RestingOrder& ro) {
      return ro.order.tif == TimeInForce::OPG || ro.order.tif == TimeInForce::GFX ||
             ro.order.tif == TimeInForce::ATC;
    };
    expire_where(session_bound, Location::Visible, out.events);
    expire_where(session_bound, Location::Hidden, out.events);
    auto expired = book_.expire_sweep(now);  // deferred GTT expiries
    out.events.insert(out.events.end(), expired.begin(), expired.end());
  } else if (from == SessionType::ClosingPriceCross) {
    if (closing_price_) run_uncross(now, closing_price_, out);
    expire_where([](const RestingOrder&) { return true; }, Location::CallMarket, out.events);
    const auto cpx = [](const RestingOrder& ro) { return ro.order.tif == TimeInForce::CPX; };
    expire_where(cpx, Location::Visible, out.events);
    expire_where(cpx, Location::Hidden, out.events);
    auto expired = book_.expire_sweep(now);
    out.events.insert(out.events.end(), expired.begin(), expired.end());
  }
}

void SecurityEngine::enter(Timestamp now, EngineOutput& out) {
  const SessionType s = session_;
  switch (s) {
    case SessionType::StartOfTrading: {
      SweepOptions opts;
      opts.start_of_day = true;
      auto expired = book_.expire_sweep(now, opts);
      out.events.insert(out.events.end(), expired.begin(), expired.end());
      closing_price_.reset();
      break;
    }
    case SessionType::ClosingPricePublication:
    case SessionType::HaltAndClose:
      closing_price_ = book_.last_traded_price() ? book_.last_traded_price() : book_.config().reference_price;
      break;
    case SessionType::PostClose: {
      SweepOptions opts;
      opts.end_of_day = true;
      auto expired = book_.expire_sweep(now, opts);
      out.events.insert(out.events.end(), expired.begin(), expired.end());
      break;
    }
    case SessionType::ContinuousTrading:
      if (book_.crossed() || !book_.orders(Location::CallMarket).empty()) {
        run_uncross(now, std::nullopt, out);
        expire_where([](const RestingOrder&) { return true; }, Location::CallMarket, out.events);
      }
      inject_parked(now, out);
      book_.elect_stops(now, out.events);
      if (out.traded()) after_continuous_trades(now, out);
      return;
    default:
      break;
  }
  if (accumulates(s)) {
    inject_parked(now, out);
    indicative_.reset();
    maybe_indicative(now, true);
  }
}

void SecurityEngine::run_uncross(Timestamp now, std::optional<Price> fixed_price, EngineOutput& out) {
  std::vector<auction::AuctionOrder> visible;
  for (const auto& ro : book_.orders(Location::Visible)) visible.push_back(to_auction(ro, false));
  for (const auto& ro : book_.orders(Location::CallMarket)) visible.push_back(to_auction(ro, true));
  std::vector<auction::HiddenAuctionOrder> hidden;
  for (const auto& ro : book_.orders(Location::Hidden)) {
    hidden.push_back(auction::HiddenAuctionOrder{to_auction(ro, false), ro.order.mes});
  }
  const Bbo bbo = book_.bbo();
  const auto ref = auction::choose_reference(book_.last_traded_price(), bbo.bid, bbo.ask,
                                             book_.config().reference_price);
  const auto result = auction::uncross_with_hidden(visible, hidden, ref, now, fixed_price);

  std::set<OrderId> touched;
  for (std::size_t i = 0; i < result.executions.size(); ++i) {
    const auto& ex = result.executions[i];
    const auto& trade = result.trades[i];
    const Qty buy_leaves = book_.fill(ex.buy_order_id, ex.qty);
    const Qty sell_leaves = book_.fill(ex.sell_order_id, ex.qty);
    book_.record_trade(trade.price, trade.qty);
    out.events.emplace_back(TradeEvent{trade, ex.buy_order_id, ex.sell_order_id, buy_leaves, sell_leaves});
    touched.insert(ex.buy_order_id);
    touched.insert(ex.sell_order_id);
  }
  for (const auto& h : hidden) {
    const OrderId id = h.order.id;
    if (!touched.count(id)) continue;
    const RestingOrder* ro = book_.find(id);
    if (ro && ro->leaves < h.mes) {
      const Qty leaves = ro->leaves;
      book_.remove(id);
      out.events.emplace_back(Expire{id, leaves});
    }
  }
  if (result.clearing_price) {
    static_reference_ = result.clearing_price;
  } else if (book_.last_traded_price()) {
    static_reference_ = book_.last_traded_price();
  }
  uncross_log_.push_back(UncrossRecord{now, session_, result.clearing_price, result.executed_volume});
  if (uncross_log_.size() > kUncrossLogLimit) uncross_log_.pop_front();
  spdlog::debug("security {}: uncross {} price {} volume {}", book_.security_id(), to_string(session_),
                result.clearing_price ? result.clearing_price->value : 0, result.executed_volume.value);
}

void SecurityEngine::expire_where(const std::function<bool(const RestingOrder&)>& pred, Location where,
                                  Events& out) {
  std::vector<std::pair<OrderId, Qty>> doomed;
  for (const auto& ro : book_.orders(where)) {
    if (pred(ro)) doomed.emplace_back(ro.order.order_id, ro.leaves);
  }
  std::sort(doomed.begin(), doomed.end());
  for (const auto& [id, leaves] : doomed) {
    book_.remove(id);
    out.emplace_back(Expire{id, leaves});
  }
}

void SecurityEngine::inject_parked(Timestamp now, EngineOutput& out) {
  const SessionType s = session_;
  auto injected = book_.take_parked([s](const RestingOrder& ro) { return injects_into(ro.order, s); });
  for (auto& ro : injected) {
    if (s == SessionType::ContinuousTrading) {
      book_.dispatch_continuous(std::move(ro), now, out.events);
    } else {
      store_call(std::move(ro));
    }
  }
}

void SecurityEngine::store_call(RestingOrder ro) {
  if (ro.order.order_type == OrderType::Market) {
    book_.add_call_market(std::move(ro));
  } else {
    book_.rest(std::move(ro));
  }
}

void SecurityEngine::after_continuous_trades(Timestamp now, EngineOutput& out) {
  const auto last = book_.last_traded_price();
  if (!last || session_ != SessionType::ContinuousTrading) return;
  if (!static_reference_) {
    // No auction yet and no configured reference: the first trade anchors it.
    static_reference_ = last;
    return;
  }
  if (volatility_trigger(*last, *static_reference_, book_.config().circuit_breaker_pct)) {
    spdlog::info("security {}: circuit breaker at {} (reference {})", book_.security_id(), last->value,
                 static_reference_->value);
    start_volatility_auction(now, out);
  }
}

void SecurityEngine::start_volatility_auction(Timestamp now, EngineOutput& out) {
  if (scheduled_ == SessionType::VolatilityAuctionCall) scheduled_ = SessionType::ContinuousTrading;
  transition(SessionType::VolatilityAuctionCall, now, out);
  volatility_ends_ = now + kVolatilityAuctionDuration;
}

void SecurityEngine::maybe_indicative(Timestamp now, bool force) {
  if (!is_auction_call(session_)) return;
  const Bbo bbo = book_.bbo();
  if (!force && !auction::should_run(now, last_indicative_, bbo != last_bbo_)) return;
  last_bbo_ = bbo;
  last_indicative_ = now;
  std::vector<auction::AuctionOrder> orders;
  for (const auto& ro : book_.orders(Location::Visible)) orders.push_back(to_auction(ro, false));
  for (const auto& ro : book_.orders(Location::CallMarket)) orders.push_back(to_auction(ro, true));
  const auto ref = auction::choose_reference(book_.last_traded_price(), bbo.bid, bbo.ask,
                                             book_.config().reference_price);
  indicative_ = auction::find_clearing_price(orders, ref);
  if (indicative_) {
    spdlog::debug("security {}: indicative {} x {}", book_.security_id(), indicative_->price.value,
                  indicative_->volume.value);
  }
}

}  // namespace matchbook
