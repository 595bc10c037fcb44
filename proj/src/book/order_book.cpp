#include "matchbook/book/order_book.hpp"

#include <algorithm>
#include <stdexcept>

namespace matchbook {
namespace {

bool earlier(const RestingOrder& a, const RestingOrder& b) {
  if (a.order.submitted_at != b.order.submitted_at) return a.order.submitted_at < b.order.submitted_at;
  return a.order.order_id < b.order.order_id;
}

// Inserts keeping (submitted_at, order_id) order. New arrivals are nearly
// always the latest, so scan from the back.
std::list<RestingOrder>::iterator insert_sorted(std::list<RestingOrder>& queue, RestingOrder ro) {
  auto pos = queue.end();
  while (pos != queue.begin()) {
    auto prev = std::prev(pos);
    if (!earlier(ro, *prev)) break;
    pos = prev;
  }
  return queue.insert(pos, std::move(ro));
}

void convert_elected(Order& o) {
  if (o.order_type == OrderType::Stop) {
    o.order_type = OrderType::Market;
    o.price = Price{0};
  } else if (o.order_type == OrderType::StopLimit) {
    o.order_type = OrderType::Limit;
  }
}

}  // namespace

LimitOrderBook::LimitOrderBook(SecurityConfig config) : config_(config) {}

std::optional<Reject> LimitOrderBook::admit(Order& order, Timestamp now) {
  order.security_id = config_.security_id;
  order.submitted_at = now;
  if (order.order_type == OrderType::Hidden) {
    order.mrs = std::max(order.mrs, config_.min_reserve_size);
    order.display_qty = Qty{0};
  } else {
    order.mes = Qty{0};
    order.mrs = Qty{0};
  }
  if (auto reason = validate_order(order, config_)) return Reject{*reason, 0};
  if (order.order_type != OrderType::Hidden) order.display_qty = order.qty;
  order.order_id = next_id_++;
  return std::nullopt;
}

Events LimitOrderBook::submit_continuous(Order order, Timestamp now) {
  Events out;
  if (auto rej = admit(order, now)) {
    out.emplace_back(*rej);
    return out;
  }
  out.emplace_back(Ack{order.order_id});
  dispatch_continuous(RestingOrder{order, order.qty}, now, out);
  return out;
}

Events LimitOrderBook::submit_call(Order order, Timestamp now) {
  Events out;
  if (auto rej = admit(order, now)) {
    out.emplace_back(*rej);
    return out;
  }
  out.emplace_back(Ack{order.order_id});
  RestingOrder ro{order, order.qty};
  if (is_stop(order.order_type)) {
    add_stop(std::move(ro));
  } else if (order.order_type == OrderType::Market) {
    add_call_market(std::move(ro));
  } else {
    rest(std::move(ro));
  }
  return out;
}

void LimitOrderBook::dispatch_continuous(RestingOrder ro, Timestamp now, Events& out) {
  if (is_stop(ro.order.order_type)) {
    if (!stop_triggered(ro.order)) {
      add_stop(std::move(ro));
      return;
    }
    out.emplace_back(StopElected{ro.order.order_id});
    convert_elected(ro.order);
  }
  match_and_finish(std::move(ro), now, out);
  elect_stops(now, out);
}

void LimitOrderBook::match_and_finish(RestingOrder ro, Timestamp now, Events& out) {
  const auto fills = plan(ro.order, ro.leaves);
  Qty planned{0};
  for (const auto& f : fills) planned += f.qty;

  const Order& o = ro.order;
  if (o.tif == TimeInForce::FOK && planned < ro.leaves) {
    out.emplace_back(Expire{o.order_id, ro.leaves});
    return;
  }
  apply(ro, fills, now, out);
  if (!ro.leaves.positive()) return;

  const bool expire = o.order_type == OrderType::Market || o.tif == TimeInForce::IOC ||
                      o.tif == TimeInForce::FOK || (o.order_type == OrderType::Hidden && ro.leaves < o.mes);
  if (expire) {
    out.emplace_back(Expire{o.order_id, ro.leaves});
    return;
  }
  rest(std::move(ro));
}

void LimitOrderBook::plan_level(const Order& aggressor, Location where, BookLevel& level, std::int64_t key,
                                Qty& remaining, std::vector<Fill>& fills) {
  const bool aggressor_hidden = aggressor.order_type == OrderType::Hidden;
  for (auto it = level.queue.begin(); it != level.queue.end() && remaining.positive(); ++it) {
    const Qty q = std::min(remaining, it->leaves);
    if (where == Location::Hidden && q < it->order.mes) continue;
    if (aggressor_hidden && q < aggressor.mes) continue;
    fills.push_back(Fill{where, key, it, q});
    remaining -= q;
  }
}

std::vector<LimitOrderBook::Fill> LimitOrderBook::plan(const Order& aggressor, Qty leaves) {
  std::vector<Fill> fills;
  const Side contra = opposite(aggressor.side);
  Levels& vis = visible(contra);
  Levels& hid = hidden(contra);
  auto vi = vis.begin();
  auto hi = hid.begin();
  Qty remaining = leaves;
  const bool market = aggressor.order_type == OrderType::Market;

  while (remaining.positive()) {
    const bool hv = vi != vis.end();
    const bool hh = hi != hid.end();
    if (!hv && !hh) break;
    std::int64_t key = 0;
    if (hv && hh) {
      key = std::min(vi->first, hi->first);
    } else {
      key = hv ? vi->first : hi->first;
    }
    const Price price = (hv && vi->first == key) ? vi->second.price : hi->second.price;
    if (!market && !crosses(aggressor.side, aggressor.price, price)) break;

    if (hv && vi->first == key) {
      plan_level(aggressor, Location::Visible, vi->second, key, remaining, fills);
      ++vi;
    }
    if (hh && hi->first == key) {
      // Hidden orders rank below every visible order at the same price.
      plan_level(aggressor, Location::Hidden, hi->second, key, remaining, fills);
      ++hi;
    }
  }
  return fills;
}

void LimitOrderBook::apply(RestingOrder& aggressor, const std::vector<Fill>& fills, Timestamp now,
                           Events& out) {
  const Side contra = opposite(aggressor.order.side);
  for (const auto& f : fills) {
    Levels& levels = levels_for(f.where, contra);
    auto lit = levels.find(f.key);
    BookLevel& level = lit->second;
    RestingOrder& resting = *f.it;

    resting.leaves -= f.qty;
    level.total_qty -= f.qty;
    aggressor.leaves -= f.qty;
    record_trade(level.price, f.qty);

    TradeEvent te;
    te.trade = Trade{resting.order.order_id, level.price, f.qty, now};
    if (aggressor.order.side == Side::Buy) {
      te.buy_order_id = aggressor.order.order_id;
      te.sell_order_id = resting.order.order_id;
      te.buy_leaves = aggressor.leaves;
      te.sell_leaves = resting.leaves;
    } else {
      te.buy_order_id = resting.order.order_id;
      te.sell_order_id = aggressor.order.order_id;
      te.buy_leaves = resting.leaves;
      te.sell_leaves = aggressor.leaves;
    }
    out.emplace_back(te);

    const OrderId rid = resting.order.order_id;
    bool drop = !resting.leaves.positive();
    if (!drop && f.where == Location::Hidden && resting.leaves < resting.order.mes) {
      out.emplace_back(Expire{rid, resting.leaves});
      level.total_qty -= resting.leaves;
      drop = true;
    }
    if (drop) {
      index_drop(rid);
      level.queue.erase(f.it);
      if (level.queue.empty()) levels.erase(lit);
    }
  }
}

Events LimitOrderBook::execute_against_hidden(Side aggressor_side, OrderId aggressor_id, Qty& remainder,
                                              Price price, Timestamp now) {
  Events out;
  const Side contra = opposite(aggressor_side);
  Levels& hid = hidden(contra);
  const auto key = level_key(contra, price);
  auto lit = hid.find(key);
  if (lit == hid.end() || !remainder.positive()) return out;

  Order probe;
  probe.order_id = aggressor_id;
  probe.side = aggressor_side;
  probe.order_type = OrderType::Limit;
  probe.price = price;
  std::vector<Fill> fills;
  Qty remaining = remainder;
  plan_level(probe, Location::Hidden, lit->second, key, remaining, fills);
  RestingOrder agg{probe, remainder};
  apply(agg, fills, now, out);
  remainder = agg.leaves;
  return out;
}

bool LimitOrderBook::stop_triggered(const Order& stop) const {
  if (!last_traded_price_) return false;
  return stop.side == Side::Buy ? *last_traded_price_ >= stop.stop_price : *last_traded_price_ <= stop.stop_price;
}

Events LimitOrderBook::elect_stops(Timestamp now) {
  Events out;
  elect_stops(now, out);
  return out;
}

void LimitOrderBook::elect_stops(Timestamp now, Events& out) {
  while (last_traded_price_) {
    const std::int64_t last = last_traded_price_->value;
    std::vector<RestingOrder> batch;
    for (auto it = buy_stops_.begin(); it != buy_stops_.end() && it->first <= last;) {
      for (auto& ro : it->second) {
        index_drop(ro.order.order_id);
        batch.push_back(std::move(ro));
      }
      it = buy_stops_.erase(it);
    }
    while (!sell_stops_.empty() && std::prev(sell_stops_.end())->first >= last) {
      auto it = std::prev(sell_stops_.end());
      for (auto& ro : it->second) {
        index_drop(ro.order.order_id);
        batch.push_back(std::move(ro));
      }
      sell_stops_.erase(it);
    }
    if (batch.empty()) return;

    std::sort(batch.begin(), batch.end(), [](const RestingOrder& a, const RestingOrder& b) {
      if (a.order.stop_price != b.order.stop_price) return a.order.stop_price < b.order.stop_price;
      return earlier(a, b);
    });
    for (auto& ro : batch) {
      out.emplace_back(StopElected{ro.order.order_id});
      convert_elected(ro.order);
      match_and_finish(std::move(ro), now, out);
    }
  }
}

Events LimitOrderBook::cancel(OrderId id, Side side) {
  auto it = index_.find(id);
  if (it == index_.end() || it->second.side != side) return {Reject{RejectReason::UnknownOrder, id}};
  remove(id);
  return {CancelAck{id}};
}

Events LimitOrderBook::expire_sweep(Timestamp now, SweepOptions options) {
  Events out;
  if (!options.end_of_day && !options.start_of_day && timed_orders_ == 0) return out;

  using std::chrono::days;
  using std::chrono::floor;
  const auto today = floor<days>(now);
  std::vector<std::pair<OrderId, Qty>> doomed;
  for (const auto& [id, loc] : index_) {
    const Order& o = loc.it->order;
    bool expire = false;
    switch (o.tif) {
      case TimeInForce::GTC:
      case TimeInForce::GFA:  // parked from auction to auction until filled or cancelled
        expire = now >= o.submitted_at + kMaxOrderLifetime;
        break;
      case TimeInForce::GTD: {
        const auto expiry_day = floor<days>(*o.expiry);
        expire = today > expiry_day || (options.end_of_day && today >= expiry_day);
        break;
      }
      case TimeInForce::GTT:
        expire = !options.defer_gtt && now >= *o.expiry;
        break;
      default:
        expire = options.end_of_day || (options.start_of_day && floor<days>(o.submitted_at) < today);
        break;
    }
    if (expire) doomed.emplace_back(id, loc.it->leaves);
  }
  std::sort(doomed.begin(), doomed.end());
  for (const auto& [id, leaves] : doomed) {
    remove(id);
    out.emplace_back(Expire{id, leaves});
  }
  return out;
}

void LimitOrderBook::index_add(const RestingOrder& ro, Locator loc) {
  index_[ro.order.order_id] = loc;
  if (timed(ro.order.tif)) ++timed_orders_;
}

void LimitOrderBook::index_drop(OrderId id) {
  auto it = index_.find(id);
  if (it == index_.end()) return;
  if (timed(it->second.it->order.tif)) --timed_orders_;
  index_.erase(it);
}

void LimitOrderBook::insert_level_order(Levels& levels, Location where, RestingOrder ro) {
  const Side side = ro.order.side;
  const auto key = level_key(side, ro.order.price);
  auto [lit, inserted] = levels.try_emplace(key);
  if (inserted) lit->second.price = ro.order.price;
  lit->second.total_qty += ro.leaves;
  auto it = insert_sorted(lit->second.queue, std::move(ro));
  index_add(*it, Locator{where, side, key, it});
}

void LimitOrderBook::rest(RestingOrder ro) {
  const Side side = ro.order.side;
  if (ro.order.order_type == OrderType::Hidden) {
    insert_level_order(hidden(side), Location::Hidden, std::move(ro));
  } else {
    insert_level_order(visible(side), Location::Visible, std::move(ro));
  }
}

void LimitOrderBook::park(RestingOrder ro) {
  const Side side = ro.order.side;
  auto it = insert_sorted(parked_, std::move(ro));
  index_add(*it, Locator{Location::Parked, side, 0, it});
}

void LimitOrderBook::add_call_market(RestingOrder ro) {
  const Side side = ro.order.side;
  auto it = insert_sorted(call_market_[static_cast<int>(side)], std::move(ro));
  index_add(*it, Locator{Location::CallMarket, side, 0, it});
}

void LimitOrderBook::add_stop(RestingOrder ro) {
  const Side side = ro.order.side;
  const auto key = ro.order.stop_price.value;
  auto& queue = (side == Side::Buy ? buy_stops_ : sell_stops_)[key];
  auto it = insert_sorted(queue, std::move(ro));
  index_add(*it, Locator{Location::Stop, side, key, it});
}

std::vector<RestingOrder> LimitOrderBook::take_parked(const std::function<bool(const RestingOrder&)>& pred) {
  std::vector<RestingOrder> taken;
  for (auto it = parked_.begin(); it != parked_.end();) {
    if (pred(*it)) {
      index_drop(it->order.order_id);
      taken.push_back(std::move(*it));
      it = parked_.erase(it);
    } else {
      ++it;
    }
  }
  return taken;
}

void LimitOrderBook::erase_located(const Locator& loc) {
  switch (loc.where) {
    case Location::Visible:
    case Location::Hidden: {
      Levels& levels = levels_for(loc.where, loc.side);
      auto lit = levels.find(loc.key);
      lit->second.total_qty -= loc.it->leaves;
      lit->second.queue.erase(loc.it);
      if (lit->second.queue.empty()) levels.erase(lit);
      break;
    }
    case Location::Stop: {
      StopQueue& stops = loc.side == Side::Buy ? buy_stops_ : sell_stops_;
      auto sit = stops.find(loc.key);
      sit->second.erase(loc.it);
      if (sit->second.empty()) stops.erase(sit);
      break;
    }
    case Location::CallMarket:
      call_market_[static_cast<int>(loc.side)].erase(loc.it);
      break;
    case Location::Parked:
      parked_.erase(loc.it);
      break;
  }
}

std::optional<RestingOrder> LimitOrderBook::remove(OrderId id) {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  Locator loc = it->second;
  RestingOrder copy = *loc.it;
  index_drop(id);
  erase_located(loc);
  return copy;
}

Qty LimitOrderBook::fill(OrderId id, Qty qty) {
  auto it = index_.find(id);
  if (it == index_.end()) throw std::out_of_range("fill: unknown order");
  Locator loc = it->second;
  loc.it->leaves -= qty;
  if (loc.where == Location::Visible || loc.where == Location::Hidden) {
    levels_for(loc.where, loc.side).at(loc.key).total_qty -= qty;
  }
  const Qty leaves = loc.it->leaves;
  if (!leaves.positive()) {
    index_drop(id);
    erase_located(loc);
  }
  return leaves;
}

std::optional<Location> LimitOrderBook::location(OrderId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second.where;
}

const RestingOrder* LimitOrderBook::find(OrderId id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &*it->second.it;
}

std::vector<RestingOrder> LimitOrderBook::orders(Location where) const {
  std::vector<RestingOrder> out;
  auto levels = [&](const Levels& lv) {
    for (const auto& [key, level] : lv) out.insert(out.end(), level.queue.begin(), level.queue.end());
  };
  switch (where) {
    case Location::Visible:
      levels(bids_);
      levels(asks_);
      break;
    case Location::Hidden:
      levels(hidden_bids_);
      levels(hidden_asks_);
      break;
    case Location::Stop:
      for (const auto& [key, q] : buy_stops_) out.insert(out.end(), q.begin(), q.end());
      for (const auto& [key, q] : sell_stops_) out.insert(out.end(), q.begin(), q.end());
      break;
    case Location::CallMarket:
      for (const auto& q : call_market_) out.insert(out.end(), q.begin(), q.end());
      break;
    case Location::Parked:
      out.insert(out.end(), parked_.begin(), parked_.end());
      break;
  }
  return out;
}

Bbo LimitOrderBook::bbo() const {
  Bbo b;
  if (!bids_.empty()) {
    b.bid = bids_.begin()->second.price;
    b.bid_qty = bids_.begin()->second.total_qty;
  }
  if (!asks_.empty()) {
    b.ask = asks_.begin()->second.price;
    b.ask_qty = asks_.begin()->second.total_qty;
  }
  return b;
}

Price LimitOrderBook::vwap(Side side, int k) const {
  const Levels& levels = visible(side);
  if (levels.empty()) throw std::domain_error("vwap: empty side");
  if (k < 1) throw std::invalid_argument("vwap: k must be at least 1");
  std::int64_t pv = 0;
  std::int64_t v = 0;
  int n = 0;
  for (const auto& [key, level] : levels) {
    if (n++ == k) break;
    pv += level.price.value * level.total_qty.value;
    v += level.total_qty.value;
  }
  return Price{(pv + v / 2) / v};
}

BookSnapshot LimitOrderBook::snapshot(int depth) const {
  BookSnapshot s;
  s.security_id = config_.security_id;
  auto take = [depth](const Levels& levels, std::vector<LevelView>& dst) {
    for (const auto& [key, level] : levels) {
      if (static_cast<int>(dst.size()) >= depth) break;
      dst.push_back(LevelView{level.price, level.total_qty});
    }
  };
  take(bids_, s.bids);
  take(asks_, s.asks);
  s.last_traded_price = last_traded_price_;
  s.last_traded_qty = last_traded_qty_;
  return s;
}

bool LimitOrderBook::crossed() const {
  return !bids_.empty() && !asks_.empty() && bids_.begin()->second.price >= asks_.begin()->second.price;
}

void LimitOrderBook::record_trade(Price price, Qty qty) {
  last_traded_price_ = price;
  last_traded_qty_ = qty;
}

}  // namespace matchbook
