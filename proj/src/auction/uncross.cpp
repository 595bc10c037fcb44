#include "matchbook/auction/uncross.hpp"

#include <algorithm>
#include <cstdlib>

#include "matchbook/auction/hidden_filter.hpp"

namespace matchbook::auction {
namespace {

bool buy_executable(const AuctionOrder& o, Price p) { return o.market || o.price >= p; }
bool sell_executable(const AuctionOrder& o, Price p) { return o.market || o.price <= p; }

bool time_before(const AuctionOrder& a, const AuctionOrder& b) {
  if (a.time != b.time) return a.time < b.time;
  return a.id < b.id;
}

// Priority order on one side: market orders, then best price, then time.
std::vector<AuctionOrder> ranked(const std::vector<AuctionOrder>& orders, Side side, Price p) {
  std::vector<AuctionOrder> out;
  for (const auto& o : orders) {
    if (o.side != side) continue;
    if (side == Side::Buy ? buy_executable(o, p) : sell_executable(o, p)) out.push_back(o);
  }
  std::sort(out.begin(), out.end(), [side](const AuctionOrder& a, const AuctionOrder& b) {
    if (a.market != b.market) return a.market;
    if (!a.market && a.price != b.price) return side == Side::Buy ? a.price > b.price : a.price < b.price;
    return time_before(a, b);
  });
  return out;
}

struct Slice {
  OrderId id;
  Qty qty;
};

std::vector<Slice> take(const std::vector<AuctionOrder>& ranked_orders, Qty volume) {
  std::vector<Slice> out;
  Qty left = volume;
  for (const auto& o : ranked_orders) {
    if (!left.positive()) break;
    const Qty q = std::min(left, o.qty);
    if (q.positive()) out.push_back(Slice{o.id, q});
    left -= q;
  }
  return out;
}

UncrossResult pair_up(std::vector<Slice> buys, std::vector<Slice> sells, Price price, Timestamp now) {
  UncrossResult r;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < buys.size() && j < sells.size()) {
    const Qty q = std::min(buys[i].qty, sells[j].qty);
    r.executions.push_back(Execution{buys[i].id, sells[j].id, q});
    r.trades.push_back(Trade{auction_trade_id(buys[i].id, sells[j].id), price, q, now});
    r.executed_volume += q;
    buys[i].qty -= q;
    sells[j].qty -= q;
    if (!buys[i].qty.positive()) ++i;
    if (!sells[j].qty.positive()) ++j;
  }
  if (r.executed_volume.positive()) r.clearing_price = price;
  return r;
}

}  // namespace

Qty demand_at(const std::vector<AuctionOrder>& orders, Price price) {
  Qty d{0};
  for (const auto& o : orders) {
    if (o.side == Side::Buy && buy_executable(o, price)) d += o.qty;
  }
  return d;
}

Qty supply_at(const std::vector<AuctionOrder>& orders, Price price) {
  Qty s{0};
  for (const auto& o : orders) {
    if (o.side == Side::Sell && sell_executable(o, price)) s += o.qty;
  }
  return s;
}

Qty executable_volume(const std::vector<AuctionOrder>& orders, Price price) {
  return std::min(demand_at(orders, price), supply_at(orders, price));
}

std::vector<Price> candidate_prices(const std::vector<AuctionOrder>& orders, std::optional<Price> reference) {
  std::vector<Price> prices;
  bool market_buy = false;
  bool market_sell = false;
  for (const auto& o : orders) {
    if (o.market) {
      (o.side == Side::Buy ? market_buy : market_sell) = true;
    } else {
      prices.push_back(o.price);
    }
  }
  std::sort(prices.begin(), prices.end());
  prices.erase(std::unique(prices.begin(), prices.end()), prices.end());
  if (prices.empty() && market_buy && market_sell && reference) prices.push_back(*reference);
  return prices;
}

std::optional<ClearingPoint> find_clearing_price(const std::vector<AuctionOrder>& orders,
                                                 std::optional<Price> reference) {
  const auto prices = candidate_prices(orders, reference);
  if (prices.empty()) return std::nullopt;

  // Prefix sums over the sorted candidates: demand falls and supply rises
  // with price.
  std::int64_t market_buy = 0;
  std::int64_t market_sell = 0;
  std::vector<std::int64_t> buy_at(prices.size(), 0);
  std::vector<std::int64_t> sell_at(prices.size(), 0);
  const auto slot = [&](Price p) {
    return static_cast<std::size_t>(std::lower_bound(prices.begin(), prices.end(), p) - prices.begin());
  };
  for (const auto& o : orders) {
    if (o.market) {
      (o.side == Side::Buy ? market_buy : market_sell) += o.qty.value;
    } else {
      (o.side == Side::Buy ? buy_at : sell_at)[slot(o.price)] += o.qty.value;
    }
  }
  const std::size_t n = prices.size();
  std::vector<std::int64_t> demand(n), supply(n);
  std::int64_t acc = market_buy;
  for (std::size_t k = n; k-- > 0;) {
    acc += buy_at[k];
    demand[k] = acc;
  }
  acc = market_sell;
  for (std::size_t k = 0; k < n; ++k) {
    acc += sell_at[k];
    supply[k] = acc;
  }

  std::optional<ClearingPoint> best;
  std::int64_t best_distance = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::int64_t v = std::min(demand[k], supply[k]);
    if (v <= 0) continue;
    const std::int64_t imb = std::llabs(demand[k] - supply[k]);
    const std::int64_t dist = reference ? std::llabs(prices[k].value - reference->value) : 0;
    bool take = !best;
    if (best) {
      if (v != best->volume.value) {
        take = v > best->volume.value;
      } else if (imb != best->imbalance.value) {
        take = imb < best->imbalance.value;
      } else if (dist != best_distance) {
        take = dist < best_distance;
      }
      // Remaining tie: keep the lower price already held.
    }
    if (take) {
      best = ClearingPoint{prices[k], Qty{v}, Qty{imb}};
      best_distance = dist;
    }
  }
  return best;
}

UncrossResult allocate(const std::vector<AuctionOrder>& orders, Price price, Qty volume, Timestamp now) {
  return pair_up(take(ranked(orders, Side::Buy, price), volume), take(ranked(orders, Side::Sell, price), volume),
                 price, now);
}

UncrossResult uncross(const std::vector<AuctionOrder>& orders, std::optional<Price> reference, Timestamp now) {
  const auto point = find_clearing_price(orders, reference);
  if (!point) return {};
  return allocate(orders, point->price, point->volume, now);
}

UncrossResult uncross_with_hidden(const std::vector<AuctionOrder>& visible,
                                  const std::vector<HiddenAuctionOrder>& hidden, std::optional<Price> reference,
                                  Timestamp now, std::optional<Price> fixed_price) {
  std::optional<Price> price = fixed_price;
  if (!price) {
    if (auto point = find_clearing_price(visible, reference)) {
      price = point->price;
    } else if (!hidden.empty()) {
      std::vector<AuctionOrder> all = visible;
      for (const auto& h : hidden) all.push_back(h.order);
      if (auto merged = find_clearing_price(all, reference)) price = merged->price;
    }
  }
  if (!price) return {};

  const Qty demand = demand_at(visible, *price);
  const Qty supply = supply_at(visible, *price);
  const Qty matched = std::min(demand, supply);

  std::vector<Slice> buys;
  std::vector<Slice> sells;
  if (demand != supply && !hidden.empty()) {
    const Side short_side = demand > supply ? Side::Sell : Side::Buy;
    const Qty surplus = demand > supply ? demand - supply : supply - demand;
    std::vector<HiddenCandidate> candidates;
    for (const auto& h : hidden) {
      if (h.order.side != short_side) continue;
      const bool eligible = short_side == Side::Buy ? h.order.price >= *price : h.order.price <= *price;
      if (eligible) candidates.push_back(HiddenCandidate{h.order.id, h.order.qty, h.mes, h.order.time});
    }
    const HiddenSelection sel = filter_hidden_mes(candidates, surplus);
    const Qty total = matched + sel.total;
    std::vector<Slice> short_slices = take(ranked(visible, short_side, *price), matched);
    for (const auto& f : sel.fills) short_slices.push_back(Slice{f.id, f.qty});
    std::vector<Slice> long_slices = take(ranked(visible, opposite(short_side), *price), total);
    if (short_side == Side::Sell) {
      sells = std::move(short_slices);
      buys = std::move(long_slices);
    } else {
      buys = std::move(short_slices);
      sells = std::move(long_slices);
    }
  } else {
    buys = take(ranked(visible, Side::Buy, *price), matched);
    sells = take(ranked(visible, Side::Sell, *price), matched);
  }
  return pair_up(std::move(buys), std::move(sells), *price, now);
}

std::optional<Price> choose_reference(std::optional<Price> last_traded, std::optional<Price> best_bid,
                                      std::optional<Price> best_ask, std::optional<Price> previous_close) {
  if (last_traded) return last_traded;
  if (best_bid && best_ask) return Price{(best_bid->value + best_ask->value) / 2};
  return previous_close;
}

bool should_run(Timestamp now, Timestamp last_run, bool bbo_changed) {
  return bbo_changed || now - last_run >= kAuctionRunInterval;
}

}  // namespace matchbook::auction
