#include "matchbook/hawkes/flow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

namespace matchbook::hawkes {
namespace {

bool is_buy(EventType t) {
  return t == EventType::MarketBuyMovesAsk || t == EventType::BidBetweenQuotes || t == EventType::MarketBuy ||
         t == EventType::BidAtOrBelowBest;
}

std::int64_t clamp_price(Side side, std::int64_t price, const SimConfig& cfg) {
  if (side == Side::Buy) return std::max(price, cfg.buy_lower);
  return std::max<std::int64_t>(1, std::min(price, cfg.sell_upper));
}

// Distance from the touch for passive orders: |N(0, sd)| in ticks, below M.
std::int64_t depth_offset(const SimConfig& cfg, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, cfg.price_sd);
  const auto ticks = static_cast<std::int64_t>(std::llround(std::abs(n(rng))));
  return std::min<std::int64_t>(ticks, cfg.max_depth - 1);
}

OrderSpec passive(EventType as, const BookView& book, const SimConfig& cfg, std::mt19937_64& rng) {
  OrderSpec o;
  o.event = as;
  o.order_type = OrderType::Limit;
  o.qty = draw_volume(cfg, rng);
  if (as == EventType::BidAtOrBelowBest) {
    o.side = Side::Buy;
    o.price = clamp_price(Side::Buy, book.bid.value_or(cfg.initial_bid) - depth_offset(cfg, rng), cfg);
  } else {
    o.side = Side::Sell;
    o.price = clamp_price(Side::Sell, book.ask.value_or(cfg.initial_ask) + depth_offset(cfg, rng), cfg);
  }
  return o;
}

}  // namespace

std::string_view to_string(EventType t) {
  switch (t) {
    case EventType::MarketBuyMovesAsk:
      return "MarketBuyMovesAsk";
    case EventType::MarketSellMovesBid:
      return "MarketSellMovesBid";
    case EventType::BidBetweenQuotes:
      return "BidBetweenQuotes";
    case EventType::AskBetweenQuotes:
      return "AskBetweenQuotes";
    case EventType::MarketBuy:
      return "MarketBuy";
    case EventType::MarketSell:
      return "MarketSell";
    case EventType::BidAtOrBelowBest:
      return "BidAtOrBelowBest";
    case EventType::AskAtOrAboveBest:
      return "AskAtOrAboveBest";
  }
  return "?";
}

void SimConfig::validate() const {
  if (max_depth < 1) throw std::invalid_argument("maxDepth must be at least 1");
  if (!(buy_lower < initial_bid && initial_bid < initial_ask && initial_ask <= sell_upper)) {
    throw std::invalid_argument(fmt::format("need L_b < I_b < I_s <= H_s, got {} {} {} {}", buy_lower, initial_bid,
                                            initial_ask, sell_upper));
  }
  if (lot < 1 || initial_bid_qty < 1 || initial_ask_qty < 1) throw std::invalid_argument("quantities must be positive");
  if (!(volume_sd >= 0) || !(price_sd >= 0)) throw std::invalid_argument("standard deviations must be non-negative");
  if (!(horizon >= 0)) throw std::invalid_argument("horizon must be non-negative");
}

SimConfig SimConfig::from_properties(const Properties& props) {
  SimConfig c;
  const auto num = [&](std::string_view key, auto& field) {
    if (props.contains(key)) field = static_cast<std::remove_reference_t<decltype(field)>>(props.require_double(key));
  };
  num("maxDepth", c.max_depth);
  num("buyLowerLimit", c.buy_lower);
  num("sellUpperLimit", c.sell_upper);
  num("initialBid", c.initial_bid);
  num("initialAsk", c.initial_ask);
  num("initialBidQty", c.initial_bid_qty);
  num("initialAskQty", c.initial_ask_qty);
  num("volume.mean", c.volume_mean);
  num("volume.sd", c.volume_sd);
  num("volume.lot", c.lot);
  num("price.sd", c.price_sd);
  num("horizon", c.horizon);
  if (auto seed = props.get("seed")) c.seed = std::stoull(*seed);
  if (auto rt = props.get("realtime")) c.realtime = (*rt == "true" || *rt == "1");
  c.validate();
  return c;
}

std::int64_t draw_volume(const SimConfig& cfg, std::mt19937_64& rng) {
  std::normal_distribution<double> n(cfg.volume_mean, cfg.volume_sd);
  const auto lots = std::llround(n(rng) / static_cast<double>(cfg.lot));
  return std::max<std::int64_t>(1, lots) * cfg.lot;
}

std::optional<std::int64_t> vwap(std::span<const std::pair<std::int64_t, std::int64_t>> levels, std::size_t k) {
  long double notional = 0, volume = 0;
  for (std::size_t i = 0; i < std::min(k, levels.size()); ++i) {
    notional += static_cast<long double>(levels[i].first) * levels[i].second;
    volume += levels[i].second;
  }
  if (volume <= 0) return std::nullopt;
  return static_cast<std::int64_t>(std::llround(notional / volume));
}

OrderSpec event_to_order(EventType type, const BookView& book, const SimConfig& cfg, std::mt19937_64& rng) {
  switch (type) {
    case EventType::MarketBuyMovesAsk:
    case EventType::MarketSellMovesBid:
    case EventType::MarketBuy:
    case EventType::MarketSell: {
      const bool buy = is_buy(type);
      const auto contra = buy ? book.ask : book.bid;
      const auto contra_qty = buy ? book.ask_qty : book.bid_qty;
      if (!contra || contra_qty <= 0) {
        auto o = passive(buy ? EventType::BidAtOrBelowBest : EventType::AskAtOrAboveBest, book, cfg, rng);
        o.degraded = true;
        return o;
      }
      OrderSpec o;
      o.event = type;
      o.side = buy ? Side::Buy : Side::Sell;
      o.order_type = OrderType::Market;
      const bool moves = type == EventType::MarketBuyMovesAsk || type == EventType::MarketSellMovesBid;
      const auto volume = draw_volume(cfg, rng);
      o.qty = moves ? contra_qty + volume : std::min(volume, contra_qty);
      const std::pair<std::int64_t, std::int64_t> level{*contra, contra_qty};
      o.reference_price = vwap(std::span(&level, 1), 1).value_or(*contra);
      return o;
    }
    case EventType::BidBetweenQuotes:
    case EventType::AskBetweenQuotes: {
      const bool buy = type == EventType::BidBetweenQuotes;
      if (!book.bid || !book.ask || *book.ask - *book.bid <= 1) {
        auto o = passive(buy ? EventType::BidAtOrBelowBest : EventType::AskAtOrAboveBest, book, cfg, rng);
        o.degraded = true;
        return o;
      }
      const std::int64_t lo = *book.bid + 1, hi = *book.ask - 1;
      // Centred on the mid, spread over the gap, forced strictly inside.
      std::normal_distribution<double> n((lo + hi) / 2.0, std::max(0.5, (hi - lo) / 4.0));
      OrderSpec o;
      o.event = type;
      o.side = buy ? Side::Buy : Side::Sell;
      o.order_type = OrderType::Limit;
      o.price = std::clamp<std::int64_t>(std::llround(n(rng)), lo, hi);
      o.price = buy ? std::max(o.price, cfg.buy_lower) : std::min(o.price, cfg.sell_upper);
      o.qty = draw_volume(cfg, rng);
      return o;
    }
    case EventType::BidAtOrBelowBest:
    case EventType::AskAtOrAboveBest:
      return passive(type, book, cfg, rng);
  }
  throw std::invalid_argument("unknown event type");
}

std::vector<Event> simulate_flow(const HawkesParams& p, const SimConfig& cfg) {
  if (p.dimension() != kEventTypes) throw HawkesError("the order flow needs an 8-dimensional process");
  std::mt19937_64 rng(cfg.seed);
  return simulate(p, cfg.horizon, rng);
}

RunSummary run_simulation(FlowClient& client, const HawkesParams& p, const SimConfig& cfg,
                          const std::atomic<bool>* stop) {
  cfg.validate();
  RunSummary s;
  s.start = std::chrono::system_clock::now();
  const auto send = [&](const OrderSpec& o) {
    ++s.submitted;
    if (client.submit(o)) {
      ++s.accepted;
      if (!client.wait_for_update(cfg.update_timeout)) ++s.update_timeouts;
    } else {
      ++s.rejected;
    }
  };
  try {
    const auto events = simulate_flow(p, cfg);
    // Order generation draws from its own stream so the event times stay
    // identical whatever the book does.
    std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
    OrderSpec bid;
    bid.side = Side::Buy;
    bid.price = cfg.initial_bid;
    bid.qty = cfg.initial_bid_qty;
    OrderSpec ask;
    ask.event = EventType::AskAtOrAboveBest;
    ask.side = Side::Sell;
    ask.price = cfg.initial_ask;
    ask.qty = cfg.initial_ask_qty;
    send(bid);
    send(ask);
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& e : events) {
      if (stop && stop->load()) break;
      if (cfg.realtime) {
        std::this_thread::sleep_until(t0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                               std::chrono::duration<double>(e.time)));
      }
      const auto o = event_to_order(event_type_of(e.type), client.view(), cfg, rng);
      ++s.events;
      ++s.by_type[e.type];
      if (o.degraded) ++s.degraded;
      send(o);
    }
  } catch (const std::exception& ex) {
    s.aborted = true;
    s.error = ex.what();
  }
  s.end = std::chrono::system_clock::now();
  return s;
}

}  // namespace matchbook::hawkes
