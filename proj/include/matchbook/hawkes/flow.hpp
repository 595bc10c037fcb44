#pragma once

#include <array>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "matchbook/core/properties.hpp"
#include "matchbook/core/types.hpp"
#include "matchbook/hawkes/process.hpp"

namespace matchbook::hawkes {

// The eight order events of the test flow, numbered 1 to 8.
enum class EventType : std::uint8_t {
  MarketBuyMovesAsk = 1,
  MarketSellMovesBid = 2,
  BidBetweenQuotes = 3,
  AskBetweenQuotes = 4,
  MarketBuy = 5,
  MarketSell = 6,
  BidAtOrBelowBest = 7,
  AskAtOrAboveBest = 8,
};

inline constexpr int kEventTypes = 8;

inline EventType event_type_of(int component) { return static_cast<EventType>(component + 1); }
std::string_view to_string(EventType t);

struct SimConfig {
  int max_depth{10};           // M: limit prices stay within M ticks of the touch
  std::int64_t buy_lower{25000};  // L_b
  std::int64_t sell_upper{25057};  // H_s
  std::int64_t initial_bid{25034};  // I_b
  std::int64_t initial_ask{25057};  // I_s
  std::int64_t initial_bid_qty{1200};
  std::int64_t initial_ask_qty{1000};
  double volume_mean{1000};
  double volume_sd{400};
  std::int64_t lot{100};
  double price_sd{3.0};  // ticks
  double horizon{100000};  // seconds of simulated time
  std::uint64_t seed{1};
  bool realtime{false};  // sleep until each event's time instead of sending flat out
  std::chrono::milliseconds update_timeout{200};

  // Throws std::invalid_argument unless L_b < I_b < I_s <= H_s and M >= 1.
  void validate() const;
  // Keys: maxDepth, buyLowerLimit, sellUpperLimit, initialBid, initialAsk,
  // initialBidQty, initialAskQty, volume.mean, volume.sd, volume.lot,
  // price.sd, horizon, seed, realtime. Missing keys keep their defaults.
  static SimConfig from_properties(const Properties& props);
};

// Level-1 view of the book as the client sees it.
struct BookView {
  std::optional<std::int64_t> bid;
  std::int64_t bid_qty{0};
  std::optional<std::int64_t> ask;
  std::int64_t ask_qty{0};
};

struct OrderSpec {
  EventType event{EventType::BidAtOrBelowBest};
  Side side{Side::Buy};
  OrderType order_type{OrderType::Limit};
  TimeInForce tif{TimeInForce::DAY};
  std::int64_t price{0};  // 0 for market orders
  std::int64_t qty{0};
  // Market orders: VWAP of the contra levels the order is expected to reach.
  std::int64_t reference_price{0};
  bool degraded{false};  // the book could not support the event as drawn
};

// Normal(mean, sd) rounded to whole lots, at least one lot.
std::int64_t draw_volume(const SimConfig& cfg, std::mt19937_64& rng);

// Sum(p_i v_i) / Sum(v_i) over the first k levels, rounded to a tick.
// Absent when no volume is available.
std::optional<std::int64_t> vwap(std::span<const std::pair<std::int64_t, std::int64_t>> levels, std::size_t k);

// Degradations: market events with an empty contra side become the
// same-side passive event (1,5 -> 7 and 2,6 -> 8); "between quotes" with a
// spread of one tick or a missing side becomes 7 or 8; a missing own side
// is anchored at I_b or I_s.
OrderSpec event_to_order(EventType type, const BookView& book, const SimConfig& cfg, std::mt19937_64& rng);

// What run_simulation needs from a trading client.
class FlowClient {
 public:
  virtual ~FlowClient() = default;
  // True when the order was accepted.
  virtual bool submit(const OrderSpec& order) = 0;
  virtual BookView view() const = 0;
  virtual bool wait_for_update(std::chrono::milliseconds timeout) = 0;
};

struct RunSummary {
  std::uint64_t events{0};
  std::uint64_t submitted{0};
  std::uint64_t accepted{0};
  std::uint64_t rejected{0};
  std::uint64_t degraded{0};
  std::uint64_t update_timeouts{0};
  std::array<std::uint64_t, kEventTypes> by_type{};
  std::chrono::system_clock::time_point start;
  std::chrono::system_clock::time_point end;
  bool aborted{false};
  std::string error;
};

// The event sequence for a config, deterministic in cfg.seed.
std::vector<Event> simulate_flow(const HawkesParams& p, const SimConfig& cfg);

// Places the two bootstrap orders, then one order per simulated event,
// waiting for a market-data update after each accepted order. A set `stop`
// ends the run early. Exceptions from the client end the run with
// aborted = true and the partial counts.
RunSummary run_simulation(FlowClient& client, const HawkesParams& p, const SimConfig& cfg,
                          const std::atomic<bool>* stop = nullptr);

}  // namespace matchbook::hawkes
