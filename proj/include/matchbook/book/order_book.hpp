#pragma once

#include <functional>
#include <list>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "matchbook/book/events.hpp"
#include "matchbook/core/order.hpp"

namespace matchbook {

struct RestingOrder {
  Order order;
  Qty leaves;

  friend bool operator==(const RestingOrder&, const RestingOrder&) = default;
};

// Where a live order currently sits inside the book.
enum class Location : std::uint8_t {
  Visible,
  Hidden,
  Stop,
  CallMarket,  // market orders accumulated during a call session
  Parked,
};

struct BookLevel {
  Price price;
  std::list<RestingOrder> queue;  // (submitted_at, order_id) ascending
  Qty total_qty;
};

struct LevelView {
  Price price;
  Qty total_qty;
  friend bool operator==(const LevelView&, const LevelView&) = default;
};

struct Bbo {
  std::optional<Price> bid;
  std::optional<Qty> bid_qty;
  std::optional<Price> ask;
  std::optional<Qty> ask_qty;
  friend bool operator==(const Bbo&, const Bbo&) = default;
};

struct BookSnapshot {
  SecurityId security_id{0};
  std::vector<LevelView> bids;  // best first
  std::vector<LevelView> asks;  // best first
  std::optional<Price> last_traded_price;
  std::optional<Qty> last_traded_qty;
  friend bool operator==(const BookSnapshot&, const BookSnapshot&) = default;
};

struct SweepOptions {
  bool end_of_day{false};    // DAY and session-bound TIFs expire
  bool start_of_day{false};  // DAY orders left over from earlier dates expire
  bool defer_gtt{false};     // an auction is in progress
};

class LimitOrderBook {
 public:
  explicit LimitOrderBook(SecurityConfig config = {});

  const SecurityConfig& config() const { return config_; }
  SecurityId security_id() const { return config_.security_id; }

  // Continuous-session entry point. Validates fields, assigns an id, emits
  // Ack, matches, handles the remainder per type/TIF and runs stop election.
  Events submit_continuous(Order order, Timestamp now);

  // Call-session entry point: validates, assigns an id, emits Ack and stores
  // the order without matching (limits may cross).
  Events submit_call(Order order, Timestamp now);

  // Validation plus id assignment only. Returns the reject event on failure.
  std::optional<Reject> admit(Order& order, Timestamp now);

  // Matches an already-admitted order (elected stop, injected parked order)
  // with its remaining quantity. Does not emit Ack.
  void dispatch_continuous(RestingOrder ro, Timestamp now, Events& out);

  // Fills hidden orders resting at exactly `price` on the side opposite to
  // the aggressor, time priority, subject to MES.
  Events execute_against_hidden(Side aggressor_side, OrderId aggressor_id, Qty& remainder, Price price,
                                Timestamp now);

  // Elects every stop triggered by the current last traded price and
  // processes it through continuous matching until no further stop fires.
  Events elect_stops(Timestamp now);
  void elect_stops(Timestamp now, Events& out);

  Events cancel(OrderId id, Side side);

  Events expire_sweep(Timestamp now, SweepOptions options = {});

  // Storage helpers used by the session engine.
  void rest(RestingOrder ro);  // visible or hidden by order type
  void park(RestingOrder ro);
  void add_call_market(RestingOrder ro);
  void add_stop(RestingOrder ro);
  std::vector<RestingOrder> take_parked(const std::function<bool(const RestingOrder&)>& pred);
  std::optional<RestingOrder> remove(OrderId id);
  // Reduces leaves by qty; removes the order when nothing is left. Returns the
  // remaining leaves.
  Qty fill(OrderId id, Qty qty);

  std::optional<Location> location(OrderId id) const;
  const RestingOrder* find(OrderId id) const;
  // Orders at a location; bids (or buy side) first, book priority order.
  std::vector<RestingOrder> orders(Location where) const;
  std::size_t order_count() const { return index_.size(); }

  Bbo bbo() const;
  Price vwap(Side side, int k) const;
  BookSnapshot snapshot(int depth) const;
  bool crossed() const;

  std::optional<Price> last_traded_price() const { return last_traded_price_; }
  std::optional<Qty> last_traded_qty() const { return last_traded_qty_; }
  void record_trade(Price price, Qty qty);

  OrderId next_order_id() const { return next_id_; }

 private:
  // Keyed so that begin() is always the best price: -price for bids.
  using Levels = std::map<std::int64_t, BookLevel>;
  using StopQueue = std::map<std::int64_t, std::list<RestingOrder>>;

  struct Locator {
    Location where;
    Side side;
    std::int64_t key;
    std::list<RestingOrder>::iterator it;
  };

  struct Fill {
    Location where;
    std::int64_t key;
    std::list<RestingOrder>::iterator it;
    Qty qty;
  };

  static std::int64_t level_key(Side side, Price p) { return side == Side::Buy ? -p.value : p.value; }

  Levels& visible(Side s) { return s == Side::Buy ? bids_ : asks_; }
  Levels& hidden(Side s) { return s == Side::Buy ? hidden_bids_ : hidden_asks_; }
  const Levels& visible(Side s) const { return s == Side::Buy ? bids_ : asks_; }
  const Levels& hidden(Side s) const { return s == Side::Buy ? hidden_bids_ : hidden_asks_; }
  Levels& levels_for(Location where, Side s) { return where == Location::Hidden ? hidden(s) : visible(s); }

  void insert_level_order(Levels& levels, Location where, RestingOrder ro);
  void plan_level(const Order& aggressor, Location where, BookLevel& level, std::int64_t key, Qty& remaining,
                  std::vector<Fill>& fills);
  std::vector<Fill> plan(const Order& aggressor, Qty leaves);
  void apply(RestingOrder& aggressor, const std::vector<Fill>& fills, Timestamp now, Events& out);
  void match_and_finish(RestingOrder ro, Timestamp now, Events& out);
  void erase_located(const Locator& loc);
  void index_add(const RestingOrder& ro, Locator loc);
  void index_drop(OrderId id);
  bool stop_triggered(const Order& stop) const;
  static bool timed(TimeInForce tif) {
    return tif == TimeInForce::GTC || tif == TimeInForce::GFA || tif == TimeInForce::GTD || tif == TimeInForce::GTT;
  }

  SecurityConfig config_;
  Levels bids_;
  Levels asks_;
  Levels hidden_bids_;
  Levels hidden_asks_;
  StopQueue buy_stops_;   // keyed by stop price
  StopQueue sell_stops_;  // keyed by stop price
  std::list<RestingOrder> call_market_[kSideCount];
  std::list<RestingOrder> parked_;
  std::unordered_map<OrderId, Locator> index_;
  std::size_t timed_orders_{0};  // GTC/GTD/GTT orders in index_
  std::optional<Price> last_traded_price_;
  std::optional<Qty> last_traded_qty_;
  OrderId next_id_{1};
};

constexpr bool crosses(Side aggressor, Price limit, Price resting) {
  return aggressor == Side::Buy ? resting <= limit : resting >= limit;
}

}  // namespace matchbook
