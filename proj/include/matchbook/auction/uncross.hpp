#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "matchbook/core/order.hpp"

namespace matchbook::auction {

// One order as seen by the uncross. Market orders have no price and are
// executable at any clearing price.
struct AuctionOrder {
  OrderId id{0};
  Side side{Side::Buy};
  bool market{false};
  Price price{};
  Qty qty{};
  Timestamp time{};
};

struct HiddenAuctionOrder {
  AuctionOrder order;
  Qty mes{};
};

struct Execution {
  OrderId buy_order_id{0};
  OrderId sell_order_id{0};
  Qty qty{};
  friend bool operator==(const Execution&, const Execution&) = default;
};

struct ClearingPoint {
  Price price;
  Qty volume;
  Qty imbalance;  // |demand - supply| at price
  friend bool operator==(const ClearingPoint&, const ClearingPoint&) = default;
};

struct UncrossResult {
  std::optional<Price> clearing_price;
  std::vector<Trade> trades;
  std::vector<Execution> executions;  // parallel to trades
  Qty executed_volume{};
};

Qty demand_at(const std::vector<AuctionOrder>& orders, Price price);
Qty supply_at(const std::vector<AuctionOrder>& orders, Price price);

// min(demand, supply) at price.
Qty executable_volume(const std::vector<AuctionOrder>& orders, Price price);

// Distinct limit prices. When no limit prices exist but market orders sit on
// both sides, the reference price is the only candidate.
std::vector<Price> candidate_prices(const std::vector<AuctionOrder>& orders, std::optional<Price> reference);

// Volume-maximizing price with the tie-break chain: larger volume, smaller
// imbalance, closer to reference, lower price. Absent when nothing executes.
std::optional<ClearingPoint> find_clearing_price(const std::vector<AuctionOrder>& orders,
                                                 std::optional<Price> reference);

// Allocates `volume` on both sides at `price`: market orders first, then
// price, then time; executions pair the two priority queues in order.
UncrossResult allocate(const std::vector<AuctionOrder>& orders, Price price, Qty volume, Timestamp now);

// Visible-only uncross.
UncrossResult uncross(const std::vector<AuctionOrder>& orders, std::optional<Price> reference, Timestamp now);

// Full uncross including hidden orders. The price comes from the visible
// orders (or visible plus hidden when the visible orders alone do not cross);
// the visible surplus at that price is offered to the hidden orders of the
// short side through the MES filter. Hidden orders never trade with each
// other here. With fixed_price set the price search is skipped.
UncrossResult uncross_with_hidden(const std::vector<AuctionOrder>& visible,
                                  const std::vector<HiddenAuctionOrder>& hidden, std::optional<Price> reference,
                                  Timestamp now, std::optional<Price> fixed_price = std::nullopt);

// Trade id for an auction execution: the older (smaller) of the two order ids.
constexpr OrderId auction_trade_id(OrderId buy, OrderId sell) { return buy < sell ? buy : sell; }

// Last traded price, else the midpoint of the accumulated BBO, else the
// configured previous close.
std::optional<Price> choose_reference(std::optional<Price> last_traded, std::optional<Price> best_bid,
                                      std::optional<Price> best_ask, std::optional<Price> previous_close);

inline constexpr auto kAuctionRunInterval = std::chrono::seconds{30};

// Indicative runs during a call: on a BBO change or every 30 seconds.
bool should_run(Timestamp now, Timestamp last_run, bool bbo_changed);

}  // namespace matchbook::auction
