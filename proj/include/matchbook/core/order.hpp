#pragma once

#include <optional>

#include "matchbook/core/types.hpp"

namespace matchbook {

inline constexpr auto kMaxOrderLifetime = std::chrono::days{90};

// Per-security static configuration.
struct SecurityConfig {
  SecurityId security_id{1};
  std::int64_t tick_size{1};
  Qty min_reserve_size{0};  // MRS applied to hidden orders
  std::optional<Price> reference_price;  // previous close, seeds the circuit breaker
  double circuit_breaker_pct{10.0};
};

// One client instruction. Value type; the book tracks remaining quantity
// separately so that an Order never changes after acceptance.
struct Order {
  OrderId order_id{0};
  ClientId client_id{0};
  SecurityId security_id{0};
  Side side{Side::Buy};
  OrderType order_type{OrderType::Limit};
  TimeInForce tif{TimeInForce::DAY};
  Price price{};
  Qty qty{};
  Qty display_qty{};
  Qty mes{};
  Qty mrs{};
  Price stop_price{};
  std::optional<Timestamp> expiry;
  Timestamp submitted_at{};

  friend bool operator==(const Order&, const Order&) = default;

  // Builds a hidden order; throws std::invalid_argument when qty < mrs.
  static Order hidden(ClientId client, SecurityId security, Side side, Price price, Qty qty, Qty mes,
                      Qty mrs, TimeInForce tif, Timestamp submitted_at);
};

struct Trade {
  OrderId trade_id{0};  // order id of the resting order executed against
  Price price{};
  Qty qty{};
  Timestamp created_at{};

  friend bool operator==(const Trade&, const Trade&) = default;
};

// Field-level checks shared by every entry path. Does not consult the rule
// matrices; see rules.hpp for those.
std::optional<RejectReason> validate_order(const Order& order, const SecurityConfig& config);

constexpr bool is_marketable_type(OrderType t) { return t == OrderType::Market || t == OrderType::Stop; }

}  // namespace matchbook
