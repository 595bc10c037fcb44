#pragma once

#include <variant>
#include <vector>

#include "matchbook/core/order.hpp"

namespace matchbook {

struct Ack {
  OrderId order_id{0};
  friend bool operator==(const Ack&, const Ack&) = default;
};

// order_id is 0 for rejected submissions (no id is assigned) and the target id
// for rejected cancels.
struct Reject {
  RejectReason reason{RejectReason::InvalidField};
  OrderId order_id{0};
  friend bool operator==(const Reject&, const Reject&) = default;
};

struct TradeEvent {
  Trade trade;
  OrderId buy_order_id{0};
  OrderId sell_order_id{0};
  Qty buy_leaves{};
  Qty sell_leaves{};
  friend bool operator==(const TradeEvent&, const TradeEvent&) = default;
};

// qty is the remaining quantity that was expired.
struct Expire {
  OrderId order_id{0};
  Qty qty{};
  friend bool operator==(const Expire&, const Expire&) = default;
};

struct CancelAck {
  OrderId order_id{0};
  friend bool operator==(const CancelAck&, const CancelAck&) = default;
};

struct StopElected {
  OrderId order_id{0};
  friend bool operator==(const StopElected&, const StopElected&) = default;
};

using MatchEvent = std::variant<Ack, Reject, TradeEvent, Expire, CancelAck, StopElected>;
using Events = std::vector<MatchEvent>;

std::string describe(const MatchEvent& e);

}  // namespace matchbook
