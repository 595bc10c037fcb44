#include "matchbook/book/events.hpp"

#include <fmt/format.h>

namespace matchbook {

std::string describe(const MatchEvent& e) {
  struct Visitor {
    std::string operator()(const Ack& a) const { return fmt::format("Ack({})", a.order_id); }
    std::string operator()(const Reject& r) const {
      return fmt::format("Reject({}, {})", to_string(r.reason), r.order_id);
    }
    std::string operator()(const TradeEvent& t) const {
      return fmt::format("Trade(id={} {}@{} buy={} sell={} leaves={}/{})", t.trade.trade_id, t.trade.qty.value,
                         t.trade.price.value, t.buy_order_id, t.sell_order_id, t.buy_leaves.value,
                         t.sell_leaves.value);
    }
    std::string operator()(const Expire& x) const { return fmt::format("Expire({}, {})", x.order_id, x.qty.value); }
    std::string operator()(const CancelAck& c) const { return fmt::format("CancelAck({})", c.order_id); }
    std::string operator()(const StopElected& s) const { return fmt::format("StopElected({})", s.order_id); }
  };
  return std::visit(Visitor{}, e);
}

}  // namespace matchbook
