#include "matchbook/core/order.hpp"

#include <stdexcept>

namespace matchbook {

Order Order::hidden(ClientId client, SecurityId security, Side side, Price price, Qty qty, Qty mes, Qty mrs,
                    TimeInForce tif, Timestamp submitted_at) {
  if (qty < mrs) throw std::invalid_argument("hidden order quantity below minimum reserve size");
  Order o;
  o.client_id = client;
  o.security_id = security;
  o.side = side;
  o.order_type = OrderType::Hidden;
  o.tif = tif;
  o.price = price;
  o.qty = qty;
  o.display_qty = Qty{0};
  o.mes = mes;
  o.mrs = mrs;
  o.submitted_at = submitted_at;
  return o;
}

std::optional<RejectReason> validate_order(const Order& order, const SecurityConfig& config) {
  if (!order.qty.positive()) return RejectReason::InvalidQty;
  if (order.mes.value < 0 || order.mrs.value < 0) return RejectReason::InvalidField;

  const auto aligned = [&](Price p) { return config.tick_size <= 1 || p.value % config.tick_size == 0; };

  if (has_limit_price(order.order_type)) {
    if (order.price.value <= 0 || !aligned(order.price)) return RejectReason::InvalidPrice;
  } else if (order.price.value != 0) {
    return RejectReason::InvalidPrice;
  }

  if (is_stop(order.order_type)) {
    if (order.stop_price.value <= 0 || !aligned(order.stop_price)) return RejectReason::InvalidStopPrice;
  }

  if (order.order_type == OrderType::Hidden) {
    if (order.qty < order.mrs) return RejectReason::BelowMinReserve;
  } else if (order.display_qty.value != 0 && order.display_qty != order.qty) {
    return RejectReason::InvalidDisplayQty;
  }

  if (order.tif == TimeInForce::GTD) {
    if (!order.expiry) return RejectReason::InvalidExpiry;
    const auto submitted_day = std::chrono::floor<std::chrono::days>(order.submitted_at);
    const auto expiry_day = std::chrono::floor<std::chrono::days>(*order.expiry);
    if (expiry_day < submitted_day || expiry_day > submitted_day + kMaxOrderLifetime)
      return RejectReason::InvalidExpiry;
  } else if (order.tif == TimeInForce::GTT) {
    if (!order.expiry || *order.expiry <= order.submitted_at) return RejectReason::InvalidExpiry;
  }
  return std::nullopt;
}

}  // namespace matchbook
