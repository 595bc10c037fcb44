#pragma once

#include <random>
#include <variant>
#include <vector>

#include "matchbook/core/order.hpp"

namespace matchbook::testing {

struct SubmitCmd {
  Side side;
  OrderType type;
  TimeInForce tif;
  Price price;
  Qty qty;
};

struct CancelCmd {
  OrderId id;
  Side side;
};

using FlowCmd = std::variant<SubmitCmd, CancelCmd>;

// Random visible-only flow: market/limit orders with DAY/IOC/FOK and cancels
// against a mix of live, dead and never-issued ids. Prices cluster tightly so
// that ties and multi-level sweeps are common.
inline std::vector<FlowCmd> random_visible_flow(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pct(0, 99);
  std::uniform_int_distribution<std::int64_t> price(95, 105);
  std::uniform_int_distribution<std::int64_t> qty(1, 50);
  std::vector<FlowCmd> cmds;
  cmds.reserve(count);
  std::uint64_t issued = 0;
  for (int i = 0; i < count; ++i) {
    const Side side = pct(rng) < 50 ? Side::Buy : Side::Sell;
    const int roll = pct(rng);
    if (roll < 15 && issued > 0) {
      std::uniform_int_distribution<std::uint64_t> id(1, issued + 3);
      cmds.emplace_back(CancelCmd{id(rng), side});
      continue;
    }
    SubmitCmd s;
    s.side = side;
    const int kind = pct(rng);
    s.type = kind < 15 ? OrderType::Market : OrderType::Limit;
    const int tif = pct(rng);
    s.tif = tif < 70 ? TimeInForce::DAY : (tif < 85 ? TimeInForce::IOC : TimeInForce::FOK);
    s.price = s.type == OrderType::Market ? Price{0} : Price{price(rng)};
    s.qty = Qty{pct(rng) < 1 ? 0 : qty(rng)};
    if (s.qty.value > 0) ++issued;
    cmds.emplace_back(s);
  }
  return cmds;
}

inline Order to_order(const SubmitCmd& s) {
  Order o;
  o.client_id = 1;
  o.side = s.side;
  o.order_type = s.type;
  o.tif = s.tif;
  o.price = s.price;
  o.qty = s.qty;
  o.display_qty = s.qty;
  return o;
}

}  // namespace matchbook::testing
