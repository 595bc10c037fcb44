#pragma once

#include <cstdint>
#include <vector>

#include "matchbook/core/order.hpp"

namespace matchbook::auction {

struct HiddenCandidate {
  OrderId id{0};
  Qty qty{};
  Qty mes{};
  Timestamp time{};
};

struct HiddenFill {
  OrderId id{0};
  Qty qty{};
  friend bool operator==(const HiddenFill&, const HiddenFill&) = default;
};

struct HiddenSelection {
  std::vector<HiddenFill> fills;  // candidate order, zero fills omitted
  Qty total{};
};

struct HillClimbBudget {
  int restarts{20};
  int steps_per_order{4};
  std::uint64_t seed{0x5eed};
};

// Total executable quantity of a subset: min(contra, sum qty) when the MES
// floors fit inside the contra volume, otherwise nothing.
Qty subset_value(const std::vector<HiddenCandidate>& hidden, std::uint64_t mask, Qty contra_volume);

// Given a chosen subset, gives each order its MES and hands out the rest of
// the executable quantity in time priority.
HiddenSelection fills_for_subset(const std::vector<HiddenCandidate>& hidden, std::uint64_t mask,
                                 Qty contra_volume);

// Hill-climbing search over inclusion vectors (one flip per step) with random
// restarts. Orders whose quantity is below their own MES are never selected.
HiddenSelection filter_hidden_mes(const std::vector<HiddenCandidate>& hidden, Qty contra_volume,
                                  HillClimbBudget budget = {});

}  // namespace matchbook::auction
