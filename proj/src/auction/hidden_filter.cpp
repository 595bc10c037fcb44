#include "matchbook/auction/hidden_filter.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace matchbook::auction {
namespace {

HiddenSelection fills_for(const std::vector<HiddenCandidate>& hidden, const std::vector<char>& in, Qty contra) {
  HiddenSelection sel;
  std::vector<std::size_t> chosen;
  std::int64_t q = 0;
  std::int64_t m = 0;
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    if (!in[i]) continue;
    chosen.push_back(i);
    q += hidden[i].qty.value;
    m += hidden[i].mes.value;
  }
  if (m > contra.value) return sel;
  std::stable_sort(chosen.begin(), chosen.end(), [&](std::size_t a, std::size_t b) {
    if (hidden[a].time != hidden[b].time) return hidden[a].time < hidden[b].time;
    return hidden[a].id < hidden[b].id;
  });
  std::int64_t spare = std::min(contra.value, q) - m;
  for (std::size_t i : chosen) {
    const auto& h = hidden[i];
    const std::int64_t extra = std::min(spare, h.qty.value - h.mes.value);
    spare -= extra;
    const std::int64_t f = h.mes.value + extra;
    if (f > 0) sel.fills.push_back(HiddenFill{h.id, Qty{f}});
    sel.total += Qty{f};
  }
  return sel;
}

std::vector<char> mask_bits(std::uint64_t mask, std::size_t n) {
  std::vector<char> in(n, 0);
  for (std::size_t i = 0; i < n && i < 64; ++i) in[i] = (mask >> i) & 1u;
  return in;
}

}  // namespace

Qty subset_value(const std::vector<HiddenCandidate>& hidden, std::uint64_t mask, Qty contra_volume) {
  std::int64_t q = 0;
  std::int64_t m = 0;
  for (std::size_t i = 0; i < hidden.size() && i < 64; ++i) {
    if (!((mask >> i) & 1u)) continue;
    if (hidden[i].qty < hidden[i].mes) return Qty{0};
    q += hidden[i].qty.value;
    m += hidden[i].mes.value;
  }
  if (m > contra_volume.value) return Qty{0};
  return Qty{std::min(q, contra_volume.value)};
}

HiddenSelection fills_for_subset(const std::vector<HiddenCandidate>& hidden, std::uint64_t mask,
                                 Qty contra_volume) {
  return fills_for(hidden, mask_bits(mask, hidden.size()), contra_volume);
}

HiddenSelection filter_hidden_mes(const std::vector<HiddenCandidate>& hidden, Qty contra_volume,
                                  HillClimbBudget budget) {
  const std::size_t n = hidden.size();
  const std::int64_t c = contra_volume.value;
  std::vector<char> usable(n, 0);
  std::int64_t bound = 0;
  for (std::size_t i = 0; i < n; ++i) {
    usable[i] = hidden[i].qty.positive() && hidden[i].qty >= hidden[i].mes && hidden[i].mes.value <= c;
    if (usable[i]) bound += hidden[i].qty.value;
  }
  bound = std::min(bound, c);
  if (c <= 0 || bound <= 0) return {};

  // Infeasible states are allowed but pay twice the MES overshoot, so the
  // search can step through them on the way to a better feasible subset.
  const auto score = [c](std::int64_t q, std::int64_t m) {
    const std::int64_t v = std::min(q, c);
    return m <= c ? v : v - 2 * (m - c);
  };

  std::mt19937_64 rng(budget.seed);
  std::bernoulli_distribution coin(0.5);
  const int steps = budget.steps_per_order * static_cast<int>(n);
  const int tenure = std::max<int>(1, static_cast<int>(n) / 3);

  std::vector<char> best(n, 0);
  std::int64_t best_value = 0;
  std::vector<char> x(n, 0);
  std::vector<int> tabu_until(n, -1);

  for (int r = 0; r < budget.restarts && best_value < bound; ++r) {
    std::int64_t q = 0;
    std::int64_t m = 0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = (r > 0 && usable[i]) ? coin(rng) : 0;
      if (x[i]) {
        q += hidden[i].qty.value;
        m += hidden[i].mes.value;
      }
      tabu_until[i] = -1;
    }
    if (m <= c && std::min(q, c) > best_value) {
      best_value = std::min(q, c);
      best = x;
    }
    for (int step = 0; step < steps && best_value < bound; ++step) {
      // Steepest move among the non-tabu single flips; ties broken at random.
      std::int64_t top = 0;
      int pick = -1;
      int ties = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (!usable[j] || tabu_until[j] > step) continue;
        const std::int64_t sign = x[j] ? -1 : 1;
        const std::int64_t s = score(q + sign * hidden[j].qty.value, m + sign * hidden[j].mes.value);
        if (pick < 0 || s > top) {
          top = s;
          pick = static_cast<int>(j);
          ties = 1;
        } else if (s == top && std::uniform_int_distribution<int>(0, ties++)(rng) == 0) {
          pick = static_cast<int>(j);
        }
      }
      if (pick < 0) break;
      const std::int64_t sign = x[pick] ? -1 : 1;
      x[pick] = !x[pick];
      q += sign * hidden[pick].qty.value;
      m += sign * hidden[pick].mes.value;
      tabu_until[pick] = step + 1 + tenure;
      if (m <= c && std::min(q, c) > best_value) {
        best_value = std::min(q, c);
        best = x;
      }
    }
  }
  if (best_value == 0) return {};
  return fills_for(hidden, best, contra_volume);
}

}  // namespace matchbook::auction
