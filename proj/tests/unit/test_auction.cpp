#include <gtest/gtest.h>

#include <map>
#include <random>

#include "auction_oracles.hpp"
#include "matchbook/auction/hidden_filter.hpp"
#include "matchbook/auction/uncross.hpp"
#include "printers.hpp"

namespace matchbook::auction {
namespace {

using namespace std::chrono_literals;

AuctionOrder buy(OrderId id, std::int64_t px, std::int64_t q, int t = 0) {
  return AuctionOrder{id, Side::Buy, false, Price{px}, Qty{q}, Timestamp{} + std::chrono::milliseconds{t}};
}
AuctionOrder sell(OrderId id, std::int64_t px, std::int64_t q, int t = 0) {
  return AuctionOrder{id, Side::Sell, false, Price{px}, Qty{q}, Timestamp{} + std::chrono::milliseconds{t}};
}
AuctionOrder mkt(OrderId id, Side side, std::int64_t q, int t = 0) {
  return AuctionOrder{id, side, true, Price{0}, Qty{q}, Timestamp{} + std::chrono::milliseconds{t}};
}

std::vector<AuctionOrder> sample_book() {
  return {buy(1, 102, 10), buy(2, 100, 5), sell(3, 99, 8), sell(4, 101, 10)};
}

TEST(ExecutableVolume, HandEvaluatedPoints) {
  EXPECT_EQ(executable_volume(sample_book(), Price{100}), Qty{8});
  EXPECT_EQ(executable_volume(sample_book(), Price{101}), Qty{10});
  EXPECT_EQ(executable_volume({}, Price{100}), Qty{0});
}

TEST(Uncross, TieBrokenByReferenceProximity) {
  const UncrossResult r = uncross(sample_book(), Price{100}, Timestamp{});
  ASSERT_TRUE(r.clearing_price);
  EXPECT_EQ(*r.clearing_price, Price{101});
  EXPECT_EQ(r.executed_volume, Qty{10});
  const auto oracle = testing::exhaustive_clearing(sample_book(), Price{100});
  ASSERT_TRUE(oracle);
  EXPECT_EQ(oracle->price, 101);
}

TEST(Uncross, AllocationFollowsPriceTimePriority) {
  const UncrossResult r = uncross(sample_book(), Price{100}, Timestamp{});
  // Buyer 1 (102) takes all 10; sellers 3 (99) then 4 (101).
  EXPECT_EQ(r.executions, (std::vector<Execution>{{1, 3, Qty{8}}, {1, 4, Qty{2}}}));
  for (const auto& t : r.trades) EXPECT_EQ(t.price, Price{101});
  EXPECT_EQ(r.trades[0].trade_id, 1u);
  EXPECT_EQ(r.trades[1].trade_id, 1u);
}

TEST(Uncross, NoCrossNoTrades) {
  const UncrossResult r = uncross({buy(1, 100, 5), sell(2, 101, 5)}, Price{100}, Timestamp{});
  EXPECT_FALSE(r.clearing_price);
  EXPECT_TRUE(r.trades.empty());
  EXPECT_EQ(r.executed_volume, Qty{0});
}

TEST(Uncross, SymmetricFullCross) {
  const UncrossResult r = uncross({buy(1, 100, 10), sell(2, 100, 10)}, std::nullopt, Timestamp{});
  ASSERT_TRUE(r.clearing_price);
  EXPECT_EQ(*r.clearing_price, Price{100});
  EXPECT_EQ(r.executed_volume, Qty{10});
  EXPECT_EQ(r.trades.size(), 1u);
}

TEST(Uncross, MarketOrdersHaveAllocationPriority) {
  // At 100: demand 10 (market) + 10, supply 10. The market buy fills first.
  const UncrossResult r = uncross({buy(1, 100, 10, 0), mkt(2, Side::Buy, 10, 5), sell(3, 100, 10)}, Price{100},
                                  Timestamp{});
  EXPECT_EQ(r.executions, (std::vector<Execution>{{2, 3, Qty{10}}}));
}

TEST(Uncross, MarketOnlyUsesReference) {
  const std::vector<AuctionOrder> book{mkt(1, Side::Buy, 10), mkt(2, Side::Sell, 6)};
  const UncrossResult r = uncross(book, Price{250}, Timestamp{});
  ASSERT_TRUE(r.clearing_price);
  EXPECT_EQ(*r.clearing_price, Price{250});
  EXPECT_EQ(r.executed_volume, Qty{6});
  EXPECT_FALSE(uncross(book, std::nullopt, Timestamp{}).clearing_price);
}

TEST(Uncross, LowerPriceWinsFinalTie) {
  // No reference: 100 and 101 tie on volume and imbalance.
  const std::vector<AuctionOrder> book{buy(1, 101, 5), sell(2, 100, 5)};
  EXPECT_EQ(*uncross(book, std::nullopt, Timestamp{}).clearing_price, Price{100});
}

TEST(Uncross, RandomBooksMatchExhaustiveOracle) {
  std::mt19937_64 rng(2024);
  for (int round = 0; round < 300; ++round) {
    const auto book = testing::random_auction_book(rng, 50);
    const std::optional<Price> ref = round % 3 == 0 ? std::nullopt : std::optional<Price>{Price{100}};
    const auto point = find_clearing_price(book, ref);
    const auto oracle = testing::exhaustive_clearing(book, ref);
    ASSERT_EQ(point.has_value(), oracle.has_value()) << round;
    if (!point) continue;
    EXPECT_EQ(point->price.value, oracle->price) << round;
    EXPECT_EQ(point->volume.value, oracle->volume) << round;
    const UncrossResult r = uncross(book, ref, Timestamp{});
    EXPECT_EQ(r.executed_volume.value, oracle->volume);
    for (const auto& t : r.trades) EXPECT_EQ(t.price.value, oracle->price);
  }
}

TEST(Uncross, DeterministicOnEqualInputs) {
  std::mt19937_64 rng(5);
  for (int round = 0; round < 50; ++round) {
    const auto book = testing::random_auction_book(rng, 50);
    const auto a = uncross(book, Price{100}, Timestamp{});
    const auto b = uncross(book, Price{100}, Timestamp{});
    EXPECT_EQ(a.trades, b.trades);
    EXPECT_EQ(a.executions, b.executions);
  }
}

TEST(Uncross, AllocationNeverExceedsOrderQuantity) {
  std::mt19937_64 rng(9);
  for (int round = 0; round < 200; ++round) {
    const auto book = testing::random_auction_book(rng, 50);
    const auto r = uncross(book, Price{100}, Timestamp{});
    std::map<OrderId, std::int64_t> used;
    for (const auto& e : r.executions) {
      used[e.buy_order_id] += e.qty.value;
      used[e.sell_order_id] += e.qty.value;
    }
    for (const auto& o : book) {
      EXPECT_LE(used[o.id], o.qty.value);
      if (used[o.id] > 0 && r.clearing_price) {
        EXPECT_TRUE(o.market || (o.side == Side::Buy ? o.price >= *r.clearing_price : o.price <= *r.clearing_price));
      }
    }
  }
}

TEST(HiddenFilter, PrefersTheSubsetThatRespectsMes) {
  const std::vector<HiddenCandidate> h{{1, Qty{1000}, Qty{1000}, {}}, {2, Qty{600}, Qty{500}, {}}};
  const HiddenSelection s = filter_hidden_mes(h, Qty{1200});
  EXPECT_EQ(s.total, Qty{1000});
  EXPECT_EQ(s.fills, (std::vector<HiddenFill>{{1, Qty{1000}}}));
}

TEST(HiddenFilter, EmptyInputsAndImpossibleMes) {
  EXPECT_TRUE(filter_hidden_mes({}, Qty{1000}).fills.empty());
  const std::vector<HiddenCandidate> h{{1, Qty{400}, Qty{500}, {}}};
  const HiddenSelection s = filter_hidden_mes(h, Qty{1000});
  EXPECT_TRUE(s.fills.empty());
  EXPECT_EQ(s.total, Qty{0});
}

TEST(HiddenFilter, ExtraVolumeGoesInTimePriority) {
  const std::vector<HiddenCandidate> h{{1, Qty{500}, Qty{100}, Timestamp{} + 2ms},
                                       {2, Qty{500}, Qty{200}, Timestamp{} + 1ms}};
  const HiddenSelection s = filter_hidden_mes(h, Qty{700});
  // Floors 100 + 200, then 400 spare to the earlier order 2 first (up to 500).
  EXPECT_EQ(s.total, Qty{700});
  EXPECT_EQ(s.fills, (std::vector<HiddenFill>{{2, Qty{500}}, {1, Qty{200}}}));
}

TEST(HiddenFilter, MatchesExhaustiveSearch) {
  std::mt19937_64 rng(77);
  for (int round = 0; round < 300; ++round) {
    Qty contra;
    const auto h = testing::random_hidden_set(rng, 12, contra);
    const HiddenSelection s = filter_hidden_mes(h, contra);
    EXPECT_EQ(s.total.value, testing::exhaustive_hidden_optimum(h, contra)) << round;
    std::int64_t sum = 0;
    for (const auto& f : s.fills) {
      const auto it = std::find_if(h.begin(), h.end(), [&](auto& c) { return c.id == f.id; });
      ASSERT_NE(it, h.end());
      EXPECT_GE(f.qty, it->mes);
      EXPECT_LE(f.qty, it->qty);
      sum += f.qty.value;
    }
    EXPECT_EQ(sum, s.total.value);
    EXPECT_LE(sum, contra.value);
  }
}

TEST(HiddenFilter, SubsetValueHelper) {
  const std::vector<HiddenCandidate> h{{1, Qty{1000}, Qty{1000}, {}}, {2, Qty{600}, Qty{500}, {}}};
  EXPECT_EQ(subset_value(h, 0b01, Qty{1200}), Qty{1000});
  EXPECT_EQ(subset_value(h, 0b10, Qty{1200}), Qty{600});
  EXPECT_EQ(subset_value(h, 0b11, Qty{1200}), Qty{0});
}

TEST(UncrossWithHidden, SurplusOfferedToHiddenShortSide) {
  // Visible: buy 100x1500, sell 100x500. Hidden sells fill part of the gap.
  const std::vector<AuctionOrder> vis{buy(1, 100, 1500, 0), sell(2, 100, 500, 1)};
  const std::vector<HiddenAuctionOrder> hid{{sell(3, 99, 1000, 2), Qty{1000}}, {sell(4, 100, 600, 3), Qty{500}}};
  const UncrossResult r = uncross_with_hidden(vis, hid, Price{100}, Timestamp{});
  ASSERT_TRUE(r.clearing_price);
  EXPECT_EQ(*r.clearing_price, Price{100});
  // Surplus 1000: {3} gives 1000; {3,4} breaks MES floors. Visible seller first.
  EXPECT_EQ(r.executed_volume, Qty{1500});
  EXPECT_EQ(r.executions, (std::vector<Execution>{{1, 2, Qty{500}}, {1, 3, Qty{1000}}}));
}

TEST(UncrossWithHidden, HiddenProvidesPriceWhenVisibleDoesNotCross) {
  const std::vector<AuctionOrder> vis{buy(1, 100, 300)};
  const std::vector<HiddenAuctionOrder> hid{{sell(2, 98, 500, 1), Qty{200}}};
  const UncrossResult r = uncross_with_hidden(vis, hid, std::nullopt, Timestamp{});
  ASSERT_TRUE(r.clearing_price);
  EXPECT_EQ(r.executed_volume, Qty{300});
}

TEST(UncrossWithHidden, FixedPriceSkipsSearch) {
  const std::vector<AuctionOrder> vis{buy(1, 105, 10), sell(2, 95, 10)};
  const UncrossResult r = uncross_with_hidden(vis, {}, std::nullopt, Timestamp{}, Price{97});
  ASSERT_TRUE(r.clearing_price);
  EXPECT_EQ(*r.clearing_price, Price{97});
  EXPECT_EQ(r.executed_volume, Qty{10});
}

TEST(ShouldRun, TriggerRules) {
  const Timestamp t0{};
  EXPECT_TRUE(should_run(t0 + 1s, t0, true));
  EXPECT_TRUE(should_run(t0 + 31s, t0, false));
  EXPECT_TRUE(should_run(t0 + 30s, t0, false));
  EXPECT_FALSE(should_run(t0 + 5s, t0, false));
}

TEST(Reference, FallbackChain) {
  EXPECT_EQ(choose_reference(Price{7}, Price{1}, Price{3}, Price{9}), Price{7});
  EXPECT_EQ(choose_reference(std::nullopt, Price{100}, Price{103}, Price{9}), Price{101});
  EXPECT_EQ(choose_reference(std::nullopt, Price{100}, std::nullopt, Price{9}), Price{9});
  EXPECT_FALSE(choose_reference(std::nullopt, std::nullopt, std::nullopt, std::nullopt));
}

}  // namespace
}  // namespace matchbook::auction
