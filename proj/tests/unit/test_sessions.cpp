#include <gtest/gtest.h>

#include <random>

#include "builders.hpp"
#include "matchbook/core/rules.hpp"
#include "matchbook/sessions/engine.hpp"
#include "printers.hpp"

namespace matchbook {
namespace {

using namespace std::chrono_literals;
using testing::at_utc;
using testing::hidden_order;
using testing::limit;
using testing::market;
using testing::stop;

std::vector<TradeEvent> trades_in(const Events& events) {
  std::vector<TradeEvent> out;
  for (const auto& e : events) {
    if (const auto* t = std::get_if<TradeEvent>(&e)) out.push_back(*t);
  }
  return out;
}

std::vector<OrderId> expired_in(const Events& events) {
  std::vector<OrderId> out;
  for (const auto& e : events) {
    if (const auto* x = std::get_if<Expire>(&e)) out.push_back(x->order_id);
  }
  return out;
}

SecurityConfig config_with_reference(std::int64_t ref) {
  SecurityConfig c;
  c.reference_price = Price{ref};
  return c;
}

class EngineTest : public ::testing::Test {
 protected:
  explicit EngineTest(SecurityConfig cfg = config_with_reference(25000),
                      SessionType initial = SessionType::ContinuousTrading)
      : engine_(cfg, initial) {}

  EngineOutput submit(Order o) {
    now_ += 1ms;
    return engine_.submit(std::move(o), now_);
  }
  EngineOutput schedule(SessionType s) { return engine_.on_schedule(s, now_); }
  AdminResult admin(SessionType s) { return engine_.admin(s, now_); }
  EngineOutput tick_at(Timestamp t) {
    now_ = t;
    return engine_.tick(t);
  }
  Location where(OrderId id) const { return engine_.book().location(id).value(); }

  SecurityEngine engine_;
  Timestamp now_ = at_utc(2020, 11, 23, 9, 0);
};

TEST(VolatilityTrigger, Examples) {
  EXPECT_TRUE(volatility_trigger(Price{27501}, Price{25000}, 10));
  EXPECT_FALSE(volatility_trigger(Price{25000}, Price{25000}, 10));
  EXPECT_FALSE(volatility_trigger(Price{27500}, Price{25000}, 10));
  EXPECT_FALSE(volatility_trigger(Price{22500}, Price{25000}, 10));
  EXPECT_TRUE(volatility_trigger(Price{22499}, Price{25000}, 10));
  // Fractional tolerance: the boundary itself still does not breach.
  EXPECT_FALSE(volatility_trigger(Price{25625}, Price{25000}, 2.5));
  EXPECT_TRUE(volatility_trigger(Price{25626}, Price{25000}, 2.5));
}

TEST_F(EngineTest, ForcedMoveStartsFiveMinuteVolatilityAuction) {
  submit(limit(Side::Sell, 27525, 10));  // 10.1% above the static reference
  const auto out = submit(limit(Side::Buy, 27525, 10));
  ASSERT_EQ(trades_in(out.events).size(), 1u);
  EXPECT_EQ(out.sessions, (std::vector<SessionType>{SessionType::VolatilityAuctionCall}));
  EXPECT_EQ(engine_.session(), SessionType::VolatilityAuctionCall);
  const Timestamp started = now_;
  ASSERT_EQ(engine_.volatility_ends(), started + 5min);

  // Orders accumulate without matching.
  submit(limit(Side::Sell, 27550, 5));
  EXPECT_TRUE(trades_in(submit(limit(Side::Buy, 27600, 5)).events).empty());

  EXPECT_TRUE(tick_at(started + 5min - 1ms).sessions.empty());
  EXPECT_EQ(engine_.session(), SessionType::VolatilityAuctionCall);
  const auto end = tick_at(started + 5min);
  EXPECT_EQ(end.sessions, (std::vector<SessionType>{SessionType::ContinuousTrading}));
  const auto t = trades_in(end.events);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].trade.qty, Qty{5});
  ASSERT_FALSE(engine_.uncross_log().empty());
  EXPECT_EQ(engine_.uncross_log().back().session, SessionType::VolatilityAuctionCall);
  EXPECT_EQ(engine_.uncross_log().back().at, started + 5min);
  EXPECT_EQ(engine_.static_reference(), t[0].trade.price);
}

TEST_F(EngineTest, MoveOfExactlyTheToleranceKeepsTrading) {
  submit(limit(Side::Sell, 27500, 10));
  const auto out = submit(limit(Side::Buy, 27500, 10));
  EXPECT_EQ(trades_in(out.events).size(), 1u);
  EXPECT_TRUE(out.sessions.empty());
  EXPECT_EQ(engine_.session(), SessionType::ContinuousTrading);
}

TEST_F(EngineTest, ScheduledVolatilityEntryActsAsTrigger) {
  schedule(SessionType::VolatilityAuctionCall);
  EXPECT_EQ(engine_.session(), SessionType::VolatilityAuctionCall);
  EXPECT_EQ(engine_.scheduled_session(), SessionType::ContinuousTrading);

  // A schedule firing during the volatility auction waits for it to end.
  schedule(SessionType::IntradayAuctionCall);
  EXPECT_EQ(engine_.session(), SessionType::VolatilityAuctionCall);
  tick_at(now_ + 5min);
  EXPECT_EQ(engine_.session(), SessionType::IntradayAuctionCall);

  // Outside continuous trading the trigger entry is ignored.
  EXPECT_TRUE(schedule(SessionType::VolatilityAuctionCall).sessions.empty());
  EXPECT_EQ(engine_.session(), SessionType::IntradayAuctionCall);
}

TEST_F(EngineTest, PauseAcceptsButNeverExecutes) {
  ASSERT_FALSE(admin(SessionType::Pause).error);
  const auto a = submit(limit(Side::Sell, 100, 10));
  const auto b = submit(limit(Side::Buy, 105, 10));
  const auto c = submit(market(Side::Buy, 3));
  for (const auto* o : {&a, &b, &c}) {
    ASSERT_FALSE(o->events.empty());
    EXPECT_TRUE(std::holds_alternative<Ack>(o->events.front()));
    EXPECT_TRUE(trades_in(o->events).empty());
  }
  EXPECT_TRUE(engine_.book().crossed());
  const auto resumed = admin(SessionType::ContinuousTrading);
  ASSERT_FALSE(resumed.error);
  EXPECT_EQ(trades_in(resumed.output.events).size(), 2u);
  EXPECT_FALSE(engine_.book().crossed());
}

TEST_F(EngineTest, IntradayInjectsGfxAndGfaThenExpiresOrReparks) {
  const auto gfx = submit(limit(Side::Buy, 100, 10, TimeInForce::GFX));
  const auto gfa = submit(limit(Side::Sell, 101, 5, TimeInForce::GFA));
  EXPECT_EQ(gfx.events, (Events{Ack{1}}));
  EXPECT_EQ(gfa.events, (Events{Ack{2}}));
  EXPECT_EQ(where(1), Location::Parked);
  EXPECT_EQ(where(2), Location::Parked);

  schedule(SessionType::IntradayAuctionCall);
  EXPECT_EQ(where(1), Location::Visible);
  EXPECT_EQ(where(2), Location::Visible);

  const auto out = schedule(SessionType::ContinuousTrading);
  EXPECT_TRUE(trades_in(out.events).empty());
  EXPECT_EQ(expired_in(out.events), (std::vector<OrderId>{1}));
  EXPECT_EQ(where(2), Location::Parked);
}

TEST_F(EngineTest, GfxStaysParkedThroughOtherAuctions) {
  submit(limit(Side::Buy, 100, 10, TimeInForce::GFX));
  schedule(SessionType::ClosingAuctionCall);
  EXPECT_EQ(where(1), Location::Parked);
  schedule(SessionType::ContinuousTrading);
  EXPECT_EQ(where(1), Location::Parked);
}

TEST_F(EngineTest, ParkedOrderInjectedOncePerAuction) {
  submit(limit(Side::Buy, 100, 10, TimeInForce::GFA));
  for (const SessionType auction :
       {SessionType::IntradayAuctionCall, SessionType::ClosingAuctionCall, SessionType::OpeningAuctionCall}) {
    const auto in = schedule(auction);
    EXPECT_EQ(where(1), Location::Visible);
    EXPECT_EQ(engine_.book().order_count(), 1u);
    EXPECT_TRUE(engine_.book().orders(Location::Parked).empty());
    schedule(SessionType::ContinuousTrading);
    EXPECT_EQ(where(1), Location::Parked);
    EXPECT_EQ(engine_.book().order_count(), 1u);
  }
}

class OpeningTest : public EngineTest {
 protected:
  OpeningTest() : EngineTest(SecurityConfig{}, SessionType::StartOfTrading) {}
};

TEST_F(OpeningTest, UncrossesWhenTheCallEnds) {
  schedule(SessionType::OpeningAuctionCall);
  for (auto o : {limit(Side::Buy, 102, 10), limit(Side::Buy, 100, 5), limit(Side::Sell, 99, 8),
                 limit(Side::Sell, 101, 10)}) {
    EXPECT_TRUE(trades_in(submit(o).events).empty());
  }
  // The last order left the BBO alone; the 30-second timer picks it up.
  ASSERT_TRUE(engine_.indicative());
  EXPECT_EQ(engine_.indicative()->price, Price{102});
  tick_at(now_ + 30s);
  EXPECT_EQ(engine_.indicative()->price, Price{101});

  const Timestamp close = now_ + 1s;
  now_ = close;
  const auto out = schedule(SessionType::ContinuousTrading);
  const auto t = trades_in(out.events);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0], (TradeEvent{Trade{1, Price{101}, Qty{8}, close}, 1, 3, Qty{2}, Qty{0}}));
  EXPECT_EQ(t[1], (TradeEvent{Trade{1, Price{101}, Qty{2}, close}, 1, 4, Qty{0}, Qty{8}}));
  EXPECT_EQ(engine_.book().last_traded_price(), Price{101});
  EXPECT_EQ(engine_.static_reference(), Price{101});
  ASSERT_EQ(engine_.uncross_log().size(), 1u);
  EXPECT_EQ(engine_.uncross_log()[0].at, close);
  EXPECT_EQ(engine_.uncross_log()[0].volume, Qty{10});
}

TEST_F(OpeningTest, SessionBoundRemaindersExpire) {
  schedule(SessionType::OpeningAuctionCall);
  submit(limit(Side::Buy, 90, 10, TimeInForce::OPG));
  submit(market(Side::Buy, 4));
  submit(limit(Side::Sell, 95, 3));
  submit(limit(Side::Buy, 80, 1));
  const auto out = schedule(SessionType::ContinuousTrading);
  const auto t = trades_in(out.events);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].buy_order_id, 2u);
  EXPECT_EQ(expired_in(out.events), (std::vector<OrderId>{2, 1}));  // market remainder, then OPG
  EXPECT_EQ(where(4), Location::Visible);
}

TEST_F(OpeningTest, HaltSuspendsTheUncrossUntilReopening) {
  schedule(SessionType::OpeningAuctionCall);
  submit(limit(Side::Buy, 101, 10));
  submit(limit(Side::Sell, 100, 10));
  const auto halt = admin(SessionType::Halt);
  ASSERT_FALSE(halt.error);
  EXPECT_TRUE(trades_in(halt.output.events).empty());

  // Manual sessions ignore the schedule.
  schedule(SessionType::ContinuousTrading);
  EXPECT_EQ(engine_.session(), SessionType::Halt);
  EXPECT_EQ(engine_.scheduled_session(), SessionType::ContinuousTrading);

  // Cancels still work, submissions do not.
  EXPECT_EQ(submit(limit(Side::Buy, 99, 1)).events, (Events{Reject{RejectReason::SessionRejected, 0}}));

  ASSERT_FALSE(admin(SessionType::ReOpeningAuctionCall).error);
  const auto resumed = admin(SessionType::ContinuousTrading);
  ASSERT_FALSE(resumed.error);
  EXPECT_EQ(trades_in(resumed.output.events).size(), 1u);
}

TEST_F(EngineTest, AdminErrors) {
  EXPECT_EQ(admin(SessionType::ContinuousTrading).error, AdminError::SameSession);
  EXPECT_EQ(admin(SessionType::VolatilityAuctionCall).error, AdminError::NotAllowed);
  EXPECT_EQ(admin(SessionType::TradeReporting).error, AdminError::NotAllowed);
  EXPECT_EQ(admin(SessionType::ReOpeningAuctionCall).error, AdminError::ReopenRequiresHaltOrPause);
  EXPECT_EQ(engine_.session(), SessionType::ContinuousTrading);
}

TEST_F(EngineTest, CancelWorksInEverySession) {
  submit(limit(Side::Buy, 100, 10));
  submit(limit(Side::Buy, 99, 10, TimeInForce::GFA));
  ASSERT_FALSE(admin(SessionType::Halt).error);
  EXPECT_EQ(engine_.cancel(1, Side::Buy, now_).events, (Events{CancelAck{1}}));
  EXPECT_EQ(engine_.cancel(2, Side::Buy, now_).events, (Events{CancelAck{2}}));
  EXPECT_EQ(engine_.cancel(2, Side::Buy, now_).events, (Events{Reject{RejectReason::UnknownOrder, 2}}));
}

TEST_F(EngineTest, HaltAndCloseEndsOnlyAtStartOfTrading) {
  submit(limit(Side::Sell, 25010, 1));
  submit(limit(Side::Buy, 25010, 1));
  ASSERT_FALSE(admin(SessionType::HaltAndClose).error);
  EXPECT_EQ(engine_.closing_price(), Price{25010});
  schedule(SessionType::PostClose);
  EXPECT_EQ(engine_.session(), SessionType::HaltAndClose);
  now_ = at_utc(2020, 11, 24, 7, 0);
  schedule(SessionType::StartOfTrading);
  EXPECT_EQ(engine_.session(), SessionType::StartOfTrading);
}

TEST_F(EngineTest, ClosingPriceCrossTradesOnlyAtThePublishedPrice) {
  submit(limit(Side::Sell, 25000, 1));
  submit(limit(Side::Buy, 25000, 1));
  const auto cpx = submit(limit(Side::Buy, 25001, 5, TimeInForce::CPX));
  EXPECT_EQ(cpx.events, (Events{Ack{3}}));
  EXPECT_EQ(where(3), Location::Parked);

  schedule(SessionType::ClosingAuctionCall);
  EXPECT_EQ(where(3), Location::Parked);
  schedule(SessionType::ClosingPricePublication);
  EXPECT_EQ(engine_.closing_price(), Price{25000});
  schedule(SessionType::ClosingPriceCross);
  EXPECT_EQ(where(3), Location::Visible);
  submit(limit(Side::Sell, 24990, 3));

  const auto out = schedule(SessionType::PostClose);
  const auto t = trades_in(out.events);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].trade.price, Price{25000});
  EXPECT_EQ(t[0].trade.qty, Qty{3});
  EXPECT_EQ(expired_in(out.events).front(), 3u);
}

TEST_F(EngineTest, GttExpiryWaitsForTheUncross) {
  now_ = at_utc(2020, 11, 23, 11, 0);
  Order o = limit(Side::Buy, 90, 10, TimeInForce::GTT);
  o.expiry = at_utc(2020, 11, 23, 12, 5);
  submit(o);
  now_ = at_utc(2020, 11, 23, 12, 0);
  schedule(SessionType::IntradayAuctionCall);
  EXPECT_TRUE(expired_in(tick_at(at_utc(2020, 11, 23, 12, 6)).events).empty());
  EXPECT_EQ(where(1), Location::Visible);
  now_ = at_utc(2020, 11, 23, 12, 15);
  EXPECT_EQ(expired_in(schedule(SessionType::ContinuousTrading).events), (std::vector<OrderId>{1}));

  // Outside auctions the timer sweep expires GTT on time.
  Order p = limit(Side::Buy, 90, 10, TimeInForce::GTT);
  p.expiry = now_ + 1min;
  submit(p);
  EXPECT_EQ(expired_in(tick_at(now_ + 1min).events), (std::vector<OrderId>{2}));
}

TEST_F(EngineTest, DayOrdersExpireAtPostClose) {
  submit(limit(Side::Buy, 90, 10));
  submit(limit(Side::Buy, 91, 10, TimeInForce::GTC));
  schedule(SessionType::ClosingPricePublication);
  const auto out = schedule(SessionType::PostClose);
  EXPECT_EQ(expired_in(out.events), (std::vector<OrderId>{1}));
  EXPECT_EQ(where(2), Location::Visible);
}

TEST_F(EngineTest, StopsWaitThroughAuctionsAndElectAfterwards) {
  submit(limit(Side::Sell, 25005, 10));
  schedule(SessionType::IntradayAuctionCall);
  EXPECT_EQ(submit(stop(Side::Buy, 25001, 4)).events, (Events{Ack{2}}));
  EXPECT_EQ(where(2), Location::Stop);
  submit(limit(Side::Buy, 25005, 2));
  const auto out = schedule(SessionType::ContinuousTrading);
  // The uncross trades at 25005, electing the stop, which then lifts the rest.
  const auto t = trades_in(out.events);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[1].buy_order_id, 2u);
  EXPECT_EQ(t[1].trade.qty, Qty{4});
}

TEST_F(EngineTest, RuleMatricesGateSubmissions) {
  EXPECT_EQ(submit(hidden_order(Side::Buy, 100, 10, 0, TimeInForce::GFX)).events,
            (Events{Reject{RejectReason::InvalidCombo, 0}}));
  EXPECT_EQ(submit(limit(Side::Buy, 100, 10, TimeInForce::OPG)).events,
            (Events{Reject{RejectReason::SessionRejected, 0}}));
  EXPECT_EQ(submit(limit(Side::Buy, 100, 0)).events, (Events{Reject{RejectReason::InvalidQty, 0}}));
  EXPECT_EQ(submit(limit(Side::Buy, 100, 10)).events, (Events{Ack{1}}));
}

// No session outside continuous trading may execute on submission.
TEST(EngineProperty, NoExecutionsOutsideMatchingSessions) {
  const SessionType quiet[] = {SessionType::StartOfTrading, SessionType::Halt,
                               SessionType::HaltAndClose,   SessionType::PostClose,
                               SessionType::ClosingPricePublication, SessionType::Pause,
                               SessionType::OpeningAuctionCall, SessionType::IntradayAuctionCall,
                               SessionType::ClosingAuctionCall, SessionType::ClosingPriceCross};
  std::mt19937_64 rng(0x5e55);
  const auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  for (const SessionType s : quiet) {
    SecurityEngine engine(config_with_reference(100));
    Timestamp now = at_utc(2020, 11, 23, 9, 0);
    for (int i = 0; i < 20; ++i) {
      engine.submit(limit(i % 2 ? Side::Buy : Side::Sell, i % 2 ? 95 - i % 5 : 105 + i % 5, 10), now += 1ms);
    }
    if (is_manual_session(s)) {
      ASSERT_FALSE(engine.admin(s, now).error);
    } else {
      engine.on_schedule(s, now);
    }
    ASSERT_EQ(engine.session(), s);
    for (int i = 0; i < 400; ++i) {
      now += 1ms;
      if (pick(0, 9) == 0) {
        const auto out = engine.cancel(static_cast<OrderId>(pick(1, 40)), pick(0, 1) ? Side::Buy : Side::Sell, now);
        EXPECT_TRUE(trades_in(out.events).empty());
        continue;
      }
      Order o;
      o.client_id = 1;
      o.side = pick(0, 1) ? Side::Buy : Side::Sell;
      o.order_type = static_cast<OrderType>(pick(0, kOrderTypeCount - 1));
      o.tif = static_cast<TimeInForce>(pick(0, kTifCount - 1));
      o.qty = Qty{pick(1, 30)};
      o.price = has_limit_price(o.order_type) ? Price{pick(90, 110)} : Price{0};
      o.stop_price = is_stop(o.order_type) ? Price{pick(90, 110)} : Price{0};
      if (o.tif == TimeInForce::GTD || o.tif == TimeInForce::GTT) o.expiry = now + 24h;
      const auto out = engine.submit(o, now);
      EXPECT_TRUE(trades_in(out.events).empty()) << to_string(s);
      EXPECT_TRUE(trades_in(engine.tick(now).events).empty());
      EXPECT_EQ(engine.session(), s);
    }
  }
}

}  // namespace
}  // namespace matchbook
