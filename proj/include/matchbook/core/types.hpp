#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <string_view>

namespace matchbook {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;
using Millis = std::chrono::milliseconds;

using OrderId = std::uint64_t;
using ClientId = std::uint32_t;
using SecurityId = std::uint32_t;

// Price in integer ticks. 0 means "no limit price" (market and stop-market).
struct Price {
  std::int64_t value{0};

  constexpr Price() = default;
  constexpr explicit Price(std::int64_t ticks) : value(ticks) {}

  friend constexpr auto operator<=>(Price, Price) = default;
};

struct Qty {
  std::int64_t value{0};

  constexpr Qty() = default;
  constexpr explicit Qty(std::int64_t shares) : value(shares) {}

  constexpr bool positive() const { return value > 0; }

  friend constexpr auto operator<=>(Qty, Qty) = default;
  friend constexpr Qty operator+(Qty a, Qty b) { return Qty{a.value + b.value}; }
  friend constexpr Qty operator-(Qty a, Qty b) { return Qty{a.value - b.value}; }
  constexpr Qty& operator+=(Qty o) {
    value += o.value;
    return *this;
  }
  constexpr Qty& operator-=(Qty o) {
    value -= o.value;
    return *this;
  }
};

enum class Side : std::uint8_t { Buy = 0, Sell = 1 };

enum class OrderType : std::uint8_t { Market = 0, Limit = 1, Hidden = 2, Stop = 3, StopLimit = 4 };

enum class TimeInForce : std::uint8_t {
  OPG = 0,
  GFA = 1,
  GFX = 2,
  ATC = 3,
  DAY = 4,
  IOC = 5,
  FOK = 6,
  GTC = 7,
  GTD = 8,
  GTT = 9,
  CPX = 10,
};

enum class SessionType : std::uint8_t {
  StartOfTrading = 0,
  OpeningAuctionCall = 1,
  ContinuousTrading = 2,
  VolatilityAuctionCall = 3,
  IntradayAuctionCall = 4,
  ClosingAuctionCall = 5,
  ClosingPricePublication = 6,
  ClosingPriceCross = 7,
  PostClose = 8,
  Halt = 9,
  HaltAndClose = 10,
  Pause = 11,
  ReOpeningAuctionCall = 12,
  TradeReporting = 13,
};

enum class Disposition : std::uint8_t {
  Accepted,
  Rejected,
  AcceptedParked,
  AcceptedExpireIfUnfilled,
  CarriedForward,
};

enum class RejectReason : std::uint8_t {
  InvalidCombo = 1,     // order type x TIF
  SessionRejected = 2,  // session x instruction
  NotLoggedIn = 3,
  UnknownSecurity = 4,
  InvalidQty = 5,
  InvalidPrice = 6,
  BelowMinReserve = 7,
  InvalidStopPrice = 8,
  InvalidExpiry = 9,
  UnknownOrder = 10,
  InvalidDisplayQty = 11,
  InvalidField = 12,
};

inline constexpr int kSideCount = 2;
inline constexpr int kOrderTypeCount = 5;
inline constexpr int kTifCount = 11;
inline constexpr int kSessionTypeCount = 14;

constexpr Side opposite(Side s) { return s == Side::Buy ? Side::Sell : Side::Buy; }

constexpr bool is_stop(OrderType t) { return t == OrderType::Stop || t == OrderType::StopLimit; }

constexpr bool has_limit_price(OrderType t) {
  return t == OrderType::Limit || t == OrderType::Hidden || t == OrderType::StopLimit;
}

// Call sessions that accumulate orders and end with an uncross.
constexpr bool is_auction_call(SessionType s) {
  switch (s) {
    case SessionType::OpeningAuctionCall:
    case SessionType::VolatilityAuctionCall:
    case SessionType::IntradayAuctionCall:
    case SessionType::ClosingAuctionCall:
    case SessionType::ReOpeningAuctionCall:
      return true;
    default:
      return false;
  }
}

constexpr bool is_manual_session(SessionType s) {
  return s == SessionType::Halt || s == SessionType::HaltAndClose || s == SessionType::Pause ||
         s == SessionType::ReOpeningAuctionCall;
}

std::string_view to_string(Side s);
std::string_view to_string(OrderType t);
std::string_view to_string(TimeInForce t);
std::string_view to_string(SessionType s);
std::string_view to_string(Disposition d);
std::string_view to_string(RejectReason r);

// Case-insensitive; accepts the enum spellings above plus common aliases
// ("Day", "StopMarket", "IntraDayAuctionCall", ...).
std::optional<Side> parse_side(std::string_view text);
std::optional<OrderType> parse_order_type(std::string_view text);
std::optional<TimeInForce> parse_tif(std::string_view text);
std::optional<SessionType> parse_session(std::string_view text);

std::optional<Side> side_from_byte(std::uint8_t b);
std::optional<OrderType> order_type_from_byte(std::uint8_t b);
std::optional<TimeInForce> tif_from_byte(std::uint8_t b);
std::optional<SessionType> session_from_byte(std::uint8_t b);

}  // namespace matchbook
