#include "matchbook/core/types.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <string>
#include <utility>

namespace matchbook {
namespace {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(std::string_view text, const std::array<std::pair<std::string_view, Enum>, N>& table) {
  for (const auto& [name, value] : table) {
    if (iequals(name, text)) return value;
  }
  return std::nullopt;
}

constexpr std::array<std::string_view, kSessionTypeCount> kSessionNames = {
    "StartOfTrading",       "OpeningAuctionCall",    "ContinuousTrading", "VolatilityAuctionCall",
    "IntradayAuctionCall",  "ClosingAuctionCall",    "ClosingPricePublication",
    "ClosingPriceCross",    "PostClose",             "Halt",              "HaltAndClose",
    "Pause",                "ReOpeningAuctionCall",  "TradeReporting",
};

constexpr std::array<std::string_view, kTifCount> kTifNames = {"OPG", "GFA", "GFX", "ATC", "DAY", "IOC",
                                                               "FOK", "GTC", "GTD", "GTT", "CPX"};

constexpr std::array<std::string_view, kOrderTypeCount> kOrderTypeNames = {"Market", "Limit", "Hidden", "Stop",
                                                                           "StopLimit"};

}  // namespace

std::string_view to_string(Side s) { return s == Side::Buy ? "Buy" : "Sell"; }

std::string_view to_string(OrderType t) { return kOrderTypeNames.at(static_cast<std::size_t>(t)); }

std::string_view to_string(TimeInForce t) { return kTifNames.at(static_cast<std::size_t>(t)); }

std::string_view to_string(SessionType s) { return kSessionNames.at(static_cast<std::size_t>(s)); }

std::string_view to_string(Disposition d) {
  switch (d) {
    case Disposition::Accepted:
      return "Accepted";
    case Disposition::Rejected:
      return "Rejected";
    case Disposition::AcceptedParked:
      return "AcceptedParked";
    case Disposition::AcceptedExpireIfUnfilled:
      return "AcceptedExpireIfUnfilled";
    case Disposition::CarriedForward:
      return "CarriedForward";
  }
  return "?";
}

std::string_view to_string(RejectReason r) {
  switch (r) {
    case RejectReason::InvalidCombo:
      return "invalid-combo";
    case RejectReason::SessionRejected:
      return "session-rejected";
    case RejectReason::NotLoggedIn:
      return "not-logged-in";
    case RejectReason::UnknownSecurity:
      return "unknown-security";
    case RejectReason::InvalidQty:
      return "invalid-qty";
    case RejectReason::InvalidPrice:
      return "invalid-price";
    case RejectReason::BelowMinReserve:
      return "below-min-reserve";
    case RejectReason::InvalidStopPrice:
      return "invalid-stop-price";
    case RejectReason::InvalidExpiry:
      return "invalid-expiry";
    case RejectReason::UnknownOrder:
      return "unknown-order";
    case RejectReason::InvalidDisplayQty:
      return "invalid-display-qty";
    case RejectReason::InvalidField:
      return "invalid-field";
  }
  return "?";
}

std::optional<Side> parse_side(std::string_view text) {
  static constexpr std::array<std::pair<std::string_view, Side>, 4> table{{
      {"Buy", Side::Buy}, {"B", Side::Buy}, {"Sell", Side::Sell}, {"S", Side::Sell}}};
  return lookup(text, table);
}

std::optional<OrderType> parse_order_type(std::string_view text) {
  static constexpr std::array<std::pair<std::string_view, OrderType>, 9> table{{
      {"Market", OrderType::Market},
      {"MO", OrderType::Market},
      {"Limit", OrderType::Limit},
      {"LO", OrderType::Limit},
      {"Hidden", OrderType::Hidden},
      {"HiddenLimit", OrderType::Hidden},
      {"Stop", OrderType::Stop},
      {"StopMarket", OrderType::Stop},
      {"StopLimit", OrderType::StopLimit},
  }};
  return lookup(text, table);
}

std::optional<TimeInForce> parse_tif(std::string_view text) {
  for (std::size_t i = 0; i < kTifNames.size(); ++i) {
    if (iequals(kTifNames[i], text)) return static_cast<TimeInForce>(i);
  }
  return std::nullopt;
}

std::optional<SessionType> parse_session(std::string_view text) {
  for (std::size_t i = 0; i < kSessionNames.size(); ++i) {
    if (iequals(kSessionNames[i], text)) return static_cast<SessionType>(i);
  }
  return std::nullopt;
}

std::optional<Side> side_from_byte(std::uint8_t b) {
  if (b >= kSideCount) return std::nullopt;
  return static_cast<Side>(b);
}

std::optional<OrderType> order_type_from_byte(std::uint8_t b) {
  if (b >= kOrderTypeCount) return std::nullopt;
  return static_cast<OrderType>(b);
}

std::optional<TimeInForce> tif_from_byte(std::uint8_t b) {
  if (b >= kTifCount) return std::nullopt;
  return static_cast<TimeInForce>(b);
}

std::optional<SessionType> session_from_byte(std::uint8_t b) {
  if (b >= kSessionTypeCount) return std::nullopt;
  return static_cast<SessionType>(b);
}

}  // namespace matchbook
