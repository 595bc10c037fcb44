#pragma once

// The two rule tables as published, one letter per cell colour:
// A accepted, R rejected, P parked until injected, E expired if unfilled on
// aggression, C carried forward. Rows and columns keep the published order,
// which differs from the enum order used by the engine.

#include <array>
#include <string_view>

#include "matchbook/core/rules.hpp"

namespace matchbook::testing {

struct ComboRow {
  TimeInForce tif;
  std::string_view cells;  // Market Limit Hidden Stop StopLimit
};

inline constexpr std::array<ComboRow, 11> kPublishedCombos{{
    {TimeInForce::IOC, "AAAAA"},
    {TimeInForce::FOK, "AAAAA"},
    {TimeInForce::DAY, "AAAAA"},
    {TimeInForce::GFA, "AAAAA"},
    {TimeInForce::GFX, "AARRR"},
    {TimeInForce::OPG, "AARRR"},
    {TimeInForce::ATC, "AARRR"},
    {TimeInForce::GTC, "AAAAA"},
    {TimeInForce::GTD, "AAAAA"},
    {TimeInForce::GTT, "AAAAA"},
    {TimeInForce::CPX, "AAAAA"},  // stops are excluded by the written rule
}};

inline constexpr std::array<OrderType, 5> kComboColumns{OrderType::Market, OrderType::Limit, OrderType::Hidden,
                                                         OrderType::Stop, OrderType::StopLimit};

struct SessionTableRow {
  SessionRow row;
  std::string_view cells;  // OPG ATC IOC FOK GTC GTD GTT GFA GFX DAY CPX | MO LO SO&SL HL
};

inline constexpr std::array<SessionTableRow, 14> kPublishedSessions{{
    {SessionRow::StartOfTrading, "RRRRCCRRRRRRRRR"},
    {SessionRow::OpeningAuctionCall, "APRRAAAAPAPAAPR"},
    {SessionRow::ContinuousTrading, "RPEEAAAPPAPEAPA"},
    {SessionRow::VolatilityAuctionCall, "RPRRAAAAPAPAAPR"},
    {SessionRow::IntradayAuctionCall, "RPRRAAAAAAPAAPR"},
    {SessionRow::ClosingAuctionCall, "RARRAAAARAPAAPR"},
    {SessionRow::ClosingPricePublication, "RRRRPPPRRPPPPRR"},
    {SessionRow::ClosingPriceCross, "RRRRAAARRAAAARR"},
    {SessionRow::PostClose, "RRRRRRRRRRRRRRR"},
    {SessionRow::Halt, "RRRRRRRRRRRRRRR"},
    {SessionRow::HaltAndClose, "RRRRRRRRRRRRRRR"},
    {SessionRow::Pause, "RPRRAAAPPAPAAPR"},
    {SessionRow::ReOpeningAuctionCall, "RPRRAAAAAAPAAPR"},
    {SessionRow::FcoAuctionCall, "RPRRAAAAAAPAAPR"},
}};

inline constexpr std::array<TimeInForce, 11> kSessionTifColumns{
    TimeInForce::OPG, TimeInForce::ATC, TimeInForce::IOC, TimeInForce::FOK, TimeInForce::GTC, TimeInForce::GTD,
    TimeInForce::GTT, TimeInForce::GFA, TimeInForce::GFX, TimeInForce::DAY, TimeInForce::CPX};

inline constexpr Disposition disposition_of(char c) {
  switch (c) {
    case 'A':
      return Disposition::Accepted;
    case 'P':
      return Disposition::AcceptedParked;
    case 'E':
      return Disposition::AcceptedExpireIfUnfilled;
    case 'C':
      return Disposition::CarriedForward;
    default:
      return Disposition::Rejected;
  }
}

// Published cell lookups, with the written CPX rule for stops applied.
inline Disposition published_combo(OrderType type, TimeInForce tif) {
  if (tif == TimeInForce::CPX && (type == OrderType::Stop || type == OrderType::StopLimit))
    return Disposition::Rejected;
  for (const auto& r : kPublishedCombos) {
    if (r.tif != tif) continue;
    for (std::size_t c = 0; c < kComboColumns.size(); ++c)
      if (kComboColumns[c] == type) return disposition_of(r.cells[c]);
  }
  return Disposition::Rejected;
}

inline Disposition published_session_cell(SessionRow row, std::size_t column) {
  for (const auto& r : kPublishedSessions)
    if (r.row == row) return disposition_of(r.cells[column]);
  return Disposition::Rejected;
}

inline std::size_t session_column(TimeInForce tif) {
  for (std::size_t c = 0; c < kSessionTifColumns.size(); ++c)
    if (kSessionTifColumns[c] == tif) return c;
  return 0;
}

inline std::size_t session_column(OrderType type) {
  switch (type) {
    case OrderType::Market:
      return 11;
    case OrderType::Limit:
      return 12;
    case OrderType::Stop:
    case OrderType::StopLimit:
      return 13;
    case OrderType::Hidden:
      return 14;
  }
  return 12;
}

}  // namespace matchbook::testing
