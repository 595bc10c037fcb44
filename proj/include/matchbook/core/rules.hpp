#pragma once

#include <array>
#include <optional>

#include "matchbook/core/types.hpp"

namespace matchbook {

// Rows of the session x instruction matrix. FcoAuctionCall is present in the
// published table but no session ever maps to it.
enum class SessionRow : std::uint8_t {
  StartOfTrading,
  OpeningAuctionCall,
  ContinuousTrading,
  VolatilityAuctionCall,
  IntradayAuctionCall,
  ClosingAuctionCall,
  ClosingPricePublication,
  ClosingPriceCross,
  PostClose,
  Halt,
  HaltAndClose,
  Pause,
  ReOpeningAuctionCall,
  FcoAuctionCall,
};

// Columns of the session x instruction matrix: eleven TIFs then four order
// type groups (stop and stop-limit share a column).
enum class InstructionColumn : std::uint8_t {
  OPG,
  ATC,
  IOC,
  FOK,
  GTC,
  GTD,
  GTT,
  GFA,
  GFX,
  DAY,
  CPX,
  MO,
  LO,
  StopAndStopLimit,
  HiddenLimit,
};

inline constexpr int kSessionRowCount = 14;
inline constexpr int kInstructionColumnCount = 15;

InstructionColumn column_for(TimeInForce tif);
InstructionColumn column_for(OrderType type);

// TradeReporting has no row; every instruction is rejected while it is active.
std::optional<SessionRow> row_for(SessionType session);

// Order type x TIF matrix. Returns Accepted or Rejected.
Disposition validate_tif_order_combo(OrderType type, TimeInForce tif);

Disposition session_disposition(SessionRow row, InstructionColumn column);
Disposition session_disposition(SessionType session, TimeInForce tif);
Disposition session_disposition(SessionType session, OrderType type);

// Full gate applied to a new order: both matrices, with the order's TIF
// column and order-type column combined. Precedence when the two columns
// disagree: Rejected, AcceptedParked, AcceptedExpireIfUnfilled,
// CarriedForward, Accepted.
Disposition order_disposition(SessionType session, OrderType type, TimeInForce tif);

constexpr bool is_routable(Disposition d) { return d != Disposition::Rejected; }

}  // namespace matchbook
