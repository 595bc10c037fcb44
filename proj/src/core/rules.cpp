#include "matchbook/core/rules.hpp"

#include <algorithm>

namespace matchbook {
namespace {

constexpr Disposition A = Disposition::Accepted;
constexpr Disposition R = Disposition::Rejected;
constexpr Disposition P = Disposition::AcceptedParked;
constexpr Disposition E = Disposition::AcceptedExpireIfUnfilled;
constexpr Disposition C = Disposition::CarriedForward;

// Rows: TIF in enum order (OPG GFA GFX ATC DAY IOC FOK GTC GTD GTT CPX).
// Columns: Market Limit Hidden Stop StopLimit.
// CPX is rejected for both stop columns even though the published table
// colours them green; the written rule excluding stops from CPX wins.
constexpr Disposition kTifOrderMatrix[kTifCount][kOrderTypeCount] = {
    /* OPG */ {A, A, R, R, R},
    /* GFA */ {A, A, A, A, A},
    /* GFX */ {A, A, R, R, R},
    /* ATC */ {A, A, R, R, R},
    /* DAY */ {A, A, A, A, A},
    /* IOC */ {A, A, A, A, A},
    /* FOK */ {A, A, A, A, A},
    /* GTC */ {A, A, A, A, A},
    /* GTD */ {A, A, A, A, A},
    /* GTT */ {A, A, A, A, A},
    /* CPX */ {A, A, A, R, R},
};

// Columns: OPG ATC IOC FOK GTC GTD GTT GFA GFX DAY CPX | MO LO SO&SL HL
constexpr Disposition kSessionMatrix[kSessionRowCount][kInstructionColumnCount] = {
    /* StartOfTrading          */ {R, R, R, R, C, C, R, R, R, R, R, R, R, R, R},
    /* OpeningAuctionCall      */ {A, P, R, R, A, A, A, A, P, A, P, A, A, P, R},
    /* ContinuousTrading       */ {R, P, E, E, A, A, A, P, P, A, P, E, A, P, A},
    /* VolatilityAuctionCall   */ {R, P, R, R, A, A, A, A, P, A, P, A, A, P, R},
    /* IntradayAuctionCall     */ {R, P, R, R, A, A, A, A, A, A, P, A, A, P, R},
    /* ClosingAuctionCall      */ {R, A, R, R, A, A, A, A, R, A, P, A, A, P, R},
    /* ClosingPricePublication */ {R, R, R, R, P, P, P, R, R, P, P, P, P, R, R},
    /* ClosingPriceCross       */ {R, R, R, R, A, A, A, R, R, A, A, A, A, R, R},
    /* PostClose               */ {R, R, R, R, R, R, R, R, R, R, R, R, R, R, R},
    /* Halt                    */ {R, R, R, R, R, R, R, R, R, R, R, R, R, R, R},
    /* HaltAndClose            */ {R, R, R, R, R, R, R, R, R, R, R, R, R, R, R},
    /* Pause                   */ {R, P, R, R, A, A, A, P, P, A, P, A, A, P, R},
    /* ReOpeningAuctionCall    */ {R, P, R, R, A, A, A, A, A, A, P, A, A, P, R},
    /* FcoAuctionCall          */ {R, P, R, R, A, A, A, A, A, A, P, A, A, P, R},
};

int precedence(Disposition d) {
  switch (d) {
    case Disposition::Rejected:
      return 4;
    case Disposition::AcceptedParked:
      return 3;
    case Disposition::AcceptedExpireIfUnfilled:
      return 2;
    case Disposition::CarriedForward:
      return 1;
    case Disposition::Accepted:
      return 0;
  }
  return 4;
}

}  // namespace

InstructionColumn column_for(TimeInForce tif) {
  switch (tif) {
    case TimeInForce::OPG:
      return InstructionColumn::OPG;
    case TimeInForce::ATC:
      return InstructionColumn::ATC;
    case TimeInForce::IOC:
      return InstructionColumn::IOC;
    case TimeInForce::FOK:
      return InstructionColumn::FOK;
    case TimeInForce::GTC:
      return InstructionColumn::GTC;
    case TimeInForce::GTD:
      return InstructionColumn::GTD;
    case TimeInForce::GTT:
      return InstructionColumn::GTT;
    case TimeInForce::GFA:
      return InstructionColumn::GFA;
    case TimeInForce::GFX:
      return InstructionColumn::GFX;
    case TimeInForce::DAY:
      return InstructionColumn::DAY;
    case TimeInForce::CPX:
      return InstructionColumn::CPX;
  }
  return InstructionColumn::DAY;
}

InstructionColumn column_for(OrderType type) {
  switch (type) {
    case OrderType::Market:
      return InstructionColumn::MO;
    case OrderType::Limit:
      return InstructionColumn::LO;
    case OrderType::Stop:
    case OrderType::StopLimit:
      return InstructionColumn::StopAndStopLimit;
    case OrderType::Hidden:
      return InstructionColumn::HiddenLimit;
  }
  return InstructionColumn::LO;
}

std::optional<SessionRow> row_for(SessionType session) {
  if (session == SessionType::TradeReporting) return std::nullopt;
  // SessionType and SessionRow share ordinals for the first thirteen values.
  return static_cast<SessionRow>(static_cast<std::uint8_t>(session));
}

Disposition validate_tif_order_combo(OrderType type, TimeInForce tif) {
  return kTifOrderMatrix[static_cast<int>(tif)][static_cast<int>(type)];
}

Disposition session_disposition(SessionRow row, InstructionColumn column) {
  return kSessionMatrix[static_cast<int>(row)][static_cast<int>(column)];
}

Disposition session_disposition(SessionType session, TimeInForce tif) {
  const auto row = row_for(session);
  if (!row) return Disposition::Rejected;
  return session_disposition(*row, column_for(tif));
}

Disposition session_disposition(SessionType session, OrderType type) {
  const auto row = row_for(session);
  if (!row) return Disposition::Rejected;
  return session_disposition(*row, column_for(type));
}

Disposition order_disposition(SessionType session, OrderType type, TimeInForce tif) {
  if (validate_tif_order_combo(type, tif) == Disposition::Rejected) return Disposition::Rejected;
  const Disposition by_tif = session_disposition(session, tif);
  const Disposition by_type = session_disposition(session, type);
  return precedence(by_tif) >= precedence(by_type) ? by_tif : by_type;
}

}  // namespace matchbook
