#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "matchbook/core/types.hpp"

namespace matchbook::proto {

inline constexpr std::uint16_t kSchemaVersion = 1;
inline constexpr std::size_t kHeaderSize = 20;
inline constexpr std::size_t kPasswordSize = 12;

enum class TemplateId : std::uint16_t {
  NewOrder = 1,
  OrderAck = 2,
  ExecutionReport = 3,
  CancelOrder = 4,
  Login = 5,
  LoginResponse = 6,
  Logout = 7,
  LogoutResponse = 8,
  MarketDataUpdate = 9,
  SessionChange = 10,
  AdminCommand = 11,
};

enum class LoginStatus : std::uint8_t {
  Ok = 0,
  AlreadyLoggedIn = 1,
  InvalidCredentials = 2,
  NotLoggedIn = 3,  // logout without a login
};

// Order lifecycle as reported by OrderAck. Fills travel as ExecutionReport.
enum class AckStatus : std::uint8_t {
  Accepted = 0,
  Rejected = 1,
  Cancelled = 2,
  CancelRejected = 3,
  Expired = 4,
  StopElected = 5,
};

// MarketDataUpdate.flags
inline constexpr std::uint8_t kHasBid = 1u << 0;
inline constexpr std::uint8_t kHasAsk = 1u << 1;
inline constexpr std::uint8_t kHasLast = 1u << 2;
inline constexpr std::uint8_t kKnownFlags = kHasBid | kHasAsk | kHasLast;

struct NewOrder {
  std::uint32_t security_id{0};
  Side side{Side::Buy};
  OrderType order_type{OrderType::Limit};
  TimeInForce tif{TimeInForce::DAY};
  std::int64_t price{0};
  std::int64_t qty{0};
  std::int64_t display_qty{0};
  std::int64_t mes{0};
  std::int64_t stop_price{0};
  std::uint64_t expiry{0};  // ms since the Unix epoch, 0 = none
  friend bool operator==(const NewOrder&, const NewOrder&) = default;
};

struct OrderAck {
  std::uint64_t order_id{0};
  AckStatus status{AckStatus::Accepted};
  std::uint8_t reject_code{0};  // RejectReason byte, 0 when not rejected
  friend bool operator==(const OrderAck&, const OrderAck&) = default;
};

// trade_id 0 with qty 0 is the acceptance report sent once per new order.
struct ExecutionReport {
  std::uint64_t order_id{0};
  std::uint64_t trade_id{0};
  std::int64_t price{0};
  std::int64_t qty{0};
  std::int64_t leaves_qty{0};
  friend bool operator==(const ExecutionReport&, const ExecutionReport&) = default;
};

struct CancelOrder {
  std::uint64_t order_id{0};
  Side side{Side::Buy};
  friend bool operator==(const CancelOrder&, const CancelOrder&) = default;
};

struct Login {
  std::uint32_t comp_id{0};
  std::string password;  // at most 12 printable ASCII chars, no trailing spaces
  friend bool operator==(const Login&, const Login&) = default;
};

struct LoginResponse {
  LoginStatus status{LoginStatus::Ok};
  friend bool operator==(const LoginResponse&, const LoginResponse&) = default;
};

struct Logout {
  friend bool operator==(const Logout&, const Logout&) = default;
};

struct LogoutResponse {
  LoginStatus status{LoginStatus::Ok};
  friend bool operator==(const LogoutResponse&, const LogoutResponse&) = default;
};

struct MarketDataUpdate {
  std::uint32_t security_id{0};
  std::int64_t bid{0};
  std::int64_t bid_qty{0};
  std::int64_t ask{0};
  std::int64_t ask_qty{0};
  std::int64_t last_price{0};
  std::int64_t last_qty{0};
  SessionType session{SessionType::ContinuousTrading};
  std::uint8_t flags{0};
  friend bool operator==(const MarketDataUpdate&, const MarketDataUpdate&) = default;
};

struct SessionChange {
  std::uint32_t security_id{0};
  SessionType session{SessionType::ContinuousTrading};
  friend bool operator==(const SessionChange&, const SessionChange&) = default;
};

// Target session for the security named in the header's client_id field.
struct AdminCommand {
  SessionType command{SessionType::Halt};
  friend bool operator==(const AdminCommand&, const AdminCommand&) = default;
};

using Body = std::variant<NewOrder, OrderAck, ExecutionReport, CancelOrder, Login, LoginResponse, Logout,
                          LogoutResponse, MarketDataUpdate, SessionChange, AdminCommand>;

struct Frame {
  std::uint32_t client_id{0};
  std::uint64_t sequence{0};
  Body body;
  friend bool operator==(const Frame&, const Frame&) = default;
};

TemplateId template_of(const Body& body);
// Body length in bytes for a template; 0 for unknown templates.
std::size_t body_size(TemplateId id);
inline std::size_t frame_size(TemplateId id) { return kHeaderSize + body_size(id); }
std::string_view to_string(TemplateId id);
std::string_view to_string(LoginStatus s);
std::string_view to_string(AckStatus s);

}  // namespace matchbook::proto
