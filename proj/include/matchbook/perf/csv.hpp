#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "matchbook/core/types.hpp"

namespace matchbook::perf {

inline constexpr std::string_view kLimitOrderHeader = R"(SecurityId,"OrderId","SubmittedTime","Price","Volume","Side")";
inline constexpr std::string_view kTradeHeader = R"(TradeId,"Price","Quantity","CreationTime")";
inline constexpr std::string_view kSnapshotHeader = R"(Side,"Price","Quantity")";

struct LimitOrderRow {
  SecurityId security_id{0};
  OrderId order_id{0};
  Timestamp submitted{};
  std::int64_t price{0};
  std::int64_t volume{0};
  Side side{Side::Buy};
  friend bool operator==(const LimitOrderRow&, const LimitOrderRow&) = default;
};

// trade_id is the id of the resting order that was hit.
struct TradeRow {
  std::uint64_t trade_id{0};
  std::int64_t price{0};
  std::int64_t quantity{0};
  Timestamp created{};
  friend bool operator==(const TradeRow&, const TradeRow&) = default;
};

struct SnapshotRow {
  Side side{Side::Buy};
  std::int64_t price{0};
  std::int64_t quantity{0};
  friend bool operator==(const SnapshotRow&, const SnapshotRow&) = default;
};

// UTC, "yyyy-MM-dd HH:mm:ss.SSS".
std::string format_utc(Timestamp t);
// Throws std::invalid_argument on anything else.
Timestamp parse_utc(std::string_view text);

std::string format_row(const LimitOrderRow& r);
std::string format_row(const TradeRow& r);
std::string format_row(const SnapshotRow& r);

void write_limit_orders(std::ostream& out, const std::vector<LimitOrderRow>& rows);
void write_trades(std::ostream& out, const std::vector<TradeRow>& rows);
void write_snapshot(std::ostream& out, const std::vector<SnapshotRow>& rows);

// File writers throw std::runtime_error on I/O errors.
void write_limit_orders_csv(const std::filesystem::path& path, const std::vector<LimitOrderRow>& rows);
void write_trades_csv(const std::filesystem::path& path, const std::vector<TradeRow>& rows);
void write_snapshot_csv(const std::filesystem::path& path, const std::vector<SnapshotRow>& rows);

// Readers check the header and throw std::runtime_error naming the bad line.
std::vector<LimitOrderRow> read_limit_orders(std::istream& in);
std::vector<TradeRow> read_trades(std::istream& in);
std::vector<LimitOrderRow> read_limit_orders_csv(const std::filesystem::path& path);
std::vector<TradeRow> read_trades_csv(const std::filesystem::path& path);

}  // namespace matchbook::perf
