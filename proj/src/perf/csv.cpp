#include "matchbook/perf/csv.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

namespace matchbook::perf {
namespace {

using namespace std::chrono;

std::string_view side_word(Side s) { return s == Side::Buy ? "Buy" : "Sell"; }

template <typename Int>
Int to_int(std::string_view s, std::string_view what) {
  Int v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || p != s.data() + s.size()) {
    throw std::invalid_argument(fmt::format("bad {}: '{}'", what, s));
  }
  return v;
}

// Splits one line of the result files: first field bare, the rest quoted.
std::vector<std::string_view> split_row(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i <= line.size()) {
    if (i < line.size() && line[i] == '"') {
      const auto close = line.find('"', i + 1);
      if (close == std::string_view::npos) throw std::invalid_argument("unterminated quote");
      out.push_back(line.substr(i + 1, close - i - 1));
      i = close + 1;
      if (i < line.size() && line[i] != ',') throw std::invalid_argument("text after closing quote");
    } else {
      const auto comma = std::min(line.find(',', i), line.size());
      out.push_back(line.substr(i, comma - i));
      i = comma;
    }
    ++i;
  }
  return out;
}

template <typename Row, typename Parse>
std::vector<Row> read_rows(std::istream& in, std::string_view header, Parse parse) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) throw std::runtime_error("unexpected header: " + line);
  std::vector<Row> rows;
  for (int n = 2; std::getline(in, line); ++n) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      rows.push_back(parse(split_row(line)));
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(fmt::format("line {}: {}", n, e.what()));
    }
  }
  return rows;
}

template <typename Write>
void write_file(const std::filesystem::path& path, Write write) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  write(out);
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

}  // namespace

std::string format_utc(Timestamp t) {
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss tod{t - day};
  return fmt::format("{:04}-{:02}-{:02} {:02}:{:02}:{:02}.{:03}", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), tod.hours().count(),
                     tod.minutes().count(), tod.seconds().count(), tod.subseconds().count());
}

Timestamp parse_utc(std::string_view s) {
  const auto bad = [&] { return std::invalid_argument(fmt::format("bad timestamp: '{}'", s)); };
  if (s.size() != 23 || s[4] != '-' || s[7] != '-' || s[10] != ' ' || s[13] != ':' || s[16] != ':' || s[19] != '.') {
    throw bad();
  }
  const auto num = [&](std::size_t at, std::size_t len) {
    try {
      return to_int<int>(s.substr(at, len), "timestamp");
    } catch (const std::invalid_argument&) {
      throw bad();
    }
  };
  const year_month_day ymd{year{num(0, 4)}, month{static_cast<unsigned>(num(5, 2))},
                           day{static_cast<unsigned>(num(8, 2))}};
  const int h = num(11, 2), m = num(14, 2), sec = num(17, 2), ms = num(20, 3);
  if (!ymd.ok() || h > 23 || m > 59 || sec > 59) throw bad();
  return sys_days{ymd} + hours{h} + minutes{m} + seconds{sec} + milliseconds{ms};
}

std::string format_row(const LimitOrderRow& r) {
  return fmt::format(R"({},"{}","{}","{}","{}","{}")", r.security_id, r.order_id, format_utc(r.submitted), r.price,
                     r.volume, side_word(r.side));
}

std::string format_row(const TradeRow& r) {
  return fmt::format(R"({},"{}","{}","{}")", r.trade_id, r.price, r.quantity, format_utc(r.created));
}

std::string format_row(const SnapshotRow& r) {
  return fmt::format(R"({},"{}","{}")", side_word(r.side), r.price, r.quantity);
}

void write_limit_orders(std::ostream& out, const std::vector<LimitOrderRow>& rows) {
  out << kLimitOrderHeader << '\n';
  for (const auto& r : rows) out << format_row(r) << '\n';
}

void write_trades(std::ostream& out, const std::vector<TradeRow>& rows) {
  out << kTradeHeader << '\n';
  for (const auto& r : rows) out << format_row(r) << '\n';
}

void write_snapshot(std::ostream& out, const std::vector<SnapshotRow>& rows) {
  out << kSnapshotHeader << '\n';
  for (const auto& r : rows) out << format_row(r) << '\n';
}

void write_limit_orders_csv(const std::filesystem::path& path, const std::vector<LimitOrderRow>& rows) {
  write_file(path, [&](std::ostream& o) { write_limit_orders(o, rows); });
}

void write_trades_csv(const std::filesystem::path& path, const std::vector<TradeRow>& rows) {
  write_file(path, [&](std::ostream& o) { write_trades(o, rows); });
}

void write_snapshot_csv(const std::filesystem::path& path, const std::vector<SnapshotRow>& rows) {
  write_file(path, [&](std::ostream& o) { write_snapshot(o, rows); });
}

std::vector<LimitOrderRow> read_limit_orders(std::istream& in) {
  return read_rows<LimitOrderRow>(in, kLimitOrderHeader, [](const std::vector<std::string_view>& f) {
    if (f.size() != 6) throw std::invalid_argument("expected 6 fields");
    Side side;
    if (f[5] == "Buy") {
      side = Side::Buy;
    } else if (f[5] == "Sell") {
      side = Side::Sell;
    } else {
      throw std::invalid_argument(fmt::format("bad side '{}'", f[5]));
    }
    return LimitOrderRow{to_int<SecurityId>(f[0], "security id"), to_int<OrderId>(f[1], "order id"),
                         parse_utc(f[2]),  to_int<std::int64_t>(f[3], "price"),
                         to_int<std::int64_t>(f[4], "volume"), side};
  });
}

std::vector<TradeRow> read_trades(std::istream& in) {
  return read_rows<TradeRow>(in, kTradeHeader, [](const std::vector<std::string_view>& f) {
    if (f.size() != 4) throw std::invalid_argument("expected 4 fields");
    return TradeRow{to_int<std::uint64_t>(f[0], "trade id"), to_int<std::int64_t>(f[1], "price"),
                    to_int<std::int64_t>(f[2], "quantity"), parse_utc(f[3])};
  });
}

std::vector<LimitOrderRow> read_limit_orders_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_limit_orders(in);
}

std::vector<TradeRow> read_trades_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_trades(in);
}

}  // namespace matchbook::perf
