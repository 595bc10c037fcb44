#include "matchbook/perf/throughput.hpp"

#include <charconv>
#include <stdexcept>

#include <fmt/format.h>

namespace matchbook::perf {

std::uint64_t throughput(std::uint64_t orders, std::chrono::nanoseconds duration) {
  if (duration.count() <= 0) throw std::invalid_argument("throughput needs a positive duration");
  const auto scaled = static_cast<unsigned __int128>(orders) * 1'000'000'000u;
  return static_cast<std::uint64_t>(scaled / static_cast<unsigned __int128>(duration.count()));
}

std::uint64_t throughput(const RunStats& stats) { return throughput(stats.orders, stats.duration()); }

std::chrono::milliseconds parse_duration(std::string_view text) {
  int h = 0, m = 0, s = 0, ms = 0;
  const auto bad = [&] { return std::invalid_argument("bad duration: " + std::string(text)); };
  if (text.size() != 12 || text[2] != ':' || text[5] != ':' || text[8] != '.') throw bad();
  const auto num = [&](std::size_t at, std::size_t len, int& out) {
    auto [p, ec] = std::from_chars(text.data() + at, text.data() + at + len, out);
    if (ec != std::errc{} || p != text.data() + at + len) throw bad();
  };
  num(0, 2, h);
  num(3, 2, m);
  num(6, 2, s);
  num(9, 3, ms);
  if (m > 59 || s > 59) throw bad();
  return std::chrono::hours(h) + std::chrono::minutes(m) + std::chrono::seconds(s) + std::chrono::milliseconds(ms);
}

std::string format_duration(std::chrono::nanoseconds d) {
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(d).count();
  return fmt::format("{:02}:{:02}:{:02}.{:03}", ms / 3'600'000, ms / 60'000 % 60, ms / 1000 % 60, ms % 1000);
}

}  // namespace matchbook::perf
