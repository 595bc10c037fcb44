#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

#include "matchbook/core/types.hpp"

namespace matchbook::perf {

struct RunStats {
  std::chrono::system_clock::time_point start;
  std::chrono::system_clock::time_point end;
  std::uint64_t orders{0};

  std::chrono::nanoseconds duration() const { return end - start; }
};

// Whole orders per second, rounded down. Throws std::invalid_argument for a
// zero or negative duration.
std::uint64_t throughput(std::uint64_t orders, std::chrono::nanoseconds duration);
std::uint64_t throughput(const RunStats& stats);

// "hh:mm:ss.SSS", the duration format used in the results table.
std::chrono::milliseconds parse_duration(std::string_view text);
std::string format_duration(std::chrono::nanoseconds d);

}  // namespace matchbook::perf
