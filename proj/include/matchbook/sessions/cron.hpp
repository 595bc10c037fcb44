#pragma once

#include <bitset>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "matchbook/core/types.hpp"

namespace matchbook {

class CronParseError : public std::runtime_error {
 public:
  CronParseError(int field, const std::string& what) : std::runtime_error(what), field_(field) {}
  // 0-based field index, -1 for whole-expression errors.
  int field() const { return field_; }

 private:
  int field_;
};

// Quartz-style expression: sec min hour day-of-month month day-of-week [year].
// Day-of-week uses 1 = Sunday ... 7 = Saturday. Supports *, ?, values, a-b,
// a/b, a-b/c and comma lists; month and weekday names are accepted. When
// both day fields are restricted, a day must satisfy both.
struct CronExpr {
  std::bitset<60> seconds;
  std::bitset<60> minutes;
  std::bitset<24> hours;
  std::bitset<32> days_of_month;  // bit 0 unused
  std::bitset<13> months;         // bit 0 unused
  std::bitset<8> days_of_week;    // bit 0 unused
  std::optional<std::bitset<200>> years;  // offset from 1970
  std::string text;

  bool matches(Timestamp t) const;
  bool matches_day(std::chrono::sys_days day) const;

  // Earliest firing strictly after `after`, to the second. Absent when the
  // expression never fires again within the supported year range.
  std::optional<Timestamp> next_after(Timestamp after) const;
  // Latest firing at or before `t`.
  std::optional<Timestamp> latest_at_or_before(Timestamp t) const;
};

CronExpr parse_cron(std::string_view text);

}  // namespace matchbook
