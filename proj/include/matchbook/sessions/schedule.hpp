#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "matchbook/core/properties.hpp"
#include "matchbook/sessions/cron.hpp"

namespace matchbook {

class ScheduleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScheduleEntry {
  std::string key;
  SessionType session;
  CronExpr cron;
};

struct SessionSchedule {
  std::vector<ScheduleEntry> entries;
};

struct Firing {
  Timestamp at;
  SessionType session;
  std::size_t entry;  // index into SessionSchedule::entries
  friend bool operator==(const Firing&, const Firing&) = default;
};

// Reads TRADING_SESSIONS and the `<key>.name` / `<key>.cron` pairs it names.
// Session names are case-insensitive. Manual-only sessions and
// TradeReporting cannot be scheduled.
SessionSchedule load_schedule(const Properties& props);
SessionSchedule load_schedule_file(const std::filesystem::path& path);

// Earliest firing strictly after `now`; equal instants go to the entry listed
// first.
std::optional<Firing> next_transition(const SessionSchedule& schedule, Timestamp now);

// Session the schedule says should be active at `now`: the most recent firing
// at or before `now`, ignoring volatility-trigger entries. ContinuousTrading
// when nothing has fired.
SessionType active_at(const SessionSchedule& schedule, Timestamp now);

// Walks the schedule forward in time, handing out each firing once.
class SessionScheduler {
 public:
  SessionScheduler(SessionSchedule schedule, Timestamp start);

  // Firings in (previous call, now], ordered by time then entry.
  std::vector<Firing> due(Timestamp now);
  std::optional<Firing> peek() const { return next_transition(schedule_, last_); }
  const SessionSchedule& schedule() const { return schedule_; }

 private:
  SessionSchedule schedule_;
  Timestamp last_;
};

}  // namespace matchbook
