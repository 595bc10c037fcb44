#include "matchbook/sessions/schedule.hpp"

#include <algorithm>

namespace matchbook {

SessionSchedule load_schedule(const Properties& props) {
  SessionSchedule s;
  const auto keys = props.get("TRADING_SESSIONS");
  if (!keys) throw ScheduleError("TRADING_SESSIONS is missing");
  for (const auto& key : split_list(*keys)) {
    const auto name = props.get(key + ".name");
    const auto cron = props.get(key + ".cron");
    if (!name) throw ScheduleError(key + ".name is missing");
    if (!cron) throw ScheduleError(key + ".cron is missing");
    const auto session = parse_session(*name);
    if (!session) throw ScheduleError(key + ".name: unknown session '" + *name + "'");
    if (is_manual_session(*session) || *session == SessionType::TradeReporting) {
      throw ScheduleError(key + ".name: " + std::string(to_string(*session)) + " cannot be scheduled");
    }
    try {
      s.entries.push_back(ScheduleEntry{key, *session, parse_cron(*cron)});
    } catch (const CronParseError& e) {
      throw ScheduleError(key + ".cron: " + e.what());
    }
  }
  return s;
}

SessionSchedule load_schedule_file(const std::filesystem::path& path) {
  return load_schedule(Properties::load(path));
}

std::optional<Firing> next_transition(const SessionSchedule& schedule, Timestamp now) {
  std::optional<Firing> best;
  for (std::size_t i = 0; i < schedule.entries.size(); ++i) {
    const auto t = schedule.entries[i].cron.next_after(now);
    if (t && (!best || *t < best->at)) best = Firing{*t, schedule.entries[i].session, i};
  }
  return best;
}

SessionType active_at(const SessionSchedule& schedule, Timestamp now) {
  std::optional<Firing> best;
  for (std::size_t i = 0; i < schedule.entries.size(); ++i) {
    const auto& e = schedule.entries[i];
    if (e.session == SessionType::VolatilityAuctionCall) continue;
    const auto t = e.cron.latest_at_or_before(now);
    // Same instant: the later entry fires last and wins.
    if (t && (!best || *t >= best->at)) best = Firing{*t, e.session, i};
  }
  return best ? best->session : SessionType::ContinuousTrading;
}

SessionScheduler::SessionScheduler(SessionSchedule schedule, Timestamp start)
    : schedule_(std::move(schedule)), last_(start) {}

std::vector<Firing> SessionScheduler::due(Timestamp now) {
  std::vector<Firing> out;
  if (now <= last_) return out;
  for (std::size_t i = 0; i < schedule_.entries.size(); ++i) {
    auto t = schedule_.entries[i].cron.next_after(last_);
    while (t && *t <= now) {
      out.push_back(Firing{*t, schedule_.entries[i].session, i});
      t = schedule_.entries[i].cron.next_after(*t);
    }
  }
  std::sort(out.begin(), out.end(), [](const Firing& a, const Firing& b) {
    return a.at != b.at ? a.at < b.at : a.entry < b.entry;
  });
  last_ = now;
  return out;
}

}  // namespace matchbook
