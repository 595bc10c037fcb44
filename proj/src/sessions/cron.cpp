#include "matchbook/sessions/cron.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <vector>

namespace matchbook {
namespace {

using namespace std::chrono;

constexpr int kMaxYear = 2099;
constexpr int kMinYear = 1970;
constexpr int kSearchDays = 366 * 8;

constexpr std::array<std::string_view, 12> kMonthNames = {"JAN", "FEB", "MAR", "APR", "MAY", "JUN",
                                                          "JUL", "AUG", "SEP", "OCT", "NOV", "DEC"};
constexpr std::array<std::string_view, 7> kDayNames = {"SUN", "MON", "TUE", "WED", "THU", "FRI", "SAT"};

struct FieldSpec {
  const char* name;
  int lo;
  int hi;
  bool allow_question;
};

constexpr std::array<FieldSpec, 7> kFields = {{{"seconds", 0, 59, false},
                                               {"minutes", 0, 59, false},
                                               {"hours", 0, 23, false},
                                               {"day-of-month", 1, 31, true},
                                               {"month", 1, 12, false},
                                               {"day-of-week", 1, 7, true},
                                               {"year", kMinYear, kMaxYear, false}}};

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string upper(std::string_view s) {
  std::string u(s);
  for (char& c : u) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return u;
}

int parse_value(std::string_view tok, int field) {
  const std::string u = upper(tok);
  if (field == 4) {
    for (std::size_t i = 0; i < kMonthNames.size(); ++i)
      if (u == kMonthNames[i]) return static_cast<int>(i) + 1;
  }
  if (field == 5) {
    for (std::size_t i = 0; i < kDayNames.size(); ++i)
      if (u == kDayNames[i]) return static_cast<int>(i) + 1;
  }
  int v = 0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (tok.empty() || ec != std::errc{} || ptr != end) {
    throw CronParseError(field, "cron field " + std::to_string(field) + " (" + kFields[field].name +
                                    "): bad value '" + std::string(tok) + "'");
  }
  return v;
}

// Returns the set as a vector of flags indexed by value.
std::vector<bool> parse_field(std::string_view text, int field) {
  const FieldSpec& spec = kFields[field];
  std::vector<bool> set(spec.hi + 1, false);
  const auto fail = [&](const std::string& why) -> CronParseError {
    return CronParseError(field, "cron field " + std::to_string(field) + " (" + spec.name + "): " + why);
  };
  if (text.empty()) throw fail("empty");
  for (std::string_view item : split(text, ',')) {
    if (item.empty()) throw fail("empty list item");
    int lo = spec.lo;
    int hi = spec.hi;
    int step = 1;
    std::string_view range = item;
    if (const auto slash = item.find('/'); slash != std::string_view::npos) {
      range = item.substr(0, slash);
      step = parse_value(item.substr(slash + 1), field);
      if (step < 1) throw fail("step must be positive");
    }
    if (range == "*" || (range == "?" && spec.allow_question)) {
      // full range
    } else if (range == "?") {
      throw fail("'?' is only allowed in the day fields");
    } else if (const auto dash = range.find('-'); dash != std::string_view::npos) {
      lo = parse_value(range.substr(0, dash), field);
      hi = parse_value(range.substr(dash + 1), field);
    } else {
      lo = parse_value(range, field);
      hi = item.find('/') != std::string_view::npos ? spec.hi : lo;
    }
    if (lo < spec.lo || hi > spec.hi || lo > hi) throw fail("value out of range in '" + std::string(item) + "'");
    for (int v = lo; v <= hi; v += step) set[v] = true;
  }
  return set;
}

template <std::size_t N>
std::bitset<N> to_bits(const std::vector<bool>& set, int offset = 0) {
  std::bitset<N> b;
  for (std::size_t v = 0; v < set.size(); ++v)
    if (set[v]) b.set(v - offset);
  return b;
}

Timestamp at(sys_days day, int h, int m, int s) {
  return Timestamp{day} + std::chrono::hours{h} + std::chrono::minutes{m} + std::chrono::seconds{s};
}

}  // namespace

CronExpr parse_cron(std::string_view text) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) fields.push_back(text.substr(start, i - start));
  }
  if (fields.size() != 6 && fields.size() != 7) {
    throw CronParseError(-1, "cron expression needs 6 or 7 fields, got " + std::to_string(fields.size()));
  }
  CronExpr e;
  e.text = std::string(text);
  e.seconds = to_bits<60>(parse_field(fields[0], 0));
  e.minutes = to_bits<60>(parse_field(fields[1], 1));
  e.hours = to_bits<24>(parse_field(fields[2], 2));
  e.days_of_month = to_bits<32>(parse_field(fields[3], 3));
  e.months = to_bits<13>(parse_field(fields[4], 4));
  e.days_of_week = to_bits<8>(parse_field(fields[5], 5));
  if (fields.size() == 7) {
    const auto years = parse_field(fields[6], 6);
    std::bitset<200> b;
    for (int y = kMinYear; y <= kMaxYear; ++y)
      if (years[y]) b.set(y - kMinYear);
    e.years = b;
  }
  return e;
}

bool CronExpr::matches_day(sys_days day) const {
  const year_month_day ymd{day};
  const int y = static_cast<int>(ymd.year());
  if (years && (y < kMinYear || y > kMaxYear || !years->test(y - kMinYear))) return false;
  if (!months.test(static_cast<unsigned>(ymd.month()))) return false;
  if (!days_of_month.test(static_cast<unsigned>(ymd.day()))) return false;
  return days_of_week.test(weekday{day}.c_encoding() + 1);
}

bool CronExpr::matches(Timestamp t) const {
  const auto day = floor<days>(t);
  if (!matches_day(day)) return false;
  const hh_mm_ss tod{floor<std::chrono::seconds>(t - day)};
  return hours.test(tod.hours().count()) && minutes.test(tod.minutes().count()) &&
         seconds.test(tod.seconds().count());
}

std::optional<Timestamp> CronExpr::next_after(Timestamp after) const {
  const auto start = floor<std::chrono::seconds>(after) + std::chrono::seconds{1};
  auto day = floor<days>(start);
  int from = static_cast<int>((start - day).count());
  for (int d = 0; d < kSearchDays; ++d, day += days{1}, from = 0) {
    if (static_cast<int>(year_month_day{day}.year()) > kMaxYear) return std::nullopt;
    if (!matches_day(day)) continue;
    for (int h = from / 3600; h < 24; ++h) {
      if (!hours.test(h)) continue;
      const bool first_hour = h == from / 3600;
      const int m0 = first_hour ? (from / 60) % 60 : 0;
      for (int m = m0; m < 60; ++m) {
        if (!minutes.test(m)) continue;
        const int s0 = (first_hour && m == m0) ? from % 60 : 0;
        for (int s = s0; s < 60; ++s) {
          if (seconds.test(s)) return at(day, h, m, s);
        }
      }
    }
  }
  return std::nullopt;
}

std::optional<Timestamp> CronExpr::latest_at_or_before(Timestamp t) const {
  const auto end = floor<std::chrono::seconds>(t);
  auto day = floor<days>(end);
  int upto = static_cast<int>((end - day).count());
  for (int d = 0; d < kSearchDays; ++d, day -= days{1}, upto = 86399) {
    if (static_cast<int>(year_month_day{day}.year()) < kMinYear) return std::nullopt;
    if (!matches_day(day)) continue;
    for (int h = upto / 3600; h >= 0; --h) {
      if (!hours.test(h)) continue;
      const bool top_hour = h == upto / 3600;
      const int m0 = top_hour ? (upto / 60) % 60 : 59;
      for (int m = m0; m >= 0; --m) {
        if (!minutes.test(m)) continue;
        const int s0 = (top_hour && m == m0) ? upto % 60 : 59;
        for (int s = s0; s >= 0; --s) {
          if (seconds.test(s)) return at(day, h, m, s);
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace matchbook
