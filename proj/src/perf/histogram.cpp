#include "matchbook/perf/histogram.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include <fmt/format.h>

namespace matchbook::perf {
namespace {

constexpr int bucket_count() {
  int buckets = 1;
  std::int64_t reach = LatencyHistogram::kSubBuckets;
  while (reach <= LatencyHistogram::kHighest) {
    reach <<= 1;
    ++buckets;
  }
  return buckets;
}

constexpr std::size_t kCounts = static_cast<std::size_t>(bucket_count() + 1) * LatencyHistogram::kHalfSubBuckets;

struct Slot {
  int bucket;
  std::int64_t sub;
};

Slot slot_of(std::int64_t v) {
  const auto u = static_cast<std::uint64_t>(v) | static_cast<std::uint64_t>(LatencyHistogram::kSubBuckets - 1);
  const int bucket = 63 - std::countl_zero(u) - (LatencyHistogram::kSubBucketBits - 1);
  return {bucket, v >> bucket};
}

std::int64_t value_at_index(std::size_t index) {
  auto bucket = static_cast<int>(index >> (LatencyHistogram::kSubBucketBits - 1)) - 1;
  auto sub = static_cast<std::int64_t>(index & (LatencyHistogram::kHalfSubBuckets - 1)) +
             LatencyHistogram::kHalfSubBuckets;
  if (bucket < 0) {
    sub -= LatencyHistogram::kHalfSubBuckets;
    bucket = 0;
  }
  return sub << bucket;
}

}  // namespace

LatencyHistogram::LatencyHistogram() : counts_(kCounts, 0) {}

std::size_t LatencyHistogram::index_of(std::int64_t v) {
  const auto [bucket, sub] = slot_of(v);
  const auto base = static_cast<std::size_t>(bucket + 1) << (kSubBucketBits - 1);
  return base + static_cast<std::size_t>(sub - kHalfSubBuckets);
}

std::int64_t LatencyHistogram::lowest_equivalent(std::int64_t v) {
  const auto [bucket, sub] = slot_of(v);
  return sub << bucket;
}

std::int64_t LatencyHistogram::highest_equivalent(std::int64_t v) {
  const auto [bucket, sub] = slot_of(v);
  return (sub << bucket) + (std::int64_t{1} << bucket) - 1;
}

void LatencyHistogram::record(std::int64_t nanos, std::uint64_t count) {
  if (nanos < kLowest || nanos > kHighest) {
    throw std::out_of_range(fmt::format("latency {} ns outside [{}, {}]", nanos, kLowest, kHighest));
  }
  if (count == 0) return;
  counts_[index_of(nanos)] += count;
  if (total_ == 0) {
    min_ = max_ = nanos;
  } else {
    min_ = std::min(min_, nanos);
    max_ = std::max(max_, nanos);
  }
  total_ += count;
}

void LatencyHistogram::record_clamped(std::int64_t nanos) { record(std::clamp(nanos, kLowest, kHighest)); }

std::int64_t LatencyHistogram::percentile(double q) const {
  if (!(q >= 0.0 && q <= 100.0)) throw std::out_of_range("percentile outside [0, 100]");
  if (total_ == 0) throw EmptyHistogram();
  // Rank of the sample the percentile lands on, 1-based, as in a sorted array.
  // The small slack keeps a percentile printed to 12 places from landing on
  // the next rank after it is read back.
  auto rank = static_cast<std::uint64_t>(std::ceil(q * static_cast<double>(total_) / 100.0 - 1e-7));
  rank = std::clamp<std::uint64_t>(rank, 1, total_);
  std::uint64_t seen = 0;
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    seen += counts_[i];
    if (seen >= rank) return std::clamp(highest_equivalent(value_at_index(i)), min_, max_);
  }
  return max_;
}

std::uint64_t LatencyHistogram::count_at_or_below(std::int64_t v) const {
  if (v < kLowest) return 0;
  const auto last = std::min(index_of(std::min(v, kHighest)), counts_.size() - 1);
  std::uint64_t n = 0;
  for (std::size_t i = 0; i <= last; ++i) n += counts_[i];
  return n;
}

void LatencyHistogram::merge(const LatencyHistogram& other) {
  if (other.total_ == 0) return;
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  if (total_ == 0) {
    min_ = other.min_;
    max_ = other.max_;
  } else {
    min_ = std::min(min_, other.min_);
    max_ = std::max(max_, other.max_);
  }
  total_ += other.total_;
}

void LatencyHistogram::reset() {
  std::fill(counts_.begin(), counts_.end(), 0);
  total_ = 0;
  min_ = max_ = 0;
}

double LatencyHistogram::mean() const {
  if (total_ == 0) return 0.0;
  long double sum = 0;
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    if (!counts_[i]) continue;
    const auto lo = value_at_index(i);
    const auto mid = (lo + highest_equivalent(lo)) / 2.0L;
    sum += mid * counts_[i];
  }
  return static_cast<double>(sum / total_);
}

std::vector<double> percentile_ticks(std::uint64_t total_count) {
  std::vector<double> ticks;
  if (total_count == 0) return ticks;
  constexpr int kPerHalf = 5;
  double step = 50.0 / kPerHalf;
  double at = 0.0;
  // Stop once a tick step is finer than one sample.
  const double floor_step = 100.0 / static_cast<double>(total_count) / kPerHalf;
  while (at < 100.0 && step >= floor_step && ticks.size() < 400) {
    for (int i = 0; i < kPerHalf; ++i) {
      ticks.push_back(at);
      at += step;
    }
    step /= 2.0;
  }
  ticks.push_back(100.0);
  return ticks;
}

std::vector<PercentileRow> percentile_table(const LatencyHistogram& h) {
  std::vector<PercentileRow> rows;
  for (double q : percentile_ticks(h.total_count())) {
    const auto v = h.percentile(q);
    rows.push_back(PercentileRow{v, q, h.count_at_or_below(v)});
  }
  return rows;
}

void write_percentiles(std::ostream& out, const LatencyHistogram& h) {
  out << fmt::format("{:>14} {:>16} {:>12} {:>16}\n", "Value(ns)", "Percentile", "TotalCount", "1/(1-Percentile)");
  if (h.total_count() == 0) return;
  for (const auto& row : percentile_table(h)) {
    const double frac = row.percentile / 100.0;
    const std::string inverse = frac < 1.0 ? fmt::format("{:.2f}", 1.0 / (1.0 - frac)) : "inf";
    out << fmt::format("{:>14} {:>16.12f} {:>12} {:>16}\n", row.value, frac, row.total_count, inverse);
  }
  out << fmt::format("#[Mean = {:.3f}, Max = {}, Total count = {}]\n", h.mean(), h.max(), h.total_count());
}

void export_histogram(const LatencyHistogram& h, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  write_percentiles(out, h);
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<PercentileRow> parse_percentiles(std::istream& in) {
  std::vector<PercentileRow> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    PercentileRow row;
    double frac = 0;
    if (!(fields >> row.value >> frac >> row.total_count)) {
      throw std::runtime_error("bad histogram row: " + line);
    }
    row.percentile = frac * 100.0;
    rows.push_back(row);
  }
  return rows;
}

std::vector<PercentileRow> load_percentiles(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_percentiles(in);
}

}  // namespace matchbook::perf
