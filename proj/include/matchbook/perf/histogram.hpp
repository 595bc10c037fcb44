#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace matchbook::perf {

class EmptyHistogram : public std::logic_error {
 public:
  EmptyHistogram() : std::logic_error("percentile of an empty histogram") {}
};

// Log-linear buckets in the HdrHistogram layout: 2048 sub-buckets per
// power of two, so any value comes back within 1/1024 of what was recorded.
// Range is 1 ns to 1 hour.
class LatencyHistogram {
 public:
  static constexpr std::int64_t kLowest = 1;
  static constexpr std::int64_t kHighest = 3'600'000'000'000;  // 1 h in ns
  static constexpr int kSubBucketBits = 11;
  static constexpr std::int64_t kSubBuckets = std::int64_t{1} << kSubBucketBits;
  static constexpr std::int64_t kHalfSubBuckets = kSubBuckets / 2;

  LatencyHistogram();

  // Throws std::out_of_range outside [kLowest, kHighest].
  void record(std::int64_t nanos, std::uint64_t count = 1);
  // Clamps into range instead of throwing; for clock readings that can be 0.
  void record_clamped(std::int64_t nanos);

  // Smallest recorded-value bucket whose cumulative count reaches q% of the
  // total, reported as the bucket's highest equivalent value and clamped to
  // the exact recorded min/max. Throws EmptyHistogram, or
  // std::out_of_range for q outside [0, 100].
  std::int64_t percentile(double q) const;

  // Samples in buckets up to and including v's bucket.
  std::uint64_t count_at_or_below(std::int64_t v) const;

  void merge(const LatencyHistogram& other);
  void reset();

  std::uint64_t total_count() const { return total_; }
  std::int64_t min() const { return min_; }
  std::int64_t max() const { return max_; }
  double mean() const;

  // Bucket arithmetic, exposed for tests.
  static std::size_t index_of(std::int64_t v);
  static std::int64_t lowest_equivalent(std::int64_t v);
  static std::int64_t highest_equivalent(std::int64_t v);

  friend bool operator==(const LatencyHistogram&, const LatencyHistogram&) = default;

 private:
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_{0};
  std::int64_t min_{0};
  std::int64_t max_{0};
};

struct PercentileRow {
  std::int64_t value{0};
  double percentile{0};  // 0..100
  std::uint64_t total_count{0};  // cumulative count at value
};

// Ticks in HdrHistogram's style: five per halving of the remaining distance
// to 100, ending with a 100 row.
std::vector<double> percentile_ticks(std::uint64_t total_count);
std::vector<PercentileRow> percentile_table(const LatencyHistogram& h);

void write_percentiles(std::ostream& out, const LatencyHistogram& h);
// Throws std::runtime_error on I/O failure.
void export_histogram(const LatencyHistogram& h, const std::filesystem::path& path);
std::vector<PercentileRow> parse_percentiles(std::istream& in);
std::vector<PercentileRow> load_percentiles(const std::filesystem::path& path);

}  // namespace matchbook::perf
