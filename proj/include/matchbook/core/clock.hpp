#pragma once

#include <atomic>

#include "matchbook/core/types.hpp"

namespace matchbook {

class Clock {
 public:
  virtual ~Clock() = default;
  virtual Timestamp now() const = 0;
};

class SystemClock final : public Clock {
 public:
  Timestamp now() const override {
    return std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now());
  }
};

// Test and replay clock; advanced explicitly.
class ManualClock final : public Clock {
 public:
  explicit ManualClock(Timestamp start = {}) : ms_(start.time_since_epoch().count()) {}
  Timestamp now() const override { return Timestamp{std::chrono::milliseconds{ms_.load()}}; }
  void set(Timestamp t) { ms_.store(t.time_since_epoch().count()); }
  void advance(std::chrono::milliseconds d) { ms_.fetch_add(d.count()); }

 private:
  std::atomic<std::int64_t> ms_;
};

}  // namespace matchbook
