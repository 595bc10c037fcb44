#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "matchbook/core/types.hpp"

namespace matchbook::gw {

// Snapshot-class records are the only ones that may be dropped.
enum class EventClass : std::uint8_t { Order, Trade, Session, Admin, Snapshot };

std::string_view to_string(EventClass c);
EventClass event_class_from(std::string_view s);

struct StoredEvent {
  std::uint64_t event_id{0};
  Timestamp at{};
  SecurityId security_id{0};
  EventClass cls{EventClass::Order};
  nlohmann::json payload;
};

struct EventStoreStats {
  std::uint64_t appended{0};
  std::uint64_t written{0};
  std::uint64_t dropped_snapshots{0};
  std::size_t queued{0};
};

// Append-only NDJSON log. append() never blocks on disk: records go to a
// bounded queue that a writer thread drains. When the queue is full the
// oldest queued snapshot is dropped; if there is none, order and trade
// records are kept anyway and the queue grows past its bound. event_id is
// assigned at write time, so written ids have no gaps.
class EventStore {
 public:
  explicit EventStore(std::filesystem::path path, std::size_t capacity = 1 << 16);
  ~EventStore();
  EventStore(const EventStore&) = delete;
  EventStore& operator=(const EventStore&) = delete;

  void append(EventClass cls, SecurityId security, Timestamp at, nlohmann::json payload);
  // Waits until everything appended so far is on disk.
  void flush();
  EventStoreStats stats() const;
  const std::filesystem::path& path() const { return path_; }

  // Test hook: while paused the writer takes nothing off the queue.
  void pause_writer(bool paused);

  // In-memory index: number of written records per security.
  std::uint64_t count_for(SecurityId security) const;

 private:
  void writer_loop();

  std::filesystem::path path_;
  std::size_t capacity_;
  std::ofstream out_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::condition_variable drained_;
  std::deque<StoredEvent> queue_;
  std::size_t snapshots_queued_{0};
  bool stopping_{false};
  bool paused_{false};
  bool writing_{false};
  std::uint64_t next_id_{1};
  EventStoreStats stats_;
  std::unordered_map<SecurityId, std::uint64_t> per_security_;
  std::thread writer_;
};

std::string to_ndjson(const StoredEvent& e);
// Throws std::runtime_error naming the line.
std::vector<StoredEvent> read_event_log(const std::filesystem::path& path);

}  // namespace matchbook::gw
