#include "matchbook/gateways/event_store.hpp"

#include <algorithm>
#include <stdexcept>

namespace matchbook::gw {

using nlohmann::json;

std::string_view to_string(EventClass c) {
  switch (c) {
    case EventClass::Order: return "order";
    case EventClass::Trade: return "trade";
    case EventClass::Session: return "session";
    case EventClass::Admin: return "admin";
    case EventClass::Snapshot: return "snapshot";
  }
  return "?";
}

EventClass event_class_from(std::string_view s) {
  for (auto c : {EventClass::Order, EventClass::Trade, EventClass::Session, EventClass::Admin, EventClass::Snapshot})
    if (to_string(c) == s) return c;
  throw std::invalid_argument("unknown event class: " + std::string(s));
}

EventStore::EventStore(std::filesystem::path path, std::size_t capacity)
    : path_(std::move(path)), capacity_(std::max<std::size_t>(capacity, 1)) {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  out_.open(path_, std::ios::app);
  if (!out_) throw std::runtime_error("cannot open event log " + path_.string());
  writer_ = std::thread([this] { writer_loop(); });
}

EventStore::~EventStore() {
  {
    std::lock_guard lk(mu_);
    stopping_ = true;
    paused_ = false;
  }
  cv_.notify_all();
  writer_.join();
}

void EventStore::append(EventClass cls, SecurityId security, Timestamp at, json payload) {
  {
    std::lock_guard lk(mu_);
    ++stats_.appended;
    if (queue_.size() >= capacity_) {
      if (snapshots_queued_ > 0) {
        auto it = std::find_if(queue_.begin(), queue_.end(),
                               [](const StoredEvent& e) { return e.cls == EventClass::Snapshot; });
        queue_.erase(it);
        --snapshots_queued_;
        ++stats_.dropped_snapshots;
      } else if (cls == EventClass::Snapshot) {
        ++stats_.dropped_snapshots;
        return;
      }
    }
    if (cls == EventClass::Snapshot) ++snapshots_queued_;
    queue_.push_back({0, at, security, cls, std::move(payload)});
  }
  cv_.notify_one();
}

void EventStore::writer_loop() {
  std::unique_lock lk(mu_);
  for (;;) {
    cv_.wait(lk, [&] { return stopping_ || (!paused_ && !queue_.empty()); });
    if (queue_.empty()) {
      if (stopping_) return;
      continue;
    }
    std::deque<StoredEvent> batch;
    batch.swap(queue_);
    snapshots_queued_ = 0;
    writing_ = true;
    for (auto& e : batch) e.event_id = next_id_++;
    lk.unlock();
    for (const auto& e : batch) out_ << to_ndjson(e) << '\n';
    out_.flush();
    lk.lock();
    writing_ = false;
    stats_.written += batch.size();
    for (const auto& e : batch) ++per_security_[e.security_id];
    drained_.notify_all();
  }
}

void EventStore::flush() {
  std::unique_lock lk(mu_);
  drained_.wait(lk, [&] { return paused_ || (queue_.empty() && !writing_); });
}

void EventStore::pause_writer(bool paused) {
  {
    std::lock_guard lk(mu_);
    paused_ = paused;
  }
  cv_.notify_all();
  drained_.notify_all();
}

EventStoreStats EventStore::stats() const {
  std::lock_guard lk(mu_);
  EventStoreStats s = stats_;
  s.queued = queue_.size();
  return s;
}

std::uint64_t EventStore::count_for(SecurityId security) const {
  std::lock_guard lk(mu_);
  auto it = per_security_.find(security);
  return it == per_security_.end() ? 0 : it->second;
}

std::string to_ndjson(const StoredEvent& e) {
  json j = {{"event_id", e.event_id},
            {"ts", e.at.time_since_epoch().count()},
            {"security_id", e.security_id},
            {"class", to_string(e.cls)},
            {"payload", e.payload}};
  return j.dump();
}

std::vector<StoredEvent> read_event_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<StoredEvent> events;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (line.empty()) continue;
    try {
      json j = json::parse(line);
      StoredEvent e;
      e.event_id = j.at("event_id").get<std::uint64_t>();
      e.at = Timestamp{Millis{j.at("ts").get<std::int64_t>()}};
      e.security_id = j.at("security_id").get<SecurityId>();
      e.cls = event_class_from(j.at("class").get<std::string>());
      e.payload = j.at("payload");
      events.push_back(std::move(e));
    } catch (const std::exception& ex) {
      throw std::runtime_error(path.string() + ":" + std::to_string(n) + ": " + ex.what());
    }
  }
  return events;
}

}  // namespace matchbook::gw
