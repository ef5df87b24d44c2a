#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "rulefoil/domain.hpp"
#include "rulefoil/errors.hpp"

namespace rulefoil {

// Closed interval of instants.
struct TimeWindow {
  Instant start;
  Instant end;

  static TimeWindow between(Instant start, Instant end) {
    if (start > end) {
      throw ValidationError("time window start must not be after its end");
    }
    return TimeWindow{start, end};
  }

  static TimeWindow ending_at(Instant end, std::chrono::milliseconds span) {
    return between(end - span, end);
  }

  bool contains(Instant t) const { return start <= t && t <= end; }
};

// Append-only log of system events, ordered by non-decreasing timestamp.
// Optionally backed by an NDJSON file: one event per line, appended and
// flushed as they arrive. One writer and any number of readers may use a
// log concurrently; every query sees a consistent snapshot.
class EventLog {
 public:
  EventLog() = default;

  explicit EventLog(std::vector<SystemEvent> events)
      : events_(std::move(events)) {
    for (std::size_t i = 1; i < events_.size(); ++i) {
      if (events_[i].ts < events_[i - 1].ts) {
        throw OrderingError("events are not ordered by timestamp");
      }
    }
  }

  EventLog(const EventLog&) = delete;
  EventLog& operator=(const EventLog&) = delete;

  // Loads any existing events from `path` and keeps it open as the
  // durable sink for future appends. Only valid on an empty log.
  void attach_file(const std::filesystem::path& path) {
    std::unique_lock lock(mu_);
    if (!events_.empty() || sink_.is_open()) {
      throw ContractError("attach_file requires a fresh, empty log");
    }
    if (std::filesystem::exists(path)) {
      events_ = read_file(path);
      for (std::size_t i = 1; i < events_.size(); ++i) {
        if (events_[i].ts < events_[i - 1].ts) {
          throw OrderingError("log file is not ordered by timestamp: " +
                              path.string());
        }
      }
    }
    sink_.open(path, std::ios::app);
    if (!sink_) {
      throw StorageError("cannot open log file for append: " + path.string());
    }
    path_ = path;
  }

  void append(const SystemEvent& e) {
    std::unique_lock lock(mu_);
    if (!events_.empty() && e.ts < events_.back().ts) {
      throw OrderingError("event at " + e.ts.to_string() +
                          " is older than the log tail at " +
                          events_.back().ts.to_string());
    }
    if (sink_.is_open()) {
      sink_ << e.to_line() << '\n';
      sink_.flush();
      if (!sink_) {
        throw StorageError("failed to write event to " + path_.string());
      }
    }
    events_.push_back(e);
  }

  std::size_t size() const {
    std::shared_lock lock(mu_);
    return events_.size();
  }

  std::vector<SystemEvent> events() const {
    std::shared_lock lock(mu_);
    return events_;
  }

  std::optional<Instant> last_timestamp() const {
    std::shared_lock lock(mu_);
    if (events_.empty()) return std::nullopt;
    return events_.back().ts;
  }

  // Number of firings of `rule_id` inside the window.
  std::int64_t count_fired(const std::string& rule_id,
                           const TimeWindow& w) const {
    std::shared_lock lock(mu_);
    std::int64_t n = 0;
    for (const auto& e : events_) {
      if (!w.contains(e.ts)) continue;
      const auto* f = e.as_fired();
      if (f && f->rule_id == rule_id) ++n;
    }
    return n;
  }

  // Number of explanations of `rule_id` delivered inside the window;
  // restricted to one explainee when `user` is set, any explainee
  // otherwise.
  std::int64_t count_explained(const std::string& rule_id,
                               const std::optional<std::string>& user,
                               const TimeWindow& w) const {
    std::shared_lock lock(mu_);
    std::int64_t n = 0;
    for (const auto& e : events_) {
      if (!w.contains(e.ts)) continue;
      const auto* x = e.as_explained();
      if (x && x->rule_id == rule_id && (!user || x->user == *user)) ++n;
    }
    return n;
  }

  // Most recent event at or before `before`, inside the window, that
  // involves `device`: a firing of a rule with an action on it, or an
  // error on it. Delivered explanations are never returned.
  std::optional<SystemEvent> last_event_for_device(const RuleSet& rules,
                                                   const std::string& device,
                                                   Instant before,
                                                   const TimeWindow& w) const {
    std::shared_lock lock(mu_);
    for (auto it = events_.rbegin(); it != events_.rend(); ++it) {
      if (it->ts > before || !w.contains(it->ts)) continue;
      if (const auto* f = it->as_fired()) {
        const Rule& rule = rules.at(f->rule_id);  // IntegrityError if unknown
        if (rule.targets(device)) return *it;
      } else if (const auto* e = it->as_error()) {
        if (e->device == device) return *it;
      }
    }
    return std::nullopt;
  }

  // Id of the most recent rule fired strictly before `t` with an action
  // on `device`.
  std::optional<std::string> last_rule_before(const RuleSet& rules,
                                              const std::string& device,
                                              Instant t) const {
    std::shared_lock lock(mu_);
    for (auto it = events_.rbegin(); it != events_.rend(); ++it) {
      if (!(it->ts < t)) continue;
      if (const auto* f = it->as_fired()) {
        const Rule& rule = rules.at(f->rule_id);
        if (rule.targets(device)) return f->rule_id;
      }
    }
    return std::nullopt;
  }

  static std::vector<SystemEvent> read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw StorageError("cannot read log file: " + path.string());
    std::vector<SystemEvent> events;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      try {
        events.push_back(SystemEvent::parse_line(line));
      } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid event line: ") + e.what(),
                         line_no, 1);
      } catch (const ValidationError& e) {
        throw ParseError(std::string("invalid event line: ") + e.what(),
                         line_no, 1);
      }
    }
    return events;
  }

  void save(const std::filesystem::path& path) const {
    std::shared_lock lock(mu_);
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw StorageError("cannot write log file: " + path.string());
    for (const auto& e : events_) out << e.to_line() << '\n';
    out.flush();
    if (!out) throw StorageError("failed to write log file: " + path.string());
  }

 private:
  mutable std::shared_mutex mu_;
  std::vector<SystemEvent> events_;
  std::filesystem::path path_;
  std::ofstream sink_;
};

}  // namespace rulefoil
