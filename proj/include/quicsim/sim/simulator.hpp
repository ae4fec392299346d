#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <queue>
#include <random>
#include <stdexcept>
#include <vector>

#include "quicsim/sim/sim_time.hpp"

namespace quicsim {

/// Raised when the event loop is driven in a way that cannot be simulated,
/// e.g. scheduling an event in the past.
class SimulationError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class EventHandle {
 public:
  EventHandle() = default;
  bool valid() const { return id_ != 0; }
  std::uint64_t id() const { return id_; }

 private:
  friend class Simulator;
  explicit EventHandle(std::uint64_t id) : id_(id) {}
  std::uint64_t id_ = 0;
};

/// Single-threaded discrete-event scheduler. Events fire in (time, insertion)
/// order, so equal timestamps run FIFO.
class Simulator {
 public:
  using Action = std::function<void()>;

  explicit Simulator(std::uint64_t seed = 1) : rng_(seed) {}
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  SimTime now() const { return now_; }

  EventHandle schedule(SimTime at, Action action);
  EventHandle schedule_in(SimTime delay, Action action) {
    return schedule(now_ + delay, std::move(action));
  }

  /// True if the event was pending and will no longer run.
  bool cancel(EventHandle handle);
  bool is_pending(EventHandle handle) const;

  /// Executes every event with fire time <= `end`. Returns the time of the
  /// last executed event (or the unchanged current time if none ran).
  SimTime run_until(SimTime end);
  /// Runs until the queue drains or stop() is called.
  SimTime run();
  void stop() { stopped_ = true; }

  std::size_t pending_events() const { return actions_.size(); }
  std::uint64_t executed_events() const { return executed_; }

  std::mt19937_64& rng() { return rng_; }

 private:
  struct Entry {
    SimTime at;
    std::uint64_t seq;
    bool operator>(const Entry& o) const {
      return at != o.at ? at > o.at : seq > o.seq;
    }
  };

  bool step(SimTime end);

  SimTime now_;
  std::uint64_t next_seq_ = 1;
  std::uint64_t executed_ = 0;
  bool stopped_ = false;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap_;
  std::map<std::uint64_t, Action> actions_;
  std::mt19937_64 rng_;
};

/// One-shot timer bound to a simulator; re-arming replaces the pending
/// expiry, destruction cancels it.
class Timer {
 public:
  explicit Timer(Simulator& sim) : sim_(&sim) {}
  Timer(const Timer&) = delete;
  Timer& operator=(const Timer&) = delete;
  ~Timer() { cancel(); }

  void arm(SimTime at, Simulator::Action action);
  void arm_in(SimTime delay, Simulator::Action action) {
    arm(sim_->now() + delay, std::move(action));
  }
  bool cancel();
  bool armed() const { return sim_->is_pending(handle_); }
  SimTime expiry() const { return expiry_; }

 private:
  Simulator* sim_;
  EventHandle handle_;
  SimTime expiry_;
};

}  // namespace quicsim
