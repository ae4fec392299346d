#include "quicsim/sim/simulator.hpp"

#include <sstream>

namespace quicsim {

EventHandle Simulator::schedule(SimTime at, Action action) {
  if (at < now_) {
    std::ostringstream msg;
    msg << "event scheduled in the past: at=" << at << " now=" << now_;
    throw SimulationError(msg.str());
  }
  const std::uint64_t seq = next_seq_++;
  heap_.push(Entry{at, seq});
  actions_.emplace(seq, std::move(action));
  return EventHandle(seq);
}

bool Simulator::cancel(EventHandle handle) {
  return handle.valid() && actions_.erase(handle.id()) > 0;
}

bool Simulator::is_pending(EventHandle handle) const {
  return handle.valid() && actions_.count(handle.id()) > 0;
}

bool Simulator::step(SimTime end) {
  while (!heap_.empty()) {
    const Entry top = heap_.top();
    if (top.at > end) return false;
    heap_.pop();
    auto it = actions_.find(top.seq);
    if (it == actions_.end()) continue;  // cancelled
    Action action = std::move(it->second);
    actions_.erase(it);
    now_ = top.at;
    ++executed_;
    action();
    return true;
  }
  return false;
}

SimTime Simulator::run_until(SimTime end) {
  stopped_ = false;
  while (!stopped_ && step(end)) {
  }
  return now_;
}

SimTime Simulator::run() { return run_until(SimTime::max()); }

void Timer::arm(SimTime at, Simulator::Action action) {
  sim_->cancel(handle_);
  expiry_ = at;
  handle_ = sim_->schedule(at, std::move(action));
}

bool Timer::cancel() { return sim_->cancel(handle_); }

}  // namespace quicsim
