#pragma once

#include <compare>
#include <cstdint>
#include <ostream>

namespace quicsim {

/// Simulated time, in integer microsecond ticks. Used for both instants and
/// durations.
class SimTime {
 public:
  constexpr SimTime() = default;

  static constexpr SimTime from_ticks(std::int64_t ticks) { return SimTime(ticks); }
  static constexpr SimTime micros(std::int64_t us) { return SimTime(us); }
  static constexpr SimTime millis(std::int64_t ms) { return SimTime(ms * 1000); }
  static constexpr SimTime seconds(std::int64_t s) { return SimTime(s * 1'000'000); }
  static SimTime from_seconds(double s);
  static constexpr SimTime max() { return SimTime(INT64_MAX / 4); }

  constexpr std::int64_t ticks() const { return ticks_; }
  constexpr double to_seconds() const { return static_cast<double>(ticks_) / 1e6; }
  constexpr double to_millis() const { return static_cast<double>(ticks_) / 1e3; }

  constexpr auto operator<=>(const SimTime&) const = default;

  constexpr SimTime operator+(SimTime o) const { return SimTime(ticks_ + o.ticks_); }
  constexpr SimTime operator-(SimTime o) const { return SimTime(ticks_ - o.ticks_); }
  constexpr SimTime& operator+=(SimTime o) {
    ticks_ += o.ticks_;
    return *this;
  }
  constexpr SimTime& operator-=(SimTime o) {
    ticks_ -= o.ticks_;
    return *this;
  }
  constexpr SimTime operator*(std::int64_t k) const { return SimTime(ticks_ * k); }
  constexpr SimTime operator/(std::int64_t k) const { return SimTime(ticks_ / k); }

 private:
  constexpr explicit SimTime(std::int64_t ticks) : ticks_(ticks) {}

  std::int64_t ticks_ = 0;
};

std::ostream& operator<<(std::ostream& os, SimTime t);

/// Time needed to clock `bytes` onto a wire of `rate_bps`, rounded to the
/// nearest tick.
SimTime serialization_time(std::uint64_t bytes, std::uint64_t rate_bps);

}  // namespace quicsim
