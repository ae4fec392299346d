#include "quicsim/sim/sim_time.hpp"

#include <cmath>

namespace quicsim {

SimTime SimTime::from_seconds(double s) {
  return SimTime(static_cast<std::int64_t>(std::llround(s * 1e6)));
}

std::ostream& operator<<(std::ostream& os, SimTime t) {
  return os << t.ticks() << "us";
}

SimTime serialization_time(std::uint64_t bytes, std::uint64_t rate_bps) {
  // bits * 1e6 / rate, rounded half-up in integer arithmetic.
  __extension__ using u128 = unsigned __int128;
  const u128 num = static_cast<u128>(bytes) * 8u * 1'000'000u;
  const u128 ticks = (num + rate_bps / 2) / rate_bps;
  return SimTime::micros(static_cast<std::int64_t>(ticks));
}

}  // namespace quicsim
