#include "quicsim/transport/connection_state.hpp"

namespace quicsim::transport {

const char* to_string(ConnectionState s) {
  switch (s) {
    case ConnectionState::kIdle: return "IDLE";
    case ConnectionState::kListening: return "LISTENING";
    case ConnectionState::kConnecting1Rtt: return "CONNECTING_1RTT";
    case ConnectionState::kConnecting2Rtt: return "CONNECTING_2RTT";
    case ConnectionState::kOpen: return "OPEN";
    case ConnectionState::kClosing: return "CLOSING";
    case ConnectionState::kClosed: return "CLOSED";
  }
  return "?";
}

bool is_valid_transition(ConnectionState from, ConnectionState to) {
  using S = ConnectionState;
  switch (from) {
    case S::kIdle:
      return to == S::kConnecting1Rtt || to == S::kConnecting2Rtt || to == S::kOpen || to == S::kListening ||
             to == S::kClosed;
    case S::kListening:
      return to == S::kClosed;
    case S::kConnecting2Rtt:
      return to == S::kConnecting1Rtt || to == S::kClosed;
    case S::kConnecting1Rtt:
      return to == S::kOpen || to == S::kClosed;
    case S::kOpen:
      return to == S::kClosing;
    case S::kClosing:
      return to == S::kClosed;
    case S::kClosed:
      return false;
  }
  return false;
}

}  // namespace quicsim::transport
