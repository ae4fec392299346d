#pragma once

#include <cstdint>
#include <vector>

#include "quicsim/sim/sim_time.hpp"

namespace quicsim::transport {

enum class ConnectionState : std::uint8_t {
  kIdle,
  kListening,
  kConnecting1Rtt,
  kConnecting2Rtt,
  kOpen,
  kClosing,
  kClosed,
};

const char* to_string(ConnectionState s);

/// Allowed edges:
///   client   IDLE -> CONNECTING_1RTT | CONNECTING_2RTT | OPEN (0-RTT)
///            CONNECTING_2RTT -> CONNECTING_1RTT (version negotiated)
///            CONNECTING_1RTT -> OPEN (server handshake received)
///   server   IDLE -> LISTENING, LISTENING -> CLOSED
///            forked IDLE -> OPEN (client's completing hello)
///   any      OPEN -> CLOSING -> CLOSED
/// A connection that fails before opening may drop straight to CLOSED.
bool is_valid_transition(ConnectionState from, ConnectionState to);

struct StateTransition {
  SimTime at;
  ConnectionState from;
  ConnectionState to;
};

}  // namespace quicsim::transport
