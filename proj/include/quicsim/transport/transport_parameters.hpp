#pragma once

#include <cstdint>
#include <span>

#include "quicsim/wire/byte_io.hpp"
#include "quicsim/wire/header.hpp"

namespace quicsim::transport {

/// Limits exchanged during the handshake. Both endpoints are configured
/// with the same set.
struct TransportParameters {
  std::uint64_t max_data = 128 * 1024;        // connection credit, bytes
  std::uint64_t max_stream_data = 64 * 1024;  // per-stream credit, bytes
  std::uint32_t max_streams = 8;
  std::uint32_t idle_timeout_s = 300;
  std::uint32_t initial_version = wire::kQuicVersion13;
  bool omit_connection_id = false;

  static constexpr std::size_t kEncodedSize = 29;

  void validate() const;
  wire::Bytes encode() const;
  static TransportParameters decode(std::span<const std::uint8_t> in);
  bool operator==(const TransportParameters&) const = default;
};

}  // namespace quicsim::transport
