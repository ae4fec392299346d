#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace quicsim {

/// Transport error codes carried in CONNECTION_CLOSE.
enum class TransportError : std::uint16_t {
  kNoError = 0x0,
  kInternalError = 0x1,
  kFlowControlError = 0x3,
  kStreamLimitError = 0x4,
  kFinalOffsetError = 0x6,
  kFrameFormatError = 0x7,
  kProtocolViolation = 0xA,
  kVersionNegotiationError = 0x9,
};

/// Peer behaviour that violates the protocol; the connection closes.
class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(TransportError code, const std::string& what) : std::runtime_error(what), code_(code) {}
  TransportError code() const { return code_; }

 private:
  TransportError code_;
};

}  // namespace quicsim
