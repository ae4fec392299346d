#include "quicsim/transport/transport_parameters.hpp"

#include "quicsim/sim/network.hpp"

namespace quicsim::transport {

void TransportParameters::validate() const {
  if (max_data == 0 || max_stream_data == 0 || max_streams == 0 || idle_timeout_s == 0) {
    throw ConfigError("transport parameters must be positive");
  }
}

wire::Bytes TransportParameters::encode() const {
  wire::Bytes out;
  wire::ByteWriter w(out);
  w.u64(max_data);
  w.u64(max_stream_data);
  w.u32(max_streams);
  w.u32(idle_timeout_s);
  w.u32(initial_version);
  w.u8(omit_connection_id ? 1 : 0);
  return out;
}

TransportParameters TransportParameters::decode(std::span<const std::uint8_t> in) {
  wire::ByteReader r(in);
  TransportParameters p;
  p.max_data = r.u64();
  p.max_stream_data = r.u64();
  p.max_streams = r.u32();
  p.idle_timeout_s = r.u32();
  p.initial_version = r.u32();
  p.omit_connection_id = r.u8() != 0;
  return p;
}

}  // namespace quicsim::transport
