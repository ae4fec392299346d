#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "quicsim/transport/socket.hpp"

namespace quicsim::apps {

/// Seconds with six decimals, formatted from integer ticks.
std::string format_seconds(SimTime t);

inline constexpr const char* kCwndHeader = "time_s,flow,cwnd_bytes,ssthresh_bytes,bytes_in_flight,packets_lost,state";
inline constexpr const char* kRttHeader = "time_s,flow,srtt_s,latest_rtt_s";

void write_cwnd_csv(std::ostream& out, std::size_t flow, const std::vector<transport::TraceSample>& rows);
void write_rtt_csv(std::ostream& out, std::size_t flow, const std::vector<transport::TraceSample>& rows);

/// Writes `content` to `path`, throwing std::runtime_error on failure.
void write_file(const std::string& path, const std::string& content);

}  // namespace quicsim::apps
