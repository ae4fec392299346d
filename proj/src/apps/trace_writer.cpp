#include "quicsim/apps/trace_writer.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace quicsim::apps {

std::string format_seconds(SimTime t) {
  const std::int64_t ticks = t.ticks();
  const std::int64_t mag = ticks < 0 ? -ticks : ticks;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%s%" PRId64 ".%06" PRId64, ticks < 0 ? "-" : "", mag / 1'000'000, mag % 1'000'000);
  return buf;
}

void write_cwnd_csv(std::ostream& out, std::size_t flow, const std::vector<transport::TraceSample>& rows) {
  out << kCwndHeader << '\n';
  for (const auto& r : rows) {
    out << format_seconds(r.time) << ',' << flow << ',' << r.cwnd << ',';
    if (r.ssthresh == std::numeric_limits<std::uint64_t>::max()) {
      out << "inf";
    } else {
      out << r.ssthresh;
    }
    out << ',' << r.bytes_in_flight << ',' << r.packets_lost << ',' << transport::to_string(r.state) << '\n';
  }
}

void write_rtt_csv(std::ostream& out, std::size_t flow, const std::vector<transport::TraceSample>& rows) {
  out << kRttHeader << '\n';
  for (const auto& r : rows) {
    out << format_seconds(r.time) << ',' << flow << ',' << format_seconds(r.srtt) << ',' << format_seconds(r.latest_rtt)
        << '\n';
  }
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << content;
  f.close();
  if (!f) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace quicsim::apps
