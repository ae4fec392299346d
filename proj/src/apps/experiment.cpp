#include "quicsim/apps/experiment.hpp"

#include <algorithm>
#include <filesystem>
#include <memory>
#include <sstream>

#include "json.hpp"
#include "quicsim/apps/applications.hpp"
#include "quicsim/apps/trace_writer.hpp"
#include "quicsim/sim/dumbbell.hpp"
#include "quicsim/transport/l4.hpp"

namespace quicsim::apps {

namespace {

constexpr std::uint16_t kServerPort = 443;

struct Flow {
  std::size_t index = 0;
  std::unique_ptr<transport::QuicL4> client_l4;
  std::unique_ptr<transport::QuicL4> server_l4;
  std::unique_ptr<BulkSender> sender;
  std::unique_ptr<SinkServer> sink;
  std::unique_ptr<Timer> heartbeat;
  std::function<void()> beat;
  std::vector<transport::TraceSample> trace;
  std::vector<SimTime> rtts;
};

transport::SocketConfig socket_config(const ExperimentConfig& cfg) {
  transport::SocketConfig s;
  s.cc_algorithm = cfg.cc_algorithm;
  s.max_ack_delay = cfg.max_ack_delay;
  s.ack_threshold = cfg.ack_threshold;
  s.initial_ssthresh = cfg.initial_ssthresh;
  s.params.initial_version = cfg.initial_version;
  s.max_packet_size = cfg.topology.max_packet_size;
  return s;
}

double seconds(SimTime t) { return static_cast<double>(t.ticks()) / 1e6; }

}  // namespace

double time_weighted_cwnd(const std::vector<transport::TraceSample>& trace, SimTime from, SimTime to) {
  if (trace.empty() || to <= from) return 0;
  double area = 0;
  std::optional<std::uint64_t> current;
  SimTime cursor = from;
  for (const auto& s : trace) {
    if (s.time <= from) {
      current = s.cwnd;
      continue;
    }
    if (s.time > to) break;
    if (current) area += static_cast<double>(*current) * static_cast<double>((s.time - cursor).ticks());
    cursor = s.time;
    current = s.cwnd;
  }
  if (current) area += static_cast<double>(*current) * static_cast<double>((to - cursor).ticks());
  const SimTime covered = to - std::max(from, trace.front().time);
  return covered > SimTime() ? area / static_cast<double>(covered.ticks()) : 0;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const transport::SocketConfig sock_cfg = socket_config(cfg);
  sock_cfg.validate();

  Simulator sim(cfg.seed);
  Network net(sim);
  const Dumbbell db = build_dumbbell(net, cfg.topology);

  std::vector<std::unique_ptr<Flow>> flows;
  for (std::size_t i = 0; i < cfg.topology.pairs; ++i) {
    auto f = std::make_unique<Flow>();
    f->index = i + 1;
    f->client_l4 = std::make_unique<transport::QuicL4>(net, db.clients[i]);
    f->server_l4 = std::make_unique<transport::QuicL4>(net, db.servers[i]);
    f->sink = std::make_unique<SinkServer>(
        sim, f->server_l4->create_socket(sock_cfg, transport::SocketRole::kServerListener));
    f->sink->listen(kServerPort);

    BulkSender::Config app;
    app.bytes_to_send = cfg.bytes_to_send;
    app.packet_size = cfg.packet_size;
    app.interval = cfg.interval;
    app.streams = cfg.app == AppType::kRoundRobin ? cfg.streams : 1;
    f->sender = std::make_unique<BulkSender>(sim, f->client_l4->create_socket(sock_cfg), app);
    f->heartbeat = std::make_unique<Timer>(sim);

    Flow* raw = f.get();
    const Address server{db.servers[i], kServerPort};
    sim.schedule(cfg.flow_start(raw->index), [raw, server, &sim, &cfg] {
      transport::QuicSocket& s = raw->sender->socket();
      s.set_trace_callback([raw](const transport::TraceSample& t) { raw->trace.push_back(t); });
      s.set_rtt_callback([raw](SimTime rtt) { raw->rtts.push_back(rtt); });
      raw->trace.push_back(s.trace_sample());
      raw->beat = [raw, &sim, &cfg] {
        raw->trace.push_back(raw->sender->socket().trace_sample());
        raw->heartbeat->arm(sim.now() + cfg.trace_interval, [raw] { raw->beat(); });
      };
      raw->heartbeat->arm(sim.now() + cfg.trace_interval, [raw] { raw->beat(); });
      raw->sender->start(server);
    });
    flows.push_back(std::move(f));
  }

  const SimTime third = SimTime::micros(cfg.duration.ticks() / 3);
  std::uint64_t bottleneck_bytes_at_third = 0;
  const LinkId bottleneck = db.bottleneck_forward;
  sim.schedule(third, [&] { bottleneck_bytes_at_third = net.link(bottleneck).stats().bytes_departed; });

  sim.run_until(cfg.duration);

  ExperimentResult r;
  r.config = cfg;
  r.events = sim.executed_events();
  for (auto& f : flows) {
    FlowResult fr;
    fr.flow = f->index;
    fr.start = cfg.flow_start(f->index);
    const transport::QuicSocket& s = f->sender->socket();
    fr.bytes_written = f->sender->bytes_written();
    fr.bytes_delivered = f->sink->bytes_received();
    fr.goodput_bps = static_cast<double>(fr.bytes_delivered) * 8 / seconds(cfg.duration - fr.start);
    fr.retransmissions = s.stats().retransmitted_packets;
    fr.packets_lost = s.congestion().state().packets_lost;
    fr.packets_sent = s.stats().packets_sent;
    fr.content_ok = f->sink->content_ok();
    fr.rtt_samples = f->rtts;
    if (!f->rtts.empty()) {
      double sum = 0;
      for (SimTime t : f->rtts) sum += seconds(t);
      fr.mean_rtt_s = sum / static_cast<double>(f->rtts.size());
      std::vector<SimTime> sorted = f->rtts;
      std::sort(sorted.begin(), sorted.end());
      const std::size_t n = sorted.size();
      fr.median_rtt_s = n % 2 == 1 ? seconds(sorted[n / 2]) : (seconds(sorted[n / 2 - 1]) + seconds(sorted[n / 2])) / 2;
    }
    fr.steady_cwnd_bytes = time_weighted_cwnd(f->trace, cfg.duration - third, cfg.duration);
    fr.trace = std::move(f->trace);
    r.total_goodput_bps += fr.goodput_bps;
    r.flows.push_back(std::move(fr));
  }
  const std::uint64_t tail_bytes = net.link(bottleneck).stats().bytes_departed - bottleneck_bytes_at_third;
  r.utilization = static_cast<double>(tail_bytes) * 8 /
                  (static_cast<double>(cfg.topology.bottleneck_rate_bps) * seconds(cfg.duration - third));
  return r;
}

std::string summary_json(const ExperimentResult& r) {
  using nlohmann::ordered_json;
  const ExperimentConfig& c = r.config;
  ordered_json j;
  j["cc"] = c.cc_algorithm;
  j["seed"] = c.seed;
  j["duration_s"] = seconds(c.duration);
  j["flows"] = c.topology.pairs;
  j["bottleneck_rate_bps"] = c.topology.bottleneck_rate_bps;
  j["min_rtt_s"] = seconds(c.topology.min_rtt());
  j["bdp_bytes"] = c.topology.bdp_bytes();
  j["bottleneck_queue_packets"] = c.topology.effective_bottleneck_queue();
  j["app"] = to_string(c.app);
  j["total_goodput_bps"] = r.total_goodput_bps;
  j["bottleneck_utilization"] = r.utilization;
  ordered_json flows = ordered_json::array();
  for (const auto& f : r.flows) {
    ordered_json o;
    o["flow"] = f.flow;
    o["start_s"] = seconds(f.start);
    o["bytes_written"] = f.bytes_written;
    o["bytes_delivered"] = f.bytes_delivered;
    o["goodput_bps"] = f.goodput_bps;
    o["mean_rtt_s"] = f.mean_rtt_s;
    o["median_rtt_s"] = f.median_rtt_s;
    o["rtt_samples"] = f.rtt_samples.size();
    o["retransmissions"] = f.retransmissions;
    o["packets_lost"] = f.packets_lost;
    o["packets_sent"] = f.packets_sent;
    o["steady_state_cwnd_bytes"] = f.steady_cwnd_bytes;
    o["content_ok"] = f.content_ok;
    flows.push_back(std::move(o));
  }
  j["per_flow"] = std::move(flows);
  return j.dump(2) + "\n";
}

void write_outputs(const ExperimentResult& r, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
  const std::filesystem::path base(dir);
  for (const auto& f : r.flows) {
    std::ostringstream cwnd;
    write_cwnd_csv(cwnd, f.flow, f.trace);
    write_file((base / ("cwnd-flow" + std::to_string(f.flow) + ".csv")).string(), cwnd.str());
    std::ostringstream rtt;
    write_rtt_csv(rtt, f.flow, f.trace);
    write_file((base / ("rtt-flow" + std::to_string(f.flow) + ".csv")).string(), rtt.str());
  }
  write_file((base / "summary.json").string(), summary_json(r));
}

}  // namespace quicsim::apps
