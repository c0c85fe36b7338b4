#pragma once

// Cycle-driven packet simulator: virtual cut-through switching, bubble flow
// control, dimension-order routing over minimal routing records, and the four
// synthetic traffic patterns. One run is single threaded and deterministic in
// its seed; sweeps fan independent runs out over worker threads.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <limits>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "lattice_net/errors.hpp"
#include "lattice_net/intmat.hpp"
#include "lattice_net/lattice.hpp"
#include "lattice_net/routing.hpp"

namespace lattice_net {

enum class TrafficPattern { Uniform, Antipodal, CentralSymmetric, RandomPairings };

inline std::string pattern_name(TrafficPattern p) {
  switch (p) {
    case TrafficPattern::Uniform:
      return "uniform";
    case TrafficPattern::Antipodal:
      return "antipodal";
    case TrafficPattern::CentralSymmetric:
      return "centralsymmetric";
    case TrafficPattern::RandomPairings:
      return "randompairings";
  }
  return "?";
}

inline TrafficPattern parse_pattern(const std::string& name) {
  for (auto p : {TrafficPattern::Uniform, TrafficPattern::Antipodal, TrafficPattern::CentralSymmetric,
                 TrafficPattern::RandomPairings}) {
    if (pattern_name(p) == name) return p;
  }
  throw ConfigError("unknown traffic pattern '" + name + "'");
}

struct SimConfig {
  TopologyKind topology = topo::PC{4};
  TrafficPattern pattern = TrafficPattern::Uniform;
  double offered_load = 0.1;  // phits / (cycle * node)
  int packet_size = 16;       // phits
  int injectors = 6;          // injection queues per node
  int vc_count = 3;
  int queue_capacity = 4;  // packets per VC (and per injection queue)
  std::int64_t warmup_cycles = 10000;
  std::int64_t measure_cycles = 10000;
  std::uint64_t seed = 1;
};

inline constexpr Int kMaxSimulationOrder = 16384;

inline void validate(const SimConfig& c) {
  if (!(c.offered_load >= 0.0 && c.offered_load <= 1.0)) throw ConfigError("offered_load must lie in [0, 1]");
  if (c.packet_size < 1) throw ConfigError("packet_size must be >= 1");
  if (c.injectors < 1) throw ConfigError("injectors must be >= 1");
  if (c.vc_count < 1) throw ConfigError("vc_count must be >= 1");
  // Ring entry needs two free slots, so a single-slot queue could never accept a packet.
  if (c.queue_capacity < 2) throw ConfigError("queue_capacity must be >= 2 for bubble flow control");
  if (c.warmup_cycles < 0) throw ConfigError("warmup_cycles must be >= 0");
  if (c.measure_cycles < 1) throw ConfigError("measure_cycles must be >= 1");
}

struct Packet {
  std::uint64_t id = 0;
  std::uint32_t source = 0;
  std::uint32_t destination = 0;
  RoutingRecord record;
  int size = 0;
  std::int64_t birth_cycle = 0;
  std::int64_t delivery_cycle = -1;
};

struct SimStats {
  std::string topology;
  std::string pattern;
  double offered_load = 0.0;
  std::uint64_t seed = 0;
  Int nodes = 0;

  double accepted_load = 0.0;  // phits / (cycle * node) over the measurement window
  double avg_latency = 0.0;    // cycles from generation to tail delivery
  std::int64_t delivered_packets = 0;  // inside the measurement window

  // Whole-run bookkeeping.
  std::int64_t generated = 0;
  std::int64_t delivered_total = 0;
  std::int64_t in_flight = 0;  // inside router buffers at the end
  std::int64_t queued = 0;     // still in injection queues at the end
  std::int64_t stalled_generations = 0;
  std::int64_t max_delivery_gap = 0;
  std::int64_t hop_mismatches = 0;
  std::int64_t latency_bound_violations = 0;

  bool conserved() const { return generated == delivered_total + in_flight + queued; }
  bool operator==(const SimStats&) const = default;
};

// Destination of every source under a pattern. Static patterns are fixed at
// construction; uniform is drawn per packet.
class DestinationMap {
 public:
  DestinationMap(const LatticeGraph& g, const Adjacency& adj, TrafficPattern pattern, std::mt19937_64& rng)
      : pattern_(pattern), order_(adj.order()) {
    if (order_ < 2) throw ConfigError("traffic needs at least two nodes");
    if (pattern == TrafficPattern::Uniform) return;
    fixed_.assign(order_, kNone);
    if (pattern == TrafficPattern::Antipodal) {
      const auto dist = bfs_distances(adj, 0);
      const std::uint32_t diameter = *std::max_element(dist.begin(), dist.end());
      std::vector<IntVector> farthest;
      for (std::size_t v = 0; v < order_; ++v)
        if (dist[v] == diameter) farthest.push_back(g.label(v));
      for (std::size_t v = 0; v < order_; ++v) {
        const IntVector label = g.label(v);
        std::size_t best = kNone;
        for (const auto& f : farthest) best = std::min(best, g.index_of(g.reduce(add(label, f))));
        fixed_[v] = best;
      }
    } else if (pattern == TrafficPattern::CentralSymmetric) {
      for (std::size_t v = 0; v < order_; ++v) {
        const std::size_t w = g.index_of(g.reduce(negated(g.label(v))));
        fixed_[v] = w == v ? kNone : w;
      }
    } else {
      std::vector<std::size_t> perm(order_);
      for (std::size_t v = 0; v < order_; ++v) perm[v] = v;
      std::shuffle(perm.begin(), perm.end(), rng);
      for (std::size_t k = 0; k + 1 < order_; k += 2) {
        fixed_[perm[k]] = perm[k + 1];
        fixed_[perm[k + 1]] = perm[k];
      }
    }
  }

  // Sources without a partner (self-inverse vertices, odd leftover) draw uniformly.
  std::size_t destination(std::size_t source, std::mt19937_64& rng) const {
    if (!fixed_.empty() && fixed_[source] != kNone) return fixed_[source];
    std::uniform_int_distribution<std::size_t> pick(0, order_ - 2);
    const std::size_t d = pick(rng);
    return d >= source ? d + 1 : d;
  }

  bool is_fixed(std::size_t source) const { return !fixed_.empty() && fixed_[source] != kNone; }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  TrafficPattern pattern_;
  std::size_t order_;
  std::vector<std::size_t> fixed_;
};

inline IntVector pattern_destination(TrafficPattern pattern, const LatticeGraph& g, const IntVector& source,
                                     std::mt19937_64& rng) {
  g.require_label(source);
  const Adjacency adj(g);
  const DestinationMap map(g, adj, pattern, rng);
  return g.label(map.destination(g.index_of(source), rng));
}

namespace detail {

// Packet FIFO of one virtual channel or injection queue. A buffer streams one
// packet at a time; the slot of a departing packet stays taken until its tail
// has left.
struct PacketBuffer {
  std::deque<std::uint32_t> packets;
  std::int64_t departing_until = 0;

  int occupancy(std::int64_t now) const {
    return static_cast<int>(packets.size()) + (now < departing_until ? 1 : 0);
  }
};

struct LivePacket {
  Packet packet;
  std::vector<std::int32_t> remaining;
  std::int64_t ready_cycle = 0;  // head may leave the current buffer from here on
  int dimension = -1;            // dimension of the last hop, -1 before injection
  int vc = 0;
  std::int64_t hops = 0;
};

class Network {
 public:
  explicit Network(const SimConfig& config)
      : cfg_(config),
        graph_(make_topology(config.topology)),
        adj_(checked_graph(graph_)),
        records_(graph_, adj_),
        rng_(config.seed),
        destinations_(graph_, adj_, config.pattern, rng_),
        n_(graph_.dim()),
        degree_(graph_.degree()),
        nodes_(adj_.order()) {
    buffers_.resize(nodes_ * (degree_ * cfg_.vc_count + cfg_.injectors));
    link_busy_until_.assign(nodes_ * degree_, 0);
    eject_busy_until_.assign(nodes_, 0);
    const auto dist = bfs_distances(adj_, 0);
    diameter_ = *std::max_element(dist.begin(), dist.end());
  }

  SimStats run() {
    SimStats s;
    s.topology = topology_name(cfg_.topology);
    s.pattern = pattern_name(cfg_.pattern);
    s.offered_load = cfg_.offered_load;
    s.seed = cfg_.seed;
    s.nodes = static_cast<Int>(nodes_);
    const std::int64_t end = cfg_.warmup_cycles + cfg_.measure_cycles;
    const double p_generate = cfg_.offered_load / cfg_.packet_size;
    std::bernoulli_distribution generate(p_generate);
    std::int64_t latency_sum = 0;
    std::int64_t last_delivery = 0;
    for (now_ = 0; now_ < end; ++now_) {
      for (std::size_t v = 0; v < nodes_; ++v) {
        if (p_generate > 0.0 && generate(rng_)) generate_packet(v, s);
      }
      for (std::size_t v = 0; v < nodes_; ++v) switch_node(v);
      for (std::uint32_t id : delivered_now_) {
        const LivePacket& lp = live_[id];
        const Packet& p = lp.packet;
        ++s.delivered_total;
        if (lp.hops != norm(p.record)) ++s.hop_mismatches;
        if (p.delivery_cycle < p.birth_cycle + norm(p.record) + p.size - 1) ++s.latency_bound_violations;
        if (p.delivery_cycle >= cfg_.warmup_cycles && p.delivery_cycle < end) {
          ++s.delivered_packets;
          latency_sum += p.delivery_cycle - p.birth_cycle;
        }
        free_slots_.push_back(id);
      }
      if (!delivered_now_.empty()) {
        s.max_delivery_gap = std::max(s.max_delivery_gap, now_ - last_delivery);
        last_delivery = now_;
      }
      delivered_now_.clear();
    }
    if (s.generated > 0) s.max_delivery_gap = std::max(s.max_delivery_gap, end - last_delivery);
    s.accepted_load = static_cast<double>(s.delivered_packets) * cfg_.packet_size /
                      (static_cast<double>(cfg_.measure_cycles) * static_cast<double>(nodes_));
    s.avg_latency = s.delivered_packets > 0 ? static_cast<double>(latency_sum) / s.delivered_packets : 0.0;
    for (std::size_t v = 0; v < nodes_; ++v) {
      for (int b = 0; b < buffers_per_node(); ++b) {
        const auto count = static_cast<std::int64_t>(buffer(v, b).packets.size());
        (b < degree_ * cfg_.vc_count ? s.in_flight : s.queued) += count;
      }
    }
    return s;
  }

  Int diameter() const { return diameter_; }

 private:
  static const LatticeGraph& checked_graph(const LatticeGraph& g) {
    if (g.order() > kMaxSimulationOrder) {
      throw ConfigError("simulation is limited to " + std::to_string(kMaxSimulationOrder) + " nodes");
    }
    return g;
  }

  int buffers_per_node() const { return degree_ * cfg_.vc_count + cfg_.injectors; }
  // Input VC `vc` of the port fed by links travelling in direction `slot`.
  int vc_index(int slot, int vc) const { return slot * cfg_.vc_count + vc; }
  int injector_index(int k) const { return degree_ * cfg_.vc_count + k; }
  bool is_injector(int b) const { return b >= degree_ * cfg_.vc_count; }
  PacketBuffer& buffer(std::size_t v, int b) { return buffers_[v * buffers_per_node() + b]; }

  void generate_packet(std::size_t v, SimStats& s) {
    int best = -1;
    int best_size = cfg_.queue_capacity;
    for (int k = 0; k < cfg_.injectors; ++k) {
      const int occ = buffer(v, injector_index(k)).occupancy(now_);
      if (occ < best_size) {
        best = k;
        best_size = occ;
      }
    }
    if (best < 0) {
      ++s.stalled_generations;
      return;
    }
    const std::size_t dst = destinations_.destination(v, rng_);
    const IntVector delta = graph_.reduce(sub(graph_.label(dst), graph_.label(v)));
    LivePacket lp;
    lp.packet.id = next_id_++;
    lp.packet.source = static_cast<std::uint32_t>(v);
    lp.packet.destination = static_cast<std::uint32_t>(dst);
    lp.packet.record = records_.pick(graph_.index_of(delta), rng_);
    lp.packet.size = cfg_.packet_size;
    lp.packet.birth_cycle = now_;
    lp.remaining.assign(lp.packet.record.begin(), lp.packet.record.end());
    lp.ready_cycle = now_;
    std::uint32_t slot;
    if (free_slots_.empty()) {
      slot = static_cast<std::uint32_t>(live_.size());
      live_.push_back(std::move(lp));
    } else {
      slot = free_slots_.back();
      free_slots_.pop_back();
      live_[slot] = std::move(lp);
    }
    buffer(v, injector_index(best)).packets.push_back(slot);
    ++s.generated;
  }

  // Output requested by the head packet: a direction slot, or degree_ for ejection.
  int requested_port(const LivePacket& lp) const {
    for (int i = 0; i < n_; ++i) {
      if (lp.remaining[i] != 0) return direction_slot(i, lp.remaining[i] > 0 ? 1 : -1);
    }
    return degree_;
  }

  // Downstream VC for a hop, or -1 when there is no room.
  int downstream_vc(const LivePacket& lp, std::size_t next, int slot) {
    const bool enters_ring = lp.dimension != slot / 2;
    if (!enters_ring) {
      return buffer(next, vc_index(slot, lp.vc)).occupancy(now_) < cfg_.queue_capacity ? lp.vc : -1;
    }
    int best = -1, best_occ = std::numeric_limits<int>::max(), ties = 0;
    for (int vc = 0; vc < cfg_.vc_count; ++vc) {
      const int occ = buffer(next, vc_index(slot, vc)).occupancy(now_);
      if (occ < best_occ) {
        best = vc;
        best_occ = occ;
        ties = 1;
      } else if (occ == best_occ && std::uniform_int_distribution<int>(0, ties++)(rng_) == 0) {
        best = vc;
      }
    }
    return cfg_.queue_capacity - best_occ >= 2 ? best : -1;
  }

  void switch_node(std::size_t v) {
    // Head packets ready to move, bucketed by requested port.
    for (auto& c : candidates_) c.clear();
    candidates_.resize(degree_ + 1);
    const int nb = buffers_per_node();
    for (int b = 0; b < nb; ++b) {
      PacketBuffer& buf = buffer(v, b);
      if (buf.packets.empty() || now_ < buf.departing_until) continue;
      const LivePacket& lp = live_[buf.packets.front()];
      if (now_ < lp.ready_cycle) continue;
      candidates_[requested_port(lp)].push_back(b);
    }
    for (int port = 0; port <= degree_; ++port) {
      auto& cands = candidates_[port];
      if (cands.empty()) continue;
      if (port == degree_) {
        if (now_ < eject_busy_until_[v]) continue;
      } else if (now_ < link_busy_until_[v * degree_ + port]) {
        continue;
      }
      std::shuffle(cands.begin(), cands.end(), rng_);
      // In-transit traffic first, then injections.
      std::stable_partition(cands.begin(), cands.end(), [&](int b) { return !is_injector(b); });
      for (int b : cands) {
        if (try_advance(v, b, port)) break;
      }
    }
  }

  bool try_advance(std::size_t v, int b, int port) {
    PacketBuffer& buf = buffer(v, b);
    const std::uint32_t id = buf.packets.front();
    LivePacket& lp = live_[id];
    if (port == degree_) {
      buf.packets.pop_front();
      buf.departing_until = now_ + cfg_.packet_size;
      eject_busy_until_[v] = now_ + cfg_.packet_size;
      lp.packet.delivery_cycle = now_ + cfg_.packet_size - 1;
      delivered_now_.push_back(id);
      return true;
    }
    const std::size_t next = adj_.neighbor(v, port);
    const int vc = downstream_vc(lp, next, port);
    if (vc < 0) return false;
    buf.packets.pop_front();
    buf.departing_until = now_ + cfg_.packet_size;
    link_busy_until_[v * degree_ + port] = now_ + cfg_.packet_size;
    const int axis = port / 2;
    lp.remaining[axis] += port % 2 == 0 ? -1 : 1;
    lp.dimension = axis;
    lp.vc = vc;
    lp.ready_cycle = now_ + 1;
    ++lp.hops;
    buffer(next, vc_index(port, vc)).packets.push_back(id);
    return true;
  }

  SimConfig cfg_;
  LatticeGraph graph_;
  Adjacency adj_;
  MinimalRecordTable records_;
  std::mt19937_64 rng_;
  DestinationMap destinations_;
  int n_;
  int degree_;
  std::size_t nodes_;
  Int diameter_ = 0;
  std::int64_t now_ = 0;
  std::vector<PacketBuffer> buffers_;
  std::vector<std::int64_t> link_busy_until_;
  std::vector<std::int64_t> eject_busy_until_;
  std::vector<LivePacket> live_;  // indexed by slot; slots are reused after delivery
  std::vector<std::uint32_t> free_slots_;
  std::uint64_t next_id_ = 0;
  std::vector<std::uint32_t> delivered_now_;
  std::vector<std::vector<int>> candidates_;
};

}  // namespace detail

inline SimStats run_simulation(const SimConfig& config) {
  validate(config);
  return detail::Network(config).run();
}

struct SweepRow {
  std::string topology;
  std::string pattern;
  double offered = 0.0;
  double accepted = 0.0;
  double avg_latency = 0.0;
  int seed_count = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // one per load, averaged over seeds
  std::vector<SimStats> runs;  // one per (load, seed), load-major
};

// Worker count: LATTICE_NET_THREADS if set, else the hardware concurrency.
inline unsigned sweep_threads() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("LATTICE_NET_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return n;
}

// Seeds are config.seed, config.seed + 1, ..., one run per (load, seed).
inline SweepResult sweep(const SimConfig& config, const std::vector<double>& loads, int seeds = 5,
                         unsigned threads = 0) {
  if (seeds < 1) throw ConfigError("sweep needs at least one seed");
  std::vector<SimConfig> jobs;
  for (double load : loads) {
    for (int k = 0; k < seeds; ++k) {
      SimConfig c = config;
      c.offered_load = load;
      c.seed = config.seed + static_cast<std::uint64_t>(k);
      validate(c);
      jobs.push_back(c);
    }
  }
  SweepResult result;
  result.runs.resize(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      try {
        result.runs[j] = run_simulation(jobs[j]);
      } catch (...) {
        errors[j] = std::current_exception();
      }
    }
  };
  const unsigned n_threads = std::min<std::size_t>(threads == 0 ? sweep_threads() : threads, std::max<std::size_t>(jobs.size(), 1));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  for (std::size_t l = 0; l < loads.size(); ++l) {
    SweepRow row;
    row.topology = topology_name(config.topology);
    row.pattern = pattern_name(config.pattern);
    row.offered = loads[l];
    row.seed_count = seeds;
    for (int k = 0; k < seeds; ++k) {
      const SimStats& s = result.runs[l * seeds + k];
      row.accepted += s.accepted_load / seeds;
      row.avg_latency += s.avg_latency / seeds;
    }
    result.rows.push_back(row);
  }
  return result;
}

}  // namespace lattice_net
