#pragma once

// Command-line front end. run_cli() takes the arguments after the program
// name and writes to the given streams, so it can be driven from tests.
//
// Exit codes: 0 success, 1 validation failure (an oracle or invariant check
// failed), 2 usage error (bad flags, malformed input, unsupported request).

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lattice_net/errors.hpp"
#include "lattice_net/intmat.hpp"
#include "lattice_net/lattice.hpp"
#include "lattice_net/metrics.hpp"
#include "lattice_net/routing.hpp"
#include "lattice_net/simulator.hpp"
#include "lattice_net/symmetry.hpp"

namespace lattice_net {

using Json = nlohmann::ordered_json;

// Named topology plus parameters, or a literal matrix.
struct TopologySelector {
  std::string kind;
  std::optional<Int> a;
  std::string sides;
  std::vector<std::string> parts;
  std::string matrix;
};

inline TopologyKind resolve_topology(const TopologySelector& sel) {
  const bool named = !sel.kind.empty();
  const bool literal = !sel.matrix.empty();
  if (named == literal) throw PreconditionError("give exactly one of --topology or --matrix");
  if (literal) return topo::Custom{parse_matrix(sel.matrix)};
  auto need_a = [&]() -> Int {
    if (!sel.a) throw PreconditionError("topology '" + sel.kind + "' needs --a");
    require_side(*sel.a);
    return *sel.a;
  };
  if (sel.kind == "torus") {
    if (sel.sides.empty()) throw PreconditionError("torus needs --sides");
    return topo::Torus{parse_vector(sel.sides)};
  }
  if (sel.kind == "hybrid") {
    if (sel.parts.size() != 2) throw PreconditionError("hybrid needs exactly two --parts");
    return topo::Hybrid{parse_part(sel.parts[0]), parse_part(sel.parts[1]), need_a()};
  }
  if (sel.kind == "pc") return topo::PC{need_a()};
  if (sel.kind == "rtt") return topo::RTT{need_a()};
  if (sel.kind == "fcc") return topo::FCC{need_a()};
  if (sel.kind == "bcc") return topo::BCC{need_a()};
  if (sel.kind == "fcc4") return topo::FCC4{need_a()};
  if (sel.kind == "bcc4") return topo::BCC4{need_a()};
  if (sel.kind == "lip") return topo::Lip{need_a()};
  throw PreconditionError("unknown topology '" + sel.kind + "'");
}

inline std::optional<Int> side_parameter(const TopologyKind& kind) {
  return std::visit(
      [](const auto& t) -> std::optional<Int> {
        if constexpr (requires { t.a; }) {
          return t.a;
        } else {
          return std::nullopt;
        }
      },
      kind);
}

inline Json matrix_json(const IntMatrix& m) {
  Json rows = Json::array();
  for (const auto& r : m.rows()) rows.push_back(r);
  return rows;
}

// {"kind":"bcc4","a":2}, {"kind":"torus","sides":[4,4,4,2]},
// {"kind":"hybrid","parts":["pc2a","bcc"],"a":2}, {"kind":"matrix","matrix":"2,1;0,2"}
inline TopologyKind topology_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw ConfigError("topology must be an object with a string \"kind\"");
  }
  for (const auto& [key, value] : j.items()) {
    if (key != "kind" && key != "a" && key != "sides" && key != "parts" && key != "matrix") {
      throw ConfigError("unknown topology field '" + key + "'");
    }
  }
  try {
    TopologySelector sel;
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "matrix") {
      sel.matrix = j.at("matrix").get<std::string>();
    } else {
      sel.kind = kind;
    }
    if (j.contains("a")) sel.a = j["a"].get<Int>();
    if (j.contains("sides")) {
      std::string s;
      for (const auto& x : j["sides"]) s += (s.empty() ? "" : ",") + std::to_string(x.get<Int>());
      sel.sides = s;
    }
    if (j.contains("parts")) sel.parts = j["parts"].get<std::vector<std::string>>();
    return resolve_topology(sel);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad topology: ") + e.what());
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  }
}

inline Json topology_to_json(const TopologyKind& kind) {
  struct Visitor {
    Json operator()(const topo::Torus& t) const { return {{"kind", "torus"}, {"sides", t.sides}}; }
    Json operator()(const topo::PC& t) const { return {{"kind", "pc"}, {"a", t.a}}; }
    Json operator()(const topo::RTT& t) const { return {{"kind", "rtt"}, {"a", t.a}}; }
    Json operator()(const topo::FCC& t) const { return {{"kind", "fcc"}, {"a", t.a}}; }
    Json operator()(const topo::BCC& t) const { return {{"kind", "bcc"}, {"a", t.a}}; }
    Json operator()(const topo::FCC4& t) const { return {{"kind", "fcc4"}, {"a", t.a}}; }
    Json operator()(const topo::BCC4& t) const { return {{"kind", "bcc4"}, {"a", t.a}}; }
    Json operator()(const topo::Lip& t) const { return {{"kind", "lip"}, {"a", t.a}}; }
    Json operator()(const topo::Hybrid& t) const {
      return {{"kind", "hybrid"}, {"parts", {part_name(t.left), part_name(t.right)}}, {"a", t.a}};
    }
    Json operator()(const topo::Custom& t) const { return {{"kind", "matrix"}, {"matrix", t.matrix.to_string()}}; }
  };
  return std::visit(Visitor{}, kind);
}

struct SweepPlan {
  SimConfig config;
  std::vector<double> loads;
  int seeds = 5;
};

inline SweepPlan sim_config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("simulation config must be a JSON object");
  SweepPlan plan;
  SimConfig& c = plan.config;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "topology") {
        c.topology = topology_from_json(value);
      } else if (key == "pattern") {
        c.pattern = parse_pattern(value.get<std::string>());
      } else if (key == "offered_load") {
        c.offered_load = value.get<double>();
      } else if (key == "packet_size") {
        c.packet_size = value.get<int>();
      } else if (key == "injectors") {
        c.injectors = value.get<int>();
      } else if (key == "vc_count") {
        c.vc_count = value.get<int>();
      } else if (key == "queue_capacity") {
        c.queue_capacity = value.get<int>();
      } else if (key == "warmup_cycles") {
        c.warmup_cycles = value.get<std::int64_t>();
      } else if (key == "measure_cycles") {
        c.measure_cycles = value.get<std::int64_t>();
      } else if (key == "seed") {
        c.seed = value.get<std::uint64_t>();
      } else if (key == "loads") {
        plan.loads = value.get<std::vector<double>>();
      } else if (key == "seeds") {
        plan.seeds = value.get<int>();
      } else {
        throw ConfigError("unknown config field '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  validate(c);
  return plan;
}

inline Json sim_config_to_json(const SimConfig& c) {
  return {{"topology", topology_to_json(c.topology)},
          {"pattern", pattern_name(c.pattern)},
          {"offered_load", c.offered_load},
          {"packet_size", c.packet_size},
          {"injectors", c.injectors},
          {"vc_count", c.vc_count},
          {"queue_capacity", c.queue_capacity},
          {"warmup_cycles", c.warmup_cycles},
          {"measure_cycles", c.measure_cycles},
          {"seed", c.seed}};
}

inline Json sim_stats_json(const SimStats& s) {
  return {{"topology", s.topology},
          {"pattern", s.pattern},
          {"offered_load", s.offered_load},
          {"seed", s.seed},
          {"nodes", s.nodes},
          {"accepted_load", s.accepted_load},
          {"avg_latency", s.avg_latency},
          {"delivered_packets", s.delivered_packets},
          {"generated", s.generated},
          {"delivered_total", s.delivered_total},
          {"in_flight", s.in_flight},
          {"queued", s.queued},
          {"stalled_generations", s.stalled_generations},
          {"max_delivery_gap", s.max_delivery_gap},
          {"hop_mismatches", s.hop_mismatches},
          {"latency_bound_violations", s.latency_bound_violations},
          {"conserved", s.conserved()}};
}

inline std::string csv_field(const std::string& s) {
  return s.find_first_of(",\"") == std::string::npos ? s : "\"" + s + "\"";
}

// Fixed-precision rendering keeps CSV output byte-stable across platforms.
inline std::string format_real(double x, int precision = 6) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << x;
  return os.str();
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "topology,pattern,offered,accepted,avg_latency,seed_count\n";
  for (const auto& r : rows) {
    out += csv_field(r.topology) + "," + r.pattern + "," + format_real(r.offered, 4) + "," +
           format_real(r.accepted) + "," + format_real(r.avg_latency, 3) + "," + std::to_string(r.seed_count) + "\n";
  }
  return out;
}

// Left-aligned columns, two spaces apart.
inline std::string render_table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& r : rows) {
    if (width.size() < r.size()) width.resize(r.size(), 0);
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  }
  std::string out;
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t c = 0; c < r.size(); ++c) {
      line += r[c];
      if (c + 1 < r.size()) line += std::string(width[c] - r[c].size() + 2, ' ');
    }
    out += line + "\n";
  }
  return out;
}

inline std::string vector_text(const IntVector& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + ")";
}

namespace detail {

struct AnalyzeReport {
  std::string name;
  std::optional<Int> a;
  LatticeGraph graph;
  DistanceSummary summary;
  std::optional<bool> symmetric;
  ThroughputBound bound;
};

inline AnalyzeReport analyze(const TopologyKind& kind) {
  LatticeGraph g = make_topology(kind);
  DistanceSummary s = distance_summary(g);
  std::optional<bool> symmetric;
  if (g.dim() <= kMaxStabilizerDimension) symmetric = stabilizer(g.generator()).symmetric;
  const ThroughputBound bound = throughput_bound(g, s, symmetric.value_or(false));
  return {topology_name(kind), side_parameter(kind), std::move(g), std::move(s), symmetric, bound};
}

// Vertices visited when a record is consumed in dimension order.
inline std::vector<IntVector> record_path(const LatticeGraph& g, IntVector v, const RoutingRecord& r) {
  std::vector<IntVector> path{v};
  for (int i = 0; i < g.dim(); ++i) {
    const Int step = r[i] > 0 ? 1 : -1;
    for (Int k = 0; k < checked::abs(r[i]); ++k) {
      v[i] += step;
      v = g.reduce(v);
      path.push_back(v);
    }
  }
  return path;
}

class Output {
 public:
  Output(std::ostream& fallback, const std::string& path) : fallback_(fallback), path_(path) {}

  void write(const std::string& text) {
    if (path_.empty()) {
      fallback_ << text;
      return;
    }
    std::ofstream f(path_);
    if (!f) throw PreconditionError("cannot write '" + path_ + "'");
    f << text;
  }

 private:
  std::ostream& fallback_;
  std::string path_;
};

inline void add_topology_options(CLI::App* cmd, TopologySelector& sel) {
  cmd->add_option("--topology", sel.kind, "pc, fcc, bcc, rtt, fcc4, bcc4, lip, torus, hybrid");
  cmd->add_option("--a", sel.a, "crystal side");
  cmd->add_option("--sides", sel.sides, "torus sides, e.g. 8,8,8,4");
  cmd->add_option("--parts", sel.parts, "hybrid parts, e.g. pc2a bcc")->expected(2);
  cmd->add_option("--matrix", sel.matrix, "literal generator matrix, e.g. \"4,2;0,4\"");
}

inline void add_format_option(CLI::App* cmd, std::string& format, std::vector<std::string> allowed) {
  cmd->add_option("--format", format, "output format")->check(CLI::IsMember(std::move(allowed)));
}

}  // namespace detail

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lattice graph interconnection networks: analysis, routing and simulation", "lattice-net"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "lattice-net 1.0.0");

  TopologySelector sel;
  std::string format = "table";
  std::string output_path;
  std::string from_text, to_text, router_name = "auto", tie_name = "canonical";
  std::uint64_t seed = 1;
  std::vector<std::string> lift_parts;
  std::vector<std::string> lift_matrices;
  std::optional<Int> lift_a;
  std::string config_path, pattern_name_opt, loads_text;
  std::optional<double> load;
  std::optional<int> seeds;
  std::optional<std::int64_t> warmup, measure;
  std::optional<std::uint64_t> sim_seed;

  auto* analyze = app.add_subcommand("analyze", "diameter, average distance and throughput bound");
  detail::add_topology_options(analyze, sel);
  detail::add_format_option(analyze, format, {"table", "json", "csv"});
  analyze->add_option("--output", output_path, "write to a file instead of stdout");

  auto* symmetry = app.add_subcommand("symmetry", "linear automorphism scan");
  detail::add_topology_options(symmetry, sel);
  detail::add_format_option(symmetry, format, {"table", "json"});

  auto* route = app.add_subcommand("route", "minimal routing record between two vertices");
  detail::add_topology_options(route, sel);
  route->add_option("--from", from_text, "source label, e.g. 1,3,3")->required();
  route->add_option("--to", to_text, "destination label")->required();
  route->add_option("--router", router_name, "auto, specialized or generic")
      ->check(CLI::IsMember({"auto", "specialized", "generic"}));
  route->add_option("--tie", tie_name, "canonical or random")->check(CLI::IsMember({"canonical", "random"}));
  route->add_option("--seed", seed, "seed for --tie random");
  detail::add_format_option(route, format, {"table", "json"});

  auto* verify = app.add_subcommand("verify", "check router minimality against BFS");
  detail::add_topology_options(verify, sel);
  verify->add_option("--router", router_name, "auto, specialized or generic")
      ->check(CLI::IsMember({"auto", "specialized", "generic"}));
  verify->add_option("--seed", seed, "seed for sampled pairs on large graphs");
  detail::add_format_option(verify, format, {"table", "json"});

  auto* lift = app.add_subcommand("lift", "common lift of two lattice graphs");
  lift->add_option("parts", lift_parts, "two named parts, e.g. pc2a bcc");
  lift->add_option("--a", lift_a, "side of the named parts");
  lift->add_option("--matrix", lift_matrices, "literal matrices (give twice)");
  detail::add_format_option(lift, format, {"table", "json"});

  auto* simulate = app.add_subcommand("simulate", "one simulation run");
  auto* sweep_cmd = app.add_subcommand("sweep", "load sweep averaged over seeds");
  for (auto* cmd : {simulate, sweep_cmd}) {
    cmd->add_option("--config", config_path, "JSON simulation config");
    detail::add_topology_options(cmd, sel);
    cmd->add_option("--pattern", pattern_name_opt, "uniform, antipodal, centralsymmetric, randompairings");
    cmd->add_option("--seed", sim_seed, "base seed");
    cmd->add_option("--warmup", warmup, "warmup cycles");
    cmd->add_option("--measure", measure, "measured cycles");
    cmd->add_option("--output", output_path, "write to a file instead of stdout");
  }
  simulate->add_option("--load", load, "offered load in phits/(cycle*node)");
  detail::add_format_option(simulate, format, {"table", "json", "csv"});
  sweep_cmd->add_option("--loads", loads_text, "comma separated offered loads");
  sweep_cmd->add_option("--seeds", seeds, "seeds per load (default 5)");
  detail::add_format_option(sweep_cmd, format, {"table", "json", "csv"});

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  auto usage_error = [&](const std::string& msg) {
    err << "error: " << msg << "\n";
    return 2;
  };

  try {
    if (analyze->parsed()) {
      const auto kind = resolve_topology(sel);
      const auto r = detail::analyze(kind);
      const std::string a_text = r.a ? std::to_string(*r.a) : "";
      detail::Output sink(out, output_path);
      if (format == "csv") {
        sink.write("topology,a,nodes,diameter,avg_num,avg_den,bound_num,bound_den\n" + csv_field(r.name) +
                   "," + a_text + "," + std::to_string(r.summary.nodes) + "," + std::to_string(r.summary.diameter) +
                   "," + std::to_string(r.summary.average.numerator()) + "," +
                   std::to_string(r.summary.average.denominator()) + "," +
                   std::to_string(r.bound.value.numerator()) + "," + std::to_string(r.bound.value.denominator()) +
                   "\n");
        return 0;
      }
      Json per_dim = Json::array();
      for (const auto& x : r.summary.per_dim_average) per_dim.push_back(to_string(x));
      if (format == "json") {
        Json j;
        j["topology"] = r.name;
        j["a"] = r.a ? Json(*r.a) : Json(nullptr);
        j["nodes"] = r.summary.nodes;
        j["dimension"] = r.graph.dim();
        j["hermite"] = matrix_json(r.graph.hermite().matrix());
        j["diameter"] = r.summary.diameter;
        j["avg_num"] = r.summary.average.numerator();
        j["avg_den"] = r.summary.average.denominator();
        j["average"] = to_double(r.summary.average);
        j["per_dim_average"] = per_dim;
        j["symmetric"] = r.symmetric ? Json(*r.symmetric) : Json(nullptr);
        j["bound_kind"] = r.bound.kind == BoundKind::Symmetric ? "symmetric" : "mixed-radix";
        j["bound_num"] = r.bound.value.numerator();
        j["bound_den"] = r.bound.value.denominator();
        j["bound"] = to_double(r.bound.value);
        sink.write(j.dump() + "\n");
        return 0;
      }
      std::string dims;
      for (const auto& x : per_dim) dims += (dims.empty() ? "" : " ") + x.get<std::string>();
      sink.write(render_table({
          {"topology", r.name},
          {"hermite", r.graph.hermite().matrix().to_string()},
          {"nodes", std::to_string(r.summary.nodes)},
          {"diameter", std::to_string(r.summary.diameter)},
          {"average", to_string(r.summary.average) + " = " + format_real(to_double(r.summary.average))},
          {"per-dimension", dims},
          {"symmetric", r.symmetric ? (*r.symmetric ? "yes" : "no") : "not checked"},
          {"bound", to_string(r.bound.value) + " = " + format_real(to_double(r.bound.value)) + " (" +
                        (r.bound.kind == BoundKind::Symmetric ? "degree / average" : "busiest dimension") + ")"},
      }));
      return 0;
    }

    if (symmetry->parsed()) {
      const LatticeGraph g = make_topology(resolve_topology(sel));
      const StabilizerReport rep = stabilizer(g.generator());
      Json witnesses = Json::array();
      for (const auto& w : rep.witnesses) witnesses.push_back(w ? Json(w->to_string()) : Json(nullptr));
      if (format == "json") {
        Json j;
        j["symmetric"] = rep.symmetric;
        j["stabilizer_size"] = rep.members.size();
        j["witnesses"] = witnesses;
        out << j.dump() << "\n";
        return 0;
      }
      std::vector<std::vector<std::string>> rows{{"symmetric", rep.symmetric ? "yes" : "no"},
                                                 {"stabilizer size", std::to_string(rep.members.size())}};
      for (std::size_t i = 0; i < rep.witnesses.size(); ++i) {
        rows.push_back({"e1 -> e" + std::to_string(i + 1), rep.witnesses[i] ? rep.witnesses[i]->to_string() : "-"});
      }
      out << render_table(rows);
      return 0;
    }

    if (route->parsed()) {
      const TopologyKind kind = resolve_topology(sel);
      const LatticeGraph g = make_topology(kind);
      const IntVector vs = parse_vector(from_text);
      const IntVector vd = parse_vector(to_text);
      g.require_label(vs);
      g.require_label(vd);
      std::mt19937_64 rng(seed);
      TieBreaker tie = tie_name == "random" ? TieBreaker::random(rng) : TieBreaker::canonical();
      RoutingRecord record;
      const IntVector delta = sub(vd, vs);
      const bool use_specialized = router_name != "generic" && specialized_router(kind).has_value();
      if (router_name == "specialized" && !use_specialized) {
        return usage_error("no specialized router for " + topology_name(kind));
      }
      if (use_specialized && std::holds_alternative<topo::FCC>(kind)) {
        record = route_fcc(std::get<topo::FCC>(kind).a, delta, tie);
      } else if (use_specialized && std::holds_alternative<topo::BCC>(kind)) {
        record = route_bcc(std::get<topo::BCC>(kind).a, delta, tie);
      } else if (use_specialized) {
        record = (*specialized_router(kind))(vs, vd);
      } else {
        record = route_generic(g, vs, vd, tie);
      }
      const auto path = detail::record_path(g, vs, record);
      if (format == "json") {
        Json j;
        j["record"] = record;
        j["norm"] = norm(record);
        j["path"] = path;
        out << j.dump() << "\n";
        return 0;
      }
      std::string path_text;
      for (const auto& v : path) path_text += (path_text.empty() ? "" : " ") + vector_text(v);
      out << render_table({{"record", vector_text(record)}, {"norm", std::to_string(norm(record))}, {"path", path_text}});
      return 0;
    }

    if (verify->parsed()) {
      const TopologyKind kind = resolve_topology(sel);
      const LatticeGraph g = make_topology(kind);
      Router router;
      std::string used = "generic";
      if (router_name != "generic") {
        if (auto r = specialized_router(kind)) {
          router = *r;
          used = "specialized";
        } else if (router_name == "specialized") {
          return usage_error("no specialized router for " + topology_name(kind));
        }
      }
      if (used == "generic") {
        auto shared = std::make_shared<HierarchicalRouter>(g);
        router = [shared](const IntVector& vs, const IntVector& vd) { return shared->route(vs, vd); };
      }
      const MinimalityReport rep = verify_minimality(g, router, 4096, 20000, seed);
      if (format == "json") {
        Json j;
        j["topology"] = topology_name(kind);
        j["router"] = used;
        j["pairs_checked"] = rep.pairs_checked;
        j["violations"] = rep.violation_count;
        Json examples = Json::array();
        for (const auto& v : rep.violations) {
          examples.push_back({{"from", v.source}, {"to", v.destination}, {"record", v.record}, {"distance", v.distance}});
        }
        j["examples"] = examples;
        out << j.dump() << "\n";
      } else {
        out << topology_name(kind) << " (" << used << " router): " << rep.pairs_checked << " pairs, "
            << rep.violation_count << " violations\n";
        for (const auto& v : rep.violations) {
          out << "  " << vector_text(v.source) << " -> " << vector_text(v.destination) << ": record "
              << vector_text(v.record) << " norm " << norm(v.record) << ", distance " << v.distance << "\n";
        }
      }
      return rep.ok() ? 0 : 1;
    }

    if (lift->parsed()) {
      IntMatrix m1(1), m2(1);
      if (!lift_matrices.empty()) {
        if (lift_matrices.size() != 2 || !lift_parts.empty()) {
          return usage_error("lift takes either two named parts or --matrix twice");
        }
        m1 = parse_matrix(lift_matrices[0]);
        m2 = parse_matrix(lift_matrices[1]);
      } else {
        if (lift_parts.size() != 2) return usage_error("lift takes either two named parts or --matrix twice");
        if (!lift_a) return usage_error("named parts need --a");
        m1 = part_matrix(parse_part(lift_parts[0]), *lift_a);
        m2 = part_matrix(parse_part(lift_parts[1]), *lift_a);
      }
      const IntMatrix lifted = common_lift(m1, m2);
      const Int nodes = checked::abs(determinant(lifted));
      if (format == "json") {
        Json j;
        j["matrix"] = matrix_json(lifted);
        j["dimension"] = lifted.dim();
        j["nodes"] = nodes;
        out << j.dump() << "\n";
        return 0;
      }
      out << render_table({{"matrix", lifted.to_string()},
                           {"dimension", std::to_string(lifted.dim())},
                           {"nodes", std::to_string(nodes)}});
      return 0;
    }

    if (simulate->parsed() || sweep_cmd->parsed()) {
      SweepPlan plan;
      if (!config_path.empty()) {
        std::ifstream f(config_path);
        if (!f) return usage_error("cannot read '" + config_path + "'");
        Json j;
        try {
          j = Json::parse(f);
        } catch (const nlohmann::json::parse_error& e) {
          return usage_error(std::string("config is not valid JSON: ") + e.what());
        }
        plan = sim_config_from_json(j);
      }
      if (!sel.kind.empty() || !sel.matrix.empty()) plan.config.topology = resolve_topology(sel);
      if (!pattern_name_opt.empty()) plan.config.pattern = parse_pattern(pattern_name_opt);
      if (sim_seed) plan.config.seed = *sim_seed;
      if (warmup) plan.config.warmup_cycles = *warmup;
      if (measure) plan.config.measure_cycles = *measure;
      detail::Output sink(out, output_path);

      if (simulate->parsed()) {
        if (load) plan.config.offered_load = *load;
        validate(plan.config);
        const SimStats s = run_simulation(plan.config);
        const bool healthy = s.conserved() && s.hop_mismatches == 0 && s.latency_bound_violations == 0;
        if (format == "json") {
          sink.write(sim_stats_json(s).dump() + "\n");
        } else if (format == "csv") {
          sink.write(sweep_csv({{s.topology, s.pattern, s.offered_load, s.accepted_load, s.avg_latency, 1}}));
        } else {
          sink.write(render_table({{"topology", s.topology},
                                   {"pattern", s.pattern},
                                   {"offered", format_real(s.offered_load, 4)},
                                   {"accepted", format_real(s.accepted_load)},
                                   {"avg latency", format_real(s.avg_latency, 3)},
                                   {"generated", std::to_string(s.generated)},
                                   {"delivered", std::to_string(s.delivered_total)},
                                   {"in flight", std::to_string(s.in_flight)},
                                   {"queued", std::to_string(s.queued)},
                                   {"stalled", std::to_string(s.stalled_generations)},
                                   {"conserved", s.conserved() ? "yes" : "no"}}));
        }
        return healthy ? 0 : 1;
      }

      if (!loads_text.empty()) {
        plan.loads.clear();
        std::stringstream ss(loads_text);
        std::string item;
        while (std::getline(ss, item, ',')) {
          try {
            std::size_t used = 0;
            plan.loads.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
          } catch (const std::logic_error&) {
            return usage_error("bad load '" + item + "'");
          }
        }
      }
      if (seeds) plan.seeds = *seeds;
      // CSV is the sweep's plotting format unless another one is asked for.
      if (sweep_cmd->get_option("--format")->count() == 0) format = "csv";
      const SweepResult result = sweep(plan.config, plan.loads, plan.seeds);
      bool healthy = true;
      for (const auto& s : result.runs) {
        healthy = healthy && s.conserved() && s.hop_mismatches == 0 && s.latency_bound_violations == 0;
      }
      if (format == "json") {
        Json rows = Json::array();
        for (const auto& r : result.rows) {
          rows.push_back({{"topology", r.topology},
                          {"pattern", r.pattern},
                          {"offered", r.offered},
                          {"accepted", r.accepted},
                          {"avg_latency", r.avg_latency},
                          {"seed_count", r.seed_count}});
        }
        sink.write(rows.dump() + "\n");
      } else if (format == "table") {
        std::vector<std::vector<std::string>> rows{{"offered", "accepted", "avg_latency", "seeds"}};
        for (const auto& r : result.rows) {
          rows.push_back({format_real(r.offered, 4), format_real(r.accepted), format_real(r.avg_latency, 3),
                          std::to_string(r.seed_count)});
        }
        sink.write(render_table(rows));
      } else {
        sink.write(sweep_csv(result.rows));
      }
      return healthy ? 0 : 1;
    }
  } catch (const PreconditionError& e) {
    return usage_error(e.what());
  } catch (const ConfigError& e) {
    return usage_error(e.what());
  } catch (const SingularMatrixError& e) {
    return usage_error(e.what());
  } catch (const UnsupportedError& e) {
    return usage_error(e.what());
  } catch (const ResourceError& e) {
    return usage_error(e.what());
  } catch (const OverflowError& e) {
    return usage_error(e.what());
  }
  return usage_error("no subcommand");
}

}  // namespace lattice_net
