#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lattice_net/cli.hpp"

using namespace lattice_net;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

Json run_json(std::vector<std::string> args) {
  const Result r = run(std::move(args));
  EXPECT_EQ(r.code, 0) << r.err;
  return Json::parse(r.out);
}

std::string sample(const std::string& name) { return std::string(LATTICE_NET_SAMPLES_DIR) + "/" + name; }

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("lattice_net_" + std::to_string(::getpid()) + "_" + name);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(Analyze, BccJson) {
  const Json j = run_json({"analyze", "--topology", "bcc", "--a", "2", "--format", "json"});
  EXPECT_EQ(j["topology"], "BCC(2)");
  EXPECT_EQ(j["a"], 2);
  EXPECT_EQ(j["nodes"], 32);
  EXPECT_EQ(j["dimension"], 3);
  EXPECT_EQ(j["hermite"], Json::parse("[[4,0,2],[0,4,2],[0,0,2]]"));
  EXPECT_EQ(j["diameter"], 3);
  EXPECT_EQ(j["avg_num"], 66);
  EXPECT_EQ(j["avg_den"], 31);
  EXPECT_EQ(j["per_dim_average"], Json::parse(R"(["13/16","5/8","5/8"])"));
  EXPECT_EQ(j["symmetric"], true);
  EXPECT_EQ(j["bound_kind"], "symmetric");
  EXPECT_EQ(j["bound_num"], 31);
  EXPECT_EQ(j["bound_den"], 11);
}

TEST(Analyze, TorusCsvGolden) {
  const Result r = run({"analyze", "--topology", "torus", "--sides", "4,4,4,2", "--format", "csv"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out,
            "topology,a,nodes,diameter,avg_num,avg_den,bound_num,bound_den\n"
            "\"T(4,4,4,2)\",,128,7,448,127,2,1\n");
}

TEST(Analyze, FccTable) {
  const Result r = run({"analyze", "--topology", "fcc", "--a", "4"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(count_lines(r.out), 8u);
  EXPECT_NE(r.out.find("topology       FCC(4)\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("hermite        8,4,4;0,4,0;0,0,4\n"), std::string::npos);
  EXPECT_NE(r.out.find("average        440/127 = 3.464567\n"), std::string::npos);
  EXPECT_NE(r.out.find("bound          381/220 = 1.731818 (degree / average)\n"), std::string::npos);
}

TEST(Analyze, OtherTopologySources) {
  const Json hybrid = run_json({"analyze", "--topology", "hybrid", "--parts", "pc2a", "bcc", "--a", "2", "--format", "json"});
  EXPECT_EQ(hybrid["nodes"], 128);
  EXPECT_EQ(hybrid["dimension"], 4);
  EXPECT_EQ(hybrid["topology"], "pc2a+bcc(2)");
  const Json matrix = run_json({"analyze", "--matrix", "4,2;0,4", "--format", "json"});
  EXPECT_EQ(matrix["nodes"], 16);
  EXPECT_TRUE(matrix["a"].is_null());
  const Json mixed = run_json({"analyze", "--topology", "torus", "--sides", "8,4,4", "--format", "json"});
  EXPECT_EQ(mixed["symmetric"], false);
  EXPECT_EQ(mixed["bound_kind"], "mixed-radix");
  EXPECT_EQ(mixed["bound_num"], 1);
  EXPECT_EQ(mixed["bound_den"], 1);
  for (const char* kind : {"pc", "rtt", "fcc", "bcc", "fcc4", "bcc4", "lip"}) {
    EXPECT_EQ(run({"analyze", "--topology", kind, "--a", "2", "--format", "csv"}).code, 0) << kind;
  }
}

TEST(Analyze, OutputFile) {
  const auto path = temp_file("analyze.csv");
  const Result r = run({"analyze", "--topology", "pc", "--a", "2", "--format", "csv", "--output", path.string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(slurp(path), "topology,a,nodes,diameter,avg_num,avg_den,bound_num,bound_den\nPC(2),2,8,3,12,7,7,2\n");
  std::filesystem::remove(path);
  EXPECT_EQ(run({"analyze", "--topology", "pc", "--a", "2", "--output", "/nonexistent/dir/x.csv"}).code, 2);
}

TEST(Symmetry, JsonAndTable) {
  const Json bcc = run_json({"symmetry", "--matrix", "4,0,2;0,4,2;0,0,2", "--format", "json"});
  EXPECT_EQ(bcc["symmetric"], true);
  EXPECT_EQ(bcc["stabilizer_size"], 48);
  EXPECT_EQ(bcc["witnesses"].size(), 3u);
  const Json torus = run_json({"symmetry", "--topology", "torus", "--sides", "4,2,2", "--format", "json"});
  EXPECT_EQ(torus["symmetric"], false);
  EXPECT_TRUE(torus["witnesses"][1].is_null());
  const Result table = run({"symmetry", "--topology", "pc", "--a", "3"});
  EXPECT_EQ(table.code, 0);
  EXPECT_NE(table.out.find("symmetric        yes\n"), std::string::npos) << table.out;
  EXPECT_NE(table.out.find("stabilizer size  48\n"), std::string::npos);
  EXPECT_EQ(run({"symmetry", "--matrix", "1,0,0,0,0,0,0;0,1,0,0,0,0,0;0,0,1,0,0,0,0;0,0,0,1,0,0,0;0,0,0,0,1,0,0;"
                 "0,0,0,0,0,1,0;0,0,0,0,0,0,1"})
                .code,
            2);
}

TEST(Route, WorkedExampleGolden) {
  const Result r = run({"route", "--topology", "fcc", "--a", "4", "--from", "1,3,3", "--to", "6,0,1", "--format", "json"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "{\"record\":[1,1,-2],\"norm\":4,\"path\":[[1,3,3],[2,3,3],[6,0,3],[6,0,2],[6,0,1]]}\n");
  const Result generic = run({"route", "--topology", "fcc", "--a", "4", "--from", "1,3,3", "--to", "6,0,1", "--router",
                              "generic", "--format", "json"});
  EXPECT_EQ(Json::parse(generic.out)["norm"], 4);
  const Result table = run({"route", "--topology", "fcc", "--a", "4", "--from", "1,3,3", "--to", "6,0,1"});
  EXPECT_EQ(table.out, "record  (1,1,-2)\nnorm    4\npath    (1,3,3) (2,3,3) (6,0,3) (6,0,2) (6,0,1)\n");
}

TEST(Route, RandomTiesAndFallbacks) {
  for (const char* seed : {"1", "2", "3"}) {
    const Json j = run_json({"route", "--topology", "torus", "--sides", "4,4,4", "--from", "0,0,0", "--to", "2,2,2",
                             "--router", "generic", "--tie", "random", "--seed", seed, "--format", "json"});
    EXPECT_EQ(j["norm"], 6);
    EXPECT_EQ(j["path"].back(), Json::parse("[2,2,2]"));
  }
  const std::vector<std::string> random_args = {"route", "--topology", "bcc",  "--a",    "2",      "--from",
                                                "0,0,0", "--to",       "2,2,1", "--tie", "random", "--seed",
                                                "9",     "--format",   "json"};
  EXPECT_EQ(run(random_args).out, run(random_args).out);
  const Json lip = run_json({"route", "--topology", "lip", "--a", "1", "--from", "0,0,0,0", "--to", "3,1,1,0", "--format", "json"});
  EXPECT_EQ(lip["path"].back(), Json::parse("[3,1,1,0]"));
  EXPECT_EQ(run({"route", "--topology", "lip", "--a", "1", "--from", "0,0,0,0", "--to", "0,1,0,0", "--router",
                 "specialized"})
                .code,
            2);
  EXPECT_EQ(run({"route", "--topology", "fcc", "--a", "4", "--from", "8,0,0", "--to", "0,0,0"}).code, 2);
  EXPECT_EQ(run({"route", "--topology", "fcc", "--a", "4", "--from", "1,x,0", "--to", "0,0,0"}).code, 2);
  EXPECT_EQ(run({"route", "--topology", "fcc", "--a", "4", "--from", "0,0,0"}).code, 2);
}

TEST(Verify, ExitCodes) {
  const Result r = run({"verify", "--topology", "bcc", "--a", "3", "--router", "specialized"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "BCC(3) (specialized router): 11664 pairs, 0 violations\n");
  const Json j = run_json({"verify", "--matrix", "4,0,0;0,4,2;0,0,4", "--format", "json"});
  EXPECT_EQ(j["router"], "generic");
  EXPECT_EQ(j["pairs_checked"], 64 * 64);
  EXPECT_EQ(j["violations"], 0);
  EXPECT_TRUE(j["examples"].empty());
  EXPECT_EQ(run({"verify", "--topology", "lip", "--a", "1", "--router", "specialized"}).code, 2);
  const Json big = run_json({"verify", "--topology", "fcc", "--a", "13", "--seed", "4", "--format", "json"});
  EXPECT_EQ(big["pairs_checked"], 20000);
  EXPECT_EQ(big["router"], "specialized");
}

TEST(Lift, NamedPartsAndMatrices) {
  const Result r = run({"lift", "--a", "2", "pc2a", "bcc", "--format", "json"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "{\"matrix\":[[4,0,0,2],[0,4,0,2],[0,0,4,0],[0,0,0,2]],\"dimension\":4,\"nodes\":128}\n");
  const Json m = run_json({"lift", "--matrix", "4,0;0,4", "--matrix", "4,2;0,2", "--format", "json"});
  EXPECT_EQ(m["matrix"], Json::parse("[[4,0,2],[0,4,0],[0,0,2]]"));
  EXPECT_EQ(m["nodes"], 32);
  const Result table = run({"lift", "--a", "1", "pc2a", "fcc"});
  EXPECT_EQ(table.code, 0);
  EXPECT_NE(table.out.find("dimension  5\n"), std::string::npos) << table.out;
  EXPECT_EQ(run({"lift", "pc2a", "bcc"}).code, 2);
  EXPECT_EQ(run({"lift", "--a", "2", "pc2a"}).code, 2);
  EXPECT_EQ(run({"lift", "--a", "2", "pc2a", "cube"}).code, 2);
  EXPECT_EQ(run({"lift", "--matrix", "4,0;0,4"}).code, 2);
  EXPECT_EQ(run({"lift", "--matrix", "1,2;2,4", "--matrix", "4,0;0,4"}).code, 2);
}

TEST(Simulate, ConfigFileAndOverrides) {
  const Json j = run_json({"simulate", "--config", sample("bcc4_uniform.json"), "--format", "json"});
  EXPECT_EQ(j["topology"], "4D-BCC(2)");
  EXPECT_EQ(j["nodes"], 128);
  EXPECT_EQ(j["seed"], 7);
  EXPECT_EQ(j["offered_load"], 0.5);
  EXPECT_EQ(j["conserved"], true);
  EXPECT_EQ(j["hop_mismatches"], 0);

  const Json o = run_json({"simulate", "--config", sample("bcc4_uniform.json"), "--load", "0.2", "--seed", "9",
                           "--pattern", "randompairings", "--warmup", "200", "--measure", "300", "--format", "json"});
  EXPECT_EQ(o["offered_load"], 0.2);
  EXPECT_EQ(o["seed"], 9);
  EXPECT_EQ(o["pattern"], "randompairings");

  const Json t = run_json({"simulate", "--config", sample("torus_antipodal.json"), "--topology", "pc", "--a", "4",
                           "--format", "json"});
  EXPECT_EQ(t["topology"], "PC(4)");
  EXPECT_EQ(t["pattern"], "antipodal");
}

TEST(Simulate, FormatsAreStable) {
  const std::vector<std::string> base = {"simulate", "--topology", "pc",  "--a",     "3",   "--load", "0.3",
                                         "--warmup", "200",        "--measure", "500", "--seed", "5"};
  auto with = [&](std::vector<std::string> extra) {
    auto args = base;
    args.insert(args.end(), extra.begin(), extra.end());
    return run(args);
  };
  const Result csv = with({"--format", "csv"});
  EXPECT_EQ(csv.code, 0);
  EXPECT_EQ(count_lines(csv.out), 2u);
  EXPECT_EQ(csv.out.rfind("topology,pattern,offered,accepted,avg_latency,seed_count\nPC(3),uniform,0.3000,", 0), 0u)
      << csv.out;
  EXPECT_EQ(csv.out, with({"--format", "csv"}).out);
  const Result table = with({});
  EXPECT_EQ(table.code, 0);
  EXPECT_NE(table.out.find("conserved    yes\n"), std::string::npos) << table.out;
  const auto path = temp_file("sim.json");
  EXPECT_EQ(with({"--format", "json", "--output", path.string()}).code, 0);
  EXPECT_EQ(Json::parse(slurp(path))["topology"], "PC(3)");
  std::filesystem::remove(path);
}

TEST(Simulate, ConfigErrors) {
  const auto path = temp_file("bad.json");
  {
    std::ofstream f(path);
    f << R"({"topology": {"kind": "pc", "a": 2}, "colour": "red"})";
  }
  Result r = run({"simulate", "--config", path.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("colour"), std::string::npos);
  {
    std::ofstream f(path);
    f << "{not json";
  }
  EXPECT_EQ(run({"simulate", "--config", path.string()}).code, 2);
  {
    std::ofstream f(path);
    f << R"({"topology": {"kind": "pc", "a": 2}, "offered_load": 2.0})";
  }
  EXPECT_EQ(run({"simulate", "--config", path.string()}).code, 2);
  {
    std::ofstream f(path);
    f << R"({"topology": {"kind": "pc"}})";
  }
  EXPECT_EQ(run({"simulate", "--config", path.string()}).code, 2);
  std::filesystem::remove(path);
  EXPECT_EQ(run({"simulate", "--config", "/nonexistent.json"}).code, 2);
  EXPECT_EQ(run({"simulate", "--topology", "pc", "--a", "2", "--pattern", "hotspot"}).code, 2);
  EXPECT_EQ(run({"simulate", "--topology", "pc", "--a", "2", "--load", "1.5"}).code, 2);
}

TEST(Sweep, CsvFromConfig) {
  const Result r = run({"sweep", "--config", sample("bcc4_uniform.json"), "--warmup", "200", "--measure", "400"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count_lines(r.out), 4u);
  EXPECT_EQ(r.out.rfind("topology,pattern,offered,accepted,avg_latency,seed_count\n", 0), 0u);
  EXPECT_NE(r.out.find("4D-BCC(2),uniform,0.2000,"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find(",2\n"), std::string::npos);
}

TEST(Sweep, FlagsAndFormats) {
  const std::vector<std::string> base = {"sweep", "--topology", "torus", "--sides", "4,4", "--warmup", "100",
                                         "--measure", "200"};
  auto with = [&](std::vector<std::string> extra) {
    auto args = base;
    args.insert(args.end(), extra.begin(), extra.end());
    return run(args);
  };
  const Result empty = with({});
  EXPECT_EQ(empty.code, 0);
  EXPECT_EQ(empty.out, "topology,pattern,offered,accepted,avg_latency,seed_count\n");
  const Json j = Json::parse(with({"--loads", "0.1,0.5", "--seeds", "2", "--format", "json"}).out);
  ASSERT_EQ(j.size(), 2u);
  EXPECT_EQ(j[1]["offered"], 0.5);
  EXPECT_EQ(j[1]["seed_count"], 2);
  const Result table = with({"--loads", "0.1", "--seeds", "1", "--format", "table"});
  EXPECT_EQ(table.out.rfind("offered  accepted  avg_latency  seeds\n", 0), 0u) << table.out;
  EXPECT_EQ(with({"--loads", "0.1,abc"}).code, 2);
  EXPECT_EQ(with({"--loads", "0.1", "--seeds", "0"}).code, 2);
  EXPECT_EQ(with({"--loads", "0.1", "--pattern", "antipodal", "--seed", "4", "--seeds", "1"}).code, 0);
}

TEST(Usage, ErrorsAndHelp) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"analyze"}).code, 2);
  EXPECT_EQ(run({"analyze", "--topology", "cube", "--a", "2"}).code, 2);
  EXPECT_EQ(run({"analyze", "--topology", "fcc"}).code, 2);
  EXPECT_EQ(run({"analyze", "--topology", "fcc", "--a", "0"}).code, 2);
  EXPECT_EQ(run({"analyze", "--topology", "fcc", "--a", "2", "--matrix", "2,0;0,2"}).code, 2);
  EXPECT_EQ(run({"analyze", "--matrix", "2,0;0"}).code, 2);
  EXPECT_EQ(run({"analyze", "--matrix", "1,2;2,4"}).code, 2);
  EXPECT_EQ(run({"analyze", "--topology", "torus"}).code, 2);
  EXPECT_EQ(run({"analyze", "--topology", "hybrid", "--a", "2"}).code, 2);
  EXPECT_EQ(run({"analyze", "--topology", "pc", "--a", "2", "--format", "xml"}).code, 2);
  EXPECT_EQ(run({"analyze", "--topology", "torus", "--sides", "1000,1000,1000"}).code, 2);
  EXPECT_EQ(run({"analyze", "--matrix", "3037000500,0;0,3037000500"}).code, 2);
  const Result err = run({"analyze", "--topology", "cube", "--a", "2"});
  EXPECT_NE(err.err.find("unknown topology 'cube'"), std::string::npos);
  const Result help = run({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("analyze"), std::string::npos);
  EXPECT_EQ(run({"route", "--help"}).code, 0);
}

TEST(Json, TopologyRoundTrip) {
  const std::vector<TopologyKind> kinds = {topo::PC{2},   topo::RTT{3},  topo::FCC{4},
                                           topo::BCC{2},  topo::FCC4{1}, topo::BCC4{2},
                                           topo::Lip{1},  topo::Torus{{4, 4, 4, 2}},
                                           topo::Hybrid{topo::Part::PC2a, topo::Part::BCC, 2},
                                           topo::Custom{IntMatrix{{4, 2}, {0, 4}}}};
  for (const auto& kind : kinds) {
    const Json j = topology_to_json(kind);
    const TopologyKind back = topology_from_json(Json::parse(j.dump()));
    EXPECT_EQ(topology_name(back), topology_name(kind));
    EXPECT_EQ(generator_matrix(back), generator_matrix(kind));
  }
  EXPECT_THROW(topology_from_json(Json::parse(R"({"kind":"pc","a":2,"b":3})")), ConfigError);
  EXPECT_THROW(topology_from_json(Json::parse(R"("pc")")), ConfigError);
  EXPECT_THROW(topology_from_json(Json::parse(R"({"kind":"pc","a":"two"})")), ConfigError);
}

TEST(Json, SimConfigRoundTrip) {
  SimConfig c;
  c.topology = topo::Torus{{8, 8, 8, 4}};
  c.pattern = TrafficPattern::CentralSymmetric;
  c.offered_load = 0.35;
  c.packet_size = 8;
  c.injectors = 2;
  c.vc_count = 4;
  c.queue_capacity = 3;
  c.warmup_cycles = 123;
  c.measure_cycles = 456;
  c.seed = 789;
  const Json j = sim_config_to_json(c);
  const SweepPlan plan = sim_config_from_json(Json::parse(j.dump()));
  EXPECT_EQ(sim_config_to_json(plan.config), j);
  EXPECT_TRUE(plan.loads.empty());
  EXPECT_EQ(plan.seeds, 5);
  std::ifstream f(sample("bcc4_uniform.json"));
  const SweepPlan s = sim_config_from_json(Json::parse(f));
  EXPECT_EQ(s.loads, (std::vector<double>{0.2, 0.6, 1.0}));
  EXPECT_EQ(s.seeds, 2);
}

TEST(Formatting, TablesAndCsv) {
  EXPECT_EQ(render_table({{"a", "bb"}, {"ccc", "d"}}), "a    bb\nccc  d\n");
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("T(4,4)"), "\"T(4,4)\"");
  EXPECT_EQ(format_real(0.5), "0.500000");
  EXPECT_EQ(format_real(2.0 / 3.0, 3), "0.667");
  EXPECT_EQ(sweep_csv({}), "topology,pattern,offered,accepted,avg_latency,seed_count\n");
  EXPECT_EQ(sweep_csv({{"T(4,4)", "uniform", 0.25, 0.2499, 19.5, 5}}),
            "topology,pattern,offered,accepted,avg_latency,seed_count\n\"T(4,4)\",uniform,0.2500,0.249900,19.500,5\n");
}

TEST(Binary, ExitCodesThroughTheShell) {
  const std::string bin = LATTICE_NET_BINARY;
  const auto path = temp_file("binary.out");
  auto status = [&](const std::string& args) {
    const int raw = std::system((bin + " " + args + " > " + path.string() + " 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  EXPECT_EQ(status("analyze --topology bcc --a 2 --format json"), 0);
  EXPECT_EQ(Json::parse(slurp(path))["nodes"], 32);
  EXPECT_EQ(status("route --topology fcc --a 4 --from 1,3,3 --to 6,0,1 --format json"), 0);
  EXPECT_EQ(Json::parse(slurp(path))["record"], Json::parse("[1,1,-2]"));
  EXPECT_EQ(status("analyze --topology nope --a 2"), 2);
  EXPECT_EQ(status("--version"), 0);
  std::filesystem::remove(path);
}
