// Routes one packet through FCC(4) three ways: the closed-form FCC router,
// the generic hierarchical router, and the BFS record table, then checks the
// answers against each other.

#include <iostream>

#include "lattice_net/metrics.hpp"
#include "lattice_net/routing.hpp"

using namespace lattice_net;

namespace {

void print(const char* label, const IntVector& v) {
  std::cout << label << " (";
  for (std::size_t i = 0; i < v.size(); ++i) std::cout << (i ? "," : "") << v[i];
  std::cout << ")\n";
}

}  // namespace

int main() {
  const Int a = 4;
  const LatticeGraph g = make_topology(topo::FCC{a});
  std::cout << topology_name(topo::FCC{a}) << ": Hermite form " << g.hermite().matrix() << ", " << g.order()
            << " nodes\n";

  const IntVector from{1, 3, 3}, to{6, 0, 1};
  const IntVector delta = sub(to, from);
  print("difference", delta);

  // The FCC router folds the difference into the labelling set and tries the
  // two places where the e3 cycle crosses the destination plane.
  const FccCandidates c = fcc_candidates(a, delta);
  print("normalised", c.normalized);
  print("candidate 1", c.first);
  std::cout << "  norm " << norm(c.first) << "\n";
  print("candidate 2", c.second);
  std::cout << "  norm " << norm(c.second) << "\n";

  const RoutingRecord fast = route_fcc(a, delta);
  const RoutingRecord generic = route_generic(g, from, to);
  print("route_fcc", fast);
  print("route_generic", generic);

  const Adjacency adj(g);
  const MinimalRecordTable table(g, adj);
  const std::size_t cls = g.index_of(g.reduce(delta));
  std::cout << "minimal records for this difference: " << table.count(cls) << "\n";
  for (std::size_t k = 0; k < table.count(cls); ++k) print("  ", table.record(cls, k));

  const bool ok = g.apply_record(from, fast) == to && norm(fast) == norm(generic) &&
                  norm(fast) == norm(table.canonical(cls));
  std::cout << (ok ? "all routers agree" : "MISMATCH") << "\n";

  const auto s = distance_summary(g);
  std::cout << "diameter " << s.diameter << ", average distance " << to_string(s.average) << "\n";
  return ok ? 0 : 1;
}
