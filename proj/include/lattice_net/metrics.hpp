#pragma once

// Distance analysis: BFS-measured diameter / average distance, the exact
// average-distance polynomials of the cubic crystals, and uniform-traffic
// throughput bounds.

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "lattice_net/errors.hpp"
#include "lattice_net/intmat.hpp"
#include "lattice_net/lattice.hpp"
#include "lattice_net/routing.hpp"

namespace lattice_net {

using Rational = boost::rational<std::int64_t>;

inline double to_double(const Rational& r) { return boost::rational_cast<double>(r); }

inline std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

struct DistanceSummary {
  Int nodes = 0;
  Int diameter = 0;
  // Mean over ordered pairs of distinct vertices (denominator N - 1 per source).
  Rational average{0};
  // histogram[d] = number of vertices at distance d from the source.
  std::vector<std::int64_t> histogram;
  // Mean |r_i| of the canonical minimal records, taken over all N vertices
  // (the source contributes a zero record). A ring of even length k gives k/4.
  std::vector<Rational> per_dim_average;
};

// Vertex-transitive graphs only need one BFS source.
inline DistanceSummary distance_summary(const LatticeGraph& g) {
  const Adjacency adj(g);
  const auto dist = bfs_distances(adj, 0);
  DistanceSummary s;
  s.nodes = g.order();
  std::int64_t total = 0;
  for (std::uint32_t d : dist) {
    if (d == kUnreached) throw std::logic_error("lattice graph is disconnected");
    if (d >= s.histogram.size()) s.histogram.resize(d + 1, 0);
    ++s.histogram[d];
    total += d;
    s.diameter = std::max<Int>(s.diameter, d);
  }
  s.average = s.nodes > 1 ? Rational(total, s.nodes - 1) : Rational(0);
  const int n = g.dim();
  const auto records = canonical_minimal_records(g, adj);
  std::vector<std::int64_t> per_dim(n, 0);
  for (std::size_t v = 0; v < static_cast<std::size_t>(g.order()); ++v)
    for (int i = 0; i < n; ++i) per_dim[i] += std::abs(records[v * n + i]);
  for (int i = 0; i < n; ++i) s.per_dim_average.emplace_back(per_dim[i], s.nodes);
  return s;
}

// Histogram summed over every BFS source; equals N times the single-source
// histogram when the graph is vertex-transitive.
inline std::vector<std::int64_t> all_sources_histogram(const LatticeGraph& g) {
  const Adjacency adj(g);
  std::vector<std::int64_t> hist;
  for (std::size_t s = 0; s < adj.order(); ++s) {
    for (std::uint32_t d : bfs_distances(adj, s)) {
      if (d >= hist.size()) hist.resize(d + 1, 0);
      ++hist[d];
    }
  }
  return hist;
}

struct ClosedForm {
  Int diameter;
  Rational average;
};

namespace detail {

// Sum of ring distances from one vertex of a ring of length k: floor(k^2 / 4).
inline Int ring_distance_sum(Int k) { return k * k / 4; }

inline ClosedForm torus_closed_form(const IntVector& sides) {
  Int order = 1;
  for (Int s : sides) order = checked::mul(order, s);
  Int total = 0, diameter = 0;
  for (Int s : sides) {
    total = checked::add(total, checked::mul(order / s, ring_distance_sum(s)));
    diameter += s / 2;
  }
  return {diameter, order > 1 ? Rational(total, order - 1) : Rational(0)};
}

}  // namespace detail

// Exact diameter and average distance for PC / FCC / BCC and the matching
// mixed-radix tori T(2a,a,a), T(2a,2a,a).
inline ClosedForm closed_form(const TopologyKind& kind) {
  if (const auto* t = std::get_if<topo::PC>(&kind)) {
    const Int a = t->a;
    require_side(a);
    const Int a2 = a * a, a3 = a2 * a, a4 = a3 * a;
    const Int den = 4 * (a3 - 1);
    const Int num = a % 2 == 0 ? 3 * a4 : 3 * a4 - 3 * a2;
    if (den == 0) return {0, Rational(0)};
    return {3 * (a / 2), Rational(num, den)};
  }
  if (const auto* t = std::get_if<topo::FCC>(&kind)) {
    const Int a = t->a;
    require_side(a);
    const Int a2 = a * a, a3 = a2 * a, a4 = a3 * a;
    const Int num = a % 2 == 0 ? 7 * a4 - 2 * a2 : 7 * a4 - 2 * a2 - 1;
    return {(3 * a) / 2, Rational(num, 4 * (2 * a3 - 1))};
  }
  if (const auto* t = std::get_if<topo::BCC>(&kind)) {
    const Int a = t->a;
    require_side(a);
    const Int a2 = a * a, a3 = a2 * a, a4 = a3 * a;
    // Odd sides: the constant term is 3, not 30 (checked against BFS).
    const Int num = a % 2 == 0 ? 35 * a4 - 8 * a2 : 35 * a4 - 14 * a2 + 3;
    return {(3 * a) / 2, Rational(num, 8 * (4 * a3 - 1))};
  }
  if (const auto* t = std::get_if<topo::Torus>(&kind)) {
    const auto& s = t->sides;
    const bool t2aaa = s.size() == 3 && s[0] == 2 * s[1] && s[1] == s[2];
    const bool t2a2aa = s.size() == 3 && s[0] == s[1] && s[0] == 2 * s[2];
    if (!t2aaa && !t2a2aa) throw UnsupportedError("closed form only covers T(2a,a,a) and T(2a,2a,a)");
    for (Int x : s) require_side(x);
    return detail::torus_closed_form(s);
  }
  throw UnsupportedError("no closed form for " + topology_name(kind));
}

enum class BoundKind { Symmetric, MixedRadix };

struct ThroughputBound {
  Rational value;  // phits / (cycle * node)
  BoundKind kind;
};

// Symmetric graphs: degree / average distance. Otherwise the busiest
// dimension limits: degree / (n * max per-dimension average).
inline ThroughputBound throughput_bound(const LatticeGraph& g, const DistanceSummary& s, bool symmetric) {
  const Int degree = g.degree();
  if (symmetric) {
    if (s.average == Rational(0)) throw PreconditionError("throughput bound needs a nonzero average distance");
    return {Rational(degree) / s.average, BoundKind::Symmetric};
  }
  const Rational k_max = *std::max_element(s.per_dim_average.begin(), s.per_dim_average.end());
  if (k_max == Rational(0)) throw PreconditionError("throughput bound needs a nonzero per-dimension average");
  return {Rational(degree) / (Rational(g.dim()) * k_max), BoundKind::MixedRadix};
}

enum class CatalogRow { T2a2aRTT, FCC4, BCC4, Lip, PC2aBCC, PC2aFCC, BCCFCC };

struct CatalogReference {
  std::string name;
  int dimension;
  Int order_coefficient;  // order = coefficient * a^order_power
  int order_power;
  Rational diameter_coefficient;  // diameter ~ coefficient * a
  double average_coefficient;     // average ~ coefficient * a
};

inline CatalogReference catalog_reference(CatalogRow row) {
  switch (row) {
    case CatalogRow::T2a2aRTT:
      return {"T(2a,2a)+RTT(a)", 3, 4, 3, Rational(2), 1.14877};
    case CatalogRow::FCC4:
      return {"4D-FCC(a)", 4, 2, 4, Rational(2), 1.10396};
    case CatalogRow::BCC4:
      return {"4D-BCC(a)", 4, 8, 4, Rational(2), 1.5379};
    case CatalogRow::Lip:
      return {"Lip(a)", 4, 16, 4, Rational(3), 1.815};
    case CatalogRow::PC2aBCC:
      return {"PC(2a)+BCC(a)", 4, 8, 4, Rational(5, 2), 1.59715};
    case CatalogRow::PC2aFCC:
      return {"PC(2a)+FCC(a)", 5, 8, 5, Rational(7, 2), 1.87856};
    case CatalogRow::BCCFCC:
      return {"BCC(a)+FCC(a)", 5, 4, 5, Rational(5, 2), 1.52522};
  }
  throw PreconditionError("unknown table row");
}

inline TopologyKind catalog_topology(CatalogRow row, Int a) {
  using topo::Part;
  switch (row) {
    case CatalogRow::T2a2aRTT:
      return topo::Hybrid{Part::T2a2a, Part::RTT, a};
    case CatalogRow::FCC4:
      return topo::FCC4{a};
    case CatalogRow::BCC4:
      return topo::BCC4{a};
    case CatalogRow::Lip:
      return topo::Lip{a};
    case CatalogRow::PC2aBCC:
      return topo::Hybrid{Part::PC2a, Part::BCC, a};
    case CatalogRow::PC2aFCC:
      return topo::Hybrid{Part::PC2a, Part::FCC, a};
    case CatalogRow::BCCFCC:
      return topo::Hybrid{Part::BCC, Part::FCC, a};
  }
  throw PreconditionError("unknown table row");
}

struct CatalogMeasurement {
  Int order;
  Int diameter;
  Rational average;
  int dimension;
};

inline CatalogMeasurement catalog_check(CatalogRow row, Int a) {
  const LatticeGraph g = make_topology(catalog_topology(row, a));
  const Adjacency adj(g);
  const auto dist = bfs_distances(adj, 0);
  std::int64_t total = 0;
  Int diameter = 0;
  for (std::uint32_t d : dist) {
    total += d;
    diameter = std::max<Int>(diameter, d);
  }
  return {g.order(), diameter, Rational(total, g.order() - 1), g.dim()};
}

}  // namespace lattice_net
