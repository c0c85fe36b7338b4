#pragma once

// Minimal routing records. A record r from v_s to v_d satisfies
// v_d - v_s == r (mod M); its path length is the Minkowski norm sum |r_i|.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "lattice_net/errors.hpp"
#include "lattice_net/intmat.hpp"
#include "lattice_net/lattice.hpp"

namespace lattice_net {

using RoutingRecord = IntVector;

inline Int norm(const RoutingRecord& r) {
  Int s = 0;
  for (Int x : r) s = checked::add(s, checked::abs(x));
  return s;
}

// How to choose among equal-norm candidates: the lexicographically smallest
// (deterministic), or uniformly at random from a caller-owned seeded engine.
class TieBreaker {
 public:
  static TieBreaker canonical() { return TieBreaker(nullptr); }
  static TieBreaker random(std::mt19937_64& rng) { return TieBreaker(&rng); }

  bool is_random() const { return rng_ != nullptr; }

  // Index of the chosen minimum-norm candidate.
  std::size_t select(const std::vector<RoutingRecord>& candidates) {
    if (candidates.empty()) throw std::logic_error("no routing candidates");
    Int best = norm(candidates[0]);
    for (const auto& c : candidates) best = std::min(best, norm(c));
    std::vector<std::size_t> tied;
    for (std::size_t i = 0; i < candidates.size(); ++i)
      if (norm(candidates[i]) == best) tied.push_back(i);
    if (rng_ == nullptr) {
      return *std::min_element(tied.begin(), tied.end(),
                               [&](std::size_t x, std::size_t y) { return candidates[x] < candidates[y]; });
    }
    std::uniform_int_distribution<std::size_t> pick(0, tied.size() - 1);
    return tied[pick(*rng_)];
  }

 private:
  explicit TieBreaker(std::mt19937_64* rng) : rng_(rng) {}
  std::mt19937_64* rng_;
};

// Signed shortest displacement around a ring of length a; ties go to +.
inline Int route_ring(Int a, Int delta) {
  if (a < 1) throw PreconditionError("ring length must be >= 1");
  const Int d = mod_floor(delta, a);
  return d <= a - d ? d : d - a;
}

namespace detail {

inline void require_difference(const IntVector& delta, const IntVector& sides) {
  if (delta.size() != sides.size()) throw PreconditionError("difference vector has the wrong dimension");
  for (std::size_t i = 0; i < sides.size(); ++i) {
    if (delta[i] <= -sides[i] || delta[i] >= sides[i]) {
      throw PreconditionError("difference vector is outside L - L");
    }
  }
}

inline std::size_t pick_pair(const RoutingRecord& first, const RoutingRecord& second, TieBreaker& tie) {
  return tie.select({first, second});
}

}  // namespace detail

// Rectangular twisted torus RTT(a), generated by [[2a, a], [0, a]].
inline RoutingRecord route_rtt(Int a, const IntVector& delta) {
  require_side(a);
  detail::require_difference(delta, {2 * a, a});
  const Int x = delta[0], y = delta[1];
  const Int p = mod_floor(x + y + a, 2 * a);
  const Int q = mod_floor(y - x + a, 2 * a);
  if ((p - q) % 2 != 0 || (p + q - 2 * a) % 2 != 0) {
    throw std::logic_error("RTT routing produced an odd intermediate");
  }
  return {(p - q) / 2, (p + q - 2 * a) / 2};
}

inline RoutingRecord route_torus(const IntVector& sides, const IntVector& delta) {
  if (delta.size() != sides.size()) throw PreconditionError("difference vector has the wrong dimension");
  RoutingRecord r(sides.size());
  for (std::size_t i = 0; i < sides.size(); ++i) r[i] = route_ring(sides[i], delta[i]);
  return r;
}

// Both candidates considered by route_fcc, with the normalised difference.
struct FccCandidates {
  IntVector normalized;
  RoutingRecord first;
  RoutingRecord second;
};

// FCC(a) in Hermite form [[2a, a, a], [0, a, 0], [0, 0, a]]: normalise the
// difference into the labelling set, then route in the RTT(a) projection from
// the two points where the e_3 cycle meets the destination plane.
inline FccCandidates fcc_candidates(Int a, const IntVector& delta) {
  require_side(a);
  detail::require_difference(delta, {2 * a, a, a});
  const Int x = delta[0], y = delta[1], z = delta[2];
  const Int y1 = y + (y < 0 ? a : 0);
  const Int z1 = z + (z < 0 ? a : 0);
  const Int xh = x + (((y < 0) != (z < 0)) ? a : 0);
  const Int x1 = xh + (xh < 0 ? 2 * a : 0) - (xh >= 2 * a ? 2 * a : 0);
  const RoutingRecord r1 = route_rtt(a, {x1, y1});
  const RoutingRecord r2 = route_rtt(a, {x1 - a, y1});
  return {{x1, y1, z1}, {r1[0], r1[1], z1}, {r2[0], r2[1], z1 - a}};
}

inline RoutingRecord route_fcc(Int a, const IntVector& delta, TieBreaker tie = TieBreaker::canonical()) {
  const FccCandidates c = fcc_candidates(a, delta);
  return detail::pick_pair(c.first, c.second, tie) == 0 ? c.first : c.second;
}

// BCC(a) in Hermite form [[2a, 0, a], [0, 2a, a], [0, 0, a]]; the projection
// is the torus T(2a, 2a), entered at offsets (0, 0) and (a, a).
inline RoutingRecord route_bcc(Int a, const IntVector& delta, TieBreaker tie = TieBreaker::canonical()) {
  require_side(a);
  detail::require_difference(delta, {2 * a, 2 * a, a});
  const Int x = delta[0], y = delta[1], z = delta[2];
  const Int shift = z < 0 ? a : 0;
  const Int z1 = z + shift;
  const Int xh = x + shift;
  const Int yh = y + shift;
  const Int x1 = xh + (xh < 0 ? 2 * a : 0) - (xh >= 2 * a ? 2 * a : 0);
  const Int y1 = yh + (yh < 0 ? 2 * a : 0) - (yh >= 2 * a ? 2 * a : 0);
  const RoutingRecord r1 = route_torus({2 * a, 2 * a}, {x1, y1});
  const RoutingRecord r2 = route_torus({2 * a, 2 * a}, {x1 - a, y1 - a});
  const RoutingRecord k1{r1[0], r1[1], z1};
  const RoutingRecord k2{r2[0], r2[1], z1 - a};
  return detail::pick_pair(k1, k2, tie) == 0 ? k1 : k2;
}

struct RoutingStats {
  // Calls into the projection made by the outermost level.
  std::int64_t projection_calls = 0;
};

// Hierarchical routing over any lattice graph: walk the e_n cycle from the
// source, and from every point where it meets the destination's copy of the
// projection, route recursively inside the projection. Bottoms out in a ring.
class HierarchicalRouter {
 public:
  explicit HierarchicalRouter(const LatticeGraph& g) : n_(g.dim()) {
    const IntMatrix& h = g.hermite().matrix();
    for (int k = 1; k <= n_; ++k) {
      levels_.emplace_back(h.leading_block(k));
      cycle_length_.push_back(element_order(h.leading_block(k), unit_vector(k, k - 1)));
    }
  }

  int dim() const { return n_; }

  RoutingRecord route(const IntVector& vs, const IntVector& vd, TieBreaker tie = TieBreaker::canonical(),
                      RoutingStats* stats = nullptr) const {
    if (static_cast<int>(vs.size()) != n_ || static_cast<int>(vd.size()) != n_) {
      throw PreconditionError("vertex label has the wrong dimension");
    }
    for (int i = 0; i < n_; ++i) {
      const Int side = levels_.back().side(i);
      if (vs[i] < 0 || vs[i] >= side || vd[i] < 0 || vd[i] >= side) {
        throw PreconditionError("vertex label outside the labelling set");
      }
    }
    return route_level(n_, vs, vd, tie, stats);
  }

 private:
  RoutingRecord route_level(int k, const IntVector& vs, const IntVector& vd, TieBreaker& tie,
                            RoutingStats* stats) const {
    const HermiteBasis& basis = levels_[k - 1];
    if (k == 1) {
      const Int a = basis.side(0);
      const Int r = route_ring(a, vd[0] - vs[0]);
      if (2 * r == a) {
        // Half-way around: both directions are minimal.
        return {tie.select({{r}, {r - a}}) == 0 ? r : r - a};
      }
      return {r};
    }
    const Int ord = cycle_length_[k - 1];
    const Int target_layer = vd[k - 1];
    const IntVector vd_base(vd.begin(), vd.end() - 1);
    std::vector<RoutingRecord> candidates;
    IntVector c = vs;
    for (Int step = 0; step < ord; ++step) {
      if (c[k - 1] == target_layer) {
        if (stats != nullptr && k == n_) ++stats->projection_calls;
        RoutingRecord base = route_level(k - 1, IntVector(c.begin(), c.end() - 1), vd_base, tie, nullptr);
        base.push_back(step);
        candidates.push_back(base);
        if (step != 0) {
          base.back() = step - ord;
          candidates.push_back(base);
        }
      }
      c[k - 1] += 1;
      c = basis.reduce(c);
    }
    return candidates[tie.select(candidates)];
  }

  int n_;
  std::vector<HermiteBasis> levels_;
  std::vector<Int> cycle_length_;
};

inline RoutingRecord route_generic(const LatticeGraph& g, const IntVector& vs, const IntVector& vd,
                                   TieBreaker tie = TieBreaker::canonical(), RoutingStats* stats = nullptr) {
  return HierarchicalRouter(g).route(vs, vd, tie, stats);
}

// Routes through the projection over e_axis instead of e_n: coordinates are
// permuted so that axis comes last, and the record is permuted back.
class AxisHierarchicalRouter {
 public:
  AxisHierarchicalRouter(const LatticeGraph& g, int axis)
      : graph_(g), axis_(axis), permuted_(permuted_generator(g, axis)), router_(permuted_) {}

  RoutingRecord route(const IntVector& vs, const IntVector& vd, TieBreaker tie = TieBreaker::canonical(),
                      RoutingStats* stats = nullptr) const {
    graph_.require_label(vs);
    graph_.require_label(vd);
    const IntVector ps = permuted_.reduce(swap_axis(vs));
    const IntVector pd = permuted_.reduce(swap_axis(vd));
    return swap_axis(router_.route(ps, pd, tie, stats));
  }

 private:
  static LatticeGraph permuted_generator(const LatticeGraph& g, int axis) {
    if (axis < 0 || axis >= g.dim()) throw PreconditionError("routing axis out of range");
    IntMatrix m = g.generator();
    m.swap_rows(axis, g.dim() - 1);
    return LatticeGraph(m);
  }

  IntVector swap_axis(IntVector v) const {
    std::swap(v[axis_], v[v.size() - 1]);
    return v;
  }

  LatticeGraph graph_;
  int axis_;
  LatticeGraph permuted_;
  HierarchicalRouter router_;
};

using Router = std::function<RoutingRecord(const IntVector& vs, const IntVector& vd)>;

// Closed-form router for the topology families that have one.
inline std::optional<Router> specialized_router(const TopologyKind& kind) {
  if (const auto* t = std::get_if<topo::Torus>(&kind)) {
    const IntVector sides = t->sides;
    return Router([sides](const IntVector& vs, const IntVector& vd) { return route_torus(sides, sub(vd, vs)); });
  }
  if (const auto* t = std::get_if<topo::PC>(&kind)) {
    const IntVector sides{t->a, t->a, t->a};
    return Router([sides](const IntVector& vs, const IntVector& vd) { return route_torus(sides, sub(vd, vs)); });
  }
  if (const auto* t = std::get_if<topo::RTT>(&kind)) {
    const Int a = t->a;
    return Router([a](const IntVector& vs, const IntVector& vd) { return route_rtt(a, sub(vd, vs)); });
  }
  if (const auto* t = std::get_if<topo::FCC>(&kind)) {
    const Int a = t->a;
    return Router([a](const IntVector& vs, const IntVector& vd) { return route_fcc(a, sub(vd, vs)); });
  }
  if (const auto* t = std::get_if<topo::BCC>(&kind)) {
    const Int a = t->a;
    return Router([a](const IntVector& vs, const IntVector& vd) { return route_bcc(a, sub(vd, vs)); });
  }
  return std::nullopt;
}

struct MinimalityViolation {
  IntVector source;
  IntVector destination;
  RoutingRecord record;
  Int distance;
  bool reaches_destination;
};

struct MinimalityReport {
  std::int64_t pairs_checked = 0;
  std::vector<MinimalityViolation> violations;  // capped at kMaxReported
  std::int64_t violation_count = 0;

  static constexpr std::size_t kMaxReported = 32;
  bool ok() const { return violation_count == 0; }
};

// Compares router norms against BFS distances. Graphs up to all_pairs_limit
// vertices are checked on every ordered pair, larger ones on sample_pairs
// seeded random pairs. Distances use translation invariance of the Cayley
// graph: d(v_s, v_d) = d(0, v_d - v_s).
inline MinimalityReport verify_minimality(const LatticeGraph& g, const Router& router, Int all_pairs_limit = 4096,
                                          std::int64_t sample_pairs = 20000, std::uint64_t seed = 1) {
  const Adjacency adj(g);
  const auto dist = bfs_distances(adj, 0);
  MinimalityReport report;
  auto check = [&](std::size_t s, std::size_t d) {
    const IntVector vs = g.label(s);
    const IntVector vd = g.label(d);
    const RoutingRecord r = router(vs, vd);
    const Int expected = dist[g.index_of(g.reduce(sub(vd, vs)))];
    const bool reaches = g.apply_record(vs, r) == vd;
    ++report.pairs_checked;
    if (norm(r) != expected || !reaches) {
      ++report.violation_count;
      if (report.violations.size() < MinimalityReport::kMaxReported) {
        report.violations.push_back({vs, vd, r, expected, reaches});
      }
    }
  };
  const auto n = static_cast<std::size_t>(g.order());
  if (g.order() <= all_pairs_limit) {
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t d = 0; d < n; ++d) check(s, d);
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::int64_t i = 0; i < sample_pairs; ++i) {
      const std::size_t s = pick(rng);
      check(s, pick(rng));
    }
  }
  return report;
}

// Every minimum-norm record for every destination class, relative to vertex 0
// (records only depend on v_d - v_s). Built by dynamic programming over BFS
// layers: the minimal records of v are the minimal records of each predecessor
// u = v - step extended by that step.
class MinimalRecordTable {
 public:
  static constexpr Int kMaxOrder = 1 << 16;

  MinimalRecordTable(const LatticeGraph& g, const Adjacency& adj) : n_(g.dim()) {
    if (g.order() > kMaxOrder) throw ResourceError("minimal record table is limited to 65536 vertices");
    const auto order = static_cast<std::size_t>(g.order());
    const auto dist = bfs_distances(adj, 0);
    std::vector<std::uint32_t> by_layer(order);
    for (std::size_t v = 0; v < order; ++v) by_layer[v] = static_cast<std::uint32_t>(v);
    std::stable_sort(by_layer.begin(), by_layer.end(),
                     [&](std::uint32_t x, std::uint32_t y) { return dist[x] < dist[y]; });
    std::vector<std::vector<std::int32_t>> sets(order);
    sets[0].assign(n_, 0);
    for (std::uint32_t v : by_layer) {
      if (v == 0) continue;
      std::vector<std::vector<std::int32_t>> found;
      for (int axis = 0; axis < n_; ++axis) {
        for (int s : {+1, -1}) {
          const std::uint32_t u = adj.neighbor(v, direction_slot(axis, -s));
          if (dist[u] + 1 != dist[v]) continue;
          const auto& pred = sets[u];
          for (std::size_t off = 0; off < pred.size(); off += n_) {
            std::vector<std::int32_t> r(pred.begin() + off, pred.begin() + off + n_);
            r[axis] += s;
            found.push_back(std::move(r));
          }
        }
      }
      std::sort(found.begin(), found.end());
      found.erase(std::unique(found.begin(), found.end()), found.end());
      for (const auto& r : found) sets[v].insert(sets[v].end(), r.begin(), r.end());
    }
    offsets_.assign(order + 1, 0);
    for (std::size_t v = 0; v < order; ++v) offsets_[v + 1] = offsets_[v] + sets[v].size() / n_;
    records_.reserve(offsets_.back() * n_);
    for (const auto& s : sets) records_.insert(records_.end(), s.begin(), s.end());
  }

  int dim() const { return n_; }
  std::size_t count(std::size_t cls) const { return offsets_[cls + 1] - offsets_[cls]; }

  // k-th minimal record of the class, lexicographically ordered.
  RoutingRecord record(std::size_t cls, std::size_t k) const {
    const std::size_t base = (offsets_[cls] + k) * n_;
    return RoutingRecord(records_.begin() + base, records_.begin() + base + n_);
  }

  RoutingRecord canonical(std::size_t cls) const { return record(cls, 0); }

  RoutingRecord pick(std::size_t cls, std::mt19937_64& rng) const {
    std::uniform_int_distribution<std::size_t> d(0, count(cls) - 1);
    return record(cls, d(rng));
  }

 private:
  int n_;
  std::vector<std::size_t> offsets_;
  std::vector<std::int32_t> records_;
};

// Lexicographically smallest minimal record for every destination class,
// flattened (n entries per vertex). Same recurrence as MinimalRecordTable but
// keeps one record per vertex, so it scales to the BFS size cap.
inline std::vector<std::int32_t> canonical_minimal_records(const LatticeGraph& g, const Adjacency& adj) {
  const int n = g.dim();
  const auto order = static_cast<std::size_t>(g.order());
  const auto dist = bfs_distances(adj, 0);
  std::vector<std::uint32_t> by_layer(order);
  for (std::size_t v = 0; v < order; ++v) by_layer[v] = static_cast<std::uint32_t>(v);
  std::stable_sort(by_layer.begin(), by_layer.end(), [&](std::uint32_t x, std::uint32_t y) { return dist[x] < dist[y]; });
  std::vector<std::int32_t> out(order * n, 0);
  std::vector<std::int32_t> best(n), cand(n);
  for (std::uint32_t v : by_layer) {
    if (v == 0) continue;
    bool have = false;
    for (int axis = 0; axis < n; ++axis) {
      for (int s : {+1, -1}) {
        const std::uint32_t u = adj.neighbor(v, direction_slot(axis, -s));
        if (dist[u] + 1 != dist[v]) continue;
        std::copy(out.begin() + static_cast<std::ptrdiff_t>(u) * n, out.begin() + static_cast<std::ptrdiff_t>(u + 1) * n,
                  cand.begin());
        cand[axis] += s;
        if (!have || cand < best) {
          best = cand;
          have = true;
        }
      }
    }
    std::copy(best.begin(), best.end(), out.begin() + static_cast<std::ptrdiff_t>(v) * n);
  }
  return out;
}

}  // namespace lattice_net
