#pragma once

// Lattice graphs G(M): vertices are Z^n / M Z^n, and v ~ w iff v - w == +-e_i (mod M).
// Vertices are always labelled by their canonical Hermite residues
// { x : 0 <= x_i < H(i, i) } and enumerated in lexicographic order.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "lattice_net/errors.hpp"
#include "lattice_net/intmat.hpp"

namespace lattice_net {

namespace topo {

struct Torus {
  IntVector sides;
};
struct PC {
  Int a;
};
struct RTT {
  Int a;
};
struct FCC {
  Int a;
};
struct BCC {
  Int a;
};
struct FCC4 {
  Int a;
};
struct BCC4 {
  Int a;
};
struct Lip {
  Int a;
};

// Named building blocks that can be combined with the common lift.
enum class Part { PC, PC2a, FCC, BCC, RTT, T2a2a, FCC4, BCC4, Lip };

struct Hybrid {
  Part left;
  Part right;
  Int a;
};

struct Custom {
  IntMatrix matrix;
};

}  // namespace topo

using TopologyKind = std::variant<topo::Torus, topo::PC, topo::RTT, topo::FCC, topo::BCC, topo::FCC4, topo::BCC4,
                                  topo::Lip, topo::Hybrid, topo::Custom>;

inline void require_side(Int a) {
  if (a < 1) throw PreconditionError("topology side must be >= 1, got " + std::to_string(a));
}

inline IntMatrix part_matrix(topo::Part part, Int a) {
  require_side(a);
  const Int a2 = checked::mul(2, a);
  switch (part) {
    case topo::Part::PC:
      return IntMatrix::diagonal({a, a, a});
    case topo::Part::PC2a:
      return IntMatrix::diagonal({a2, a2, a2});
    case topo::Part::RTT:
      return IntMatrix{{a2, a}, {0, a}};
    case topo::Part::T2a2a:
      return IntMatrix::diagonal({a2, a2});
    case topo::Part::FCC:
      return IntMatrix{{a2, a, a}, {0, a, 0}, {0, 0, a}};
    case topo::Part::BCC:
      return IntMatrix{{a2, 0, a}, {0, a2, a}, {0, 0, a}};
    case topo::Part::FCC4:
      return IntMatrix{{a2, a, a, a}, {0, a, 0, 0}, {0, 0, a, 0}, {0, 0, 0, a}};
    case topo::Part::BCC4:
      return IntMatrix{{a2, 0, 0, a}, {0, a2, 0, a}, {0, 0, a2, a}, {0, 0, 0, a}};
    case topo::Part::Lip:
      return IntMatrix{{a, -a, -a, -a}, {a, a, -a, a}, {a, a, a, -a}, {a, -a, a, a}};
  }
  throw PreconditionError("unknown topology part");
}

inline std::string part_name(topo::Part part) {
  switch (part) {
    case topo::Part::PC:
      return "pc";
    case topo::Part::PC2a:
      return "pc2a";
    case topo::Part::RTT:
      return "rtt";
    case topo::Part::T2a2a:
      return "t2a2a";
    case topo::Part::FCC:
      return "fcc";
    case topo::Part::BCC:
      return "bcc";
    case topo::Part::FCC4:
      return "fcc4";
    case topo::Part::BCC4:
      return "bcc4";
    case topo::Part::Lip:
      return "lip";
  }
  return "?";
}

inline topo::Part parse_part(const std::string& name) {
  for (auto p : {topo::Part::PC, topo::Part::PC2a, topo::Part::RTT, topo::Part::T2a2a, topo::Part::FCC,
                 topo::Part::BCC, topo::Part::FCC4, topo::Part::BCC4, topo::Part::Lip}) {
    if (part_name(p) == name) return p;
  }
  throw PreconditionError("unknown topology part '" + name + "'");
}

inline IntMatrix direct_sum(const IntMatrix& m1, const IntMatrix& m2) {
  if (determinant(m1) == 0 || determinant(m2) == 0) throw SingularMatrixError("direct sum of a singular matrix");
  const int n1 = m1.dim(), n2 = m2.dim();
  IntMatrix out(n1 + n2);
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n1; ++j) out(i, j) = m1(i, j);
  for (int i = 0; i < n2; ++i)
    for (int j = 0; j < n2; ++j) out(n1 + i, n1 + j) = m2(i, j);
  return out;
}

// Number of identical leading columns of two Hermite forms, compared over the
// top-left min(n1, n2) rows (rows below the diagonal are zero in both).
inline int shared_leading_columns(const IntMatrix& h1, const IntMatrix& h2) {
  const int k_max = std::min(h1.dim(), h2.dim());
  int k = 0;
  while (k < k_max) {
    bool same = true;
    for (int r = 0; r < k_max && same; ++r) same = h1(r, k) == h2(r, k);
    if (!same) break;
    ++k;
  }
  return k;
}

// Minimal-dimension common lift: with H1 = [[C, RA], [0, A]] and
// H2 = [[C, RB], [0, B]] sharing the leading columns C, returns
// [[C, RA, RB], [0, A, 0], [0, 0, B]].
inline IntMatrix common_lift(const IntMatrix& m1, const IntMatrix& m2) {
  const IntMatrix h1 = hermite_normal_form(m1).h;
  const IntMatrix h2 = hermite_normal_form(m2).h;
  const int n1 = h1.dim(), n2 = h2.dim();
  const int k = shared_leading_columns(h1, h2);
  const int ra = n1 - k, rb = n2 - k;
  IntMatrix out(k + ra + rb);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) out(i, j) = h1(i, j);
  for (int i = 0; i < n1; ++i)
    for (int j = k; j < n1; ++j) out(i, j) = h1(i, j);
  for (int i = 0; i < k; ++i)
    for (int j = k; j < n2; ++j) out(i, j + ra) = h2(i, j);
  for (int i = k; i < n2; ++i)
    for (int j = k; j < n2; ++j) out(i + ra, j + ra) = h2(i, j);
  return out;
}

inline IntMatrix generator_matrix(const TopologyKind& kind) {
  struct Visitor {
    IntMatrix operator()(const topo::Torus& t) const {
      if (t.sides.empty()) throw PreconditionError("torus needs at least one side");
      for (Int s : t.sides) require_side(s);
      return IntMatrix::diagonal(t.sides);
    }
    IntMatrix operator()(const topo::PC& t) const { return part_matrix(topo::Part::PC, t.a); }
    IntMatrix operator()(const topo::RTT& t) const { return part_matrix(topo::Part::RTT, t.a); }
    IntMatrix operator()(const topo::FCC& t) const { return part_matrix(topo::Part::FCC, t.a); }
    IntMatrix operator()(const topo::BCC& t) const { return part_matrix(topo::Part::BCC, t.a); }
    IntMatrix operator()(const topo::FCC4& t) const { return part_matrix(topo::Part::FCC4, t.a); }
    IntMatrix operator()(const topo::BCC4& t) const { return part_matrix(topo::Part::BCC4, t.a); }
    IntMatrix operator()(const topo::Lip& t) const { return part_matrix(topo::Part::Lip, t.a); }
    IntMatrix operator()(const topo::Hybrid& t) const {
      return common_lift(part_matrix(t.left, t.a), part_matrix(t.right, t.a));
    }
    IntMatrix operator()(const topo::Custom& t) const { return t.matrix; }
  };
  return std::visit(Visitor{}, kind);
}

inline std::string topology_name(const TopologyKind& kind) {
  struct Visitor {
    std::string operator()(const topo::Torus& t) const {
      std::string s = "T(";
      for (std::size_t i = 0; i < t.sides.size(); ++i) s += (i ? "," : "") + std::to_string(t.sides[i]);
      return s + ")";
    }
    std::string operator()(const topo::PC& t) const { return "PC(" + std::to_string(t.a) + ")"; }
    std::string operator()(const topo::RTT& t) const { return "RTT(" + std::to_string(t.a) + ")"; }
    std::string operator()(const topo::FCC& t) const { return "FCC(" + std::to_string(t.a) + ")"; }
    std::string operator()(const topo::BCC& t) const { return "BCC(" + std::to_string(t.a) + ")"; }
    std::string operator()(const topo::FCC4& t) const { return "4D-FCC(" + std::to_string(t.a) + ")"; }
    std::string operator()(const topo::BCC4& t) const { return "4D-BCC(" + std::to_string(t.a) + ")"; }
    std::string operator()(const topo::Lip& t) const { return "Lip(" + std::to_string(t.a) + ")"; }
    std::string operator()(const topo::Hybrid& t) const {
      return part_name(t.left) + "+" + part_name(t.right) + "(" + std::to_string(t.a) + ")";
    }
    std::string operator()(const topo::Custom& t) const { return "G(" + t.matrix.to_string() + ")"; }
  };
  return std::visit(Visitor{}, kind);
}

// A rooted walk step: generator index i in [0, n) and direction +1 / -1.
// Direction slots are numbered 2i (+e_i) and 2i+1 (-e_i).
inline int direction_slot(int axis, int sign) { return 2 * axis + (sign < 0 ? 1 : 0); }

class LatticeGraph {
 public:
  explicit LatticeGraph(IntMatrix generator)
      : generator_(std::move(generator)), hermite_(HermiteBasis::of(generator_)) {
    order_ = 1;
    for (Int s : hermite_.sides()) order_ = checked::mul(order_, s);
    strides_.assign(dim(), 1);
    for (int i = dim() - 2; i >= 0; --i) strides_[i] = checked::mul(strides_[i + 1], hermite_.side(i + 1));
  }

  const IntMatrix& generator() const { return generator_; }
  const HermiteBasis& hermite() const { return hermite_; }
  int dim() const { return generator_.dim(); }
  Int order() const { return order_; }
  int degree() const { return 2 * dim(); }
  IntVector sides() const { return hermite_.sides(); }
  Int side(int i) const { return hermite_.side(i); }

  bool contains(const IntVector& v) const {
    if (static_cast<int>(v.size()) != dim()) return false;
    for (int i = 0; i < dim(); ++i)
      if (v[i] < 0 || v[i] >= hermite_.side(i)) return false;
    return true;
  }

  void require_label(const IntVector& v) const {
    if (!contains(v)) throw PreconditionError("vertex label outside the labelling set");
  }

  IntVector reduce(const IntVector& v) const { return hermite_.reduce(v); }

  // Lexicographic rank of a canonical label.
  std::size_t index_of(const IntVector& v) const {
    std::size_t idx = 0;
    for (int i = 0; i < dim(); ++i) idx += static_cast<std::size_t>(v[i]) * static_cast<std::size_t>(strides_[i]);
    return idx;
  }

  IntVector label(std::size_t idx) const {
    IntVector v(dim());
    for (int i = 0; i < dim(); ++i) {
      v[i] = static_cast<Int>(idx / static_cast<std::size_t>(strides_[i]));
      idx %= static_cast<std::size_t>(strides_[i]);
    }
    return v;
  }

  // reduce(v + e_1), reduce(v - e_1), reduce(v + e_2), ...
  std::vector<IntVector> neighbors(const IntVector& v) const {
    require_label(v);
    std::vector<IntVector> out;
    out.reserve(degree());
    for (int i = 0; i < dim(); ++i) {
      for (int s : {+1, -1}) {
        IntVector w = v;
        w[i] += s;
        out.push_back(reduce(w));
      }
    }
    return out;
  }

  // Vertex reached from v by walking routing record r.
  IntVector apply_record(const IntVector& v, const IntVector& r) const {
    require_label(v);
    if (r.size() != v.size()) throw PreconditionError("record length does not match graph dimension");
    return reduce(add(v, r));
  }

 private:
  IntMatrix generator_;
  HermiteBasis hermite_;
  Int order_ = 0;
  std::vector<Int> strides_;
};

inline LatticeGraph make_topology(const TopologyKind& kind) { return LatticeGraph(generator_matrix(kind)); }

struct Projection {
  LatticeGraph base;
  Int side;
  IntVector twist;
};

// Projection over e_axis: move the axis last, Hermite-reduce to [[B, c], [0, a]].
inline Projection projection(const LatticeGraph& g, int axis) {
  const int n = g.dim();
  if (n < 2) throw PreconditionError("projection needs dimension >= 2");
  if (axis < 0 || axis >= n) throw PreconditionError("projection axis out of range");
  IntMatrix m = g.generator();
  m.swap_rows(axis, n - 1);
  m.swap_columns(axis, n - 1);
  const IntMatrix h = hermite_normal_form(m).h;
  IntVector twist(n - 1);
  for (int i = 0; i < n - 1; ++i) twist[i] = h(i, n - 1);
  return Projection{LatticeGraph(h.leading_block(n - 1)), h(n - 1, n - 1), std::move(twist)};
}

// Flat neighbour table: entry [v * degree + slot] is the index of the
// neighbour of vertex v in direction slot (see direction_slot).
class Adjacency {
 public:
  static constexpr Int kMaxOrder = 1'000'000;

  explicit Adjacency(const LatticeGraph& g) : degree_(g.degree()) {
    if (g.order() > kMaxOrder) {
      throw ResourceError("graph order " + std::to_string(g.order()) + " exceeds the cap of " +
                          std::to_string(kMaxOrder));
    }
    const auto n_vertices = static_cast<std::size_t>(g.order());
    table_.resize(n_vertices * degree_);
    const int n = g.dim();
    const IntMatrix& h = g.hermite().matrix();
    IntVector v(n, 0);
    for (std::size_t idx = 0; idx < n_vertices; ++idx) {
      for (int i = 0; i < n; ++i) {
        for (int s : {+1, -1}) {
          IntVector w = v;
          w[i] += s;
          // Only coordinate i can leave its range; wrapping subtracts column i,
          // which may push earlier coordinates out of range in turn.
          for (int k = i; k >= 0; --k) {
            const Int q = floor_div(w[k], h(k, k));
            if (q == 0) continue;
            for (int r = 0; r <= k; ++r) w[r] -= q * h(r, k);
          }
          table_[idx * degree_ + direction_slot(i, s)] = static_cast<std::uint32_t>(g.index_of(w));
        }
      }
      for (int k = n - 1; k >= 0; --k) {  // lexicographic increment
        if (++v[k] < h(k, k)) break;
        v[k] = 0;
      }
    }
  }

  int degree() const { return degree_; }
  std::size_t order() const { return table_.size() / static_cast<std::size_t>(degree_); }
  std::uint32_t neighbor(std::size_t v, int slot) const { return table_[v * degree_ + slot]; }

 private:
  int degree_;
  std::vector<std::uint32_t> table_;
};

inline constexpr std::uint32_t kUnreached = std::numeric_limits<std::uint32_t>::max();

// Hop distances from source; repeated neighbours (small sides) are harmless.
inline std::vector<std::uint32_t> bfs_distances(const Adjacency& adj, std::size_t source) {
  std::vector<std::uint32_t> dist(adj.order(), kUnreached);
  std::vector<std::uint32_t> frontier{static_cast<std::uint32_t>(source)};
  dist[source] = 0;
  std::size_t head = 0;
  while (head < frontier.size()) {
    const std::uint32_t v = frontier[head++];
    for (int s = 0; s < adj.degree(); ++s) {
      const std::uint32_t w = adj.neighbor(v, s);
      if (dist[w] == kUnreached) {
        dist[w] = dist[v] + 1;
        frontier.push_back(w);
      }
    }
  }
  return dist;
}

}  // namespace lattice_net
