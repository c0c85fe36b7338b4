#pragma once

// Linear automorphisms of lattice graphs fixing 0. Every such automorphism is
// a signed permutation P, and P is one iff M^-1 P M is integral.

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lattice_net/errors.hpp"
#include "lattice_net/intmat.hpp"
#include "lattice_net/lattice.hpp"

namespace lattice_net {

// x -> P x with P e_j = sign[j] * e_{image[j]}.
class SignedPermutation {
 public:
  SignedPermutation(std::vector<int> image, std::vector<int> sign) : image_(std::move(image)), sign_(std::move(sign)) {
    const int n = static_cast<int>(image_.size());
    if (n < 1 || n > kMaxDimension || static_cast<int>(sign_.size()) != n) {
      throw PreconditionError("malformed signed permutation");
    }
    std::vector<bool> seen(n, false);
    for (int j = 0; j < n; ++j) {
      if (image_[j] < 0 || image_[j] >= n || seen[image_[j]]) throw PreconditionError("image is not a permutation");
      if (sign_[j] != 1 && sign_[j] != -1) throw PreconditionError("signs must be +1 or -1");
      seen[image_[j]] = true;
    }
  }

  static SignedPermutation identity(int n) {
    std::vector<int> image(n);
    std::iota(image.begin(), image.end(), 0);
    return SignedPermutation(image, std::vector<int>(n, 1));
  }

  // Inverse of matrix(): accepts any matrix with exactly one +-1 per row and column.
  static SignedPermutation from_matrix(const IntMatrix& p) {
    const int n = p.dim();
    std::vector<int> image(n, -1), sign(n, 0);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        if (p(i, j) == 0) continue;
        if ((p(i, j) != 1 && p(i, j) != -1) || image[j] != -1) throw PreconditionError("not a signed permutation matrix");
        image[j] = i;
        sign[j] = static_cast<int>(p(i, j));
      }
      if (image[j] == -1) throw PreconditionError("not a signed permutation matrix");
    }
    return SignedPermutation(image, sign);
  }

  int dim() const { return static_cast<int>(image_.size()); }
  int image(int j) const { return image_[j]; }
  int sign(int j) const { return sign_[j]; }

  IntMatrix matrix() const {
    IntMatrix p(dim());
    for (int j = 0; j < dim(); ++j) p(image_[j], j) = sign_[j];
    return p;
  }

  // (this * other)(x) = this(other(x))
  SignedPermutation compose(const SignedPermutation& other) const {
    std::vector<int> image(dim()), sign(dim());
    for (int j = 0; j < dim(); ++j) {
      image[j] = image_[other.image_[j]];
      sign[j] = sign_[other.image_[j]] * other.sign_[j];
    }
    return SignedPermutation(image, sign);
  }

  bool is_identity() const {
    for (int j = 0; j < dim(); ++j)
      if (image_[j] != j || sign_[j] != 1) return false;
    return true;
  }

  int order() const {
    int k = 1;
    SignedPermutation power = *this;
    while (!power.is_identity()) {
      power = power.compose(*this);
      ++k;
    }
    return k;
  }

  // Cycle notation on signed indices, e.g. "(1 -2)(-3)".
  std::string to_string() const {
    std::string out;
    std::vector<bool> done(dim(), false);
    for (int start = 0; start < dim(); ++start) {
      if (done[start]) continue;
      if (image_[start] == start) {
        done[start] = true;
        out += "(" + std::string(sign_[start] < 0 ? "-" : "") + std::to_string(start + 1) + ")";
        continue;
      }
      out += "(";
      int j = start;
      int s = 1;
      while (true) {
        done[j] = true;
        out += (s < 0 ? "-" : "") + std::to_string(j + 1);
        s *= sign_[j];
        j = image_[j];
        if (j == start) break;
        out += " ";
      }
      out += ")";
    }
    return out;
  }

  bool operator==(const SignedPermutation&) const = default;

 private:
  std::vector<int> image_;
  std::vector<int> sign_;
};

// All n! 2^n signed permutations: permutations in lexicographic order, and for
// each one the sign masks 0 .. 2^n - 1 (bit j set means e_j picks up a minus).
inline std::vector<SignedPermutation> signed_permutations(int n) {
  if (n < 1 || n > kMaxDimension) throw PreconditionError("signed permutations need 1 <= n <= 8");
  std::vector<SignedPermutation> out;
  std::vector<int> image(n);
  std::iota(image.begin(), image.end(), 0);
  do {
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      std::vector<int> sign(n);
      for (int j = 0; j < n; ++j) sign[j] = (mask >> j & 1u) ? -1 : 1;
      out.emplace_back(image, sign);
    }
  } while (std::next_permutation(image.begin(), image.end()));
  return out;
}

// Q = M^-1 P M when it is integral.
inline std::optional<IntMatrix> automorphism_quotient(const IntMatrix& m, const IntMatrix& p) {
  if (m.dim() != p.dim()) throw PreconditionError("dimension mismatch");
  const Int det = determinant(m);
  if (det == 0) throw SingularMatrixError("automorphism test on a singular matrix");
  const IntMatrix num = adjugate(m) * p * m;
  IntMatrix q(m.dim());
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j) {
      if (num(i, j) % det != 0) return std::nullopt;
      q(i, j) = num(i, j) / det;
    }
  return q;
}

inline bool is_linear_automorphism(const IntMatrix& m, const SignedPermutation& p) {
  return automorphism_quotient(m, p.matrix()).has_value();
}

struct StabilizerReport {
  std::vector<SignedPermutation> members;
  bool symmetric = false;
  // witnesses[i]: first member (in generation order) mapping e_1 to +-e_i.
  std::vector<std::optional<SignedPermutation>> witnesses;
};

inline constexpr int kMaxStabilizerDimension = 6;

inline StabilizerReport stabilizer(const IntMatrix& m) {
  const int n = m.dim();
  if (n > kMaxStabilizerDimension) {
    throw UnsupportedError("stabilizer scan supports dimension <= " + std::to_string(kMaxStabilizerDimension));
  }
  const Int det = determinant(m);
  if (det == 0) throw SingularMatrixError("stabilizer of a singular matrix");
  const IntMatrix adj = adjugate(m);
  StabilizerReport report;
  report.witnesses.assign(n, std::nullopt);
  for (const auto& p : signed_permutations(n)) {
    const IntMatrix num = adj * p.matrix() * m;
    bool integral = true;
    for (int i = 0; i < n && integral; ++i)
      for (int j = 0; j < n && integral; ++j) integral = num(i, j) % det == 0;
    if (!integral) continue;
    if (!report.witnesses[p.image(0)]) report.witnesses[p.image(0)] = p;
    report.members.push_back(p);
  }
  report.symmetric = std::all_of(report.witnesses.begin(), report.witnesses.end(),
                                 [](const auto& w) { return w.has_value(); });
  return report;
}

enum class SymmetricFamily { Circulant, Alternate };

// Circulant [[a,c,b],[b,a,c],[c,b,a]] and alternate [[a,b,c],[a,c,-b-c],[a,-b-c,b]].
inline IntMatrix symmetric_family_matrix(SymmetricFamily family, Int a, Int b, Int c) {
  if (family == SymmetricFamily::Circulant) return IntMatrix{{a, c, b}, {b, a, c}, {c, b, a}};
  const Int bc = checked::neg(checked::add(b, c));
  return IntMatrix{{a, b, c}, {a, c, bc}, {a, bc, b}};
}

inline bool verify_symmetric_family(SymmetricFamily family, Int a, Int b, Int c) {
  const IntMatrix m = symmetric_family_matrix(family, a, b, c);
  if (determinant(m) == 0) throw SingularMatrixError("family instance is singular: " + m.to_string());
  return stabilizer(m).symmetric;
}

// A ~ B witnessed by U: U unimodular and A U == U B.
inline bool verify_similarity_witness(const IntMatrix& a, const IntMatrix& b, const IntMatrix& u) {
  if (a.dim() != b.dim() || a.dim() != u.dim()) throw PreconditionError("dimension mismatch");
  return is_unimodular(u) && a * u == u * b;
}

// Step of a 4-cycle: generator axis and sign, encoded as +(axis+1) / -(axis+1).
using GeneratorStep = int;

struct FourCycle {
  std::array<GeneratorStep, 4> steps;
  // Sorted (descending) multiplicities of the axes involved, e.g. {2, 1, 1}.
  std::vector<int> profile;
};

namespace detail {

inline std::array<GeneratorStep, 4> canonical_cycle(std::array<GeneratorStep, 4> s) {
  // Dihedral orbit: rotations, plus traversal in the opposite direction
  // (reverse the sequence and negate every step).
  std::array<GeneratorStep, 4> best = s;
  for (int flip = 0; flip < 2; ++flip) {
    for (int rot = 0; rot < 4; ++rot) {
      std::array<GeneratorStep, 4> t;
      for (int k = 0; k < 4; ++k) t[k] = s[(k + rot) % 4];
      best = std::min(best, t);
    }
    std::array<GeneratorStep, 4> r;
    for (int k = 0; k < 4; ++k) r[k] = -s[3 - k];
    s = r;
  }
  return best;
}

}  // namespace detail

// All closed walks a+b+c+d == 0 (mod M) over +-e_i with no two steps summing
// to 0, up to rotation and reversal.
inline std::vector<FourCycle> nontrivial_4cycles(const IntMatrix& m) {
  const HermiteBasis h = HermiteBasis::of(m);
  const int n = m.dim();
  std::vector<GeneratorStep> gens;
  for (int i = 1; i <= n; ++i) {
    gens.push_back(i);
    gens.push_back(-i);
  }
  std::set<std::array<GeneratorStep, 4>> seen;
  std::vector<FourCycle> out;
  for (GeneratorStep a : gens)
    for (GeneratorStep b : gens)
      for (GeneratorStep c : gens)
        for (GeneratorStep d : gens) {
          const std::array<GeneratorStep, 4> s{a, b, c, d};
          bool cancelling = false;
          for (int x = 0; x < 4 && !cancelling; ++x)
            for (int y = x + 1; y < 4 && !cancelling; ++y) cancelling = s[x] == -s[y];
          if (cancelling) continue;
          IntVector sum(n, 0);
          for (GeneratorStep g : s) sum[std::abs(g) - 1] += g > 0 ? 1 : -1;
          if (h.reduce(sum) != IntVector(n, 0)) continue;
          const auto key = detail::canonical_cycle(s);
          if (!seen.insert(key).second) continue;
          std::map<int, int> counts;
          for (GeneratorStep g : s) ++counts[std::abs(g)];
          std::vector<int> profile;
          for (const auto& [axis, count] : counts) profile.push_back(count);
          std::sort(profile.rbegin(), profile.rend());
          out.push_back({key, profile});
        }
  std::sort(out.begin(), out.end(), [](const FourCycle& x, const FourCycle& y) { return x.steps < y.steps; });
  return out;
}

// Scans every Hermite lift [[2a,0,a,x],[0,2a,a,y],[0,0,a,z],[0,0,0,1]] of
// BCC(a); true iff none of them is linearly symmetric.
inline bool bcc_lift_scan(Int a) {
  require_side(a);
  if (a > 4) throw UnsupportedError("bcc lift scan supports a <= 4");
  const Int a2 = 2 * a;
  for (Int x = 0; x < a2; ++x)
    for (Int y = 0; y < a2; ++y)
      for (Int z = 0; z < a; ++z) {
        const IntMatrix lift{{a2, 0, a, x}, {0, a2, a, y}, {0, 0, a, z}, {0, 0, 0, 1}};
        if (stabilizer(lift).symmetric) return false;
      }
  return true;
}

}  // namespace lattice_net
