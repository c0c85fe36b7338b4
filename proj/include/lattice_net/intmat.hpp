#pragma once

// Exact integer matrix algebra over 64-bit signed integers.
//
// Every arithmetic step that could overflow goes through the checked helpers
// below and raises OverflowError instead of wrapping. Matrices are small
// (dimension 1..8) and stored row-major.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lattice_net/errors.hpp"

namespace lattice_net {

using Int = std::int64_t;
using IntVector = std::vector<Int>;

inline constexpr int kMaxDimension = 8;

namespace checked {

inline Int add(Int a, Int b) {
  Int r;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError("integer addition overflow");
  return r;
}

inline Int sub(Int a, Int b) {
  Int r;
  if (__builtin_sub_overflow(a, b, &r)) throw OverflowError("integer subtraction overflow");
  return r;
}

inline Int mul(Int a, Int b) {
  Int r;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("integer multiplication overflow");
  return r;
}

inline Int neg(Int a) { return sub(0, a); }

inline Int abs(Int a) { return a < 0 ? neg(a) : a; }

}  // namespace checked

// Floor division and the matching nonnegative remainder (for positive b).
inline Int floor_div(Int a, Int b) {
  Int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline Int mod_floor(Int a, Int b) { return a - floor_div(a, b) * b; }

inline Int gcd(Int a, Int b) { return std::gcd(checked::abs(a), checked::abs(b)); }

struct ExtendedGcd {
  Int g;  // nonnegative
  Int x;
  Int y;  // a*x + b*y == g
};

inline ExtendedGcd extended_gcd(Int a, Int b) {
  Int old_r = a, r = b;
  Int old_s = 1, s = 0;
  Int old_t = 0, t = 1;
  while (r != 0) {
    const Int q = old_r / r;
    old_r = checked::sub(old_r, checked::mul(q, r));
    std::swap(old_r, r);
    old_s = checked::sub(old_s, checked::mul(q, s));
    std::swap(old_s, s);
    old_t = checked::sub(old_t, checked::mul(q, t));
    std::swap(old_t, t);
  }
  if (old_r < 0) return {checked::neg(old_r), checked::neg(old_s), checked::neg(old_t)};
  return {old_r, old_s, old_t};
}

class IntMatrix {
 public:
  IntMatrix() = default;

  explicit IntMatrix(int n) : n_(n), data_(static_cast<std::size_t>(n) * n, 0) {
    if (n < 1 || n > kMaxDimension) {
      throw PreconditionError("matrix dimension must be in 1.." + std::to_string(kMaxDimension));
    }
  }

  IntMatrix(std::initializer_list<std::initializer_list<Int>> rows)
      : IntMatrix(static_cast<int>(rows.size())) {
    int i = 0;
    for (const auto& row : rows) {
      if (static_cast<int>(row.size()) != n_) throw PreconditionError("matrix must be square");
      int j = 0;
      for (Int v : row) (*this)(i, j++) = v;
      ++i;
    }
  }

  static IntMatrix from_rows(const std::vector<IntVector>& rows) {
    IntMatrix m(static_cast<int>(rows.size()));
    for (int i = 0; i < m.n_; ++i) {
      if (static_cast<int>(rows[i].size()) != m.n_) throw PreconditionError("matrix must be square");
      for (int j = 0; j < m.n_; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  static IntMatrix identity(int n) {
    IntMatrix m(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  static IntMatrix diagonal(const IntVector& d) {
    IntMatrix m(static_cast<int>(d.size()));
    for (int i = 0; i < m.n_; ++i) m(i, i) = d[i];
    return m;
  }

  int dim() const { return n_; }

  Int& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * n_ + j]; }
  Int operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * n_ + j]; }

  IntVector column(int j) const {
    IntVector c(n_);
    for (int i = 0; i < n_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  IntVector row(int i) const {
    return IntVector(data_.begin() + static_cast<std::ptrdiff_t>(i) * n_,
                     data_.begin() + static_cast<std::ptrdiff_t>(i + 1) * n_);
  }

  std::vector<IntVector> rows() const {
    std::vector<IntVector> out;
    for (int i = 0; i < n_; ++i) out.push_back(row(i));
    return out;
  }

  // Top-left k x k block.
  IntMatrix leading_block(int k) const {
    IntMatrix b(k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) b(i, j) = (*this)(i, j);
    return b;
  }

  IntMatrix transposed() const {
    IntMatrix t(n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  void swap_columns(int a, int b) {
    for (int i = 0; i < n_; ++i) std::swap((*this)(i, a), (*this)(i, b));
  }

  void swap_rows(int a, int b) {
    for (int j = 0; j < n_; ++j) std::swap((*this)(a, j), (*this)(b, j));
  }

  void negate_column(int j) {
    for (int i = 0; i < n_; ++i) (*this)(i, j) = checked::neg((*this)(i, j));
  }

  // col[target] += factor * col[source]
  void add_column_multiple(int target, int source, Int factor) {
    if (factor == 0) return;
    for (int i = 0; i < n_; ++i) {
      (*this)(i, target) = checked::add((*this)(i, target), checked::mul(factor, (*this)(i, source)));
    }
  }

  bool operator==(const IntMatrix& other) const = default;

  std::string to_string() const {
    std::ostringstream os;
    for (int i = 0; i < n_; ++i) {
      if (i) os << ';';
      for (int j = 0; j < n_; ++j) {
        if (j) os << ',';
        os << (*this)(i, j);
      }
    }
    return os.str();
  }

 private:
  int n_ = 0;
  std::vector<Int> data_;
};

inline std::ostream& operator<<(std::ostream& os, const IntMatrix& m) { return os << m.to_string(); }

// Parses the "8,4,4;0,4,0;0,0,4" text form: rows separated by ';', entries by ','.
inline IntMatrix parse_matrix(std::string_view text) {
  std::vector<IntVector> rows;
  IntVector current;
  std::string token;
  auto flush_token = [&] {
    std::size_t b = token.find_first_not_of(" \t");
    std::size_t e = token.find_last_not_of(" \t");
    if (b == std::string::npos) throw PreconditionError("empty matrix entry in '" + std::string(text) + "'");
    std::string trimmed = token.substr(b, e - b + 1);
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(trimmed, &used);
    } catch (const std::exception&) {
      throw PreconditionError("malformed matrix entry '" + trimmed + "'");
    }
    if (used != trimmed.size()) throw PreconditionError("malformed matrix entry '" + trimmed + "'");
    current.push_back(v);
    token.clear();
  };
  for (char c : text) {
    if (c == ',') {
      flush_token();
    } else if (c == ';') {
      flush_token();
      rows.push_back(std::move(current));
      current.clear();
    } else {
      token.push_back(c);
    }
  }
  flush_token();
  rows.push_back(std::move(current));
  if (rows.empty() || rows.size() > static_cast<std::size_t>(kMaxDimension)) {
    throw PreconditionError("matrix dimension must be in 1.." + std::to_string(kMaxDimension));
  }
  for (const auto& r : rows) {
    if (r.size() != rows.size()) throw PreconditionError("matrix literal is not square: '" + std::string(text) + "'");
  }
  return IntMatrix::from_rows(rows);
}

// Parses "1,3,3".
inline IntVector parse_vector(std::string_view text) {
  IntVector out;
  std::string token;
  auto flush = [&] {
    std::size_t used = 0;
    try {
      out.push_back(std::stoll(token, &used));
    } catch (const std::exception&) {
      throw PreconditionError("malformed vector entry '" + token + "'");
    }
    if (used != token.size()) throw PreconditionError("malformed vector entry '" + token + "'");
    token.clear();
  };
  for (char c : text) {
    if (c == ',') {
      flush();
    } else if (c != ' ') {
      token.push_back(c);
    }
  }
  flush();
  return out;
}

inline IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
  if (a.dim() != b.dim()) throw PreconditionError("dimension mismatch in matrix product");
  const int n = a.dim();
  IntMatrix c(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Int s = 0;
      for (int k = 0; k < n; ++k) s = checked::add(s, checked::mul(a(i, k), b(k, j)));
      c(i, j) = s;
    }
  return c;
}

inline IntVector operator*(const IntMatrix& a, const IntVector& v) {
  if (static_cast<int>(v.size()) != a.dim()) throw PreconditionError("dimension mismatch in matrix-vector product");
  const int n = a.dim();
  IntVector out(n, 0);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) out[i] = checked::add(out[i], checked::mul(a(i, k), v[k]));
  return out;
}

inline IntMatrix scaled(const IntMatrix& a, Int s) {
  IntMatrix c(a.dim());
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) c(i, j) = checked::mul(a(i, j), s);
  return c;
}

inline IntVector add(const IntVector& a, const IntVector& b) {
  IntVector c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = checked::add(a[i], b[i]);
  return c;
}

inline IntVector sub(const IntVector& a, const IntVector& b) {
  IntVector c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = checked::sub(a[i], b[i]);
  return c;
}

inline IntVector negated(const IntVector& a) {
  IntVector c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = checked::neg(a[i]);
  return c;
}

inline IntVector unit_vector(int n, int i) {
  IntVector e(n, 0);
  e[i] = 1;
  return e;
}

// Fraction-free (Bareiss) elimination; all divisions are exact.
inline Int determinant(const IntMatrix& m) {
  const int n = m.dim();
  IntMatrix a = m;
  Int sign = 1;
  Int prev = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (a(k, k) == 0) {
      int swap_with = -1;
      for (int i = k + 1; i < n; ++i)
        if (a(i, k) != 0) {
          swap_with = i;
          break;
        }
      if (swap_with < 0) return 0;
      a.swap_rows(k, swap_with);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i) {
      for (int j = k + 1; j < n; ++j) {
        const Int num = checked::sub(checked::mul(a(i, j), a(k, k)), checked::mul(a(i, k), a(k, j)));
        a(i, j) = num / prev;
      }
      a(i, k) = 0;
    }
    prev = a(k, k);
  }
  return sign < 0 ? checked::neg(a(n - 1, n - 1)) : a(n - 1, n - 1);
}

inline bool is_unimodular(const IntMatrix& u) { return checked::abs(determinant(u)) == 1; }

// Returns A with m * A == det(m) * I.
inline IntMatrix adjugate(const IntMatrix& m) {
  const int n = m.dim();
  if (determinant(m) == 0) throw SingularMatrixError("adjugate of a singular matrix");
  IntMatrix adj(n);
  if (n == 1) {
    adj(0, 0) = 1;
    return adj;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      IntMatrix minor(n - 1);
      for (int r = 0, mr = 0; r < n; ++r) {
        if (r == i) continue;
        for (int c = 0, mc = 0; c < n; ++c) {
          if (c == j) continue;
          minor(mr, mc++) = m(r, c);
        }
        ++mr;
      }
      const Int cof = determinant(minor);
      adj(j, i) = ((i + j) % 2 == 0) ? cof : checked::neg(cof);
    }
  return adj;
}

inline bool is_hermite(const IntMatrix& h) {
  const int n = h.dim();
  for (int i = 0; i < n; ++i) {
    if (h(i, i) <= 0) return false;
    for (int j = 0; j < i; ++j)
      if (h(i, j) != 0) return false;
    for (int j = i + 1; j < n; ++j)
      if (h(i, j) < 0 || h(i, j) >= h(i, i)) return false;
  }
  return true;
}

struct HermiteDecomposition {
  IntMatrix h;  // upper triangular, positive diagonal, reduced above the diagonal
  IntMatrix u;  // unimodular, m * u == h
};

// Column-style Hermite normal form. Rows are cleared bottom-up with extended
// gcd column combinations; the above-diagonal entries are reduced afterwards.
inline HermiteDecomposition hermite_normal_form(const IntMatrix& m) {
  const int n = m.dim();
  if (determinant(m) == 0) throw SingularMatrixError("Hermite normal form of a singular matrix");
  IntMatrix h = m;
  IntMatrix u = IntMatrix::identity(n);

  auto combine = [&](int i, int j) {
    // Replace columns (i, j) by a unimodular combination that zeroes h(i, j).
    const Int a = h(i, i);
    const Int b = h(i, j);
    const auto eg = extended_gcd(a, b);
    const Int ag = a / eg.g;
    const Int bg = b / eg.g;
    for (IntMatrix* mat : {&h, &u}) {
      IntMatrix& x = *mat;
      for (int r = 0; r < n; ++r) {
        const Int ci = x(r, i);
        const Int cj = x(r, j);
        x(r, i) = checked::add(checked::mul(eg.x, ci), checked::mul(eg.y, cj));
        x(r, j) = checked::sub(checked::mul(ag, cj), checked::mul(bg, ci));
      }
    }
  };

  for (int i = n - 1; i >= 0; --i) {
    for (int j = 0; j < i; ++j) {
      if (h(i, j) != 0) combine(i, j);
    }
    if (h(i, i) < 0) {
      h.negate_column(i);
      u.negate_column(i);
    }
  }
  for (int i = n - 2; i >= 0; --i) {
    for (int j = i + 1; j < n; ++j) {
      const Int q = floor_div(h(i, j), h(i, i));
      if (q != 0) {
        h.add_column_multiple(j, i, checked::neg(q));
        u.add_column_multiple(j, i, checked::neg(q));
      }
    }
  }
  return {std::move(h), std::move(u)};
}

inline bool right_equivalent(const IntMatrix& a, const IntMatrix& b) {
  if (a.dim() != b.dim()) throw PreconditionError("right equivalence needs equal dimensions");
  return hermite_normal_form(a).h == hermite_normal_form(b).h;
}

// A matrix already verified to be in Hermite normal form. Holding one of
// these means reduce() can skip the precondition check.
class HermiteBasis {
 public:
  explicit HermiteBasis(IntMatrix h) : h_(std::move(h)) {
    if (!is_hermite(h_)) throw PreconditionError("matrix is not in Hermite normal form: " + h_.to_string());
  }

  static HermiteBasis of(const IntMatrix& m) { return HermiteBasis(hermite_normal_form(m).h); }

  const IntMatrix& matrix() const { return h_; }
  int dim() const { return h_.dim(); }
  Int side(int i) const { return h_(i, i); }

  IntVector sides() const {
    IntVector s(h_.dim());
    for (int i = 0; i < h_.dim(); ++i) s[i] = h_(i, i);
    return s;
  }

  // Canonical residue: the unique w == v (mod H) with 0 <= w_i < H(i, i).
  IntVector reduce(IntVector v) const {
    const int n = h_.dim();
    if (static_cast<int>(v.size()) != n) throw PreconditionError("vector length does not match matrix dimension");
    for (int i = n - 1; i >= 0; --i) {
      const Int q = floor_div(v[i], h_(i, i));
      if (q == 0) continue;
      for (int r = 0; r <= i; ++r) v[r] = checked::sub(v[r], checked::mul(q, h_(r, i)));
    }
    return v;
  }

  bool congruent(const IntVector& a, const IntVector& b) const { return reduce(sub(a, b)) == IntVector(a.size(), 0); }

 private:
  IntMatrix h_;
};

inline IntVector reduce(const IntVector& v, const IntMatrix& h) { return HermiteBasis(h).reduce(v); }

// Smallest k >= 1 with k*x == 0 (mod m), via |det| / gcd(|det|, gcd(adj(m) x)).
inline Int element_order(const IntMatrix& m, const IntVector& x) {
  const Int det = checked::abs(determinant(m));
  if (det == 0) throw SingularMatrixError("element order modulo a singular matrix");
  const IntVector y = adjugate(m) * x;
  Int g = det;
  for (Int yi : y) g = std::gcd(g, checked::abs(yi));
  return det / g;
}

}  // namespace lattice_net
