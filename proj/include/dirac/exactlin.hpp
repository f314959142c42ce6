#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "dirac/scalar.hpp"

namespace dirac {

/// Dense matrix of exact scalars over a BaseRing. Row-major.
struct ExactMatrix {
  BaseRing base;
  int rows = 0;
  int cols = 0;
  std::vector<Scalar> a;

  ExactMatrix() : base(BaseRing::Z()) {}
  ExactMatrix(BaseRing b, int r, int c)
      : base(b), rows(r), cols(c), a(static_cast<std::size_t>(r) * c, Scalar::zero(b)) {}

  Scalar& at(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  const Scalar& at(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }

  static ExactMatrix identity(BaseRing b, int n) {
    ExactMatrix m(b, n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = Scalar::one(b);
    return m;
  }

  ExactMatrix operator*(const ExactMatrix& o) const {
    if (cols != o.rows) throw std::invalid_argument("matrix shape mismatch");
    ExactMatrix r(base, rows, o.cols);
    for (int i = 0; i < rows; ++i)
      for (int k = 0; k < cols; ++k) {
        if (at(i, k).is_zero()) continue;
        for (int j = 0; j < o.cols; ++j) r.at(i, j) += at(i, k) * o.at(k, j);
      }
    return r;
  }

  bool operator==(const ExactMatrix& o) const {
    return base == o.base && rows == o.rows && cols == o.cols && a == o.a;
  }

  std::vector<Scalar> apply(const std::vector<Scalar>& x) const {
    if (static_cast<int>(x.size()) != cols) throw std::invalid_argument("vector length mismatch");
    std::vector<Scalar> y(rows, Scalar::zero(base));
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j)
        if (!at(i, j).is_zero()) y[i] += at(i, j) * x[j];
    return y;
  }

  std::vector<Scalar> column(int j) const {
    std::vector<Scalar> c(rows, Scalar::zero(base));
    for (int i = 0; i < rows; ++i) c[i] = at(i, j);
    return c;
  }

  void set_column(int j, const std::vector<Scalar>& c) {
    for (int i = 0; i < rows; ++i) at(i, j) = c[i];
  }

  /// Horizontal concatenation [this | o]; both may be empty-width.
  ExactMatrix hstack(const ExactMatrix& o) const {
    if (rows != o.rows) throw std::invalid_argument("hstack row mismatch");
    ExactMatrix r(base, rows, cols + o.cols);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) r.at(i, j) = at(i, j);
      for (int j = 0; j < o.cols; ++j) r.at(i, cols + j) = o.at(i, j);
    }
    return r;
  }

  static ExactMatrix from_columns(BaseRing b, int rows,
                                  const std::vector<std::vector<Scalar>>& cs) {
    ExactMatrix m(b, rows, static_cast<int>(cs.size()));
    for (int j = 0; j < m.cols; ++j) m.set_column(j, cs[j]);
    return m;
  }
};

namespace detail {

// Column operation: col[j1] <- s*col[j1] + t*col[j2], col[j2] <- u*col[j1] + v*col[j2]
// applied simultaneously (a 2x2 right-multiplication on columns j1, j2).
inline void col_op2(ExactMatrix& m, int j1, int j2, const Scalar& s, const Scalar& t,
                    const Scalar& u, const Scalar& v) {
  for (int i = 0; i < m.rows; ++i) {
    Scalar x = m.at(i, j1), y = m.at(i, j2);
    m.at(i, j1) = s * x + t * y;
    m.at(i, j2) = u * x + v * y;
  }
}

inline void col_swap(ExactMatrix& m, int j1, int j2) {
  if (j1 == j2) return;
  for (int i = 0; i < m.rows; ++i) std::swap(m.at(i, j1), m.at(i, j2));
}

inline void col_scale(ExactMatrix& m, int j, const Scalar& s) {
  for (int i = 0; i < m.rows; ++i) m.at(i, j) = m.at(i, j) * s;
}

inline void col_addmul(ExactMatrix& m, int jdst, int jsrc, const Scalar& c) {
  for (int i = 0; i < m.rows; ++i) m.at(i, jdst) += c * m.at(i, jsrc);
}

}  // namespace detail

/// Column echelon form E = m * V with V invertible over the base
/// (unimodular over Z). Pivot rows strictly increase across the first
/// `rank` columns; remaining columns are zero.
struct ColEchelon {
  ExactMatrix E;
  ExactMatrix V;
  std::vector<int> pivot_row;  // per echelon column, -1 past rank
  int rank = 0;
};

inline ColEchelon col_echelon(const ExactMatrix& m) {
  ColEchelon ce{m, ExactMatrix::identity(m.base, m.cols), std::vector<int>(m.cols, -1), 0};
  ExactMatrix& E = ce.E;
  ExactMatrix& V = ce.V;
  const bool integral = m.base.kind == BaseRing::Kind::Integers;
  int c = 0;
  for (int r = 0; r < m.rows && c < m.cols; ++r) {
    // clear row r across columns >= c down to a single pivot
    int piv = -1;
    for (int j = c; j < m.cols; ++j)
      if (!E.at(r, j).is_zero()) { piv = j; break; }
    if (piv == -1) continue;
    if (integral) {
      for (int j = piv + 1; j < m.cols; ++j) {
        if (E.at(r, j).is_zero()) continue;
        mpz_class x = E.at(r, piv).numerator(), y = E.at(r, j).numerator();
        mpz_class g, s, t;
        mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
        mpz_class xg = x / g, yg = y / g;
        Scalar S(m.base, s), T(m.base, t), U(m.base, mpz_class(-yg)), W(m.base, xg);
        detail::col_op2(E, piv, j, S, T, U, W);
        detail::col_op2(V, piv, j, S, T, U, W);
      }
    } else {
      Scalar inv = E.at(r, piv).inverse();
      detail::col_scale(E, piv, inv);
      detail::col_scale(V, piv, inv);
      for (int j = piv + 1; j < m.cols; ++j) {
        if (E.at(r, j).is_zero()) continue;
        Scalar c0 = -E.at(r, j);
        detail::col_addmul(E, j, piv, c0);
        detail::col_addmul(V, j, piv, c0);
      }
    }
    detail::col_swap(E, c, piv);
    detail::col_swap(V, c, piv);
    ce.pivot_row[c] = r;
    ++c;
  }
  ce.rank = c;
  return ce;
}

inline int rank(const ExactMatrix& m) { return col_echelon(m).rank; }

/// One exact solution of m*x = rhs, or nullopt. Over Z this solves the
/// integral system, not merely the rational one.
inline std::optional<std::vector<Scalar>> solve_linear(const ExactMatrix& m,
                                                       const std::vector<Scalar>& rhs) {
  if (static_cast<int>(rhs.size()) != m.rows) throw std::invalid_argument("rhs length mismatch");
  ColEchelon ce = col_echelon(m);
  std::vector<Scalar> resid = rhs;
  std::vector<Scalar> y(m.cols, Scalar::zero(m.base));
  int col = 0;
  for (int r = 0; r < m.rows; ++r) {
    if (col < ce.rank && ce.pivot_row[col] == r) {
      const Scalar& p = ce.E.at(r, col);
      if (!p.divides(resid[r])) return std::nullopt;
      Scalar q = resid[r].divide(p);
      y[col] = q;
      if (!q.is_zero())
        for (int i = r; i < m.rows; ++i) resid[i] -= q * ce.E.at(i, col);
      ++col;
    } else if (!resid[r].is_zero()) {
      return std::nullopt;
    }
  }
  return ce.V.apply(y);
}

/// Columns generating {x : m*x = 0}; over Z they generate the kernel lattice.
inline std::vector<std::vector<Scalar>> kernel_basis(const ExactMatrix& m) {
  ColEchelon ce = col_echelon(m);
  std::vector<std::vector<Scalar>> ker;
  for (int j = ce.rank; j < m.cols; ++j) ker.push_back(ce.V.column(j));
  return ker;
}

/// Basis of the column span (over a field) or column lattice (over Z):
/// the nonzero columns of the column echelon form.
inline ExactMatrix column_basis(const ExactMatrix& m) {
  ColEchelon ce = col_echelon(m);
  ExactMatrix b(m.base, m.rows, ce.rank);
  for (int j = 0; j < ce.rank; ++j) b.set_column(j, ce.E.column(j));
  return b;
}

/// Smith normal form over Z: U*m*V diagonal with positive invariant
/// factors d_1 | d_2 | ... followed by zeros.
struct SmithForm {
  std::vector<mpz_class> factors;  // nonzero invariant factors, divisibility chain
  ExactMatrix U, V, D;
};

inline SmithForm smith_form(const ExactMatrix& m) {
  if (m.base.kind != BaseRing::Kind::Integers)
    throw std::invalid_argument("smith_form requires base Z");
  ExactMatrix A = m;
  ExactMatrix U = ExactMatrix::identity(m.base, m.rows);
  ExactMatrix V = ExactMatrix::identity(m.base, m.cols);
  const BaseRing Z = m.base;

  auto row_swap = [&](ExactMatrix& M, int i1, int i2) {
    if (i1 == i2) return;
    for (int j = 0; j < M.cols; ++j) std::swap(M.at(i1, j), M.at(i2, j));
  };
  auto row_addmul = [&](ExactMatrix& M, int idst, int isrc, const Scalar& c) {
    for (int j = 0; j < M.cols; ++j) M.at(idst, j) += c * M.at(isrc, j);
  };
  auto row_op2 = [&](ExactMatrix& M, int i1, int i2, const Scalar& s, const Scalar& t,
                     const Scalar& u, const Scalar& v) {
    for (int j = 0; j < M.cols; ++j) {
      Scalar x = M.at(i1, j), y = M.at(i2, j);
      M.at(i1, j) = s * x + t * y;
      M.at(i2, j) = u * x + v * y;
    }
  };

  int t = 0;
  const int tmax = std::min(m.rows, m.cols);
  while (t < tmax) {
    // find a nonzero entry in the remaining block
    int pi = -1, pj = -1;
    for (int i = t; i < m.rows && pi == -1; ++i)
      for (int j = t; j < m.cols; ++j)
        if (!A.at(i, j).is_zero()) { pi = i; pj = j; break; }
    if (pi == -1) break;
    row_swap(A, t, pi);
    row_swap(U, t, pi);
    detail::col_swap(A, t, pj);
    detail::col_swap(V, t, pj);
    bool clean = false;
    while (!clean) {
      if (A.at(t, t).numerator() < 0) {
        for (int j = 0; j < A.cols; ++j) A.at(t, j) = -A.at(t, j);
        for (int j = 0; j < U.cols; ++j) U.at(t, j) = -U.at(t, j);
      }
      // clear column t below the pivot
      for (int i = t + 1; i < m.rows; ++i) {
        if (A.at(i, t).is_zero()) continue;
        mpz_class x = A.at(t, t).numerator(), y = A.at(i, t).numerator();
        if (y % x == 0) {
          Scalar q(Z, mpz_class(-(y / x)));
          row_addmul(A, i, t, q);
          row_addmul(U, i, t, q);
        } else {
          mpz_class g, s, w;
          mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), w.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
          mpz_class xg = x / g, yg = y / g;
          Scalar S(Z, s), W(Z, w), Uc(Z, mpz_class(-yg)), X(Z, xg);
          row_op2(A, t, i, S, W, Uc, X);
          row_op2(U, t, i, S, W, Uc, X);
        }
      }
      // clear row t right of the pivot
      for (int j = t + 1; j < m.cols; ++j) {
        if (A.at(t, j).is_zero()) continue;
        mpz_class x = A.at(t, t).numerator(), y = A.at(t, j).numerator();
        if (y % x == 0) {
          Scalar q(Z, mpz_class(-(y / x)));
          detail::col_addmul(A, j, t, q);
          detail::col_addmul(V, j, t, q);
        } else {
          mpz_class g, s, w;
          mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), w.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
          mpz_class xg = x / g, yg = y / g;
          Scalar S(Z, s), W(Z, w), Uc(Z, mpz_class(-yg)), X(Z, xg);
          detail::col_op2(A, t, j, S, W, Uc, X);
          detail::col_op2(V, t, j, S, W, Uc, X);
        }
      }
      clean = true;
      for (int i = t + 1; i < m.rows; ++i)
        if (!A.at(i, t).is_zero()) clean = false;
    }
    ++t;
  }
  // sign-normalize the diagonal
  for (int i = 0; i < t; ++i) {
    if (A.at(i, i).numerator() < 0) {
      detail::col_scale(A, i, Scalar(Z, -1));
      detail::col_scale(V, i, Scalar(Z, -1));
    }
  }
  // move zero diagonal entries to the back
  {
    int keep = 0;
    for (int i = 0; i < t; ++i) {
      if (A.at(i, i).is_zero()) continue;
      if (keep != i) {
        row_swap(A, keep, i);
        row_swap(U, keep, i);
        detail::col_swap(A, keep, i);
        detail::col_swap(V, keep, i);
      }
      ++keep;
    }
    t = keep;
  }
  // enforce the divisibility chain: replace diag(a,b) by diag(gcd, lcm)
  // via the unimodular pair P = [[s,w],[-b/g,a/g]], Q = [[1,-wb/g],[1,sa/g]]
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i + 1 < t; ++i) {
      mpz_class a0 = A.at(i, i).numerator(), b0 = A.at(i + 1, i + 1).numerator();
      if (b0 % a0 == 0) continue;
      changed = true;
      mpz_class g, s, w;
      mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), w.get_mpz_t(), a0.get_mpz_t(), b0.get_mpz_t());
      mpz_class l = a0 / g * b0;
      row_op2(U, i, i + 1, Scalar(Z, s), Scalar(Z, w), Scalar(Z, mpz_class(-b0 / g)),
              Scalar(Z, mpz_class(a0 / g)));
      // V <- V * Q: new col_i = col_i + col_j, new col_j = -(wb/g) col_i + (sa/g) col_j
      for (int r = 0; r < V.rows; ++r) {
        Scalar x = V.at(r, i), y = V.at(r, i + 1);
        V.at(r, i) = x + y;
        V.at(r, i + 1) = Scalar(Z, mpz_class(-w * b0 / g)) * x + Scalar(Z, mpz_class(s * a0 / g)) * y;
      }
      A.at(i, i) = Scalar(Z, g);
      A.at(i + 1, i + 1) = Scalar(Z, l);
    }
  }
  SmithForm sf;
  sf.U = U;
  sf.V = V;
  sf.D = A;
  for (int i = 0; i < t; ++i)
    if (!A.at(i, i).is_zero()) sf.factors.push_back(A.at(i, i).numerator());
  return sf;
}

/// Isomorphism type of a finitely generated module over the base:
/// free rank plus invariant factors > 1 (over a field, torsion is empty).
struct GroupInvariants {
  long rank = 0;
  std::vector<mpz_class> torsion;

  bool is_zero() const { return rank == 0 && torsion.empty(); }
  bool operator==(const GroupInvariants&) const = default;

  std::string str() const {
    std::string s = "rank " + std::to_string(rank);
    if (!torsion.empty()) {
      s += ", torsion [";
      for (std::size_t i = 0; i < torsion.size(); ++i)
        s += (i ? "," : "") + torsion[i].get_str();
      s += "]";
    }
    return s;
  }
};

/// Invariants of base^ambient / (column span of rels).
inline GroupInvariants coker_invariants(int ambient, const ExactMatrix& rels) {
  GroupInvariants g;
  if (rels.base.kind == BaseRing::Kind::Integers) {
    SmithForm sf = smith_form(rels);
    g.rank = ambient - static_cast<long>(sf.factors.size());
    for (const auto& d : sf.factors)
      if (d != 1) g.torsion.push_back(d);
  } else {
    g.rank = ambient - rank(rels);
  }
  return g;
}

/// Invariants of L1/L2 where L1, L2 are generated by the columns of S and B
/// and L2 is contained in L1 (checked).
inline GroupInvariants subquotient_invariants(const ExactMatrix& S, const ExactMatrix& B) {
  if (S.base.kind != BaseRing::Kind::Integers) {
    GroupInvariants g;
    int rs = rank(S);
    if (rank(S.hstack(B)) != rs) throw std::invalid_argument("subquotient: L2 not contained in L1");
    g.rank = rs - rank(B);
    return g;
  }
  ExactMatrix C = column_basis(S);
  ExactMatrix X(S.base, C.cols, B.cols);
  for (int j = 0; j < B.cols; ++j) {
    auto sol = solve_linear(C, B.column(j));
    if (!sol) throw std::invalid_argument("subquotient: L2 not contained in L1");
    X.set_column(j, *sol);
  }
  return coker_invariants(C.cols, X);
}

/// Generators of the preimage {x : beta*x lies in the column span of relR}.
inline ExactMatrix preimage_generators(const ExactMatrix& beta, const ExactMatrix& relR) {
  ExactMatrix block = beta.hstack(relR);
  auto ker = kernel_basis(block);
  ExactMatrix out(beta.base, beta.cols, static_cast<int>(ker.size()));
  for (int j = 0; j < out.cols; ++j)
    for (int i = 0; i < beta.cols; ++i) out.at(i, j) = ker[static_cast<std::size_t>(j)][i];
  return out;
}

/// Homology ker(beta-bar)/im(alpha-bar) of P -> Q -> R at Q, where each
/// object is the ambient space modulo the span of its relation columns and
/// beta∘alpha vanishes on the quotients.
inline GroupInvariants homology_invariants(const ExactMatrix& alpha, const ExactMatrix& beta,
                                           const ExactMatrix& relQ, const ExactMatrix& relR) {
  ExactMatrix L1 = preimage_generators(beta, relR).hstack(relQ);
  ExactMatrix L2 = alpha.hstack(relQ);
  return subquotient_invariants(L1, L2);
}

/// Cokernel of the induced map P/relP -> Q/relQ given by alpha on ambients.
inline GroupInvariants induced_coker(const ExactMatrix& alpha, const ExactMatrix& relQ) {
  return coker_invariants(alpha.rows, alpha.hstack(relQ));
}

/// Kernel of the induced map P/relP -> Q/relQ given by alpha on ambients.
inline GroupInvariants induced_kernel(const ExactMatrix& alpha, const ExactMatrix& relP,
                                      const ExactMatrix& relQ) {
  ExactMatrix L1 = preimage_generators(alpha, relQ);
  return subquotient_invariants(L1.hstack(relP), relP);
}

}  // namespace dirac
