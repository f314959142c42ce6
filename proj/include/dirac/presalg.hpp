#pragma once

#include "dirac/freealg.hpp"

namespace dirac {

/// Homogeneous ideal in a free Dirac algebra, given by generators.
struct HomogeneousIdeal {
  FreeAlgPtr ambient;
  std::vector<Element> gens;

  HomogeneousIdeal() = default;
  HomogeneousIdeal(FreeAlgPtr amb, std::vector<Element> gs)
      : ambient(std::move(amb)), gens(std::move(gs)) {
    for (const auto& g : gens) {
      if (!same_algebra(g.algebra(), ambient))
        throw std::invalid_argument("ideal generator lives in a different algebra");
      auto h = g.homogeneity();
      if (h.kind != Homogeneity::Kind::Homogeneous)
        throw std::invalid_argument("ideal generators must be homogeneous and nonzero");
    }
  }
};

/// Finitely presented Dirac algebra: a free algebra modulo a homogeneous ideal.
struct PresentedAlgebra {
  FreeAlgPtr free;
  HomogeneousIdeal relations;

  PresentedAlgebra(FreeAlgPtr f, HomogeneousIdeal rel)
      : free(std::move(f)), relations(std::move(rel)) {
    if (relations.ambient == nullptr) relations.ambient = free;
    if (!same_algebra(relations.ambient, free))
      throw std::invalid_argument("relations live in a different free algebra");
  }

  const BaseRing& base() const { return free->base; }
  bool degreewise_finite() const { return free->degreewise_finite(); }

  bool operator==(const PresentedAlgebra& o) const {
    if (!same_algebra(free, o.free)) return false;
    if (relations.gens.size() != o.relations.gens.size()) return false;
    for (std::size_t i = 0; i < relations.gens.size(); ++i)
      if (!(relations.gens[i] == o.relations.gens[i])) return false;
    return true;
  }
};

using AlgPtr = std::shared_ptr<const PresentedAlgebra>;

inline AlgPtr make_presented(FreeAlgPtr free, std::vector<Element> relations) {
  HomogeneousIdeal ideal(free, std::move(relations));
  return std::make_shared<const PresentedAlgebra>(std::move(free), std::move(ideal));
}

inline AlgPtr make_free_presented(BaseRing base, GradedSet gens) {
  auto f = make_free_algebra(base, std::move(gens));
  return make_presented(f, {});
}

inline void require_degreewise_finite(const PresentedAlgebra& alg) {
  if (!alg.degreewise_finite())
    throw std::domain_error("operation requires a degreewise finite algebra");
}

/// Exact coordinates for one graded piece: the surviving monomial basis of
/// the free algebra in that degree plus the relation columns cutting out the
/// quotient (ideal multiples, and 2-torsion columns over Z).
struct PieceCoords {
  BaseRing base;
  Degree degree = 0;
  std::vector<Monomial> monos;
  std::vector<int> torsion2;  // indices of odd-square monomials (Z only)
  ExactMatrix rels;

  int dim_ambient() const { return static_cast<int>(monos.size()); }

  int index_of(const Monomial& m) const {
    auto it = std::lower_bound(monos.begin(), monos.end(), m);
    if (it == monos.end() || *it != m) return -1;
    return static_cast<int>(it - monos.begin());
  }

  std::vector<Scalar> vec_of(const Element& e) const {
    std::vector<Scalar> v(monos.size(), Scalar::zero(base));
    for (const auto& [m, c] : e.terms()) {
      int i = index_of(m);
      if (i < 0) throw std::invalid_argument("element does not lie in this graded piece");
      v[static_cast<std::size_t>(i)] = c;
    }
    return v;
  }

  Element element_of(const FreeAlgPtr& alg, const std::vector<Scalar>& v) const {
    Element e = Element::zero(alg);
    for (std::size_t i = 0; i < monos.size(); ++i)
      if (!v[i].is_zero()) e = e + Element::monomial(alg, monos[i], v[i]);
    return e;
  }
};

inline PieceCoords piece_coords(const PresentedAlgebra& alg, Degree d) {
  require_degreewise_finite(alg);
  const BaseRing& b = alg.base();
  PieceCoords pc{b, d, {}, {}, ExactMatrix(b, 0, 0)};
  const bool drop_odd_squares =
      b.kind == BaseRing::Kind::Rationals ||
      (b.kind == BaseRing::Kind::PrimeField && b.p != 2);
  for (auto& m : monomials_of_degree(*alg.free, d)) {
    if (alg.free->has_odd_square(m)) {
      if (drop_odd_squares) continue;
      if (b.kind == BaseRing::Kind::Integers)
        pc.torsion2.push_back(static_cast<int>(pc.monos.size()));
    }
    pc.monos.push_back(std::move(m));
  }
  std::vector<std::vector<Scalar>> cols;
  for (const auto& f : alg.relations.gens) {
    Degree e = f.homogeneity().degree;
    for (const auto& m : monomials_of_degree(*alg.free, d - e)) {
      Element mf = Element::monomial(alg.free, m, Scalar::one(b)) * f;
      if (!mf.is_zero()) cols.push_back(pc.vec_of(mf));
    }
  }
  for (int i : pc.torsion2) {
    std::vector<Scalar> c(pc.monos.size(), Scalar::zero(b));
    c[static_cast<std::size_t>(i)] = Scalar(b, 2);
    cols.push_back(std::move(c));
  }
  pc.rels = ExactMatrix::from_columns(b, pc.dim_ambient(), cols);
  return pc;
}

/// Presentation of the degree-d piece as a base-ring module, plus (over a
/// field) a monomial basis of a complement of the relation span.
struct AlgebraPiece {
  GroupInvariants inv;
  std::vector<Monomial> complement;  // field case only
  PieceCoords coords;
};

inline AlgebraPiece graded_piece_basis(const PresentedAlgebra& alg, Degree d) {
  PieceCoords pc = piece_coords(alg, d);
  AlgebraPiece out{coker_invariants(pc.dim_ambient(), pc.rels), {}, pc};
  if (alg.base().is_field()) {
    ColEchelon ce = col_echelon(pc.rels);
    std::vector<bool> pivot(pc.monos.size(), false);
    for (int j = 0; j < ce.rank; ++j) pivot[static_cast<std::size_t>(ce.pivot_row[j])] = true;
    for (std::size_t i = 0; i < pc.monos.size(); ++i)
      if (!pivot[i]) out.complement.push_back(pc.monos[i]);
  }
  return out;
}

/// Membership certificate: coefficients m_j with f = sum m_j * f_j.
struct MembershipCertificate {
  std::vector<Element> coefficients;  // one per relation generator
};

inline std::optional<MembershipCertificate> ideal_membership(const Element& f,
                                                             const PresentedAlgebra& alg) {
  require_degreewise_finite(alg);
  if (!same_algebra(f.algebra(), alg.free))
    throw std::invalid_argument("element lives in a different algebra");
  auto h = f.homogeneity();
  if (h.kind == Homogeneity::Kind::Inhomogeneous)
    throw std::invalid_argument("ideal_membership requires a homogeneous element");
  const BaseRing& b = alg.base();
  if (h.kind == Homogeneity::Kind::Zero) {
    MembershipCertificate cert;
    cert.coefficients.assign(alg.relations.gens.size(), Element::zero(alg.free));
    return cert;
  }
  const Degree d = h.degree;
  PieceCoords pc = piece_coords(alg, d);
  // columns: per (relation j, monomial m) the vector of m*f_j, then torsion
  struct ColTag { int rel; Monomial mono; };
  std::vector<ColTag> tags;
  std::vector<std::vector<Scalar>> cols;
  for (std::size_t j = 0; j < alg.relations.gens.size(); ++j) {
    const Element& fj = alg.relations.gens[j];
    Degree e = fj.homogeneity().degree;
    for (const auto& m : monomials_of_degree(*alg.free, d - e)) {
      Element mf = Element::monomial(alg.free, m, Scalar::one(b)) * fj;
      cols.push_back(pc.vec_of(mf));
      tags.push_back({static_cast<int>(j), m});
    }
  }
  const int ncert = static_cast<int>(cols.size());
  for (int i : pc.torsion2) {
    std::vector<Scalar> c(pc.monos.size(), Scalar::zero(b));
    c[static_cast<std::size_t>(i)] = Scalar(b, 2);
    cols.push_back(std::move(c));
  }
  ExactMatrix m = ExactMatrix::from_columns(b, pc.dim_ambient(), cols);
  auto sol = solve_linear(m, pc.vec_of(f));
  if (!sol) return std::nullopt;
  MembershipCertificate cert;
  cert.coefficients.assign(alg.relations.gens.size(), Element::zero(alg.free));
  for (int c = 0; c < ncert; ++c) {
    const Scalar& s = (*sol)[static_cast<std::size_t>(c)];
    if (s.is_zero()) continue;
    cert.coefficients[static_cast<std::size_t>(tags[c].rel)] =
        cert.coefficients[static_cast<std::size_t>(tags[c].rel)] +
        Element::monomial(alg.free, tags[c].mono, s);
  }
  return cert;
}

/// Re-expand a certificate; soundness check for membership results.
inline Element expand_certificate(const MembershipCertificate& cert,
                                  const PresentedAlgebra& alg) {
  Element r = Element::zero(alg.free);
  for (std::size_t j = 0; j < alg.relations.gens.size(); ++j)
    r = r + cert.coefficients[j] * alg.relations.gens[j];
  return r;
}

inline bool is_zero_in(const Element& f, const PresentedAlgebra& alg) {
  if (f.is_zero()) return true;
  for (Degree d : f.degrees_present()) {
    if (!ideal_membership(f.component(d), alg)) return false;
  }
  return true;
}

inline bool elements_equal(const Element& f, const Element& g, const PresentedAlgebra& alg) {
  return is_zero_in(f - g, alg);
}

/// Matrix of left multiplication by a homogeneous element from the degree-d
/// piece to the piece in degree d + deg(a), in monomial coordinates.
inline ExactMatrix multiplication_matrix(const PresentedAlgebra& alg, const Element& a,
                                         const PieceCoords& from, const PieceCoords& to) {
  ExactMatrix m(alg.base(), to.dim_ambient(), from.dim_ambient());
  for (int j = 0; j < from.dim_ambient(); ++j) {
    Element am = a * Element::monomial(alg.free, from.monos[static_cast<std::size_t>(j)],
                                       Scalar::one(alg.base()));
    m.set_column(j, to.vec_of(am));
  }
  return m;
}

}  // namespace dirac
