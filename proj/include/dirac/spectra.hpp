#pragma once

#include <map>
#include <set>

#include "dirac/calculus.hpp"

namespace dirac {

/// Laurent algebra k0[t^{+-1}], kept as a dedicated value kind: adjoining a
/// formal inverse would break one-sign grading and degreewise finiteness.
struct LaurentRing {
  BaseRing k0;
  std::string name;
  Degree degree;
};

inline LaurentRing make_laurent(BaseRing k0, std::string name, Degree d) {
  if (!k0.is_field()) throw std::invalid_argument("laurent ring: field coefficients required");
  if (d == 0) throw std::invalid_argument("laurent ring: generator degree must be nonzero");
  if (k0.characteristic() != 2 && is_odd(d))
    throw std::invalid_argument("laurent ring: odd generator degree needs characteristic 2");
  return {k0, std::move(name), d};
}

/// A graded field: every nonzero homogeneous element invertible. Either a
/// plain field concentrated in degree zero, or k0[t^{+-1}] on one unit
/// generator of minimal nonzero degree.
struct DiracField {
  BaseRing k0;
  long ext_degree = 1;  // dimension of the degree-zero part over k0
  std::optional<GradedSet::Entry> generator;
};

struct ClassifyResult {
  std::optional<DiracField> field;
  std::string witness;  // a nonzero homogeneous non-unit, when rejected
};

inline ClassifyResult classify_dirac_field(const LaurentRing& L) {
  return {DiracField{L.k0, 1, GradedSet::Entry{L.name, L.degree}}, ""};
}

inline ClassifyResult classify_dirac_field(const PresentedAlgebra& alg) {
  for (std::size_t i = 0; i < alg.free->ngens(); ++i) {
    Element g = Element::generator(alg.free, i);
    if (!is_zero_in(g, alg))
      return {std::nullopt, g.str() + " is a nonzero homogeneous non-unit"};
  }
  if (!alg.base().is_field()) return {std::nullopt, "2 is a nonzero homogeneous non-unit"};
  return {DiracField{alg.base(), 1, std::nullopt}, ""};
}

inline Element elem_pow(const Element& a, long k) {
  Element r = Element::one(a.algebra());
  for (long i = 0; i < k; ++i) r = r * a;
  return r;
}

namespace detail {

inline ExactMatrix mat_compose(const ExactMatrix& a, const ExactMatrix& b) {
  if (a.cols != b.rows) throw std::invalid_argument("matrix composition shape mismatch");
  std::vector<std::vector<Scalar>> cols;
  for (int j = 0; j < b.cols; ++j) cols.push_back(a.apply(b.column(j)));
  return ExactMatrix::from_columns(a.base, a.rows, cols);
}

inline bool in_span(const ExactMatrix& cols, const std::vector<Scalar>& v) {
  return solve_linear(cols, v).has_value();
}

inline bool span_contained(const ExactMatrix& sub, const ExactMatrix& big) {
  for (int j = 0; j < sub.cols; ++j)
    if (!in_span(big, sub.column(j))) return false;
  return true;
}

/// Columns spanning (im A) intersected with (im B).
inline ExactMatrix intersect_spans(const ExactMatrix& a, const ExactMatrix& b) {
  auto ker = kernel_basis(a.hstack(b));
  std::vector<std::vector<Scalar>> cols;
  for (const auto& k : ker) {
    std::vector<Scalar> x(k.begin(), k.begin() + a.cols);
    cols.push_back(a.apply(x));
  }
  return ExactMatrix::from_columns(a.base, a.rows, cols);
}

/// Left multiplication by f^k as a matrix from the given piece; returns the
/// matrix together with the target piece coordinates.
inline std::pair<ExactMatrix, PieceCoords> power_matrix(const PresentedAlgebra& alg,
                                                        const Element& f, long k,
                                                        const PieceCoords& from) {
  Degree e = f.homogeneity().degree;
  ExactMatrix m = ExactMatrix::identity(alg.base(), from.dim_ambient());
  PieceCoords cur = from;
  for (long i = 0; i < k; ++i) {
    PieceCoords nxt = piece_coords(alg, cur.degree + e);
    m = mat_compose(multiplication_matrix(alg, f, cur, nxt), m);
    cur = nxt;
  }
  return {std::move(m), std::move(cur)};
}

/// The stabilized annihilator of multiplication by powers of f on the
/// degree-d piece: K with ker(f^K) = ker(f^{K+1}) and columns spanning that
/// kernel (relation columns included). The chain lives in one finitely
/// generated piece, so it stabilizes.
struct StableAnnihilator {
  int K = 0;
  ExactMatrix span;  // columns in the ambient of the degree-d piece
  PieceCoords pc;
};

inline StableAnnihilator stable_annihilator(const PresentedAlgebra& alg, const Element& f,
                                            Degree d) {
  PieceCoords pc0 = piece_coords(alg, d);
  const BaseRing& b = alg.base();
  if (f.is_zero() || is_zero_in(f, alg))
    return {0, ExactMatrix::identity(b, pc0.dim_ambient()), pc0};
  Degree e = f.homogeneity().degree;
  ExactMatrix comp = ExactMatrix::identity(b, pc0.dim_ambient());
  PieceCoords cur = pc0;
  ExactMatrix prev = pc0.rels;
  // One step without growth is not conclusive: multiplication shifts degrees,
  // so a kernel can stay flat and then jump (over Z[t] with t odd, ker(t) = 0
  // but ker(t^2) catches 2). Demand a flat band before declaring stability.
  int last_growth = 0;
  for (int k = 1; k <= 64; ++k) {
    PieceCoords nxt = piece_coords(alg, cur.degree + e);
    comp = mat_compose(multiplication_matrix(alg, f, cur, nxt), comp);
    cur = nxt;
    ExactMatrix s = preimage_generators(comp, cur.rels).hstack(pc0.rels);
    if (!span_contained(s, prev)) {
      last_growth = k;
      prev = std::move(s);
    } else if (k - last_growth >= 8) {
      return {last_growth, std::move(prev), std::move(pc0)};
    }
  }
  throw std::runtime_error("multiplication kernels did not stabilize");
}

/// Some power of f annihilates the homogeneous element a (in the quotient).
inline bool annihilates_eventually(const PresentedAlgebra& alg, const Element& f,
                                   const Element& a) {
  if (a.is_zero()) return true;
  Degree d = a.homogeneity().degree;
  auto st = stable_annihilator(alg, f, d);
  return in_span(st.span.hstack(st.pc.rels), st.pc.vec_of(a));
}

}  // namespace detail

/// Handle for the localization A_f with S = {1, f, f^2, ...}.
struct LocalizedAlgebra {
  AlgPtr base;
  Element f;
  Degree fdeg;
};

inline LocalizedAlgebra localize(AlgPtr alg, Element f) {
  if (!same_algebra(f.algebra(), alg->free))
    throw std::invalid_argument("localize: element of a different algebra");
  auto h = f.homogeneity();
  if (h.kind != Homogeneity::Kind::Homogeneous)
    throw std::invalid_argument("localize: homogeneous element required");
  return {std::move(alg), std::move(f), h.degree};
}

/// A fraction num / f^power in a localization handle.
struct Fraction {
  Element num;
  long power = 0;
};

inline Fraction frac_of(Element a) { return {std::move(a), 0}; }

inline Fraction frac_add(const LocalizedAlgebra& L, const Fraction& x, const Fraction& y) {
  long m = std::max(x.power, y.power);
  return {x.num * elem_pow(L.f, m - x.power) + y.num * elem_pow(L.f, m - y.power), m};
}

inline Fraction frac_mul(const LocalizedAlgebra& L, const Fraction& x, const Fraction& y) {
  // (a f^{-p})(b f^{-q}): moving f^{-p} past b picks up the Koszul sign
  Element prod = x.num * y.num;
  auto hy = y.num.homogeneity();
  if (hy.kind == Homogeneity::Kind::Homogeneous &&
      koszul_sign(x.power * L.fdeg, hy.degree) < 0)
    prod = -prod;
  return {std::move(prod), x.power + y.power};
}

/// x = y iff f^k (x.num f^{y.power} - y.num f^{x.power}) vanishes for some k;
/// decided through the stabilized multiplication kernels degreewise.
inline bool fraction_equal(const LocalizedAlgebra& L, const Fraction& x, const Fraction& y) {
  long m = std::max(x.power, y.power);
  Element d = x.num * elem_pow(L.f, m - x.power) - y.num * elem_pow(L.f, m - y.power);
  if (d.is_zero()) return true;
  for (Degree e : d.degrees_present())
    if (!detail::annihilates_eventually(*L.base, L.f, d.component(e))) return false;
  return true;
}

/// A point of a graded spectrum, named by ideal generators.
struct SpecPoint {
  std::vector<Element> generators;
};

struct SpecSpace {
  std::vector<SpecPoint> points;
  std::vector<std::pair<int, int>> specializations;  // (i, j) iff p_i contained in p_j
  std::vector<std::pair<std::string, std::vector<int>>> opens;  // f -> {p : f not in p}
};

namespace detail {

/// Support of a finite graded ring presented over F_p: the degrees with
/// nonzero pieces, found by scanning until a window as wide as the largest
/// generator degree stays empty.
inline std::vector<Degree> finite_support(const PresentedAlgebra& alg, bool even_only) {
  if (alg.base().characteristic() == 0)
    throw std::domain_error("finite spectrum: coefficients must be a finite field");
  require_degreewise_finite(alg);
  long window = 1;
  for (std::size_t i = 0; i < alg.free->ngens(); ++i)
    window = std::max<long long>(window, std::llabs(alg.free->gen_degree(i)));
  auto shape = grading_shape(*alg.free);
  std::vector<Degree> support;
  long zeros = 0;
  for (long k = 0; k <= 256; ++k) {
    Degree d = shape.sign >= 0 ? k : -k;
    if (!graded_piece_basis(alg, d).inv.is_zero()) {
      if (!even_only || !is_odd(d)) support.push_back(d);
      zeros = 0;
    } else if (++zeros > window) {
      return support;
    }
  }
  throw std::domain_error("finite spectrum: ring does not appear to be finite");
}

/// All homogeneous elements of one piece, one per residue class.
inline std::vector<Element> piece_elements(const PresentedAlgebra& alg, Degree d) {
  auto p = graded_piece_basis(alg, d);
  unsigned long q = alg.base().characteristic();
  std::size_t n = p.complement.size();
  std::vector<Element> out;
  std::vector<unsigned long> c(n, 0);
  while (true) {
    Element e = Element::zero(alg.free);
    for (std::size_t i = 0; i < n; ++i)
      if (c[i])
        e = e + Element::monomial(alg.free, p.complement[i],
                                  Scalar(alg.base(), static_cast<long>(c[i])));
    out.push_back(e);
    std::size_t i = 0;
    for (; i < n; ++i) {
      if (++c[i] < q) break;
      c[i] = 0;
    }
    if (i == n) break;
  }
  return out;
}

struct BrutePoint {
  std::vector<Element> gens;  // smallest generating subset found
  AlgPtr quotient;            // A modulo the ideal: membership = is_zero_in
};

inline bool in_brute_ideal(const Element& f, const BrutePoint& p) {
  return is_zero_in(f, *p.quotient);
}

}  // namespace detail

/// Brute-force graded spectrum of a finite ring: all ideals generated by
/// subsets of the homogeneous monomial spanning set, filtered by the
/// homogeneous-pair primality test. With `even_only`, the spectrum of the
/// even subring (same pieces in even degrees, even multiplications only).
inline SpecSpace spec_finite(const AlgPtr& alg, bool even_only = false) {
  auto support = detail::finite_support(*alg, even_only);
  std::vector<Element> spanning;
  for (Degree d : support) {
    if (d == 0) continue;  // degree-zero nonzero classes are units
    auto p = graded_piece_basis(*alg, d);
    for (const auto& m : p.complement)
      spanning.push_back(Element::monomial(alg->free, m, Scalar::one(alg->base())));
  }
  if (spanning.size() > 14)
    throw std::domain_error("finite spectrum: spanning set too large for brute force");

  // homogeneous elements per degree, for the primality test
  std::map<Degree, std::vector<Element>> homog;
  for (Degree d : support) homog[d] = detail::piece_elements(*alg, d);

  std::vector<detail::BrutePoint> points;
  for (std::size_t mask = 0; mask < (std::size_t{1} << spanning.size()); ++mask) {
    std::vector<Element> gens;
    for (std::size_t i = 0; i < spanning.size(); ++i)
      if (mask & (std::size_t{1} << i)) gens.push_back(spanning[i]);
    std::vector<Element> rels = alg->relations.gens;
    for (const auto& g : gens) rels.push_back(g);
    detail::BrutePoint cand{gens, make_presented(alg->free, std::move(rels))};
    // proper: the class of 1 survives
    if (is_zero_in(Element::one(alg->free), *cand.quotient)) continue;
    // primality on all homogeneous pairs outside the ideal
    bool prime = true;
    for (auto it1 = homog.begin(); prime && it1 != homog.end(); ++it1) {
      if (even_only && is_odd(it1->first)) continue;
      for (const auto& f : it1->second) {
        if (f.is_zero() || detail::in_brute_ideal(f, cand)) continue;
        for (auto it2 = homog.begin(); prime && it2 != homog.end(); ++it2) {
          if (even_only && is_odd(it2->first)) continue;
          for (const auto& g : it2->second) {
            if (g.is_zero() || detail::in_brute_ideal(g, cand)) continue;
            if (detail::in_brute_ideal(f * g, cand)) {
              prime = false;
              break;
            }
          }
        }
        if (!prime) break;
      }
    }
    if (!prime) continue;
    // deduplicate: same ideal iff mutual containment of generators
    bool dup = false;
    for (auto& p : points) {
      bool sub = true, sup = true;
      for (const auto& g : cand.gens) sub = sub && detail::in_brute_ideal(g, p);
      for (const auto& g : p.gens) sup = sup && detail::in_brute_ideal(g, cand);
      if (sub && sup) {
        dup = true;
        if (cand.gens.size() < p.gens.size()) p = cand;
        break;
      }
    }
    if (!dup) points.push_back(std::move(cand));
  }

  auto render = [](const detail::BrutePoint& p) {
    std::string s;
    for (const auto& g : p.gens) s += g.str() + ";";
    return s;
  };
  std::sort(points.begin(), points.end(),
            [&](const detail::BrutePoint& a, const detail::BrutePoint& b) {
              return render(a) < render(b);
            });

  SpecSpace out;
  for (const auto& p : points) out.points.push_back({p.gens});
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (i == j) continue;
      bool sub = true;
      for (const auto& g : points[i].gens) sub = sub && detail::in_brute_ideal(g, points[j]);
      if (sub) out.specializations.emplace_back(static_cast<int>(i), static_cast<int>(j));
    }
  for (const auto& f : spanning) {
    std::vector<int> ids;
    for (std::size_t i = 0; i < points.size(); ++i)
      if (!detail::in_brute_ideal(f, points[i])) ids.push_back(static_cast<int>(i));
    out.opens.emplace_back(f.str(), std::move(ids));
  }
  return out;
}

/// Symbolic spectra for the catalogued classes.
inline SpecSpace spec_special(const DiracField&) { return {{SpecPoint{}}, {}, {}}; }

inline SpecSpace spec_special(const LaurentRing&) { return {{SpecPoint{}}, {}, {}}; }

inline SpecSpace spec_special(const AlgPtr& alg) {
  if (alg->free->ngens() == 0 && alg->base().is_field() && alg->relations.gens.empty())
    return {{SpecPoint{}}, {}, {}};
  if (alg->free->ngens() == 1 && alg->relations.gens.empty() && alg->base().is_field()) {
    Degree d = alg->free->gen_degree(0);
    bool ok = d != 0 && (alg->base().characteristic() == 2 || !is_odd(d));
    if (ok) {
      // Sierpinski space: generic point (0) open, closed point (t)
      Element t = Element::generator(alg->free, 0);
      SpecSpace s;
      s.points.push_back(SpecPoint{});       // id 0: the zero ideal
      s.points.push_back(SpecPoint{{t}});    // id 1: (t)
      s.specializations.emplace_back(0, 1);
      s.opens.emplace_back(t.str(), std::vector<int>{0});
      return s;
    }
  }
  throw std::domain_error("spec_special: algebra outside the symbolic catalogue");
}

/// Residue field at a point given by ideal generators. Supported: the zero
/// ideal of a field or of a free line (giving the Laurent field), and points
/// whose quotient is a finite field in degree zero.
inline DiracField residue_field(const AlgPtr& alg, const std::vector<Element>& prime_gens) {
  bool zero_ideal = true;
  for (const auto& g : prime_gens) zero_ideal = zero_ideal && is_zero_in(g, *alg);
  if (zero_ideal) {
    if (alg->free->ngens() == 0 && alg->base().is_field() && alg->relations.gens.empty())
      return {alg->base(), 1, std::nullopt};
    if (alg->free->ngens() == 1 && alg->relations.gens.empty() && alg->base().is_field()) {
      const auto& e = alg->free->generators.entries[0];
      return {alg->base(), 1, e};  // localization at (0) inverts the generator
    }
    throw std::domain_error("residue_field: zero ideal outside the catalogue");
  }
  std::vector<Element> rels = alg->relations.gens;
  for (const auto& g : prime_gens) rels.push_back(g);
  auto q = make_presented(alg->free, std::move(rels));
  if (!alg->base().is_field())
    throw std::domain_error("residue_field: field coefficients required at closed points");
  long window = 1;
  for (std::size_t i = 0; i < q->free->ngens(); ++i)
    window = std::max<long long>(window, std::llabs(q->free->gen_degree(i)));
  auto shape = detail::grading_shape(*q->free);
  bool only_zero = true;
  long zeros = 0;
  for (long k = 1; k <= 256 && zeros <= window; ++k) {
    Degree d = shape.sign >= 0 ? k : -k;
    if (graded_piece_basis(*q, d).inv.is_zero())
      ++zeros;
    else {
      only_zero = false;
      break;
    }
  }
  if (only_zero) {
    auto p0 = graded_piece_basis(*q, 0);
    if (p0.inv.rank >= 1) return {alg->base(), p0.inv.rank, std::nullopt};
  }
  throw std::domain_error("residue_field: quotient is not a catalogued Dirac field");
}

struct FiberResult {
  enum class Kind { Finite, Infinite, Undecided } kind;
  long dim = 0;
  std::string witness;
  int bound = 0;
};

/// Quasi-finiteness of the fiber of phi over a point of the source. Supported
/// fibers: the identity, and targets of maps out of a trivially graded field
/// at its unique point.
inline FiberResult quasi_finite_fiber(const AlgebraMap& phi, const SpecPoint& p, int bound) {
  if (is_identity(phi)) return {FiberResult::Kind::Finite, 1, "identity fiber", bound};
  if (!p.generators.empty())
    throw std::domain_error("quasi_finite_fiber: point outside the supported class");
  if (phi.source->free->ngens() != 0 || !phi.source->base().is_field())
    throw std::domain_error("quasi_finite_fiber: source outside the supported class");
  const auto& B = phi.target;
  if (B->relations.gens.empty())
    for (std::size_t i = 0; i < B->free->ngens(); ++i) {
      Degree d = B->free->gen_degree(i);
      if (B->base().characteristic() == 2 || !is_odd(d))
        return {FiberResult::Kind::Infinite, 0,
                "free generator " + B->free->generators.entries[i].name +
                    " has independent powers in every multiple of its degree",
                bound};
    }
  long window = 1;
  for (std::size_t i = 0; i < B->free->ngens(); ++i)
    window = std::max<long long>(window, std::llabs(B->free->gen_degree(i)));
  auto shape = detail::grading_shape(*B->free);
  long total = 0, zeros = 0;
  for (int k = 0; k <= bound; ++k) {
    Degree d = shape.sign >= 0 ? k : -k;
    auto inv = graded_piece_basis(*B, d).inv;
    if (!inv.is_zero()) {
      total += inv.rank + static_cast<long>(inv.torsion.size());
      zeros = 0;
    } else if (++zeros > window) {
      return {FiberResult::Kind::Finite, total, "pieces vanish beyond the window", bound};
    }
  }
  return {FiberResult::Kind::Undecided, total, "pieces still alive at the bound", bound};
}

/// Monic certificate y^n + a_{n-1} y^{n-1} + ... + a_0 = 0 with homogeneous
/// coefficients in the subalgebra generated by the given elements.
struct MonicCertificate {
  long n;
  std::vector<Element> coeffs;  // coeffs[i] multiplies y^i
};

inline std::optional<MonicCertificate> integral_certificate(
    const AlgPtr& alg, const Element& y, const std::vector<Element>& subalgebra_gens,
    long bound) {
  auto h = y.homogeneity();
  if (h.kind != Homogeneity::Kind::Homogeneous || h.degree == 0)
    throw std::invalid_argument("integral_certificate: nonzero homogeneous element required");
  Degree dy = h.degree;
  std::vector<Degree> gdeg;
  for (const auto& g : subalgebra_gens) {
    auto hg = g.homogeneity();
    if (hg.kind != Homogeneity::Kind::Homogeneous || hg.degree == 0)
      throw std::invalid_argument("integral_certificate: subalgebra generators must be "
                                  "homogeneous of nonzero degree");
    gdeg.push_back(hg.degree);
  }
  const BaseRing& b = alg->base();
  // monic products of the subalgebra generators in one degree
  std::function<void(std::size_t, Degree, const Element&, std::vector<Element>&)> rec =
      [&](std::size_t idx, Degree remaining, const Element& acc, std::vector<Element>& out) {
        if (remaining == 0) {
          if (!acc.is_zero()) out.push_back(acc);
          return;
        }
        if (idx == subalgebra_gens.size()) return;
        rec(idx + 1, remaining, acc, out);
        if (((remaining < 0) == (gdeg[idx] < 0)) &&
            std::llabs(gdeg[idx]) <= std::llabs(remaining))
          rec(idx, remaining - gdeg[idx], acc * subalgebra_gens[idx], out);
      };
  for (long n = 1; n <= bound; ++n) {
    Element yn = elem_pow(y, n);
    PieceCoords pc = piece_coords(*alg, n * dy);
    std::vector<std::vector<Scalar>> cols;
    struct Col { long i; Element prod_times_yi; Element prod; };
    std::vector<Col> tagged;
    for (long i = 0; i < n; ++i) {
      std::vector<Element> prods;
      rec(0, (n - i) * dy, Element::one(alg->free), prods);
      for (const auto& p : prods) {
        Element col = p * elem_pow(y, i);
        if (col.is_zero()) continue;
        tagged.push_back({i, col, p});
        cols.push_back(pc.vec_of(col));
      }
    }
    std::size_t ncert = cols.size();
    for (int j = 0; j < pc.rels.cols; ++j) cols.push_back(pc.rels.column(j));
    ExactMatrix m = ExactMatrix::from_columns(b, pc.dim_ambient(), cols);
    auto sol = solve_linear(m, pc.vec_of(yn));
    if (!sol) continue;
    // y^n = sum c_j * (prod_j y^{i_j}) modulo relations, so a_i = -sum c_j prod_j
    MonicCertificate cert{n, std::vector<Element>(static_cast<std::size_t>(n),
                                                  Element::zero(alg->free))};
    for (std::size_t j = 0; j < ncert; ++j)
      cert.coeffs[static_cast<std::size_t>(tagged[j].i)] =
          cert.coeffs[static_cast<std::size_t>(tagged[j].i)] -
          tagged[j].prod.scaled((*sol)[j]);
    Element check = yn;
    for (long i = 0; i < n; ++i)
      check = check + cert.coeffs[static_cast<std::size_t>(i)] * elem_pow(y, i);
    if (is_zero_in(check, *alg)) return cert;
  }
  return std::nullopt;
}

namespace detail {

/// Degreewise equalizer identity A -> prod A_{f_i} => prod A_{f_i f_j} at one
/// degree, with denominator exponent k: every compatible family of fractions
/// with denominators f_i^k comes from A, and A injects.
inline bool equalizer_exact_at(const PresentedAlgebra& alg, const std::vector<Element>& fs,
                               Degree d, long kexp) {
  const BaseRing& b = alg.base();
  PieceCoords pc = piece_coords(alg, d);
  if (pc.dim_ambient() == 0) return true;
  std::size_t n = fs.size();
  std::vector<Degree> es;
  for (const auto& f : fs) es.push_back(f.homogeneity().degree);

  // injectivity: an element killed in every localization is zero
  ExactMatrix common = stable_annihilator(alg, fs[0], d).span.hstack(pc.rels);
  for (std::size_t i = 1; i < n; ++i)
    common = intersect_spans(common, stable_annihilator(alg, fs[i], d).span.hstack(pc.rels));
  if (!span_contained(common, pc.rels)) return false;

  // fraction numerator slots and the map from A by common denominators
  std::vector<PieceCoords> dom;
  std::vector<ExactMatrix> from_a;
  std::vector<int> offset(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    auto [m, end] = power_matrix(alg, fs[i], kexp, pc);
    from_a.push_back(std::move(m));
    dom.push_back(std::move(end));
    offset[i + 1] = offset[i] + dom[i].dim_ambient();
  }
  int domtot = offset[n];

  struct Block {
    std::size_t i, j;
    ExactMatrix mi, mj;  // maps from slots i and j into the overlap piece
    ExactMatrix rels;
    int rows;
  };
  std::vector<Block> blocks;
  int codtot = 0, codrels = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      Element fij = fs[i] * fs[j];
      if (fij.is_zero() || is_zero_in(fij, alg)) continue;  // overlap is trivial
      Degree mid = d + kexp * (es[i] + es[j]);
      long M = stable_annihilator(alg, fij, mid).K;
      auto [mi1, pci] = power_matrix(alg, fs[j], kexp, dom[i]);
      auto [mi2, pcend] = power_matrix(alg, fij, M, pci);
      auto [mj1, pcj] = power_matrix(alg, fs[i], kexp, dom[j]);
      auto [mj2, pcend2] = power_matrix(alg, fij, M, pcj);
      ExactMatrix mj = mat_compose(mj2, mj1);
      if (koszul_sign(kexp * es[i], kexp * es[j]) < 0)
        for (auto& s : mj.a) s = -s;
      blocks.push_back({i, j, mat_compose(mi2, mi1), std::move(mj), pcend.rels,
                        pcend.dim_ambient()});
      codtot += pcend.dim_ambient();
      codrels += pcend.rels.cols;
    }

  ExactMatrix cond(b, codtot, domtot);
  ExactMatrix crels(b, codtot, codrels);
  int r0 = 0, c0 = 0;
  for (const auto& bl : blocks) {
    for (int r = 0; r < bl.rows; ++r) {
      for (int c = 0; c < bl.mi.cols; ++c) cond.at(r0 + r, offset[bl.i] + c) = bl.mi.at(r, c);
      for (int c = 0; c < bl.mj.cols; ++c)
        cond.at(r0 + r, offset[bl.j] + c) = cond.at(r0 + r, offset[bl.j] + c) - bl.mj.at(r, c);
      for (int c = 0; c < bl.rels.cols; ++c) crels.at(r0 + r, c0 + c) = bl.rels.at(r, c);
    }
    r0 += bl.rows;
    c0 += bl.rels.cols;
  }

  ExactMatrix family = preimage_generators(cond, crels);

  // allowed: images of A, slotwise relations, and slotwise zero fractions
  std::vector<std::vector<Scalar>> allowed;
  for (int c = 0; c < pc.dim_ambient(); ++c) {
    std::vector<Scalar> col(static_cast<std::size_t>(domtot), Scalar::zero(b));
    for (std::size_t i = 0; i < n; ++i) {
      auto v = from_a[i].column(c);
      for (std::size_t r = 0; r < v.size(); ++r)
        col[static_cast<std::size_t>(offset[i]) + r] = v[r];
    }
    allowed.push_back(std::move(col));
  }
  for (std::size_t i = 0; i < n; ++i) {
    ExactMatrix zi = stable_annihilator(alg, fs[i], dom[i].degree).span.hstack(dom[i].rels);
    for (int c = 0; c < zi.cols; ++c) {
      std::vector<Scalar> col(static_cast<std::size_t>(domtot), Scalar::zero(b));
      auto v = zi.column(c);
      for (std::size_t r = 0; r < v.size(); ++r)
        col[static_cast<std::size_t>(offset[i]) + r] = v[r];
      allowed.push_back(std::move(col));
    }
  }
  ExactMatrix am = ExactMatrix::from_columns(b, domtot, allowed);
  for (int j = 0; j < family.cols; ++j)
    if (!in_span(am, family.column(j))) return false;
  return true;
}

}  // namespace detail

/// Structure-sheaf equalizer identity for a cover generating the unit ideal,
/// checked degreewise to the bound with denominator exponents 1 and 2.
inline bool sheaf_cover_check(const AlgPtr& alg, const std::vector<Element>& cover,
                              int bound) {
  if (cover.empty()) throw std::invalid_argument("sheaf_cover_check: empty cover");
  for (const auto& f : cover)
    if (f.homogeneity().kind != Homogeneity::Kind::Homogeneous)
      throw std::invalid_argument("sheaf_cover_check: cover elements must be homogeneous");
  std::vector<Element> rels = alg->relations.gens;
  for (const auto& f : cover) rels.push_back(f);
  auto augmented = make_presented(alg->free, std::move(rels));
  if (!is_zero_in(Element::one(alg->free), *augmented))
    throw std::invalid_argument("sheaf_cover_check: cover does not generate the unit ideal");
  auto shape = detail::grading_shape(*alg->free);
  int span = alg->free->ngens() == 0 ? 0 : bound;
  for (int k = 0; k <= span; ++k) {
    Degree d = shape.sign >= 0 ? k : -k;
    for (long kexp : {1L, 2L})
      if (!detail::equalizer_exact_at(*alg, cover, d, kexp)) return false;
  }
  return true;
}

/// Laurent case: cover elements are unit monomials, so every localization is
/// the identity and the equalizer identity is immediate.
inline bool sheaf_cover_check(const LaurentRing&, const std::vector<Degree>& monomials,
                              int) {
  if (monomials.empty()) throw std::invalid_argument("sheaf_cover_check: empty cover");
  return true;
}

/// Order isomorphism spec(A) = spec(A^ev) via p -> p intersect A^ev, for
/// finite rings (both spectra by brute force).
inline bool even_spec_order_isomorphic(const AlgPtr& alg) {
  SpecSpace full = spec_finite(alg, false);
  SpecSpace even = spec_finite(alg, true);
  if (full.points.size() != even.points.size()) return false;
  auto contains = [&](const SpecPoint& p, const Element& f) {
    std::vector<Element> rels = alg->relations.gens;
    for (const auto& g : p.generators) rels.push_back(g);
    return is_zero_in(f, *make_presented(alg->free, std::move(rels)));
  };
  // match each full point to the even point with mutually contained even parts
  std::vector<int> match(full.points.size(), -1);
  for (std::size_t i = 0; i < full.points.size(); ++i) {
    for (std::size_t j = 0; j < even.points.size(); ++j) {
      bool sub = true, sup = true;
      for (const auto& g : even.points[j].generators)
        sub = sub && contains(full.points[i], g);
      for (const auto& g : full.points[i].generators) {
        Degree dg = g.homogeneity().degree;
        if (is_odd(dg)) {
          // odd generators contribute their even multiples; g^2 suffices here
          Element g2 = g * g;
          if (!g2.is_zero()) sup = sup && contains(even.points[j], g2);
        } else {
          sup = sup && contains(even.points[j], g);
        }
      }
      if (sub && sup) {
        match[i] = static_cast<int>(j);
        break;
      }
    }
    if (match[i] < 0) return false;
  }
  std::set<int> used(match.begin(), match.end());
  if (used.size() != full.points.size()) return false;
  // order compatibility
  std::set<std::pair<int, int>> fo(full.specializations.begin(), full.specializations.end());
  std::set<std::pair<int, int>> eo(even.specializations.begin(), even.specializations.end());
  std::set<std::pair<int, int>> mapped;
  for (auto [i, j] : fo) mapped.insert({match[static_cast<std::size_t>(i)],
                                        match[static_cast<std::size_t>(j)]});
  return mapped == eo;
}

namespace detail {

/// Dense polynomials over F_p for the Laurent orbit-space check.
using Poly = std::vector<unsigned long>;  // coefficients, low degree first

inline Poly poly_trim(Poly a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
  return a;
}

inline Poly poly_mod(Poly a, const Poly& m, unsigned long p) {
  a = poly_trim(std::move(a));
  while (a.size() >= m.size()) {
    unsigned long lead = a.back() % p;  // m is monic
    std::size_t shift = a.size() - m.size();
    for (std::size_t i = 0; i < m.size(); ++i)
      a[shift + i] = (a[shift + i] + p - lead * m[i] % p) % p;
    a = poly_trim(std::move(a));
  }
  return a;
}

inline bool poly_irreducible(const Poly& q, unsigned long p) {
  std::size_t dq = q.size() - 1;
  // trial division by every monic polynomial of degree 1..dq/2
  for (std::size_t dd = 1; 2 * dd <= dq; ++dd) {
    std::vector<unsigned long> c(dd, 0);
    while (true) {
      Poly div(c.begin(), c.end());
      div.push_back(1);
      if (poly_mod(q, div, p).empty()) return false;
      std::size_t i = 0;
      for (; i < dd; ++i) {
        if (++c[i] < p) break;
        c[i] = 0;
      }
      if (i == dd) break;
    }
  }
  return true;
}

}  // namespace detail

/// Orbit space of the ungraded spectrum: Laurent case. Every ungraded prime
/// is a monic irreducible with nonzero constant term (t is a unit); the
/// largest graded ideal inside each is (0), the unique Dirac point.
inline bool orbit_space_check(const LaurentRing& L, int bound) {
  unsigned long p = L.k0.characteristic();
  if (p == 0) throw std::domain_error("orbit_space_check: finite coefficient field required");
  if (L.k0.characteristic() != 2 && is_odd(L.degree))
    throw std::domain_error("orbit_space_check: even ring required");
  for (int deg = 1; deg <= bound; ++deg) {
    std::vector<unsigned long> c(static_cast<std::size_t>(deg), 0);
    while (true) {
      detail::Poly q(c.begin(), c.end());
      q.push_back(1);
      if (q[0] != 0 && detail::poly_irreducible(q, p)) {
        // no graded unit c t^k may lie in (q): t^k mod q stays nonzero
        for (int k = 0; k <= 3 * bound; ++k) {
          detail::Poly tk(static_cast<std::size_t>(k), 0);
          tk.push_back(1);
          if (detail::poly_mod(tk, q, p).empty()) return false;
        }
      }
      std::size_t i = 0;
      for (; i < c.size(); ++i) {
        if (++c[i] < p) break;
        c[i] = 0;
      }
      if (i == c.size()) break;
    }
  }
  return true;
}

inline bool orbit_space_check(const DiracField&) { return true; }

/// Orbit space for a finite even ring: brute-force the ungraded spectrum of
/// the underlying ring, send each prime to the largest graded ideal inside
/// it, and verify the fibers land bijectively on the graded spectrum.
inline bool orbit_space_check(const AlgPtr& alg) {
  for (std::size_t i = 0; i < alg->free->ngens(); ++i)
    if (is_odd(alg->free->gen_degree(i)))
      throw std::domain_error("orbit_space_check: even ring required");
  auto support = detail::finite_support(*alg, false);
  // enumerate the underlying ring: sums of one homogeneous class per degree
  std::vector<std::vector<Element>> per_degree;
  for (Degree d : support) per_degree.push_back(detail::piece_elements(*alg, d));
  std::vector<Element> ring{Element::zero(alg->free)};
  for (const auto& pieces : per_degree) {
    std::vector<Element> next;
    for (const auto& r : ring)
      for (const auto& h : pieces) next.push_back(r + h);
    ring = std::move(next);
  }
  if (ring.size() > 16)
    throw std::domain_error("orbit_space_check: underlying ring too large for brute force");
  auto idx_of = [&](const Element& e) {
    for (std::size_t i = 0; i < ring.size(); ++i)
      if (elements_equal(e, ring[i], *alg)) return i;
    throw std::logic_error("orbit_space_check: element escaped the enumeration");
  };
  std::size_t N = ring.size();
  // ideals as bitmask subsets closed under addition and ring multiplication
  std::vector<std::size_t> primes;
  for (std::size_t mask = 1; mask < (std::size_t{1} << N); ++mask) {
    if (!(mask & 1)) continue;  // must contain 0
    bool ideal = true;
    for (std::size_t i = 0; ideal && i < N; ++i) {
      if (!(mask & (std::size_t{1} << i))) continue;
      for (std::size_t j = 0; ideal && j < N; ++j) {
        if (mask & (std::size_t{1} << j))
          ideal = ideal && (mask & (std::size_t{1} << idx_of(ring[i] + ring[j])));
        ideal = ideal && (mask & (std::size_t{1} << idx_of(ring[i] * ring[j])));
      }
    }
    if (!ideal) continue;
    std::size_t one = idx_of(Element::one(alg->free));
    if (mask & (std::size_t{1} << one)) continue;  // improper
    bool prime = true;
    for (std::size_t i = 0; prime && i < N; ++i)
      for (std::size_t j = 0; prime && j < N; ++j) {
        bool fi = mask & (std::size_t{1} << i), fj = mask & (std::size_t{1} << j);
        if (!fi && !fj && (mask & (std::size_t{1} << idx_of(ring[i] * ring[j]))))
          prime = false;
      }
    if (prime) primes.push_back(mask);
  }
  SpecSpace graded = spec_finite(alg, false);
  auto in_point = [&](const SpecPoint& p, const Element& f) {
    std::vector<Element> rels = alg->relations.gens;
    for (const auto& g : p.generators) rels.push_back(g);
    return is_zero_in(f, *make_presented(alg->free, std::move(rels)));
  };
  std::set<int> hit;
  for (std::size_t mask : primes) {
    // largest graded ideal inside: the homogeneous elements of the prime
    std::vector<Element> hgens;
    for (std::size_t i = 0; i < N; ++i) {
      if (!(mask & (std::size_t{1} << i)) || ring[i].is_zero()) continue;
      if (ring[i].homogeneity().kind == Homogeneity::Kind::Homogeneous)
        hgens.push_back(ring[i]);
    }
    int found = -1;
    for (std::size_t pi = 0; pi < graded.points.size(); ++pi) {
      bool sub = true, sup = true;
      for (const auto& g : hgens) sub = sub && in_point(graded.points[pi], g);
      for (const auto& g : graded.points[pi].generators) {
        bool inside = false;
        for (const auto& h : hgens) inside = inside || elements_equal(g, h, *alg);
        sup = sup && (inside || is_zero_in(g, *alg));
      }
      if (sub && sup) {
        found = static_cast<int>(pi);
        break;
      }
    }
    if (found < 0) return false;  // image is not a graded prime of the spectrum
    hit.insert(found);
  }
  return hit.size() == graded.points.size();
}

/// JSON document for a SpecSpace, deterministically ordered.
inline std::string to_json(const SpecSpace& s) {
  std::ostringstream os;
  os << "{\"points\":[";
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    if (i) os << ",";
    os << "{\"id\":" << i << ",\"generators\":[";
    for (std::size_t j = 0; j < s.points[i].generators.size(); ++j) {
      if (j) os << ",";
      os << "\"" << s.points[i].generators[j].str() << "\"";
    }
    os << "]}";
  }
  os << "],\"specializations\":[";
  for (std::size_t i = 0; i < s.specializations.size(); ++i) {
    if (i) os << ",";
    os << "[" << s.specializations[i].first << "," << s.specializations[i].second << "]";
  }
  os << "],\"opens\":{";
  auto opens = s.opens;
  std::sort(opens.begin(), opens.end());
  for (std::size_t i = 0; i < opens.size(); ++i) {
    if (i) os << ",";
    os << "\"" << opens[i].first << "\":[";
    for (std::size_t j = 0; j < opens[i].second.size(); ++j) {
      if (j) os << ",";
      os << opens[i].second[j];
    }
    os << "]";
  }
  os << "}}";
  return os.str();
}

}  // namespace dirac
