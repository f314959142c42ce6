#pragma once

#include <cstdlib>
#include <functional>
#include <variant>

#include "dirac/gmod.hpp"

namespace dirac {

/// Degree-preserving algebra map given by generator images.
struct AlgebraMap {
  AlgPtr source, target;
  std::vector<Element> images;  // one per source generator, in target->free
};

inline AlgebraMap make_algebra_map(AlgPtr src, AlgPtr tgt, std::vector<Element> images,
                                   bool check_relations = true) {
  if (images.size() != src->free->ngens())
    throw std::invalid_argument("algebra map: one image per generator required");
  if (!(src->base() == tgt->base()))
    throw std::invalid_argument("algebra map: base ring mismatch");
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (!same_algebra(images[i].algebra(), tgt->free))
      throw std::invalid_argument("algebra map: image in wrong algebra");
    if (!images[i].is_homogeneous_of(src->free->gen_degree(i)))
      throw std::invalid_argument("algebra map: image degree mismatch");
  }
  AlgebraMap f{std::move(src), std::move(tgt), std::move(images)};
  if (check_relations) {
    for (const auto& rel : f.source->relations.gens) {
      Element img = apply_map(f.images, rel);
      if (!is_zero_in(img, *f.target))
        throw std::invalid_argument("algebra map: relation not sent into the ideal");
    }
  }
  return f;
}

inline bool is_identity(const AlgebraMap& f) {
  if (!(*f.source == *f.target)) return false;
  for (std::size_t i = 0; i < f.images.size(); ++i)
    if (!(f.images[i] == Element::generator(f.target->free, i))) return false;
  return true;
}

/// B presented over A: B's free algebra contains A's generators (by name and
/// degree) plus adjoined ones, and `equations` are the defining relations in
/// the adjoined variables.
struct RelativePresentation {
  AlgPtr base;
  AlgPtr total;
  std::vector<std::size_t> adjoined;  // indices into total's generators
  std::vector<Element> equations;
};

inline RelativePresentation make_relative(AlgPtr base, AlgPtr total,
                                          std::vector<Element> equations) {
  RelativePresentation rp{std::move(base), std::move(total), {}, std::move(equations)};
  const auto& bg = rp.base->free->generators;
  const auto& tg = rp.total->free->generators;
  std::vector<bool> from_base(tg.size(), false);
  for (const auto& e : bg.entries) {
    int idx = tg.index_of(e.name);
    if (idx < 0 || tg.entries[static_cast<std::size_t>(idx)].degree != e.degree)
      throw std::invalid_argument("relative presentation: base generator missing in total");
    from_base[static_cast<std::size_t>(idx)] = true;
  }
  for (std::size_t i = 0; i < tg.size(); ++i)
    if (!from_base[i]) rp.adjoined.push_back(i);
  for (const auto& f : rp.equations) {
    if (!same_algebra(f.algebra(), rp.total->free))
      throw std::invalid_argument("relative presentation: equation in wrong algebra");
    if (f.homogeneity().kind != Homogeneity::Kind::Homogeneous)
      throw std::invalid_argument("relative presentation: equations must be homogeneous");
  }
  return rp;
}

/// Signed Jacobian: entry (i, j) is the partial of equation i in the j-th
/// adjoined variable.
inline std::vector<std::vector<Element>> jacobian(const RelativePresentation& rp) {
  std::vector<std::vector<Element>> rows;
  for (const auto& f : rp.equations) {
    std::vector<Element> row;
    for (std::size_t j : rp.adjoined) row.push_back(partial_derivative(f, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Module of differentials of B over A: free on dx per adjoined variable,
/// modulo the Jacobian rows.
inline ModPtr kaehler(const RelativePresentation& rp) {
  std::vector<Degree> gens;
  for (std::size_t j : rp.adjoined) gens.push_back(rp.total->free->gen_degree(j));
  std::vector<Degree> rdegs;
  for (const auto& f : rp.equations) rdegs.push_back(f.homogeneity().degree);
  return make_module(rp.total, std::move(gens), jacobian(rp), std::move(rdegs));
}

struct StandardSmoothResult {
  bool ok;
  std::string detail;
};

/// Whether the Jacobian induces a surjection B^n -> B^c, by Nakayama on the
/// cokernel of the transposed Jacobian.
inline StandardSmoothResult is_standard_smooth(const RelativePresentation& rp) {
  if (rp.equations.empty()) return {true, "no defining equations"};
  auto jac = jacobian(rp);
  // cokernel of B^n -> B^c: generator per equation, relation per variable
  std::vector<Degree> gens;
  for (const auto& f : rp.equations) gens.push_back(-f.homogeneity().degree);
  std::vector<std::vector<Element>> rows;
  std::vector<Degree> rdegs;
  for (std::size_t j = 0; j < rp.adjoined.size(); ++j) {
    std::vector<Element> row;
    for (std::size_t i = 0; i < rp.equations.size(); ++i) row.push_back(jac[i][j]);
    rows.push_back(std::move(row));
    rdegs.push_back(-rp.total->free->gen_degree(rp.adjoined[j]));
  }
  ModPtr coker = make_module(rp.total, std::move(gens), std::move(rows), std::move(rdegs));
  if (rp.total->base().is_field()) {
    auto mg = minimal_generators(*coker);
    if (mg.empty()) return {true, "Jacobian surjective (Nakayama)"};
    return {false, "Jacobian cokernel needs " + std::to_string(mg.size()) + " generators"};
  }
  auto min = minimalize_presentation(coker);
  if (min.module->ngens() == 0) return {true, "Jacobian has a unit minor"};
  throw std::domain_error("is_standard_smooth: unsupported base ring for this presentation");
}

/// Localization map A -> A_f at a homogeneous element.
struct LocalizationMap {
  AlgPtr base;
  Element f;
};

inline LocalizationMap make_localization_map(AlgPtr base, Element f) {
  if (!same_algebra(f.algebra(), base->free))
    throw std::invalid_argument("localization: element of a different algebra");
  if (f.homogeneity().kind != Homogeneity::Kind::Homogeneous)
    throw std::invalid_argument("localization: homogeneous element required");
  return {std::move(base), std::move(f)};
}

/// Extension of Dirac fields L'/K per the classification: K = K0[t^{+-1}],
/// L = L0[u^{+-1}] with lambda0 * u^e = t. L0/K0 stays separable in the
/// supported (prime/finite field) cases.
struct DiracFieldExtension {
  BaseRing field;  // the shared prime field
  Degree deg_t;
  Degree deg_u;
  long e;
  Scalar lambda0;
  long l0_degree = 1;  // [L0 : K0]
};

inline DiracFieldExtension make_field_extension(BaseRing k, Degree deg_t, Degree deg_u,
                                                long e, Scalar lambda0,
                                                long l0_degree = 1) {
  if (!k.is_field()) throw std::invalid_argument("field extension: base must be a field");
  if (e <= 0) throw std::invalid_argument("field extension: positive exponent required");
  if (deg_t != e * deg_u)
    throw std::invalid_argument("field extension: degree of t must be e times degree of u");
  if (k.characteristic() != 2 && is_odd(deg_t))
    throw std::invalid_argument("field extension: t must have even degree unless char 2");
  if (lambda0.is_zero()) throw std::invalid_argument("field extension: lambda0 must be a unit");
  return {k, deg_t, deg_u, e, std::move(lambda0), l0_degree};
}

inline bool exponent_invertible(const DiracFieldExtension& x) {
  unsigned long p = x.field.characteristic();
  return p == 0 || x.e % static_cast<long>(p) != 0;
}

using MapDesc = std::variant<AlgebraMap, RelativePresentation, LocalizationMap,
                             DiracFieldExtension>;

/// Omega_{B/A} = 0? Decided via Nakayama-style minimalization, or the
/// classified obstruction L/(e u^{e-1}) du for field extensions.
inline bool is_unramified(const MapDesc& phi) {
  return std::visit(
      [](const auto& m) -> bool {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, AlgebraMap>) {
          if (is_identity(m)) return true;
          throw std::domain_error("is_unramified: provide a relative presentation");
        } else if constexpr (std::is_same_v<T, RelativePresentation>) {
          auto omega = kaehler(m);
          if (m.total->base().is_field())
            return minimal_generators(*omega).empty();
          return minimalize_presentation(omega).module->ngens() == 0;
        } else if constexpr (std::is_same_v<T, LocalizationMap>) {
          return true;  // the differential of x*f - 1 is a unit
        } else {
          return exponent_invertible(m);
        }
      },
      phi);
}

struct EtaleResult {
  enum class Status { Etale, NotEtale, Undecided } status;
  std::string via;
};

inline EtaleResult etale_certificate(const MapDesc& phi) {
  return std::visit(
      [&](const auto& m) -> EtaleResult {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, AlgebraMap>) {
          if (is_identity(m)) return {EtaleResult::Status::Etale, "identity"};
          return {EtaleResult::Status::Undecided, "no certificate applies"};
        } else if constexpr (std::is_same_v<T, RelativePresentation>) {
          if (m.equations.size() == m.adjoined.size()) {
            auto ss = is_standard_smooth(m);
            if (ss.ok)
              return {EtaleResult::Status::Etale, "square surjective Jacobian"};
          }
          if (!is_unramified(phi))
            return {EtaleResult::Status::NotEtale, "nonvanishing differentials"};
          return {EtaleResult::Status::Undecided, "no certificate applies"};
        } else if constexpr (std::is_same_v<T, LocalizationMap>) {
          if (is_zero_in(m.f, *m.base))
            return {EtaleResult::Status::Undecided, "localization at zero"};
          return {EtaleResult::Status::Etale, "localization at a homogeneous element"};
        } else {
          if (!exponent_invertible(m))
            return {EtaleResult::Status::NotEtale, "ramified: exponent not invertible"};
          return {EtaleResult::Status::Etale,
                  "field extension with invertible exponent and separable residue field"};
        }
      },
      phi);
}

struct EvenMapResult {
  enum class Status { Even, NotEven, Undecided } status;
  Degree witness = 0;
  int bound = 0;
};

inline EvenMapResult is_even_map(const MapDesc& phi, int bound = 32) {
  return std::visit(
      [&](const auto& m) -> EvenMapResult {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, AlgebraMap>) {
          if (is_identity(m)) return {EvenMapResult::Status::Even, 0, bound};
          if (m.source->free->ngens() == 0) {
            // trivially graded source: even iff B is concentrated in even
            // degrees within the bound
            auto shape = detail::grading_shape(*m.target->free);
            for (int k = 1; k <= bound; ++k) {
              Degree d = shape.sign >= 0 ? k : -k;
              if (!is_odd(d)) continue;
              if (!graded_piece_basis(*m.target, d).inv.is_zero())
                return {EvenMapResult::Status::NotEven, d, bound};
            }
            return {EvenMapResult::Status::Even, 0, bound};
          }
          throw std::domain_error("is_even_map: unsupported source algebra");
        } else if constexpr (std::is_same_v<T, RelativePresentation>) {
          bool all_even = true;
          for (std::size_t j : m.adjoined)
            if (is_odd(m.total->free->gen_degree(j))) all_even = false;
          for (std::size_t i = 0; i < m.base->free->ngens(); ++i)
            if (is_odd(m.base->free->gen_degree(i))) all_even = false;
          if (all_even) return {EvenMapResult::Status::Even, 0, bound};
          return {EvenMapResult::Status::Undecided, 0, bound};
        } else if constexpr (std::is_same_v<T, LocalizationMap>) {
          if (!is_odd(m.f.homogeneity().degree))
            return {EvenMapResult::Status::Even, 0, bound};
          return {EvenMapResult::Status::Undecided, 0, bound};
        } else {
          if (m.field.characteristic() == 2 && is_odd(m.deg_u) && !is_odd(m.deg_t))
            return {EvenMapResult::Status::NotEven, m.deg_u, bound};
          return {EvenMapResult::Status::Even, 0, bound};
        }
      },
      phi);
}

/// Flatness of the target as a module over the source, in the decidable
/// classes (trivially graded source; free polynomial extension; localization;
/// field extension).
inline FlatnessResult map_flatness_status(const MapDesc& phi, int bound = 32) {
  return std::visit(
      [&](const auto& m) -> FlatnessResult {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, AlgebraMap>) {
          if (is_identity(m)) return {FlatnessResult::Status::Flat, "identity"};
          return {FlatnessResult::Status::Undecided, "no decidable criterion applies"};
        } else if constexpr (std::is_same_v<T, RelativePresentation>) {
          if (m.base->free->ngens() == 0 && m.base->relations.gens.empty()) {
            if (m.base->base().is_field())
              return {FlatnessResult::Status::Flat, "module over a field"};
            // bare integers: flat iff every piece within the bound is
            // torsion free
            auto shape = detail::grading_shape(*m.total->free);
            for (int k = 0; k <= bound; ++k) {
              Degree d = shape.sign >= 0 ? k : -k;
              auto p = graded_piece_basis(*m.total, d);
              if (!p.inv.torsion.empty())
                return {FlatnessResult::Status::NotFlat,
                        "Z-torsion " + p.inv.str() + " in degree " + std::to_string(d)};
            }
            return {FlatnessResult::Status::Flat,
                    "torsion-free up to degree bound " + std::to_string(bound)};
          }
          if (m.equations.empty() && m.total->relations.gens.empty())
            return {FlatnessResult::Status::Flat, "free polynomial extension"};
          return {FlatnessResult::Status::Undecided, "no decidable criterion applies"};
        } else if constexpr (std::is_same_v<T, LocalizationMap>) {
          return {FlatnessResult::Status::Flat, "localization"};
        } else {
          return {FlatnessResult::Status::Flat, "field extension is free"};
        }
      },
      phi);
}

struct MultiplicationTorResult {
  bool vanishes;
  std::string certificate;
};

namespace detail {

/// Certificate for C = A_f tensor A_f -> A_f: in the free algebra on x, y
/// (the two inverses of f), y(xf-1) - x(yf-1) - (x-y) is annihilated by a
/// power of f, so the two inverses agree after localization and the
/// multiplication map is an isomorphism.
inline bool localization_diagonal_identity(const BaseRing& b, Degree degf) {
  auto F = make_free_algebra(
      b, GradedSet{{"f", degf}, {"x", -degf}, {"y", -degf}});
  Element f = Element::generator(F, "f");
  Element x = Element::generator(F, "x");
  Element y = Element::generator(F, "y");
  Element one = Element::one(F);
  Element expr = y * (x * f - one) - x * (y * f - one) - (x - y);
  Element power = Element::one(F);
  for (int k = 0; k <= 3; ++k) {
    if ((expr * power).is_zero()) return true;
    power = power * f;
  }
  return false;
}

/// Over C = L[w]/(w^e - 1) with multiplication w -> 1, the periodic
/// resolution ... -> C -(1+w+...+w^{e-1})-> C -(w-1)-> C -> L gives
/// Tor_1 = L/eL. Verify the telescoping identity behind the resolution over
/// the coefficient field, then decide by invertibility of e.
inline bool field_extension_mult_tor1_vanishes(const DiracFieldExtension& x) {
  // (w - 1)(1 + w + ... + w^{e-1}) = w^e - 1, checked on coefficient vectors
  const BaseRing& b = x.field;
  std::vector<Scalar> lhs(static_cast<std::size_t>(x.e) + 1, Scalar::zero(b));
  for (long i = 0; i < x.e; ++i) {
    lhs[static_cast<std::size_t>(i) + 1] += Scalar::one(b);   // w * w^i
    lhs[static_cast<std::size_t>(i)] -= Scalar::one(b);       // -1 * w^i
  }
  std::vector<Scalar> rhs(static_cast<std::size_t>(x.e) + 1, Scalar::zero(b));
  rhs[static_cast<std::size_t>(x.e)] = Scalar::one(b);
  rhs[0] = -Scalar::one(b);
  if (lhs != rhs) return false;
  return exponent_invertible(x);
}

}  // namespace detail

/// Vanishing of Tor_1 of the multiplication map B tensor_A B -> B for the
/// certified-etale classes.
inline MultiplicationTorResult multiplication_tor1_vanishes(const MapDesc& phi) {
  return std::visit(
      [](const auto& m) -> MultiplicationTorResult {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, AlgebraMap>) {
          if (is_identity(m)) return {true, "identity: multiplication is an isomorphism"};
          throw std::domain_error("multiplication_tor1_vanishes: unsupported map");
        } else if constexpr (std::is_same_v<T, LocalizationMap>) {
          Degree d = m.f.homogeneity().kind == Homogeneity::Kind::Homogeneous
                         ? m.f.homogeneity().degree
                         : 0;
          if (detail::localization_diagonal_identity(m.base->base(), d))
            return {true,
                    "diagonal identity certifies A_f tensor A_f = A_f; "
                    "multiplication is an isomorphism"};
          return {false, "diagonal identity failed"};
        } else if constexpr (std::is_same_v<T, DiracFieldExtension>) {
          if (detail::field_extension_mult_tor1_vanishes(m))
            return {true, "Tor_1 = L/eL with e invertible"};
          return {false, "Tor_1 = L/eL nonzero (e not invertible)"};
        } else {
          throw std::domain_error("multiplication_tor1_vanishes: unsupported map");
        }
      },
      phi);
}

/// Generators of the even part through degree `bound` in absolute value:
/// even generators plus pairwise products of odd generators, pruned against
/// the subalgebra generated so far.
inline std::vector<Element> even_generators(const PresentedAlgebra& alg, int bound) {
  require_degreewise_finite(alg);
  const auto& F = alg.free;
  const BaseRing& b = alg.base();
  struct Cand { Degree d; Element e; };
  std::vector<Cand> cands;
  for (std::size_t i = 0; i < F->ngens(); ++i) {
    Degree d = F->gen_degree(i);
    if (!is_odd(d) && std::llabs(d) <= bound)
      cands.push_back({d, Element::generator(F, i)});
  }
  for (std::size_t i = 0; i < F->ngens(); ++i)
    for (std::size_t j = i; j < F->ngens(); ++j) {
      Degree di = F->gen_degree(i), dj = F->gen_degree(j);
      if (!is_odd(di) || !is_odd(dj)) continue;
      if (std::llabs(di + dj) > bound) continue;
      cands.push_back({di + dj, Element::generator(F, i) * Element::generator(F, j)});
    }
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Cand& a, const Cand& c) {
                     return std::llabs(a.d) < std::llabs(c.d);
                   });
  std::vector<Element> kept;
  std::vector<Degree> kept_deg;
  for (const auto& c : cands) {
    if (c.e.is_zero() || is_zero_in(c.e, alg)) continue;
    // span of products of the kept elements in degree c.d, modulo the ideal
    PieceCoords pc = piece_coords(alg, c.d);
    std::vector<std::vector<Scalar>> cols;
    for (int k = 0; k < pc.rels.cols; ++k) cols.push_back(pc.rels.column(k));
    std::vector<Element> prods;
    std::function<void(std::size_t, Degree, const Element&)> rec =
        [&](std::size_t idx, Degree remaining, const Element& acc) {
          if (remaining == 0) {
            if (!acc.is_zero()) prods.push_back(acc);
            return;
          }
          if (idx == kept.size()) return;
          rec(idx + 1, remaining, acc);
          if (kept_deg[idx] != 0 &&
              ((remaining < 0) == (kept_deg[idx] < 0)) &&
              std::llabs(kept_deg[idx]) <= std::llabs(remaining))
            rec(idx, remaining - kept_deg[idx], acc * kept[idx]);
        };
    rec(0, c.d, Element::one(F));
    for (const auto& p : prods) cols.push_back(pc.vec_of(p));
    ExactMatrix span = ExactMatrix::from_columns(b, pc.dim_ambient(), cols);
    if (pc.dim_ambient() > 0 && solve_linear(span, pc.vec_of(c.e)).has_value()) continue;
    kept.push_back(c.e);
    kept_deg.push_back(c.d);
  }
  return kept;
}

}  // namespace dirac
