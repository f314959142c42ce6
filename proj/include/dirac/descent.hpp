#pragma once

#include "dirac/spectra.hpp"

namespace dirac {

/// Zariski cover: homogeneous elements generating the unit ideal, with the
/// certificate retained. Realizes the faithfully flat map A -> prod A_{f_i}.
struct ZariskiCover {
  AlgPtr base;
  std::vector<Element> elements;
  MembershipCertificate unit_certificate;
};

inline ZariskiCover make_cover(AlgPtr alg, std::vector<Element> fs) {
  if (fs.empty()) throw std::invalid_argument("invalid cover: no elements");
  for (const auto& f : fs) {
    if (f.homogeneity().kind != Homogeneity::Kind::Homogeneous)
      throw std::invalid_argument("invalid cover: elements must be homogeneous");
    if (f.is_zero() || is_zero_in(f, *alg))
      throw std::invalid_argument("invalid cover: " + f.str() +
                                  " is zero and cannot enter a unit certificate");
  }
  std::vector<Element> rels = alg->relations.gens;
  for (const auto& f : fs) rels.push_back(f);
  auto augmented = make_presented(alg->free, std::move(rels));
  auto cert = ideal_membership(Element::one(alg->free), *augmented);
  if (!cert)
    throw std::invalid_argument("invalid cover: elements do not generate the unit ideal");
  return {std::move(alg), std::move(fs), std::move(*cert)};
}

/// Degreewise exactness of 0 -> A -> prod A_{f_i} => prod A_{f_i f_j}.
inline bool amitsur_check(const ZariskiCover& cover, int bound) {
  return sheaf_cover_check(cover.base, cover.elements, bound);
}

namespace detail {

/// Scalar multiplication by f on a module piece, blockwise per generator.
inline ExactMatrix module_mult_matrix(const PresentedModule& m, const Element& f,
                                      const ModulePieceCoords& from,
                                      const ModulePieceCoords& to) {
  const BaseRing& b = m.algebra->base();
  ExactMatrix out(b, to.total, from.total);
  for (std::size_t s = 0; s < from.slots.size(); ++s) {
    ExactMatrix blk = multiplication_matrix(*m.algebra, f, from.slots[s], to.slots[s]);
    for (int r = 0; r < blk.rows; ++r)
      for (int c = 0; c < blk.cols; ++c)
        out.at(to.offsets[s] + r, from.offsets[s] + c) = blk.at(r, c);
  }
  return out;
}

inline std::pair<ExactMatrix, ModulePieceCoords> module_power_matrix(
    const PresentedModule& m, const Element& f, long k, const ModulePieceCoords& from) {
  Degree e = f.homogeneity().degree;
  ExactMatrix mat = ExactMatrix::identity(m.algebra->base(), from.total);
  ModulePieceCoords cur = from;
  for (long i = 0; i < k; ++i) {
    ModulePieceCoords nxt = module_piece_coords(m, cur.degree + e);
    mat = mat_compose(module_mult_matrix(m, f, cur, nxt), mat);
    cur = nxt;
  }
  return {std::move(mat), std::move(cur)};
}

/// Stabilized kernel of multiplication by powers of f on a module piece,
/// with the same flat-band stopping rule as the algebra version.
inline ExactMatrix module_stable_annihilator(const PresentedModule& m, const Element& f,
                                             const ModulePieceCoords& pc0, int& K) {
  const BaseRing& b = m.algebra->base();
  K = 0;
  if (f.is_zero() || is_zero_in(f, *m.algebra))
    return ExactMatrix::identity(b, pc0.total);
  Degree e = f.homogeneity().degree;
  ExactMatrix comp = ExactMatrix::identity(b, pc0.total);
  ModulePieceCoords cur = pc0;
  ExactMatrix prev = pc0.rels;
  int last_growth = 0;
  for (int k = 1; k <= 64; ++k) {
    ModulePieceCoords nxt = module_piece_coords(m, cur.degree + e);
    comp = mat_compose(module_mult_matrix(m, f, cur, nxt), comp);
    cur = nxt;
    ExactMatrix s = preimage_generators(comp, cur.rels).hstack(pc0.rels);
    if (!span_contained(s, prev)) {
      last_growth = k;
      prev = std::move(s);
    } else if (k - last_growth >= 8) {
      K = last_growth;
      return prev;
    }
  }
  throw std::runtime_error("module multiplication kernels did not stabilize");
}

/// The gluing matrix applied on one piece: tuples over M_i to tuples over
/// M_j in the same degree (entries have matching degrees).
inline ExactMatrix gluing_on_piece(const PresentedModule& mi, const PresentedModule& mj,
                                   const std::vector<std::vector<Element>>& g,
                                   const ModulePieceCoords& from,
                                   const ModulePieceCoords& to) {
  const BaseRing& b = mi.algebra->base();
  std::vector<std::vector<Scalar>> cols;
  for (std::size_t c = 0; c < from.slots.size(); ++c)
    for (const auto& mono : from.slots[c].monos) {
      Element a = Element::monomial(mi.algebra->free, mono, Scalar::one(b));
      std::vector<Element> tuple(mj.ngens(), Element::zero(mj.algebra->free));
      for (std::size_t r = 0; r < mj.ngens(); ++r) tuple[r] = g[r][c] * a;
      cols.push_back(to.vec_of(tuple));
    }
  return ExactMatrix::from_columns(b, to.total, cols);
}

}  // namespace detail

/// Modules over the pieces of a cover with gluing over the double overlaps.
/// Gluing matrices are given over A itself (degree-matched entries) and read
/// in the double localization; g[i][j] is stored for i < j.
struct DescentDatum {
  ZariskiCover cover;
  std::vector<ModPtr> modules;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::vector<Element>>> gluing;
};

inline DescentDatum make_descent_datum(
    ZariskiCover cover, std::vector<ModPtr> modules,
    std::map<std::pair<std::size_t, std::size_t>, std::vector<std::vector<Element>>> g) {
  if (modules.size() != cover.elements.size())
    throw std::invalid_argument("descent datum: one module per cover element");
  for (const auto& m : modules)
    if (!(*m->algebra == *cover.base))
      throw std::invalid_argument("descent datum: modules must live over the cover base");
  for (std::size_t i = 0; i < modules.size(); ++i)
    for (std::size_t j = i + 1; j < modules.size(); ++j) {
      auto it = g.find({i, j});
      if (it == g.end())
        throw std::invalid_argument("descent datum: missing gluing matrix");
      const auto& mat = it->second;
      if (mat.size() != modules[j]->ngens())
        throw std::invalid_argument("descent datum: gluing row count mismatch");
      for (const auto& row : mat)
        if (row.size() != modules[i]->ngens())
          throw std::invalid_argument("descent datum: gluing column count mismatch");
    }
  return {std::move(cover), std::move(modules), std::move(g)};
}

/// Build the trivial datum of a module: M over every piece, identity gluing.
inline DescentDatum trivial_datum(ZariskiCover cover, ModPtr m) {
  std::size_t n = cover.elements.size();
  std::vector<std::vector<Element>> id(m->ngens(),
                                       std::vector<Element>(m->ngens(),
                                                            Element::zero(m->algebra->free)));
  for (std::size_t k = 0; k < m->ngens(); ++k) id[k][k] = Element::one(m->algebra->free);
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::vector<Element>>> g;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) g[{i, j}] = id;
  return make_descent_datum(std::move(cover), std::vector<ModPtr>(n, m), std::move(g));
}

/// Cocycle condition g_{ik} = g_{jk} g_{ij} over the triple localizations;
/// empty result means it holds, otherwise the offending triple and degree.
inline std::optional<std::string> cocycle_failure(const DescentDatum& d) {
  const auto& A = *d.cover.base;
  for (std::size_t i = 0; i < d.modules.size(); ++i)
    for (std::size_t j = i + 1; j < d.modules.size(); ++j)
      for (std::size_t k = j + 1; k < d.modules.size(); ++k) {
        const auto& gij = d.gluing.at({i, j});
        const auto& gjk = d.gluing.at({j, k});
        const auto& gik = d.gluing.at({i, k});
        Element fijk = d.cover.elements[i] * d.cover.elements[j] * d.cover.elements[k];
        for (std::size_t r = 0; r < d.modules[k]->ngens(); ++r)
          for (std::size_t c = 0; c < d.modules[i]->ngens(); ++c) {
            Element comp = Element::zero(A.free);
            for (std::size_t m = 0; m < d.modules[j]->ngens(); ++m)
              comp = comp + gjk[r][m] * gij[m][c];
            Element diff = gik[r][c] - comp;
            if (diff.is_zero()) continue;
            for (Degree e : diff.degrees_present())
              if (!detail::annihilates_eventually(A, fijk, diff.component(e)))
                return "cocycle failure at triple (" + std::to_string(i) + "," +
                       std::to_string(j) + "," + std::to_string(k) + "), degree " +
                       std::to_string(e);
          }
      }
  return std::nullopt;
}

struct DescentResult {
  ModPtr module;
  int verified_to;
};

namespace detail {

/// Kernel of the gluing-twisted difference map on fraction numerators with
/// denominator exponent k at one degree, together with the allowed columns
/// (relations and zero fractions, slotwise) and the domain layout.
struct EqualizerData {
  ExactMatrix kernel;
  ExactMatrix allowed;       // slot relations and slot zero-fraction columns
  std::vector<ModulePieceCoords> dom;
  std::vector<int> offset;
  int domtot = 0;
};

inline EqualizerData module_equalizer(const DescentDatum& dd, Degree d, long kexp) {
  const auto& A = *dd.cover.base;
  const BaseRing& b = A.base();
  const auto& fs = dd.cover.elements;
  std::size_t n = fs.size();
  std::vector<Degree> es;
  for (const auto& f : fs) es.push_back(f.homogeneity().degree);

  EqualizerData out;
  out.offset.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    out.dom.push_back(module_piece_coords(*dd.modules[i], d + kexp * es[i]));
    out.offset[i + 1] = out.offset[i] + out.dom[i].total;
  }
  out.domtot = out.offset[n];

  struct Block {
    std::size_t i, j;
    ExactMatrix mi, mj;
    ExactMatrix rels;
    int rows;
  };
  std::vector<Block> blocks;
  int codtot = 0, codrels = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      Element fij = fs[i] * fs[j];
      if (fij.is_zero() || is_zero_in(fij, A)) continue;
      // g_{ij}(m_i / f_i^k) compared with m_j / f_j^k over A_{f_i f_j}
      Degree mid = d + kexp * (es[i] + es[j]);
      ModulePieceCoords mpcj = module_piece_coords(*dd.modules[j], mid);
      int M = 0;
      module_stable_annihilator(*dd.modules[j], fij, mpcj, M);
      ExactMatrix gmat = gluing_on_piece(*dd.modules[i], *dd.modules[j],
                                         dd.gluing.at({i, j}), out.dom[i],
                                         module_piece_coords(*dd.modules[j],
                                                             out.dom[i].degree));
      auto [mi1, pci] = module_power_matrix(*dd.modules[j], fs[j], kexp,
                                            module_piece_coords(*dd.modules[j],
                                                                out.dom[i].degree));
      auto [mi2, pcend] = module_power_matrix(*dd.modules[j], fij, M, pci);
      ExactMatrix mi = mat_compose(mi2, mat_compose(mi1, gmat));
      auto [mj1, pcj] = module_power_matrix(*dd.modules[j], fs[i], kexp, out.dom[j]);
      auto [mj2, pcend2] = module_power_matrix(*dd.modules[j], fij, M, pcj);
      (void)pcend2;
      ExactMatrix mj = mat_compose(mj2, mj1);
      if (koszul_sign(kexp * es[i], kexp * es[j]) < 0)
        for (auto& s : mj.a) s = -s;
      blocks.push_back({i, j, std::move(mi), std::move(mj), pcend.rels, pcend.total});
      codtot += blocks.back().rows;
      codrels += blocks.back().rels.cols;
    }

  ExactMatrix cond(b, codtot, out.domtot);
  ExactMatrix crels(b, codtot, codrels);
  int r0 = 0, c0 = 0;
  for (const auto& bl : blocks) {
    for (int r = 0; r < bl.rows; ++r) {
      for (int c = 0; c < bl.mi.cols; ++c)
        cond.at(r0 + r, out.offset[bl.i] + c) = bl.mi.at(r, c);
      for (int c = 0; c < bl.mj.cols; ++c)
        cond.at(r0 + r, out.offset[bl.j] + c) =
            cond.at(r0 + r, out.offset[bl.j] + c) - bl.mj.at(r, c);
      for (int c = 0; c < bl.rels.cols; ++c) crels.at(r0 + r, c0 + c) = bl.rels.at(r, c);
    }
    r0 += bl.rows;
    c0 += bl.rels.cols;
  }
  out.kernel = preimage_generators(cond, crels);

  std::vector<std::vector<Scalar>> allowed;
  for (std::size_t i = 0; i < n; ++i) {
    int Ki = 0;
    ExactMatrix zi = module_stable_annihilator(*dd.modules[i], fs[i], out.dom[i], Ki)
                         .hstack(out.dom[i].rels);
    for (int c = 0; c < zi.cols; ++c) {
      std::vector<Scalar> col(static_cast<std::size_t>(out.domtot), Scalar::zero(b));
      auto v = zi.column(c);
      for (std::size_t r = 0; r < v.size(); ++r)
        col[static_cast<std::size_t>(out.offset[i]) + r] = v[r];
      allowed.push_back(std::move(col));
    }
  }
  out.allowed = ExactMatrix::from_columns(b, out.domtot, allowed);
  return out;
}

inline std::vector<Degree> module_degree_window(const PresentedModule& m, int bound) {
  auto shape = grading_shape(*m.algebra->free);
  std::vector<Degree> out;
  if (shape.sign == 0) {
    for (Degree g : m.generator_degrees)
      if (std::find(out.begin(), out.end(), g) == out.end()) out.push_back(g);
    if (out.empty()) out.push_back(0);
    return out;
  }
  Degree start = 0;
  for (Degree g : m.generator_degrees)
    start = shape.sign > 0 ? std::min(start, g) : std::max(start, g);
  for (int k = 0; k <= bound; ++k) out.push_back(start + (shape.sign > 0 ? k : -k));
  return out;
}

}  // namespace detail

/// Reconstruct the module from a descent datum: checks the cocycle, computes
/// the degreewise equalizer, and verifies it matches the candidate (the
/// common underlying presentation) as graded groups; for identity gluing the
/// unit map of the adjunction is verified as well.
inline DescentResult descend_module(const DescentDatum& dd, int bound) {
  if (auto fail = cocycle_failure(dd)) throw std::invalid_argument(*fail);
  ModPtr candidate = dd.modules[0];
  for (const auto& m : dd.modules)
    if (!(*m == *candidate))
      throw std::domain_error("descend_module: modules outside the supported class");
  bool identity_gluing = true;
  for (const auto& [ij, g] : dd.gluing)
    for (std::size_t r = 0; r < g.size(); ++r)
      for (std::size_t c = 0; c < g[r].size(); ++c) {
        Element expect = r == c ? Element::one(candidate->algebra->free)
                                : Element::zero(candidate->algebra->free);
        if (!(g[r][c] == expect)) identity_gluing = false;
      }

  const auto& fs = dd.cover.elements;
  for (Degree d : detail::module_degree_window(*candidate, bound)) {
    for (long kexp : {1L, 2L}) {
      auto eq = detail::module_equalizer(dd, d, kexp);
      auto einv = subquotient_invariants(eq.kernel.hstack(eq.allowed), eq.allowed);
      auto minv = module_piece(*candidate, d);
      if (!(einv == minv))
        throw std::domain_error("descend_module: equalizer disagrees with the candidate in "
                                "degree " + std::to_string(d));
      if (identity_gluing) {
        // unit of the adjunction: M -> equalizer, injectively
        ModulePieceCoords pc = module_piece_coords(*candidate, d);
        std::vector<std::vector<Scalar>> img;
        std::vector<ExactMatrix> maps;
        for (std::size_t i = 0; i < fs.size(); ++i)
          maps.push_back(detail::module_power_matrix(*candidate, fs[i], kexp, pc).first);
        for (int c = 0; c < pc.total; ++c) {
          std::vector<Scalar> col(static_cast<std::size_t>(eq.domtot),
                                  Scalar::zero(candidate->algebra->base()));
          for (std::size_t i = 0; i < fs.size(); ++i) {
            auto v = maps[i].column(c);
            for (std::size_t r = 0; r < v.size(); ++r)
              col[static_cast<std::size_t>(eq.offset[i]) + r] = v[r];
          }
          img.push_back(std::move(col));
        }
        ExactMatrix im = ExactMatrix::from_columns(candidate->algebra->base(), eq.domtot, img);
        if (!detail::span_contained(im, eq.kernel.hstack(eq.allowed)))
          throw std::domain_error("descend_module: unit map does not land in the equalizer");
      }
    }
  }
  return {candidate, bound};
}

/// Truncation sufficiency for the Amitsur complex: the kernel cut out by the
/// pair conditions already satisfies the triple conditions, degreewise.
inline bool amitsur_truncation_agree(const ZariskiCover& cover, int bound) {
  const auto& A = *cover.base;
  const BaseRing& b = A.base();
  const auto& fs = cover.elements;
  std::size_t n = fs.size();
  std::vector<Degree> es;
  for (const auto& f : fs) es.push_back(f.homogeneity().degree);
  auto shape = detail::grading_shape(*A.free);
  int span = A.free->ngens() == 0 ? 0 : bound;
  for (int kk = 0; kk <= span; ++kk) {
    Degree d = shape.sign >= 0 ? kk : -kk;
    for (long kexp : {1L, 2L}) {
      std::vector<PieceCoords> dom;
      std::vector<int> offset(n + 1, 0);
      for (std::size_t i = 0; i < n; ++i) {
        dom.push_back(piece_coords(A, d + kexp * es[i]));
        offset[i + 1] = offset[i] + dom[i].dim_ambient();
      }
      int domtot = offset[n];
      if (domtot == 0) continue;

      auto pair_kernel = [&](bool with_triples) {
        struct Block {
          std::vector<std::pair<std::size_t, ExactMatrix>> parts;  // slot, signed map
          ExactMatrix rels;
          int rows;
        };
        std::vector<Block> blocks;
        auto add_pair = [&](std::size_t i, std::size_t j, const Element& over,
                            const Element& exi, const Element& exj, int sgn) {
          // condition over^K (exi * x_i - sgn * exj * x_j) = 0
          if (over.is_zero() || is_zero_in(over, A)) return;
          Degree mid = dom[i].degree + exi.homogeneity().degree;
          long M = detail::stable_annihilator(A, over, mid).K;
          auto [mi1, pci] = detail::power_matrix(A, exi, 1, dom[i]);
          auto [mi2, pcend] = detail::power_matrix(A, over, M, pci);
          auto [mj1, pcj] = detail::power_matrix(A, exj, 1, dom[j]);
          auto [mj2, pcend2] = detail::power_matrix(A, over, M, pcj);
          (void)pcend2;
          ExactMatrix mj = detail::mat_compose(mj2, mj1);
          if (sgn < 0)
            for (auto& s : mj.a) s = -s;
          Block bl{{}, pcend.rels, pcend.dim_ambient()};
          bl.parts.emplace_back(i, detail::mat_compose(mi2, mi1));
          ExactMatrix neg = mj;
          for (auto& s : neg.a) s = -s;
          bl.parts.emplace_back(j, std::move(neg));
          blocks.push_back(std::move(bl));
        };
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = i + 1; j < n; ++j)
            add_pair(i, j, fs[i] * fs[j], elem_pow(fs[j], kexp), elem_pow(fs[i], kexp),
                     koszul_sign(kexp * es[i], kexp * es[j]));
        if (with_triples)
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
              for (std::size_t k = j + 1; k < n; ++k)
                add_pair(i, k, fs[i] * fs[j] * fs[k],
                         elem_pow(fs[j], kexp) * elem_pow(fs[k], kexp),
                         elem_pow(fs[i], kexp) * elem_pow(fs[j], kexp),
                         koszul_sign(kexp * es[i], kexp * (es[j] + es[k])));
        int codtot = 0, codrels = 0;
        for (const auto& bl : blocks) {
          codtot += bl.rows;
          codrels += bl.rels.cols;
        }
        ExactMatrix cond(b, codtot, domtot);
        ExactMatrix crels(b, codtot, codrels);
        int r0 = 0, c0 = 0;
        for (const auto& bl : blocks) {
          for (const auto& [slot, mat] : bl.parts)
            for (int r = 0; r < bl.rows; ++r)
              for (int c = 0; c < mat.cols; ++c)
                cond.at(r0 + r, offset[slot] + c) =
                    cond.at(r0 + r, offset[slot] + c) + mat.at(r, c);
          for (int r = 0; r < bl.rows; ++r)
            for (int c = 0; c < bl.rels.cols; ++c) crels.at(r0 + r, c0 + c) = bl.rels.at(r, c);
          r0 += bl.rows;
          c0 += bl.rels.cols;
        }
        return preimage_generators(cond, crels);
      };

      std::vector<std::vector<Scalar>> sat;
      for (std::size_t i = 0; i < n; ++i) {
        ExactMatrix zi =
            detail::stable_annihilator(A, fs[i], dom[i].degree).span.hstack(dom[i].rels);
        for (int c = 0; c < zi.cols; ++c) {
          std::vector<Scalar> col(static_cast<std::size_t>(domtot), Scalar::zero(b));
          auto v = zi.column(c);
          for (std::size_t r = 0; r < v.size(); ++r)
            col[static_cast<std::size_t>(offset[i]) + r] = v[r];
          sat.push_back(std::move(col));
        }
      }
      ExactMatrix saturation = ExactMatrix::from_columns(b, domtot, sat);
      ExactMatrix k2 = pair_kernel(false);
      ExactMatrix k3 = pair_kernel(true);
      if (!detail::span_contained(k2, k3.hstack(saturation))) return false;
      if (!detail::span_contained(k3, k2.hstack(saturation))) return false;
    }
  }
  return true;
}

/// Equalizer identity for the finite open-set lattices of a cover: opens of
/// the base biject with compatible families of opens of the pieces.
inline bool opens_limit_check(const SpecSpace& X, const std::vector<std::vector<int>>& parts) {
  std::size_t n = X.points.size();
  if (n > 12) throw std::domain_error("opens_limit_check: spectrum too large");
  std::set<std::pair<int, int>> order(X.specializations.begin(), X.specializations.end());
  auto is_open = [&](unsigned long s, unsigned long within) {
    // generization-closed inside the subspace `within`
    for (auto [i, j] : order) {
      bool pi = within & (1ul << i), pj = within & (1ul << j);
      if (pi && pj && (s & (1ul << j)) && !(s & (1ul << i))) return false;
    }
    return true;
  };
  unsigned long all = (1ul << n) - 1;
  std::vector<unsigned long> masks;
  for (const auto& p : parts) {
    unsigned long m = 0;
    for (int id : p) m |= 1ul << id;
    masks.push_back(m);
  }
  // enumerate compatible families of opens of the pieces
  std::vector<std::vector<unsigned long>> piece_opens(masks.size());
  for (std::size_t i = 0; i < masks.size(); ++i)
    for (unsigned long s = 0; s <= all; ++s)
      if ((s & ~masks[i]) == 0 && is_open(s, masks[i])) piece_opens[i].push_back(s);
  std::set<std::vector<unsigned long>> families;
  std::vector<unsigned long> cur(masks.size(), 0);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == masks.size()) {
      for (std::size_t a = 0; a < masks.size(); ++a)
        for (std::size_t c = a + 1; c < masks.size(); ++c) {
          unsigned long overlap = masks[a] & masks[c];
          if ((cur[a] & overlap) != (cur[c] & overlap)) return;
        }
      families.insert(cur);
      return;
    }
    for (unsigned long s : piece_opens[i]) {
      cur[i] = s;
      rec(i + 1);
    }
  };
  rec(0);
  // opens of the base map bijectively onto the families
  std::set<std::vector<unsigned long>> images;
  std::size_t base_opens = 0;
  for (unsigned long u = 0; u <= all; ++u) {
    if (!is_open(u, all)) continue;
    ++base_opens;
    std::vector<unsigned long> fam;
    for (unsigned long m : masks) fam.push_back(u & m);
    if (families.find(fam) == families.end()) return false;
    images.insert(fam);
  }
  return images.size() == base_opens && images == families;
}

inline bool opens_limit_check(const AlgPtr& alg, const std::vector<Element>& cover) {
  auto X = spec_finite(alg);
  std::vector<std::vector<int>> parts;
  for (const auto& f : cover) {
    std::vector<int> ids;
    for (std::size_t i = 0; i < X.points.size(); ++i) {
      std::vector<Element> rels = alg->relations.gens;
      for (const auto& g : X.points[i].generators) rels.push_back(g);
      if (!is_zero_in(f, *make_presented(alg->free, std::move(rels))))
        ids.push_back(static_cast<int>(i));
    }
    parts.push_back(std::move(ids));
  }
  return opens_limit_check(X, parts);
}

/// JSON envelope: modules with generator degrees and relation rows in the
/// canonical rendering, plus the cocycle matrices.
inline std::string to_json(const DescentDatum& d) {
  std::ostringstream os;
  os << "{\"cover\":[";
  for (std::size_t i = 0; i < d.cover.elements.size(); ++i) {
    if (i) os << ",";
    os << "\"" << d.cover.elements[i].str() << "\"";
  }
  os << "],\"modules\":[";
  for (std::size_t i = 0; i < d.modules.size(); ++i) {
    if (i) os << ",";
    os << "{\"generators\":[";
    for (std::size_t j = 0; j < d.modules[i]->generator_degrees.size(); ++j) {
      if (j) os << ",";
      os << d.modules[i]->generator_degrees[j];
    }
    os << "],\"relations\":[";
    for (std::size_t r = 0; r < d.modules[i]->nrels(); ++r) {
      if (r) os << ",";
      os << "[";
      for (std::size_t c = 0; c < d.modules[i]->ngens(); ++c) {
        if (c) os << ",";
        os << "\"" << d.modules[i]->relation_matrix[r][c].str() << "\"";
      }
      os << "]";
    }
    os << "]}";
  }
  os << "],\"cocycle\":[";
  bool first = true;
  for (const auto& [ij, g] : d.gluing) {
    if (!first) os << ",";
    first = false;
    os << "{\"i\":" << ij.first << ",\"j\":" << ij.second << ",\"matrix\":[";
    for (std::size_t r = 0; r < g.size(); ++r) {
      if (r) os << ",";
      os << "[";
      for (std::size_t c = 0; c < g[r].size(); ++c) {
        if (c) os << ",";
        os << "\"" << g[r][c].str() << "\"";
      }
      os << "]";
    }
    os << "]}";
  }
  os << "]}";
  return os.str();
}

}  // namespace dirac
