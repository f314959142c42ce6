#pragma once

#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>
#include <variant>

#include "dirac/exactlin.hpp"
#include "dirac/grading.hpp"

namespace dirac {

/// Exponent vector in the fixed generator order.
using Monomial = std::vector<unsigned>;

/// Free Dirac algebra on finitely many homogeneous generators over a base.
struct FreeDiracAlgebra {
  BaseRing base;
  GradedSet generators;

  FreeDiracAlgebra(BaseRing b, GradedSet g) : base(b), generators(std::move(g)) {}

  std::size_t ngens() const { return generators.size(); }
  Degree gen_degree(std::size_t i) const { return generators[i].degree; }
  bool gen_is_odd(std::size_t i) const { return is_odd(generators[i].degree); }

  /// All generator degrees nonzero with one common sign: every graded piece
  /// then contains finitely many monomials.
  bool degreewise_finite() const {
    bool pos = false, neg = false;
    for (const auto& e : generators.entries) {
      if (e.degree == 0) return false;
      (e.degree > 0 ? pos : neg) = true;
    }
    return !(pos && neg);
  }

  Degree degree_of(const Monomial& m) const {
    Degree d = 0;
    for (std::size_t i = 0; i < m.size(); ++i)
      d += static_cast<Degree>(m[i]) * gen_degree(i);
    return d;
  }

  /// A monomial whose coefficient group carries the 2-torsion reduction:
  /// some odd-degree generator appears with exponent >= 2.
  bool has_odd_square(const Monomial& m) const {
    for (std::size_t i = 0; i < m.size(); ++i)
      if (m[i] >= 2 && gen_is_odd(i)) return true;
    return false;
  }

  bool operator==(const FreeDiracAlgebra& o) const {
    return base == o.base && generators == o.generators;
  }
};

using FreeAlgPtr = std::shared_ptr<const FreeDiracAlgebra>;

inline FreeAlgPtr make_free_algebra(BaseRing base, GradedSet gens) {
  return std::make_shared<const FreeDiracAlgebra>(base, std::move(gens));
}

inline bool same_algebra(const FreeAlgPtr& a, const FreeAlgPtr& b) {
  return a == b || (a && b && *a == *b);
}

/// Sign of merging the sorted monomial n past m in the product m*n:
/// (-1)^{sum_{i>j} m_i n_j odd(i) odd(j)}.
inline int merge_sign(const FreeDiracAlgebra& alg, const Monomial& m, const Monomial& n) {
  long parity = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!alg.gen_is_odd(i) || m[i] % 2 == 0) continue;
    for (std::size_t j = 0; j < i; ++j)
      if (alg.gen_is_odd(j)) parity += n[j];
  }
  return parity % 2 ? -1 : +1;
}

struct Homogeneity {
  enum class Kind { Zero, Homogeneous, Inhomogeneous } kind;
  Degree degree = 0;  // valid for Homogeneous
};

/// Normalized element of a free Dirac algebra: finitely many monomials with
/// nonzero coefficients, sorted lexicographically by exponent vector, with
/// the 2-torsion reduction on odd squares baked into the normal form.
class Element {
 public:
  Element() = default;
  explicit Element(FreeAlgPtr alg) : alg_(std::move(alg)) {}

  static Element zero(FreeAlgPtr alg) { return Element(std::move(alg)); }

  static Element constant(FreeAlgPtr alg, const Scalar& c) {
    Element e(alg);
    e.add_term(Monomial(alg->ngens(), 0), c);
    e.normalize();
    return e;
  }
  static Element constant(FreeAlgPtr alg, long n) {
    return constant(alg, Scalar(alg->base, n));
  }
  static Element one(FreeAlgPtr alg) { return constant(std::move(alg), 1); }

  static Element generator(FreeAlgPtr alg, std::size_t i) {
    Element e(alg);
    Monomial m(alg->ngens(), 0);
    m[i] = 1;
    e.add_term(m, Scalar::one(alg->base));
    return e;
  }
  static Element generator(FreeAlgPtr alg, const std::string& name) {
    int i = alg->generators.index_of(name);
    if (i < 0) throw std::invalid_argument("unknown generator " + name);
    return generator(std::move(alg), static_cast<std::size_t>(i));
  }

  static Element monomial(FreeAlgPtr alg, Monomial m, Scalar c) {
    Element e(alg);
    e.add_term(std::move(m), std::move(c));
    e.normalize();
    return e;
  }

  const FreeAlgPtr& algebra() const { return alg_; }
  const std::map<Monomial, Scalar>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  Element operator+(const Element& o) const {
    check_same(o);
    Element r = *this;
    for (const auto& [m, c] : o.terms_) r.add_term(m, c);
    r.normalize();
    return r;
  }
  Element operator-() const {
    Element r(alg_);
    for (const auto& [m, c] : terms_) r.add_term(m, -c);
    r.normalize();
    return r;
  }
  Element operator-(const Element& o) const { return *this + (-o); }

  Element operator*(const Element& o) const {
    check_same(o);
    Element r(alg_);
    for (const auto& [m, cm] : terms_)
      for (const auto& [n, cn] : o.terms_) {
        Monomial prod(m.size());
        for (std::size_t i = 0; i < m.size(); ++i) prod[i] = m[i] + n[i];
        Scalar c = cm * cn;
        if (merge_sign(*alg_, m, n) < 0) c = -c;
        r.add_term(std::move(prod), std::move(c));
      }
    r.normalize();
    return r;
  }

  Element scaled(const Scalar& s) const {
    Element r(alg_);
    for (const auto& [m, c] : terms_) r.add_term(m, c * s);
    r.normalize();
    return r;
  }

  Element pow(unsigned k) const {
    Element r = one(alg_);
    for (unsigned i = 0; i < k; ++i) r = r * *this;
    return r;
  }

  bool operator==(const Element& o) const {
    return same_algebra(alg_, o.alg_) && terms_ == o.terms_;
  }

  Homogeneity homogeneity() const {
    if (terms_.empty()) return {Homogeneity::Kind::Zero, 0};
    Degree d = alg_->degree_of(terms_.begin()->first);
    for (const auto& [m, c] : terms_)
      if (alg_->degree_of(m) != d) return {Homogeneity::Kind::Inhomogeneous, 0};
    return {Homogeneity::Kind::Homogeneous, d};
  }

  bool is_homogeneous_of(Degree d) const {
    auto h = homogeneity();
    return h.kind == Homogeneity::Kind::Zero ||
           (h.kind == Homogeneity::Kind::Homogeneous && h.degree == d);
  }

  /// Component of the given degree.
  Element component(Degree d) const {
    Element r(alg_);
    for (const auto& [m, c] : terms_)
      if (alg_->degree_of(m) == d) r.add_term(m, c);
    return r;
  }

  std::vector<Degree> degrees_present() const {
    std::vector<Degree> ds;
    for (const auto& [m, c] : terms_) {
      Degree d = alg_->degree_of(m);
      if (std::find(ds.begin(), ds.end(), d) == ds.end()) ds.push_back(d);
    }
    std::sort(ds.begin(), ds.end());
    return ds;
  }

  /// Canonical text rendering: terms in monomial order, e.g. "-1*x^1*y^2 + 3*t^1".
  std::string str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms_) {
      if (!first) os << " + ";
      first = false;
      os << c.str();
      for (std::size_t i = 0; i < m.size(); ++i)
        if (m[i]) os << "*" << alg_->generators[i].name << "^" << m[i];
    }
    return os.str();
  }

 private:
  void check_same(const Element& o) const {
    if (!same_algebra(alg_, o.alg_)) throw std::invalid_argument("algebra mismatch");
  }

  void add_term(Monomial m, Scalar c) {
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      if (!c.is_zero()) terms_.emplace(std::move(m), std::move(c));
    } else {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  // 2-torsion rule: a monomial with an odd square has coefficient group
  // base/2*base.
  void normalize() {
    for (auto it = terms_.begin(); it != terms_.end();) {
      if (alg_->has_odd_square(it->first)) {
        switch (alg_->base.kind) {
          case BaseRing::Kind::Integers: {
            mpz_class r;
            mpz_class two(2);
            mpz_fdiv_r(r.get_mpz_t(), it->second.numerator().get_mpz_t(), two.get_mpz_t());
            if (r == 0) { it = terms_.erase(it); continue; }
            it->second = Scalar(alg_->base, r);
            break;
          }
          case BaseRing::Kind::Rationals:
            it = terms_.erase(it);
            continue;
          case BaseRing::Kind::PrimeField:
            if (alg_->base.p != 2) { it = terms_.erase(it); continue; }
            break;
        }
      }
      ++it;
    }
  }

  FreeAlgPtr alg_;
  std::map<Monomial, Scalar> terms_;
};

inline Element mul(const Element& a, const Element& b) { return a * b; }

inline Homogeneity is_homogeneous(const Element& a) { return a.homogeneity(); }

/// Signed partial derivative: the coefficient of dx_i when df is written with
/// the dx_i on the right and d treated as a spin-0 operator.
inline Element partial_derivative(const Element& f, std::size_t i) {
  const FreeAlgPtr& alg = f.algebra();
  Element r(alg);
  for (const auto& [m, c] : f.terms()) {
    unsigned e = m[i];
    if (e == 0) continue;
    Scalar coeff = c;
    if (alg->gen_is_odd(i)) {
      if (e % 2 == 0) continue;  // alternating sum of signs cancels
    } else {
      coeff = coeff * Scalar(alg->base, static_cast<long>(e));
    }
    // move dx_i rightward past the trailing generators
    long parity = 0;
    if (alg->gen_is_odd(i))
      for (std::size_t j = i + 1; j < m.size(); ++j)
        if (alg->gen_is_odd(j)) parity += m[j];
    if (parity % 2) coeff = -coeff;
    Monomial n = m;
    n[i] = e - 1;
    r = r + Element::monomial(alg, std::move(n), std::move(coeff));
  }
  return r;
}

inline Element partial_derivative(const Element& f, const std::string& gen) {
  int i = f.algebra()->generators.index_of(gen);
  if (i < 0) throw std::invalid_argument("unknown generator " + gen);
  return partial_derivative(f, static_cast<std::size_t>(i));
}

/// Value at `a` of the base-algebra homomorphism sending generator i to
/// images[i]; each image must be homogeneous of the generator's degree.
inline Element apply_map(const std::vector<Element>& images, const Element& a) {
  const FreeAlgPtr& src = a.algebra();
  if (images.size() != src->ngens())
    throw std::invalid_argument("image count does not match generator count");
  FreeAlgPtr tgt = images.empty() ? src : images.front().algebra();
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (!same_algebra(images[i].algebra(), tgt))
      throw std::invalid_argument("images live in different algebras");
    if (!images[i].is_homogeneous_of(src->gen_degree(i)))
      throw std::invalid_argument("image degree mismatch for generator " +
                                  src->generators[i].name);
  }
  if (!(tgt->base == src->base)) throw std::invalid_argument("base ring mismatch");
  Element r = Element::zero(tgt);
  for (const auto& [m, c] : a.terms()) {
    Element t = Element::constant(tgt, c);
    for (std::size_t i = 0; i < m.size(); ++i)
      for (unsigned k = 0; k < m[i]; ++k) t = t * images[i];
    r = r + t;
  }
  return r;
}

/// All monomials of the given degree; requires a degreewise finite algebra.
inline std::vector<Monomial> monomials_of_degree(const FreeDiracAlgebra& alg, Degree d) {
  if (!alg.degreewise_finite())
    throw std::domain_error("algebra is not degreewise finite");
  std::vector<Monomial> out;
  if (alg.ngens() == 0) {
    if (d == 0) out.push_back(Monomial{});
    return out;
  }
  // normalize to positive weights: sum e_i * |deg_i| == sign * d
  const Degree sign = alg.gen_degree(0) > 0 ? 1 : -1;
  const Degree target = sign * d;
  if (target < 0) return out;
  Monomial cur(alg.ngens(), 0);
  std::function<void(std::size_t, Degree)> rec = [&](std::size_t i, Degree rem) {
    if (i == alg.ngens()) {
      if (rem == 0) out.push_back(cur);
      return;
    }
    const Degree w = sign * alg.gen_degree(i);
    for (Degree e = 0; e * w <= rem; ++e) {
      cur[i] = static_cast<unsigned>(e);
      rec(i + 1, rem - e * w);
    }
    cur[i] = 0;
  };
  rec(0, target);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace dirac
