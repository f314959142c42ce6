#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dirac {

/// Coefficient domain: the integers, the rationals, or a prime field F_p.
struct BaseRing {
  enum class Kind { Integers, Rationals, PrimeField };
  Kind kind = Kind::Integers;
  unsigned long p = 0;  // prime, only for PrimeField

  static BaseRing Z() { return {Kind::Integers, 0}; }
  static BaseRing Q() { return {Kind::Rationals, 0}; }
  static BaseRing Fp(unsigned long p) {
    if (p < 2 || !is_prime(p)) throw std::invalid_argument("F_p requires a prime p");
    return {Kind::PrimeField, p};
  }

  bool is_field() const { return kind != Kind::Integers; }
  unsigned long characteristic() const { return kind == Kind::PrimeField ? p : 0; }
  bool two_is_unit() const {
    return kind == Kind::Rationals || (kind == Kind::PrimeField && p != 2);
  }
  bool operator==(const BaseRing&) const = default;

  std::string str() const {
    switch (kind) {
      case Kind::Integers: return "Z";
      case Kind::Rationals: return "Q";
      default: return "F" + std::to_string(p);
    }
  }

  static bool is_prime(unsigned long n) {
    if (n < 2) return false;
    for (unsigned long d = 2; d * d <= n; ++d)
      if (n % d == 0) return false;
    return true;
  }
};

/// An exact scalar in a BaseRing. Arbitrary precision throughout; F_p values
/// are kept reduced into [0, p), rationals in lowest terms (mpq invariant).
class Scalar {
 public:
  Scalar() : ring_(BaseRing::Z()), v_(0) {}
  Scalar(BaseRing ring, long n) : ring_(ring), v_(n) { reduce(); }
  Scalar(BaseRing ring, const mpz_class& n) : ring_(ring), v_(n) { reduce(); }
  Scalar(BaseRing ring, const mpq_class& q) : ring_(ring), v_(q) {
    if (ring.kind != BaseRing::Kind::Rationals && v_.get_den() != 1)
      throw std::invalid_argument("non-integral scalar over " + ring.str());
    reduce();
  }

  static Scalar zero(BaseRing r) { return Scalar(r, 0); }
  static Scalar one(BaseRing r) { return Scalar(r, 1); }

  const BaseRing& ring() const { return ring_; }
  const mpq_class& value() const { return v_; }
  mpz_class numerator() const { return v_.get_num(); }

  bool is_zero() const { return v_ == 0; }
  bool is_one() const { return v_ == 1; }

  Scalar operator+(const Scalar& o) const { return bin(o, v_ + o.v_); }
  Scalar operator-(const Scalar& o) const { return bin(o, v_ - o.v_); }
  Scalar operator*(const Scalar& o) const { return bin(o, v_ * o.v_); }
  Scalar operator-() const { return Scalar(ring_, mpq_class(-v_)); }
  Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
  Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
  Scalar& operator*=(const Scalar& o) { return *this = *this * o; }
  bool operator==(const Scalar& o) const { return ring_ == o.ring_ && v_ == o.v_; }

  bool is_unit() const {
    switch (ring_.kind) {
      case BaseRing::Kind::Integers: return v_ == 1 || v_ == -1;
      default: return !is_zero();
    }
  }

  Scalar inverse() const {
    if (!is_unit()) throw std::domain_error("scalar is not a unit");
    switch (ring_.kind) {
      case BaseRing::Kind::Integers: return *this;  // +-1
      case BaseRing::Kind::Rationals: return Scalar(ring_, mpq_class(1) / v_);
      default: {
        mpz_class inv;
        mpz_class m(static_cast<unsigned long>(ring_.p));
        if (mpz_invert(inv.get_mpz_t(), v_.get_num().get_mpz_t(), m.get_mpz_t()) == 0)
          throw std::domain_error("scalar is not a unit mod p");
        return Scalar(ring_, inv);
      }
    }
    throw std::logic_error("unreachable");
  }

  /// Exact division; over Z requires divisibility.
  Scalar divide(const Scalar& o) const {
    if (o.is_zero()) throw std::domain_error("division by zero");
    if (ring_.kind == BaseRing::Kind::Integers) {
      mpz_class q, r;
      mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), v_.get_num().get_mpz_t(),
                  o.v_.get_num().get_mpz_t());
      if (r != 0) throw std::domain_error("inexact integer division");
      return Scalar(ring_, q);
    }
    return *this * o.inverse();
  }

  bool divides(const Scalar& o) const {
    if (is_zero()) return o.is_zero();
    if (ring_.kind != BaseRing::Kind::Integers) return true;
    return mpz_divisible_p(o.v_.get_num().get_mpz_t(), v_.get_num().get_mpz_t()) != 0;
  }

  std::string str() const {
    if (ring_.kind == BaseRing::Kind::Rationals && v_.get_den() != 1)
      return v_.get_str();
    return v_.get_num().get_str();
  }

 private:
  Scalar bin(const Scalar& o, mpq_class r) const {
    if (!(ring_ == o.ring_)) throw std::invalid_argument("base ring mismatch");
    return Scalar(ring_, std::move(r));
  }
  void reduce() {
    if (ring_.kind == BaseRing::Kind::PrimeField) {
      mpz_class m(ring_.p), r;
      mpz_fdiv_r(r.get_mpz_t(), v_.get_num().get_mpz_t(), m.get_mpz_t());
      v_ = mpq_class(r);
    }
    v_.canonicalize();
  }

  BaseRing ring_;
  mpq_class v_;
};

}  // namespace dirac
