#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dirac {

/// Homological degree of a homogeneous element. Cohomological degree is -d.
using Degree = std::int64_t;

inline bool is_odd(Degree d) { return (d % 2) != 0; }

/// Exact half-integer, stored as numerator over the fixed denominator 2.
/// spin(x) = -deg(x)/2, so odd degrees give genuine half-integers.
struct Spin {
  std::int64_t numerator = 0;  // value is numerator/2

  constexpr bool operator==(const Spin&) const = default;
  constexpr Spin operator+(Spin o) const { return {numerator + o.numerator}; }
  constexpr Spin operator-(Spin o) const { return {numerator - o.numerator}; }
  constexpr Spin operator-() const { return {-numerator}; }

  bool is_integer() const { return numerator % 2 == 0; }

  /// The degree shift 2s induced by a Serre twist of spin s.
  Degree twice() const { return numerator; }

  static Spin of_integer(std::int64_t n) { return {2 * n}; }
  static Spin half(std::int64_t numerator) { return {numerator}; }

  std::string str() const {
    if (numerator % 2 == 0) return std::to_string(numerator / 2);
    return std::to_string(numerator) + "/2";
  }
};

/// The sign (-1)^{d1*d2} picked up when homogeneous elements of degrees
/// d1 and d2 swap positions.
inline int koszul_sign(Degree d1, Degree d2) {
  return (is_odd(d1) && is_odd(d2)) ? -1 : +1;
}

inline Spin spin_of(Degree d) { return Spin{-d}; }

/// An ordered set of named homogeneous generators. Declaration order is the
/// canonical order used for monomial normal forms everywhere downstream.
struct GradedSet {
  struct Entry {
    std::string name;
    Degree degree = 0;
    bool operator==(const Entry&) const = default;
  };
  std::vector<Entry> entries;

  GradedSet() = default;
  GradedSet(std::initializer_list<Entry> es) : entries(es) { check(); }
  explicit GradedSet(std::vector<Entry> es) : entries(std::move(es)) { check(); }

  std::size_t size() const { return entries.size(); }
  const Entry& operator[](std::size_t i) const { return entries[i]; }

  int index_of(const std::string& name) const {
    for (std::size_t i = 0; i < entries.size(); ++i)
      if (entries[i].name == name) return static_cast<int>(i);
    return -1;
  }

  bool operator==(const GradedSet&) const = default;

 private:
  void check() const {
    for (std::size_t i = 0; i < entries.size(); ++i)
      for (std::size_t j = i + 1; j < entries.size(); ++j)
        if (entries[i].name == entries[j].name)
          throw std::invalid_argument("duplicate generator name: " + entries[i].name);
  }
};

}  // namespace dirac
