#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "dirac/gmod.hpp"

using namespace dirac;

namespace {

AlgPtr poly_even(BaseRing b) {
  return make_free_presented(b, GradedSet{{"u", -2}});
}

bool pieces_agree(const PresentedModule& m, const PresentedModule& n, Degree lo,
                  Degree hi) {
  for (Degree d = lo; d <= hi; ++d)
    if (!(module_piece(m, d) == module_piece(n, d))) return false;
  return true;
}

}  // namespace

TEST_CASE("twist shifts pieces by twice the spin") {
  auto A = poly_even(BaseRing::Q());
  auto M = free_module(A, {0});
  auto M0 = twist(M, Spin{0});
  CHECK(*M0 == *M);
  auto Ms = twist(M, Spin::of_integer(1));
  for (Degree k = -8; k <= 0; ++k)
    CHECK(module_piece(*Ms, k) == module_piece(*M, k + 2));
  auto Mst = twist(twist(M, Spin::half(1)), Spin::half(3));
  CHECK(*Mst == *twist(M, Spin::of_integer(2)));
}

TEST_CASE("tensor of twisted lines adds the twists") {
  auto A = poly_even(BaseRing::Q());
  auto L1 = twist(free_module(A, {0}), Spin::of_integer(1));
  auto L2 = twist(free_module(A, {0}), Spin::of_integer(2));
  auto T = tensor(L1, L2);
  auto L3 = twist(free_module(A, {0}), Spin::of_integer(3));
  CHECK(pieces_agree(*T, *L3, -10, 8));
}

TEST_CASE("tensor of A/(x) with itself collapses") {
  auto A = poly_even(BaseRing::Q());
  Element u = Element::generator(A->free, "u");
  auto K = make_module(A, {0}, {{u}}, {-2});
  auto T = tensor(K, K);
  CHECK(pieces_agree(*T, *K, -8, 0));
}

TEST_CASE("tensor with the free line is the identity degreewise") {
  auto A = poly_even(BaseRing::Fp(3));
  Element u = Element::generator(A->free, "u");
  auto M = make_module(A, {0, -2}, {{u * u, Element::zero(A->free)}}, {-4});
  auto T = tensor(M, free_module(A, {0}));
  CHECK(pieces_agree(*T, *M, -10, 0));
}

TEST_CASE("pieces of the free line over Z[t] with t odd") {
  auto A = make_free_presented(BaseRing::Z(), GradedSet{{"t", -1}});
  auto M = free_module(A, {0});
  auto p = module_piece(*M, -2);
  CHECK(p.rank == 0);
  REQUIRE(p.torsion.size() == 1);
  CHECK(p.torsion[0] == 2);
  CHECK(module_piece(*M, 0).rank == 1);
}

TEST_CASE("zero module has zero pieces") {
  auto A = poly_even(BaseRing::Q());
  auto Z = make_module(A, {0}, {{Element::one(A->free)}}, {0});
  for (Degree d = -6; d <= 0; ++d) CHECK(module_piece(*Z, d).is_zero());
}

TEST_CASE("A/(x) over k[x] vanishes where x spans") {
  auto A = poly_even(BaseRing::Q());
  Element u = Element::generator(A->free, "u");
  auto K = make_module(A, {0}, {{u}}, {-2});
  CHECK(module_piece(*K, -2).is_zero());
  CHECK(module_piece(*K, 0).rank == 1);
}

TEST_CASE("minimal generators by Nakayama") {
  // coker of the identity is zero
  auto A = poly_even(BaseRing::Q());
  auto Z = make_module(A, {0}, {{Element::one(A->free)}}, {0});
  CHECK(minimal_generators(*Z).empty());
  for (Degree d = -6; d <= 0; ++d) CHECK(module_piece(*Z, d).is_zero());

  // A + A/(x) over F2[x]/(x^3), x odd of degree -1
  auto F = make_free_algebra(BaseRing::Fp(2), GradedSet{{"x", -1}});
  Element x = Element::generator(F, "x");
  auto B = make_presented(F, {x * x * x});
  auto M = make_module(B, {0, 0}, {{Element::zero(F), x}}, {-1});
  auto mg = minimal_generators(*M);
  CHECK(mg == std::vector<Degree>{0, 0});

  // free modules report their rank
  auto Fr = free_module(A, {0, -2, -2});
  CHECK(minimal_generators(*Fr).size() == 3);
}

TEST_CASE("tor1 vanishes against free modules") {
  auto A = poly_even(BaseRing::Q());
  Element u = Element::generator(A->free, "u");
  auto N = make_module(A, {0}, {{u}}, {-2});
  auto Fr = free_module(A, {0, -2});
  for (Degree d = -6; d <= 0; ++d) CHECK(tor1(*Fr, *N, d).is_zero());
}

TEST_CASE("tor1 of the residue field with itself over k[x]") {
  auto A = poly_even(BaseRing::Q());
  auto k = residue_module(A);
  auto t = tor1(*k, *k, -2);
  CHECK(t.rank == 1);
  CHECK(t.torsion.empty());
  CHECK(tor1(*k, *k, -4).is_zero());
  CHECK(tor1(*k, *k, 0).is_zero());
}

TEST_CASE("tor1 over the integers recovers the classical value") {
  auto A = make_free_presented(BaseRing::Z(), GradedSet{});
  Element two = Element::constant(A->free, 2);
  auto M = make_module(A, {0}, {{two}}, {0});
  auto t = tor1(*M, *M, 0);
  CHECK(t.rank == 0);
  REQUIRE(t.torsion.size() == 1);
  CHECK(t.torsion[0] == 2);
}

TEST_CASE("flatness: free, torsion witness, residue field") {
  auto A = poly_even(BaseRing::Q());
  CHECK(flatness_status(*free_module(A, {0, -2})).status == FlatnessResult::Status::Flat);

  // finitely generated torsion group over the bare integers
  auto Z = make_free_presented(BaseRing::Z(), GradedSet{});
  auto T = make_module(Z, {0}, {{Element::constant(Z->free, 2)}}, {0});
  auto r = flatness_status(*T);
  CHECK(r.status == FlatnessResult::Status::NotFlat);
  CHECK(r.witness.find("2") != std::string::npos);

  auto k = residue_module(A);
  CHECK(flatness_status(*k).status == FlatnessResult::Status::NotFlat);

  // a redundant presentation of a free module is recognized as flat
  Element u = Element::generator(A->free, "u");
  auto R = make_module(A, {0, -2}, {{u, Element::one(A->free)}}, {-2});
  CHECK(flatness_status(*R).status == FlatnessResult::Status::Flat);
}

TEST_CASE("equational factorization through a free module") {
  auto A = poly_even(BaseRing::Q());
  Element u = Element::generator(A->free, "u");

  SECTION("zero relation map factors trivially") {
    auto F = free_module(A, {0});
    auto Fp = free_module(A, {-2});
    auto M = free_module(A, {0});
    ModuleMap a = make_module_map(Fp, F, {{Element::zero(A->free)}}, false);
    ModuleMap x = make_module_map(F, M, {{Element::one(A->free)}}, false);
    auto fac = equational_factor(a, x);
    REQUIRE(fac);
    // recomposition: y after b equals x, and b kills a
    ModuleMap yb = compose(fac->y, fac->b);
    for (std::size_t j = 0; j < F->ngens(); ++j) {
      std::vector<Element> diff;
      for (std::size_t t = 0; t < M->ngens(); ++t)
        diff.push_back(yb.matrix[t][j] - x.matrix[t][j]);
      CHECK(module_tuple_is_zero(*M, diff, F->generator_degrees[j]));
    }
    ModuleMap ba = compose(fac->b, a);
    for (const auto& row : ba.matrix)
      for (const auto& e : row) CHECK(is_zero_in(e, *A));
  }

  SECTION("relation with a unit entry factors") {
    auto F = free_module(A, {0, -2});
    auto Fp = free_module(A, {-2});
    auto M = make_module(A, {0, -2}, {{u, Element::one(A->free)}}, {-2});
    ModuleMap a = make_module_map(Fp, F, {{u}, {Element::one(A->free)}}, false);
    ModuleMap x = make_module_map(
        F, M,
        {{Element::one(A->free), Element::zero(A->free)},
         {Element::zero(A->free), Element::one(A->free)}},
        false);
    auto fac = equational_factor(a, x);
    REQUIRE(fac);
    ModuleMap yb = compose(fac->y, fac->b);
    for (std::size_t j = 0; j < F->ngens(); ++j) {
      std::vector<Element> diff;
      for (std::size_t t = 0; t < M->ngens(); ++t)
        diff.push_back(yb.matrix[t][j] - x.matrix[t][j]);
      CHECK(module_tuple_is_zero(*M, diff, F->generator_degrees[j]));
    }
    ModuleMap ba = compose(fac->b, a);
    for (const auto& row : ba.matrix)
      for (const auto& e : row) CHECK(is_zero_in(e, *A));
  }

  SECTION("augmentation of the residue field does not factor") {
    auto F = free_module(A, {0});
    auto Fp = free_module(A, {-2});
    auto M = residue_module(A);
    ModuleMap a = make_module_map(Fp, F, {{u}}, false);
    ModuleMap x = make_module_map(F, M, {{Element::one(A->free)}}, false);
    CHECK(!equational_factor(a, x));
  }
}

TEST_CASE("evenness classification") {
  SECTION("even module over an even algebra") {
    auto A = poly_even(BaseRing::Q());
    Element u = Element::generator(A->free, "u");
    auto M = make_module(A, {0}, {{u * u}}, {-4});
    auto r = evenness_status(*M, 8);
    CHECK(r.status == EvennessResult::Status::EvenlyPresented);
  }
  SECTION("residue field of an odd line is generated but not presented evenly") {
    for (BaseRing b : {BaseRing::Q(), BaseRing::Fp(2)}) {
      auto F = make_free_algebra(b, GradedSet{{"x", -1}});
      auto A = make_presented(F, {});
      auto k = residue_module(A);
      auto r = evenness_status(*k, 6);
      CHECK(r.status == EvennessResult::Status::EvenlyGeneratedOnly);
    }
  }
  SECTION("free module on an odd generator is not evenly generated") {
    auto A = poly_even(BaseRing::Q());
    auto M = free_module(A, {-1});
    auto r = evenness_status(*M, 6);
    CHECK(r.status == EvennessResult::Status::NotEvenlyGenerated);
  }
}

TEST_CASE("tensor symmetry and twist compatibility degreewise") {
  std::mt19937 rng(31);
  auto F = make_free_algebra(BaseRing::Fp(3), GradedSet{{"x", -1}, {"u", -2}});
  Element x = Element::generator(F, "x"), u = Element::generator(F, "u");
  auto A = make_presented(F, {});
  auto M = make_module(A, {0}, {{u}}, {-2});
  auto N = make_module(A, {0, -1}, {{x, Element::one(F)}}, {-1});
  auto MN = tensor(M, N);
  auto NM = tensor(N, M);
  CHECK(pieces_agree(*MN, *NM, -6, 0));

  Spin s = Spin::of_integer(1);
  auto lhs = tensor(twist(M, s), N);
  auto rhs = twist(tensor(M, N), s);
  CHECK(pieces_agree(*lhs, *rhs, -6, 2));
}

TEST_CASE("flat examples that are evenly generated are evenly presented") {
  auto A = poly_even(BaseRing::Q());
  for (const auto& M : {free_module(A, {0}), free_module(A, {0, -2})}) {
    auto f = flatness_status(*M);
    REQUIRE(f.status == FlatnessResult::Status::Flat);
    auto e = evenness_status(*M, 8);
    if (e.status != EvennessResult::Status::NotEvenlyGenerated)
      CHECK(e.status == EvennessResult::Status::EvenlyPresented);
  }
}
