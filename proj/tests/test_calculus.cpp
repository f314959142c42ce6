#include <catch2/catch_amalgamated.hpp>

#include "dirac/calculus.hpp"

using namespace dirac;

namespace {

// B = Q[t, u]/(u^2 - 2t) over A = Q[t]
struct QuadraticModel {
  AlgPtr A, B;
  RelativePresentation rp;
};

QuadraticModel quadratic_model(BaseRing k) {
  auto A = make_free_presented(k, GradedSet{{"t", -4}});
  auto F = make_free_algebra(k, GradedSet{{"t", -4}, {"u", -2}});
  Element t = Element::generator(F, "t"), u = Element::generator(F, "u");
  Element eq = u * u - t.scaled(Scalar(k, 2));
  auto B = make_presented(F, {eq});
  return {A, B, make_relative(A, B, {eq})};
}

}  // namespace

TEST_CASE("differentials of a free extension are free") {
  auto A = make_free_presented(BaseRing::Q(), GradedSet{});
  auto F = make_free_algebra(BaseRing::Q(), GradedSet{{"x", -1}, {"y", -1}});
  auto B = make_presented(F, {});
  auto rp = make_relative(A, B, {});
  auto omega = kaehler(rp);
  CHECK(omega->ngens() == 2);
  CHECK(omega->nrels() == 0);
  CHECK(omega->generator_degrees == std::vector<Degree>{-1, -1});
}

TEST_CASE("differentials of an odd line do not vanish") {
  auto k = make_free_presented(BaseRing::Q(), GradedSet{});
  auto ke = make_free_presented(BaseRing::Q(), GradedSet{{"e", -1}});
  auto rp = make_relative(k, ke, {});
  auto omega = kaehler(rp);
  CHECK(minimal_generators(*omega) == std::vector<Degree>{-1});
  CHECK(!is_unramified(MapDesc{rp}));
}

TEST_CASE("differentials of a quadratic extension carry the exponent") {
  auto m = quadratic_model(BaseRing::Q());
  auto omega = kaehler(m.rp);
  REQUIRE(omega->nrels() == 1);
  // relation row is the partial 2u of the defining equation
  Element u = Element::generator(m.B->free, "u");
  CHECK(omega->relation_matrix[0][0] == u.scaled(Scalar(BaseRing::Q(), 2)));
  // Omega = B/(u) du: one dimension in degree -2, nothing below
  CHECK(module_piece(*omega, -2).rank == 1);
  CHECK(module_piece(*omega, -4).is_zero());
  CHECK(module_piece(*omega, -6).is_zero());
}

TEST_CASE("jacobian rows carry the signed partials") {
  auto A = make_free_presented(BaseRing::Z(), GradedSet{});
  auto F = make_free_algebra(BaseRing::Z(), GradedSet{{"x", -1}, {"y", -1}});
  Element x = Element::generator(F, "x"), y = Element::generator(F, "y");
  auto B = make_presented(F, {x * y});
  auto rp = make_relative(A, B, {x * y});
  auto j = jacobian(rp);
  REQUIRE(j.size() == 1);
  CHECK(j[0][0] == -y);
  CHECK(j[0][1] == x);

  // over the prime field with both variables adjoined
  auto k5 = make_free_presented(BaseRing::Fp(5), GradedSet{});
  auto m5 = quadratic_model(BaseRing::Fp(5));
  auto rp5 = make_relative(k5, m5.B, m5.rp.equations);
  auto j5 = jacobian(rp5);
  Element u = Element::generator(m5.B->free, "u");
  Element two_u = u.scaled(Scalar(BaseRing::Fp(5), 2));
  REQUIRE(j5.size() == 1);
  REQUIRE(j5[0].size() == 2);
  CHECK(j5[0][0] == Element::constant(m5.B->free, -2));  // d/dt
  CHECK(j5[0][1] == two_u);                              // d/du

  auto empty = make_relative(A, B, {});
  CHECK(jacobian(empty).empty());
}

TEST_CASE("standard smoothness") {
  auto k = make_free_presented(BaseRing::Q(), GradedSet{});
  auto kx = make_free_presented(BaseRing::Q(), GradedSet{{"x", -2}});
  CHECK(is_standard_smooth(make_relative(k, kx, {})).ok);

  auto F = make_free_algebra(BaseRing::Q(), GradedSet{{"x", -2}});
  Element x = Element::generator(F, "x");
  auto B = make_presented(F, {x * x});
  CHECK(!is_standard_smooth(make_relative(k, B, {x * x})).ok);

  // over Z with no equations
  auto Z = make_free_presented(BaseRing::Z(), GradedSet{});
  auto Zt = make_free_presented(BaseRing::Z(), GradedSet{{"t", -1}});
  CHECK(is_standard_smooth(make_relative(Z, Zt, {})).ok);
}

TEST_CASE("unramified certificates") {
  auto A = make_free_presented(BaseRing::Q(), GradedSet{{"u", -2}});
  Element u = Element::generator(A->free, "u");
  // identity
  AlgebraMap id = make_algebra_map(A, A, {u});
  CHECK(is_unramified(MapDesc{id}));
  // localization
  CHECK(is_unramified(MapDesc{make_localization_map(A, u)}));
  // field extensions: e invertible vs not
  auto ok = make_field_extension(BaseRing::Fp(5), -4, -2, 2, Scalar(BaseRing::Fp(5), 3));
  CHECK(is_unramified(MapDesc{ok}));
  auto bad = make_field_extension(BaseRing::Fp(2), -2, -1, 2, Scalar(BaseRing::Fp(2), 1));
  CHECK(!is_unramified(MapDesc{bad}));
}

TEST_CASE("etale certificates on the field-extension corpus") {
  auto e1 = make_field_extension(BaseRing::Fp(5), -4, -2, 2, Scalar(BaseRing::Fp(5), 3));
  CHECK(etale_certificate(MapDesc{e1}).status == EtaleResult::Status::Etale);
  // beta^(p-1) inside beta^(+-1): e = p - 1
  auto e2 = make_field_extension(BaseRing::Fp(3), -8, -2, 4, Scalar(BaseRing::Fp(3), 1));
  CHECK(etale_certificate(MapDesc{e2}).status == EtaleResult::Status::Etale);
  auto e3 = make_field_extension(BaseRing::Fp(11), -12, -2, 6, Scalar(BaseRing::Fp(11), 1));
  CHECK(etale_certificate(MapDesc{e3}).status == EtaleResult::Status::Etale);

  // odd adjoined line: smooth and finite but not etale
  auto k = make_free_presented(BaseRing::Q(), GradedSet{});
  auto ke = make_free_presented(BaseRing::Q(), GradedSet{{"e", -1}});
  auto rp = make_relative(k, ke, {});
  CHECK(is_standard_smooth(rp).ok);
  CHECK(etale_certificate(MapDesc{rp}).status == EtaleResult::Status::NotEtale);

  // ramified char-2 family
  auto e4 = make_field_extension(BaseRing::Fp(2), -4, -2, 2, Scalar(BaseRing::Fp(2), 1));
  CHECK(etale_certificate(MapDesc{e4}).status == EtaleResult::Status::NotEtale);
}

TEST_CASE("evenness of maps") {
  auto A = make_free_presented(BaseRing::Q(), GradedSet{{"u", -2}});
  Element u = Element::generator(A->free, "u");
  AlgebraMap id = make_algebra_map(A, A, {u});
  CHECK(is_even_map(MapDesc{id}).status == EvenMapResult::Status::Even);

  auto k = make_free_presented(BaseRing::Q(), GradedSet{});
  auto kx = make_free_presented(BaseRing::Q(), GradedSet{{"x", -1}});
  AlgebraMap incl = make_algebra_map(k, kx, {});
  auto r = is_even_map(MapDesc{incl}, 8);
  CHECK(r.status == EvenMapResult::Status::NotEven);
  CHECK(r.witness == -1);

  auto ext = make_field_extension(BaseRing::Fp(5), -4, -2, 2, Scalar(BaseRing::Fp(5), 3));
  CHECK(is_even_map(MapDesc{ext}).status == EvenMapResult::Status::Even);

  auto char2 = make_field_extension(BaseRing::Fp(2), -2, -1, 2, Scalar(BaseRing::Fp(2), 1));
  CHECK(is_even_map(MapDesc{char2}).status == EvenMapResult::Status::NotEven);

  CHECK(is_even_map(MapDesc{make_localization_map(A, u)}).status ==
        EvenMapResult::Status::Even);
}

TEST_CASE("even part generators") {
  auto Zxy = make_free_presented(BaseRing::Z(), GradedSet{{"x", -1}, {"y", -1}});
  auto g = even_generators(*Zxy, 8);
  REQUIRE(g.size() == 3);
  Element x = Element::generator(Zxy->free, "x"), y = Element::generator(Zxy->free, "y");
  CHECK(g[0] == x * x);
  CHECK(g[1] == x * y);
  CHECK(g[2] == y * y);

  auto even = make_free_presented(BaseRing::Q(), GradedSet{{"u", -2}, {"v", -4}});
  auto ge = even_generators(*even, 8);
  REQUIRE(ge.size() == 2);
  CHECK(ge[0] == Element::generator(even->free, "u"));
  CHECK(ge[1] == Element::generator(even->free, "v"));

  auto F3 = make_free_presented(BaseRing::Fp(3), GradedSet{{"x", -1}, {"y", -1}});
  auto g3 = even_generators(*F3, 8);
  REQUIRE(g3.size() == 1);
  Element x3 = Element::generator(F3->free, "x"), y3 = Element::generator(F3->free, "y");
  CHECK(g3[0] == x3 * y3);
}

TEST_CASE("conormal sequence dimensions") {
  // A = Q, B = A[u], C = B/(u^2): C x Omega_{B/A} -> Omega_{C/A} -> Omega_{C/B} -> 0
  auto A = make_free_presented(BaseRing::Q(), GradedSet{});
  auto F = make_free_algebra(BaseRing::Q(), GradedSet{{"u", -2}});
  Element u = Element::generator(F, "u");
  auto B = make_presented(F, {});
  auto C = make_presented(F, {u * u});
  auto omega_BA = kaehler(make_relative(A, B, {}));
  auto omega_CA = kaehler(make_relative(A, C, {u * u}));
  // C has no generators over B, so Omega_{C/B} = 0; the surjection forces
  // dim Omega_{C/A} <= dim C x Omega_{B/A} degreewise
  auto base_change = make_module(C, omega_BA->generator_degrees, {}, {});
  for (Degree d = -10; d <= 0; ++d) {
    long lhs = module_piece(*base_change, d).rank;
    long mid = module_piece(*omega_CA, d).rank;
    CHECK(mid <= lhs);
  }
  CHECK(module_piece(*omega_CA, -2).rank == 1);
  CHECK(module_piece(*omega_CA, -4).is_zero());  // d(u^2) = 2u du kills u du
  CHECK(module_piece(*omega_CA, -6).is_zero());
}

TEST_CASE("differential dimensions are stable under base change of scalars") {
  std::vector<BaseRing> bases = {BaseRing::Q(), BaseRing::Fp(5), BaseRing::Fp(7)};
  std::vector<std::vector<long>> dims;
  for (BaseRing k : bases) {
    auto m = quadratic_model(k);
    auto omega = kaehler(m.rp);
    std::vector<long> row;
    for (Degree d = -10; d <= 0; ++d) row.push_back(module_piece(*omega, d).rank);
    dims.push_back(std::move(row));
  }
  CHECK(dims[0] == dims[1]);
  CHECK(dims[0] == dims[2]);
}

TEST_CASE("etale implies even and never not-flat on the corpus") {
  std::vector<MapDesc> corpus;
  auto A1 = make_free_presented(BaseRing::Q(), GradedSet{{"u", -2}});
  corpus.push_back(make_localization_map(A1, Element::generator(A1->free, "u")));
  auto A2 = make_free_presented(BaseRing::Fp(3), GradedSet{{"v", -4}});
  corpus.push_back(make_localization_map(A2, Element::generator(A2->free, "v")));
  corpus.push_back(MapDesc{
      make_field_extension(BaseRing::Fp(5), -4, -2, 2, Scalar(BaseRing::Fp(5), 3))});
  corpus.push_back(MapDesc{
      make_field_extension(BaseRing::Fp(3), -8, -2, 4, Scalar(BaseRing::Fp(3), 1))});
  for (const auto& phi : corpus) {
    auto et = etale_certificate(phi);
    REQUIRE(et.status == EtaleResult::Status::Etale);
    CHECK(is_even_map(phi, 32).status == EvenMapResult::Status::Even);
    CHECK(map_flatness_status(phi, 32).status != FlatnessResult::Status::NotFlat);
    CHECK(multiplication_tor1_vanishes(phi).vanishes);
  }
}

TEST_CASE("multiplication Tor vanishing certificates") {
  auto AZ = make_free_presented(BaseRing::Z(), GradedSet{{"t", -1}});
  // odd localization over Z: the diagonal identity needs the 2-torsion rule
  auto loc = make_localization_map(AZ, Element::generator(AZ->free, "t"));
  CHECK(multiplication_tor1_vanishes(MapDesc{loc}).vanishes);

  auto ramified = make_field_extension(BaseRing::Fp(2), -4, -2, 2, Scalar(BaseRing::Fp(2), 1));
  CHECK(!multiplication_tor1_vanishes(MapDesc{ramified}).vanishes);
}

TEST_CASE("smooth-not-flat separation over the integers") {
  auto Z = make_free_presented(BaseRing::Z(), GradedSet{});
  auto Zt = make_free_presented(BaseRing::Z(), GradedSet{{"t", -1}});
  auto rp = make_relative(Z, Zt, {});
  CHECK(is_standard_smooth(rp).ok);
  auto fl = map_flatness_status(MapDesc{rp}, 12);
  CHECK(fl.status == FlatnessResult::Status::NotFlat);
  CHECK(fl.witness.find("degree -2") != std::string::npos);
}
