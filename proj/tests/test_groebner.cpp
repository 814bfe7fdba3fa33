#include <doctest.h>

#include "dal/groebner.hpp"
#include "dal/parser.hpp"

using namespace dal;

namespace {
Polynomial poly(const std::string& text, const OrderPtr& ord) {
  return Polynomial::from_term(parse_term(text), ord);
}
}  // namespace

TEST_CASE("a single generator is its own basis") {
  OrderPtr ord = MonomialOrder::lex();
  auto basis = groebner_basis({poly("x - 1", ord)});
  REQUIRE(basis.size() == 1);
  CHECK(basis[0] == poly("x - 1", ord));
}

TEST_CASE("inconsistent generators produce a unit") {
  OrderPtr ord = MonomialOrder::lex({Variable("x"), Variable("y")});
  auto basis = groebner_basis({poly("x*y - 1", ord), poly("x", ord)});
  bool has_unit = false;
  for (const auto& g : basis) has_unit |= g.is_constant() && !g.is_zero();
  CHECK(has_unit);
}

TEST_CASE("elimination of primed variables") {
  // Basis of <x^2+y^2-1, x'x+y'y> under the primed-over-unprimed order: the
  // unprimed members generate exactly the circle ideal, checked by membership
  // both directions.
  OrderPtr ord = MonomialOrder::lex({Variable("x"), Variable("y")});
  Polynomial circle = poly("x^2 + y^2 - 1", ord);
  Polynomial tangent = poly("x'*x + y'*y", ord);
  auto basis = groebner_basis({circle, tangent});
  std::vector<Polynomial> unprimed;
  for (const auto& g : basis)
    if (!g.has_primed()) unprimed.push_back(g);
  REQUIRE(!unprimed.empty());
  // circle ideal contains every unprimed basis element...
  auto circle_basis = groebner_basis({circle});
  for (const auto& g : unprimed) CHECK(in_ideal(g, circle_basis));
  // ...and the unprimed elements generate the circle back.
  CHECK(in_ideal(circle, groebner_basis(unprimed)));
}

TEST_CASE("reduced basis is self-reduced") {
  OrderPtr ord = MonomialOrder::lex({Variable("x"), Variable("y"), Variable("z")});
  auto basis = groebner_basis({poly("x^2 + y", ord), poly("x*y + z", ord),
                               poly("y^2 - z", ord)});
  for (std::size_t i = 0; i < basis.size(); ++i) {
    CHECK(basis[i].leading_coefficient() == Rational(1));
    std::vector<Polynomial> others;
    for (std::size_t j = 0; j < basis.size(); ++j)
      if (j != i) others.push_back(basis[j]);
    CHECK(normal_form(basis[i], others) == basis[i]);
  }
  // S-polynomial closure: the normal form of every S-pair vanishes.
  auto spoly = [&](const Polynomial& f, const Polynomial& g) {
    Monomial l = mono_lcm(f.leading_monomial(), g.leading_monomial());
    return f.mono_scaled(mono_div(l, f.leading_monomial()),
                         f.leading_coefficient().inverse()) -
           g.mono_scaled(mono_div(l, g.leading_monomial()),
                         g.leading_coefficient().inverse());
  };
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = i + 1; j < basis.size(); ++j)
      CHECK(normal_form(spoly(basis[i], basis[j]), basis).is_zero());
}

TEST_CASE("normal form reduces and is idempotent") {
  OrderPtr ord = MonomialOrder::lex({Variable("x"), Variable("y")});
  auto basis = groebner_basis({poly("x^2 - y", ord)});
  Polynomial r = normal_form(poly("x^4", ord), basis);
  CHECK(r == poly("y^2", ord));
  CHECK(normal_form(r, basis) == r);
  CHECK(in_ideal(poly("x^4 - y^2", ord), basis));
}

TEST_CASE("pair limit raises a resource error") {
  OrderPtr ord = MonomialOrder::lex({Variable("x"), Variable("y"), Variable("z")});
  GroebnerConfig tight;
  tight.pair_limit = 1;
  CHECK_THROWS_AS(groebner_basis({poly("x^2 + y*z", ord), poly("y^2 + x*z", ord),
                                  poly("z^2 + x*y", ord)},
                                 tight),
                  ResourceLimit);
}
