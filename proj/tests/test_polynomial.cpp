#include <doctest.h>

#include "dal/calculus.hpp"
#include "dal/parser.hpp"
#include "dal/eval.hpp"
#include "dal/polynomial.hpp"

using namespace dal;

TEST_CASE("ring identities normalize to zero") {
  CHECK(poly_equal(parse_term("(x+y)^2 - x^2 - 2*x*y - y^2"), Term::constant(0)));
  CHECK(poly_equal(parse_term("2*x*v + 2*y*w"), parse_term("2*(x*v + y*w)")));
  CHECK(poly_equal(parse_term("x*x'"), parse_term("x'*x")));
  CHECK(!poly_equal(parse_term("x*x"), parse_term("x")));
}

TEST_CASE("zero polynomial stores nothing") {
  Polynomial p = normalize(parse_term("x - x"));
  CHECK(p.is_zero());
  CHECK(p.term_count() == 0);
}

TEST_CASE("block lex ranks primed variables first") {
  OrderPtr ord = MonomialOrder::lex({Variable("x"), Variable("y")});
  Polynomial p = Polynomial::from_term(parse_term("x^3 + y*y' + x'"), ord);
  // A primed variable outranks any power of unprimed variables.
  Monomial lead = p.leading_monomial();
  bool has_primed = false;
  for (const auto& [v, e] : lead) has_primed |= v.primed;
  CHECK(has_primed);

  // Within the unprimed block the priority list decides.
  Polynomial q = Polynomial::from_term(parse_term("y^5 + x"), ord);
  CHECK(q.leading_monomial() == Monomial{{Variable("x"), 1}});
}

TEST_CASE("grlex compares by degree first") {
  OrderPtr ord = MonomialOrder::grlex();
  Polynomial p = Polynomial::from_term(parse_term("x + y*y"), ord);
  CHECK(p.leading_monomial() == Monomial{{Variable("y"), 2}});
}

TEST_CASE("polynomial substitution and partial") {
  OrderPtr ord = MonomialOrder::lex();
  Polynomial p = Polynomial::from_term(parse_term("x^2*y + x"), ord);
  Polynomial sub =
      p.substitute(Variable("x"), Polynomial::from_term(parse_term("z + 1"), ord));
  CHECK(sub == Polynomial::from_term(parse_term("(z+1)^2*y + z + 1"), ord));
  Polynomial dx = p.partial(Variable("x"));
  CHECK(dx == Polynomial::from_term(parse_term("2*x*y + 1"), ord));
  CHECK(p.partial(Variable("q")).is_zero());
}

TEST_CASE("monomial content") {
  OrderPtr ord = MonomialOrder::lex();
  Polynomial p = Polynomial::from_term(parse_term("m^2*l^2"), ord);
  CHECK(p.monomial_content() ==
        Monomial{{Variable("m"), 2}, {Variable("l"), 2}});
  Polynomial q = Polynomial::from_term(parse_term("m*x + m*y"), ord);
  CHECK(q.monomial_content() == Monomial{{Variable("m"), 1}});
}

TEST_CASE("to_term reparses to an equal polynomial") {
  OrderPtr ord = MonomialOrder::lex();
  Polynomial p = Polynomial::from_term(parse_term("3*x^2*y - 1/2*y + 4"), ord);
  CHECK(Polynomial::from_term(p.to_term(), ord) == p);
}

TEST_CASE("evaluation modes") {
  OrderPtr ord = MonomialOrder::lex();
  Polynomial p = Polynomial::from_term(parse_term("x^2 + y"), ord);
  RationalState rs{{Variable("x"), Rational(1, 2)}, {Variable("y"), Rational(3)}};
  CHECK(p.evaluate(rs) == Rational(13, 4));
  NumericState ns{{Variable("x"), 0.5}, {Variable("y"), 3.0}};
  CHECK(p.evaluate(ns) == doctest::Approx(3.25));
  RationalState missing;
  CHECK_THROWS_AS(p.evaluate(missing), MissingVariable);
}

TEST_CASE("normalization rejects differentials") {
  CHECK_THROWS_AS(normalize(parse_term("(x)' + 1")), NestedDifferential);
}
