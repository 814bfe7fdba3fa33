#include <doctest.h>

#include <cmath>

#include "dal/calculus.hpp"
#include "dal/eval.hpp"
#include "dal/parser.hpp"
#include "dal/printer.hpp"
#include "dal/rng.hpp"

using namespace dal;

namespace {

Term random_unprimed_poly(Rng& rng, const std::vector<Variable>& vars,
                          unsigned degree, std::size_t terms) {
  std::vector<Term> parts;
  for (std::size_t i = 0; i < 1 + rng.below(terms); ++i) {
    std::vector<Term> factors{
        Term::constant(Rational(rng.int_in(-9, 9), 1 + rng.below(4)))};
    for (unsigned d = 0; d < rng.below(degree + 1); ++d)
      factors.push_back(Term::var(vars[rng.below(vars.size())]));
    parts.push_back(Term::product(factors));
  }
  return Term::sum(parts);
}

// Numeric determinant via LU with partial pivoting; the independent oracle
// for the symbolic cofactor expansion.
double lu_det(const TermMatrix& m, const NumericState& s) {
  std::size_t n = m.rows;
  std::vector<std::vector<double>> a(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i][j] = eval_term(m.at(i, j), s);
  double det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-300) return 0.0;
    if (piv != col) {
      std::swap(a[piv], a[col]);
      det = -det;
    }
    det *= a[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
    }
  }
  return det;
}

}  // namespace

TEST_CASE("differential by the rewrite rules") {
  CHECK(poly_equal(differential(parse_term("x^2 + y^2 - 1")),
                   parse_term("2*x*x' + 2*y*y'")));
  CHECK(poly_equal(differential(parse_term("z^2*y")),
                   parse_term("2*z'*z*y + z^2*y'")));
  CHECK(poly_equal(differential(Term::constant(5)), Term::constant(0)));
  CHECK_THROWS_AS(differential(parse_term("x'")), PrimedInput);
  CHECK_THROWS_AS(differential(parse_term("(x)'")), NestedDifferential);
  CHECK(!contains_differential(differential(parse_term("x*y*z"))));
}

TEST_CASE("partial derivative clauses") {
  CHECK(poly_equal(partial(parse_term("x*y"), Variable("x")), parse_term("y")));
  CHECK(poly_equal(partial(parse_term("x^2 + y^2 - l^2"), Variable("x")),
                   parse_term("2*x")));
  CHECK(poly_equal(partial(Term::constant(7), Variable("x")), Term::constant(0)));
  CHECK(poly_equal(partial(parse_term("x'*x"), Variable("x", true)),
                   parse_term("x")));
}

TEST_CASE("jacobian shapes") {
  TermMatrix j1 = jacobian({parse_term("x^2 + y^2 - 1")},
                           VarTuple({Variable("x"), Variable("y")}), true);
  CHECK(j1.rows == 1);
  CHECK(j1.cols == 2);
  CHECK(poly_equal(j1.at(0, 0), Term::constant(0)));
  CHECK(poly_equal(j1.at(0, 1), Term::constant(0)));

  TermMatrix j2 = jacobian({parse_term("x*y")},
                           VarTuple({Variable("x"), Variable("y")}), false);
  CHECK(poly_equal(j2.at(0, 0), parse_term("y")));
  CHECK(poly_equal(j2.at(0, 1), parse_term("x")));
}

TEST_CASE("determinant base cases") {
  TermMatrix m1(std::vector<TermVec>{{parse_term("a")}});
  CHECK(determinant(m1) == parse_term("a"));
  TermMatrix m2(std::vector<TermVec>{{parse_term("a"), parse_term("b")},
                                     {parse_term("c"), parse_term("d")}});
  CHECK(poly_equal(determinant(m2), parse_term("a*d - b*c")));
  TermMatrix bad(2, 3);
  CHECK_THROWS_AS(determinant(bad), NonSquare);
}

TEST_CASE("determinant against numeric LU") {
  Rng rng(101);
  std::vector<Variable> vars{Variable("a"), Variable("b"), Variable("c")};
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t n = 1 + rng.below(4);
    TermMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        m.at(i, j) = random_unprimed_poly(rng, vars, 2, 3);
    Term det = determinant(m);
    NumericState s;
    for (const auto& v : vars) s[v] = rng.uniform(-3, 3);
    double sym = eval_term(det, s);
    double num = lu_det(m, s);
    double rel = std::abs(sym - num) /
                 std::max(1.0, std::max(std::abs(sym), std::abs(num)));
    CHECK(rel <= 1e-9);
  }
}

TEST_CASE("leibniz and additivity") {
  Rng rng(55);
  std::vector<Variable> vars{Variable("x"), Variable("y"), Variable("z")};
  for (int trial = 0; trial < 100; ++trial) {
    Term e = random_unprimed_poly(rng, vars, 3, 3);
    Term g = random_unprimed_poly(rng, vars, 3, 3);
    CHECK(poly_equal(differential(Term::times(e, g)),
                     Term::plus(Term::times(differential(e), g),
                                Term::times(e, differential(g)))));
    CHECK(poly_equal(differential(Term::plus(e, g)),
                     Term::plus(differential(e), differential(g))));
  }
}

TEST_CASE("jacobian consistency with differentials") {
  // (E)' equals J_x(E) * x' componentwise for unprimed vectors over the
  // tuple's variables.
  Rng rng(77);
  VarTuple xs({Variable("x"), Variable("y"), Variable("z")});
  std::vector<Variable> vars(xs.vars());
  for (int trial = 0; trial < 60; ++trial) {
    TermVec es;
    for (std::size_t i = 0; i < 1 + rng.below(3); ++i)
      es.push_back(random_unprimed_poly(rng, vars, 3, 3));
    TermMatrix j = jacobian(es, xs, false);
    for (std::size_t i = 0; i < es.size(); ++i) {
      std::vector<Term> parts;
      for (std::size_t k = 0; k < xs.size(); ++k)
        parts.push_back(Term::times(j.at(i, k), Term::var(xs[k].prime())));
      CHECK(poly_equal(differential(es[i]), Term::sum(parts)));
    }
  }
}

TEST_CASE("term evaluation") {
  NumericState s{{Variable("x"), 1.0}, {Variable("y"), 2.0}};
  CHECK(eval_term(parse_term("x + y"), s) == doctest::Approx(3.0));

  NumericState s2{{Variable("x"), 3.0}, {Variable("x", true), 2.0}};
  CHECK(eval_term(parse_term("(x^2)'"), s2) == doctest::Approx(12.0));

  RationalState rs{{Variable("x"), Rational(1, 3)}};
  CHECK(eval_term(parse_term("3*x"), rs) == Rational(1));
  CHECK_THROWS_AS(eval_term(parse_term("q"), s), MissingVariable);
  // Differential evaluation needs the primed entries.
  NumericState s3{{Variable("x"), 3.0}};
  CHECK_THROWS_AS(eval_term(parse_term("(x^2)'"), s3), MissingVariable);
}
