#include <doctest.h>

#include "dal/parser.hpp"
#include "dal/printer.hpp"
#include "dal/rng.hpp"
#include "dal/syntax.hpp"

using namespace dal;

namespace {

// Random core trees for the round-trip property.
Term random_term(Rng& rng, unsigned depth) {
  switch (depth == 0 ? rng.below(3) : rng.below(6)) {
    case 0:
      return Term::constant(Rational(rng.int_in(-20, 20), 1 + rng.below(9)));
    case 1:
      return Term::var(Variable("x", false));
    case 2:
      return Term::var(Variable(rng.below(2) ? "y" : "vel", rng.below(2) == 0));
    case 3:
      return Term::plus(random_term(rng, depth - 1), random_term(rng, depth - 1));
    case 4:
      return Term::times(random_term(rng, depth - 1), random_term(rng, depth - 1));
    default: {
      Term t = random_term(rng, depth - 1);
      return Term::differential(t);
    }
  }
}

Formula random_formula(Rng& rng, unsigned depth);

Program random_program(Rng& rng, unsigned depth) {
  switch (depth == 0 ? rng.below(2) : rng.below(6)) {
    case 0:
      return Program::assign(Variable("x"), random_term(rng, 1));
    case 1:
      return Program::test(Formula::leq(random_term(rng, 1), random_term(rng, 1)));
    case 2: {
      std::vector<Variable> vars{Variable("x")};
      if (rng.below(2)) vars.push_back(Variable("y"));
      return Program::dap(VarTuple(vars), random_formula(rng, depth - 1));
    }
    case 3:
      return Program::choice(random_program(rng, depth - 1),
                             random_program(rng, depth - 1));
    case 4:
      return Program::seq(random_program(rng, depth - 1),
                          random_program(rng, depth - 1));
    default:
      return Program::star(random_program(rng, depth - 1));
  }
}

Formula random_formula(Rng& rng, unsigned depth) {
  switch (depth == 0 ? rng.below(1) : rng.below(6)) {
    case 0:
      return Formula::leq(random_term(rng, depth), random_term(rng, depth));
    case 1:
      return Formula::not_(random_formula(rng, depth - 1));
    case 2:
      return Formula::and_(random_formula(rng, depth - 1),
                           random_formula(rng, depth - 1));
    case 3:
      return Formula::forall(Variable("q", rng.below(2) == 0),
                             random_formula(rng, depth - 1));
    case 4:
      return Formula::box(random_program(rng, depth - 1),
                          random_formula(rng, depth - 1));
    default: {
      std::vector<Variable> vars{Variable("x")};
      return Formula::refines_on(random_program(rng, depth - 1),
                                 random_program(rng, depth - 1), VarTuple(vars));
    }
  }
}

}  // namespace

TEST_CASE("grammar basics") {
  CHECK(parse_term("(x)'") == Term::differential(Term::var("x")));
  CHECK(parse_term("x'") == Term::var("x", true));
  CHECK(parse_term("-1/2") == Term::constant(Rational(-1, 2)));
  CHECK(print(Term::constant(Rational(-1, 2))) == "-1/2");
  CHECK(parse_term("x^2") == Term::times(Term::var("x"), Term::var("x")));
  CHECK(parse_term("x - y") ==
        Term::plus(Term::var("x"), Term::neg(Term::var("y"))));
  CHECK(print(Term::differential(Term::plus(Term::var("x"), Term::var("y")))) ==
        "(x + y)'");
}

TEST_CASE("desugaring") {
  Term x = Term::var("x");
  Term one = Term::constant(1);
  CHECK(parse_formula("x = 1") == Formula::and_(Formula::leq(x, one), Formula::leq(one, x)));
  CHECK(parse_formula("x < 1") == Formula::not_(Formula::leq(one, x)));
  CHECK(parse_formula("x > 1") == Formula::not_(Formula::leq(x, one)));
  CHECK(parse_formula("x >= 1") == Formula::leq(one, x));
  CHECK(parse_formula("exists q. x <= 1") ==
        Formula::not_(Formula::forall(Variable("q"),
                                      Formula::not_(Formula::leq(x, one)))));
  // Mutual refinement unfolds into the two directions.
  Formula f = parse_formula("a := 1 ==[x] b := 2");
  REQUIRE(f.kind() == FormulaKind::And);
  CHECK(f.left().kind() == FormulaKind::RefinesOn);
  CHECK(f.right().kind() == FormulaKind::RefinesOn);
  CHECK(f.left().ref_lhs() == f.right().ref_rhs());
}

TEST_CASE("dap parsing") {
  Program p = parse_program("{x,y : x^2 + y^2 - 1 = 0}");
  REQUIRE(p.kind() == ProgramKind::Dap);
  CHECK(p.dap_tuple().size() == 2);
  CHECK(p.dap_constraint().kind() == FormulaKind::And);  // equality encoding
  CHECK_THROWS_AS(parse_program("{x, x : x = 0}"), Error);
}

TEST_CASE("sequent parsing") {
  Sequent s = parse_sequent("x = 1, y <= 2 |- x <= y, y <= 3");
  CHECK(s.ante.size() == 2);
  CHECK(s.succ.size() == 2);
  Sequent empty_left = parse_sequent("|- x <= 1");
  CHECK(empty_left.ante.empty());
  Sequent empty_right = parse_sequent("x <= 1 |-");
  CHECK(empty_right.succ.empty());
}

TEST_CASE("round trip on random trees") {
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    Term t = random_term(rng, 4);
    CHECK(parse_term(print(t)) == t);
  }
  for (int i = 0; i < 400; ++i) {
    Formula f = random_formula(rng, 3);
    CHECK(parse_formula(print(f)) == f);
  }
  for (int i = 0; i < 400; ++i) {
    Program p = random_program(rng, 3);
    CHECK(parse_program(print(p)) == p);
  }
}

TEST_CASE("free variables") {
  Term t = parse_term("x + y'");
  VarSet fv = free_vars(t);
  CHECK(fv == VarSet{Variable("x"), Variable("y", true)});

  // Differential contributes the primed copies.
  Term d = parse_term("(x*y)'");
  CHECK(free_vars(d) == VarSet{Variable("x"), Variable("y"), Variable("x", true),
                               Variable("y", true)});

  // Exact differential FV law on random terms.
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    Term e = random_term(rng, 3);
    VarSet inner = free_vars(e);
    VarSet expected = inner;
    VarSet primes = primed_copies(inner);
    expected.insert(primes.begin(), primes.end());
    CHECK(free_vars(Term::differential(e)) == expected);
  }

  // Forall binds exactly its variable; boxes do not bind.
  Formula f = parse_formula("forall x. x <= y");
  CHECK(free_vars(f) == VarSet{Variable("y")});
  Formula boxed = parse_formula("[{x : x = 0}] x <= y");
  VarSet bf = free_vars(boxed);
  CHECK(bf.count(Variable("x")) == 1);
  CHECK(bf.count(Variable("x", true)) == 1);
  CHECK(bf.count(Variable("y")) == 1);
}

TEST_CASE("bound variables") {
  CHECK(bound_vars(parse_program("{x,y : x <= 1}")) ==
        VarSet{Variable("x"), Variable("y"), Variable("x", true),
               Variable("y", true)});
  CHECK(bound_vars(parse_program("?x <= 1")).empty());
  CHECK(bound_vars(parse_program("x := 1 ; {y : y = 0}")) ==
        VarSet{Variable("x"), Variable("y"), Variable("y", true)});
}

TEST_CASE("substitution") {
  Term e = parse_term("x'*y");
  Term r = substitute(e, Variable("y"), Term::constant(3));
  CHECK(r == parse_term("x'*3"));

  CHECK_THROWS_AS(
      substitute(parse_term("(x)'"), Variable("x"), parse_term("y + 1")),
      DifferentialCapture);

  CHECK(substitute(parse_term("2*x*v"), Variable("v"), Term::var("x", true)) ==
        parse_term("2*x*x'"));
}

TEST_CASE("fv bv structural laws") {
  Rng rng(23);
  for (int i = 0; i < 200; ++i) {
    Program a = random_program(rng, 2);
    Program b = random_program(rng, 2);
    VarSet ab = bound_vars(Program::seq(a, b));
    VarSet u = bound_vars(a);
    VarSet vb = bound_vars(b);
    u.insert(vb.begin(), vb.end());
    CHECK(ab == u);
  }
}

TEST_CASE("ac normalization") {
  Formula f1 = parse_formula("x <= 1 & (y <= 2 & z <= 3)");
  Formula f2 = parse_formula("(z <= 3 & x <= 1) & y <= 2");
  CHECK(ac_normal(f1) == ac_normal(f2));
  CHECK(!(ac_normal(f1) == ac_normal(parse_formula("x <= 1 & y <= 2"))));
}
