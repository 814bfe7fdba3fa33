#include <doctest.h>

#include "dal/groebner.hpp"
#include "dal/kernel.hpp"
#include "dal/parser.hpp"
#include "dal/printer.hpp"
#include "dal/reduction.hpp"
#include "dal/rng.hpp"

using namespace dal;

namespace {

DaeSystem circle_system() {
  return DaeSystem::from_decl(parse_system_file(R"(
    system circle {
      states x, y;
      eq x^2 + y^2 - 1 = 0;
    })")[0]);
}

DaeSystem pendulum_system() {
  return DaeSystem::from_decl(parse_system_file(R"(
    system pendulum {
      states x, y, v, w, lambda;
      params m, g, l;
      eq x' - v = 0;
      eq m*v' - lambda*x = 0;
      eq y' - w = 0;
      eq m*w' - lambda*y - m*g = 0;
      eq x^2 + y^2 - l^2 = 0;
    })")[0]);
}

bool cert_proved(const ReductionResult& r) {
  Oracle oracle;
  return check(r.certificate, oracle, KernelConfig{}).status ==
         OverallStatus::Proved;
}

}  // namespace

TEST_CASE("solved derivative detection") {
  DaeSystem sys = pendulum_system();
  REQUIRE(sys.solved_derivatives.count(Variable("x", true)) == 1);
  REQUIRE(sys.solved_derivatives.count(Variable("y", true)) == 1);
  CHECK(sys.solved_derivatives.at(Variable("x", true)) == parse_term("v"));
  CHECK(sys.solved_derivatives.at(Variable("y", true)) == parse_term("w"));
  // m*v' is not of the solved shape.
  CHECK(sys.solved_derivatives.count(Variable("v", true)) == 0);
}

TEST_CASE("system declarations are validated") {
  CHECK_THROWS_AS(DaeSystem::from_decl(parse_system_file(
                      "system bad { states x; eq z' - 1 = 0; }")[0]),
                  Error);
  CHECK_THROWS_AS(DaeSystem::from_decl(parse_system_file(
                      "system bad { states x; params x; eq x - 1 = 0; }")[0]),
                  Error);
}

TEST_CASE("extraction strategies") {
  DaeSystem sys = pendulum_system();
  auto syntactic =
      extract_algebraic_part(sys, ExtractStrategy::Syntactic, {});
  REQUIRE(syntactic.size() == 1);
  CHECK(poly_equal(syntactic[0].to_term(), parse_term("x^2 + y^2 - l^2")));

  auto elim = extract_algebraic_part(sys, ExtractStrategy::Elimination, {});
  REQUIRE(!elim.empty());
  auto circle_basis = groebner_basis({normalize(parse_term("x^2+y^2-l^2"), sys.order())});
  for (const auto& g : elim) CHECK(in_ideal(g, circle_basis));

  // Explicit ODEs have no algebraic part.
  DaeSystem ode = DaeSystem::from_decl(
      parse_system_file("system ode { states x; eq x' + x = 0; }")[0]);
  CHECK(extract_algebraic_part(ode, ExtractStrategy::Syntactic, {}).empty());
}

TEST_CASE("reduce_modulo substitutes and reduces") {
  DaeSystem sys = pendulum_system();
  std::vector<Polynomial> algebraic{
      normalize(parse_term("x^2 + y^2 - l^2"), sys.order())};
  auto red = reduce_modulo({parse_term("2*x*x' + 2*y*y'")}, sys, algebraic);
  REQUIRE(red.size() == 1);
  CHECK(poly_equal(red[0].to_term(), parse_term("2*x*v + 2*y*w")));

  // A term already in normal form stays put.
  auto noop = reduce_modulo({parse_term("v*w")}, sys, algebraic);
  REQUIRE(noop.size() == 1);
  CHECK(poly_equal(noop[0].to_term(), parse_term("v*w")));
}

TEST_CASE("closure of an explicit ODE") {
  DaeSystem ode = DaeSystem::from_decl(
      parse_system_file("system ode { states x; eq x' + x = 0; }")[0]);
  ClosureInfo info = closure_check(ode);
  CHECK(info.closed);
  CHECK(poly_equal(info.det, Term::constant(1)));
  CHECK(info.parameter_condition.empty());
}

TEST_CASE("circle reduction") {
  ReductionResult r = reduce(circle_system(), ReduceConfig{1});
  REQUIRE(r.rounds.size() == 1);
  REQUIRE(r.rounds[0].reduced.size() == 1);
  CHECK(poly_equal(r.rounds[0].reduced[0], parse_term("2*x*x' + 2*y*y'")));
  CHECK(poly_equal(r.rounds[0].algebraic[0], parse_term("x^2 + y^2 - 1")));
  // Two states, one differential equation: not closed, by counts.
  CHECK(!r.closure.closed);
  CHECK(r.closure.differential_count == 1);
  CHECK(r.closure.state_count == 2);
  // Gamma is the differential of the constraint, as stated.
  CHECK(r.gamma == Formula::eq(Term::differential(r.rounds[0].algebraic[0]),
                               Term::constant(0)));
  REQUIRE(r.gamma.kind() == FormulaKind::And);
  const Term& gamma_diff = r.gamma.left().leq_lhs();
  REQUIRE(gamma_diff.kind() == TermKind::Differential);
  CHECK(poly_equal(differential(gamma_diff.inner()),
                   parse_term("2*x*x' + 2*y*y'")));
  CHECK(cert_proved(r));
}

TEST_CASE("pendulum reduction, two rounds plus closure completion") {
  ReductionResult r = reduce(pendulum_system(), ReduceConfig{2});
  REQUIRE(r.rounds.size() == 3);
  CHECK(!r.rounds[0].closure_stage);
  CHECK(!r.rounds[1].closure_stage);
  CHECK(r.rounds[2].closure_stage);

  // Round 1: the velocity constraint.
  REQUIRE(r.rounds[0].reduced.size() == 1);
  CHECK(poly_equal(r.rounds[0].reduced[0], parse_term("2*x*v + 2*y*w")));

  // Round 2: the multiplier equation, rederived from the stated dynamics.
  REQUIRE(r.rounds[1].reduced.size() == 1);
  CHECK(poly_equal(r.rounds[1].reduced[0],
                   parse_term("l^2*lambda + m*(v^2 + w^2) + m*g*y")));

  // Closure round: a differential equation for lambda', consistent with the
  // system ideal and solved in lambda' with coefficient l^2.
  REQUIRE(r.rounds[2].reduced.size() == 1);
  Term lp_eq = r.rounds[2].reduced[0];
  CHECK(poly_equal(partial(lp_eq, Variable("lambda", true)), parse_term("l^2")));
  {
    DaeSystem before = DaeSystem::build("f2", r.original.state_vars,
                                        r.original.params,
                                        r.rounds[1].augmented_system);
    std::vector<Polynomial> gens = before.equation_polys();
    for (const auto& p : before.params)
      gens.push_back(Polynomial::variable(p.prime(), before.order()));
    gens.push_back(normalize(differential(r.rounds[2].algebraic[0]), before.order()));
    auto basis = groebner_basis(gens);
    CHECK(in_ideal(normalize(lp_eq, before.order()), basis));
  }

  // Final system: eight equations, closed, diagonal Jacobian.
  CHECK(r.reduced_system.equations.size() == 8);
  CHECK(r.closure.closed);
  REQUIRE(r.closure.jacobian.rows == 5);
  TermVec expected_diag{parse_term("1"), parse_term("1"), parse_term("m"),
                        parse_term("m"), parse_term("l^2")};
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j)
      CHECK(poly_equal(r.closure.jacobian.at(i, j),
                       i == j ? expected_diag[i] : Term::constant(0)));
  CHECK(poly_equal(r.closure.det, parse_term("m^2*l^2")));
  REQUIRE(r.closure.parameter_condition.size() == 2);
  CHECK(r.status == ReductionStatus::Closed);

  CHECK(cert_proved(r));
}

TEST_CASE("already closed systems have trivial certificates") {
  DaeSystem ode = DaeSystem::from_decl(
      parse_system_file("system ode { states x; eq x' + x = 0; }")[0]);
  ReductionResult r = reduce(ode, ReduceConfig{3});
  CHECK(r.rounds.empty());
  CHECK(r.closure.closed);
  CHECK(cert_proved(r));
}

TEST_CASE("round invariants") {
  ReductionResult r = reduce(pendulum_system(), ReduceConfig{2});
  DaeSystem stage = r.original;
  for (const auto& round : r.rounds) {
    // Reduced forms are consequences of the stage ideal plus the
    // differentiated constraint (parameter rigidity included).
    std::vector<Polynomial> gens = stage.equation_polys();
    for (const auto& p : stage.params)
      gens.push_back(Polynomial::variable(p.prime(), stage.order()));
    for (const auto& d : round.differentiated)
      gens.push_back(normalize(d, stage.order()));
    auto basis = groebner_basis(gens);
    for (const auto& red : round.reduced)
      CHECK(in_ideal(normalize(red, stage.order()), basis));
    // Monotone information: every stage generator stays in the next ideal.
    DaeSystem next = DaeSystem::build("stage", stage.state_vars, stage.params,
                                      round.augmented_system);
    auto next_basis = groebner_basis(next.equation_polys());
    for (const auto& g : stage.equation_polys())
      CHECK(in_ideal(g, next_basis));
    stage = next;
  }
}

TEST_CASE("random small DAEs yield kernel-accepted certificates") {
  Rng rng(2024);
  std::vector<Variable> names{Variable("x"), Variable("y"), Variable("z")};
  int built = 0;
  for (int trial = 0; trial < 40 && built < 25; ++trial) {
    std::size_t nstates = 1 + rng.below(3);
    std::vector<Variable> states(names.begin(), names.begin() + nstates);
    TermVec eqs;
    // A mix of explicitly solved derivatives and algebraic constraints.
    for (std::size_t i = 0; i < nstates; ++i) {
      if (rng.below(2)) {
        std::vector<Term> parts{Term::var(states[i].prime())};
        for (std::size_t t = 0; t < 1 + rng.below(2); ++t) {
          std::vector<Term> fs{Term::constant(rng.int_in(-3, 3))};
          for (unsigned d = 0; d < rng.below(3u); ++d)
            fs.push_back(Term::var(states[rng.below(nstates)]));
          parts.push_back(Term::product(fs));
        }
        eqs.push_back(Term::sum(parts));
      }
    }
    // One algebraic constraint of degree <= 2.
    {
      std::vector<Term> parts;
      for (std::size_t t = 0; t < 2; ++t) {
        std::vector<Term> fs{Term::constant(rng.int_in(-3, 3))};
        for (unsigned d = 0; d < 1 + rng.below(2u); ++d)
          fs.push_back(Term::var(states[rng.below(nstates)]));
        parts.push_back(Term::product(fs));
      }
      parts.push_back(Term::constant(rng.int_in(-2, 2)));
      eqs.push_back(Term::sum(parts));
    }
    DaeSystem sys;
    try {
      sys = DaeSystem::build("fuzz", VarTuple(states), {}, eqs);
      ReductionResult r = reduce(sys, ReduceConfig{3});
      CHECK(cert_proved(r));
      ++built;
    } catch (const ResourceLimit&) {
      continue;  // skip the rare blow-up, the budget is deliberately small
    }
  }
  CHECK(built >= 20);
}
