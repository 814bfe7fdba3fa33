#include <doctest.h>

#include <cmath>

#include "dal/parser.hpp"
#include "dal/printer.hpp"
#include "dal/tracelab.hpp"

using namespace dal;

namespace {

DaeSystem reduced_pendulum() {
  DaeSystem sys = DaeSystem::from_decl(parse_system_file(R"(
    system pendulum {
      states x, y, v, w, lambda;
      params m, g, l;
      eq x' - v = 0;
      eq m*v' - lambda*x = 0;
      eq y' - w = 0;
      eq m*w' - lambda*y - m*g = 0;
      eq x^2 + y^2 - l^2 = 0;
    })")[0]);
  ReduceConfig cfg;
  cfg.max_rounds = 2;
  cfg.emit_certificate = false;
  return reduce(sys, cfg).reduced_system;
}

}  // namespace

TEST_CASE("consistent init solves the velocity constraint") {
  DaeSystem sys = reduced_pendulum();
  NumericState partial{{Variable("x"), 0.6}, {Variable("y"), 0.8},
                       {Variable("v"), 1.0}, {Variable("m"), 1.0},
                       {Variable("l"), 1.0}, {Variable("g"), 9.81}};
  NumericState full = consistent_init(sys, partial);
  // 2*0.6*1 + 2*0.8*w = 0.
  CHECK(full.at(Variable("w")) == doctest::Approx(-0.75).epsilon(1e-8));
  // Every reduced equation holds at the completed state.
  for (const auto& eq : sys.equations)
    CHECK(std::abs(eval_term(eq, full)) <= 1e-8);
}

TEST_CASE("fully specified consistent states pass through") {
  DaeSystem ode = DaeSystem::from_decl(
      parse_system_file("system ode { states x; eq x' + x = 0; }")[0]);
  NumericState s{{Variable("x"), 2.0}, {Variable("x", true), -2.0}};
  CHECK(consistent_init(ode, s) == s);
}

TEST_CASE("degenerate tangency reports a singular jacobian") {
  DaeSystem circle = DaeSystem::from_decl(parse_system_file(R"(
    system circle {
      states x, y;
      eq x^2 + y^2 - 1 = 0;
      eq 2*x*x' + 2*y*y' = 0;
    })")[0]);
  NumericState partial{{Variable("x"), 1.0}, {Variable("y"), 0.0},
                       {Variable("x", true), 0.0}};
  // The only unknown is y', whose coefficient 2*y vanishes.
  CHECK_THROWS_AS(consistent_init(circle, partial), SingularJacobian);
}

TEST_CASE("explicit decay integrates to the closed form") {
  DaeSystem ode = DaeSystem::from_decl(
      parse_system_file("system ode { states x; eq x' + x = 0; }")[0]);
  NumericState s0{{Variable("x"), 1.0}, {Variable("x", true), -1.0}};
  SimConfig cfg;
  cfg.h = 1e-3;
  TraceSample trace = integrate_implicit(ode, s0, 1.0, cfg);
  REQUIRE(trace.size() == 1001);
  CHECK(std::abs(trace.states.back().at(Variable("x")) - std::exp(-1.0)) <= 1e-8);
  // Differential consistency of the emitted trace.
  for (std::size_t i = 1; i + 1 < trace.size(); ++i) {
    double fd = (trace.states[i + 1].at(Variable("x")) -
                 trace.states[i - 1].at(Variable("x"))) /
                (trace.times[i + 1] - trace.times[i - 1]);
    CHECK(std::abs(fd - trace.states[i].at(Variable("x", true))) <=
          10 * cfg.h * cfg.h);
  }
}

TEST_CASE("zero duration gives the point trace") {
  DaeSystem ode = DaeSystem::from_decl(
      parse_system_file("system ode { states x; eq x' + x = 0; }")[0]);
  NumericState s0{{Variable("x"), 3.0}, {Variable("x", true), -3.0}};
  TraceSample trace = integrate_implicit(ode, s0, 0.0, SimConfig{});
  REQUIRE(trace.size() == 1);
  CHECK(trace.states[0] == s0);
  CHECK(trace.duration() == 0.0);
}

TEST_CASE("pendulum drift stays small and shows fourth-order convergence") {
  DaeSystem sys = reduced_pendulum();
  NumericState partial{{Variable("x"), 0.6}, {Variable("y"), 0.8},
                       {Variable("v"), 1.0}, {Variable("m"), 1.0},
                       {Variable("l"), 1.0}, {Variable("g"), 9.81}};
  NumericState init = consistent_init(sys, partial);
  TermVec constraints{parse_term("x^2 + y^2 - 1"), parse_term("2*x*v + 2*y*w")};

  double previous = 0;
  std::vector<double> steps{4e-3, 2e-3, 1e-3};
  for (std::size_t i = 0; i < steps.size(); ++i) {
    SimConfig cfg;
    cfg.h = steps[i];
    TraceSample trace = integrate_implicit(sys, init, 1.0, cfg);
    std::vector<double> drift = constraint_drift(trace, constraints);
    double circle_drift = drift[0];
    if (i > 0) CHECK(circle_drift <= previous / 4.0);
    previous = circle_drift;
    CHECK(circle_drift <= 1e-5);
  }

  // Every equation of the unreduced system stays satisfied along the
  // reduced-system trajectory.
  TermVec original{parse_term("x' - v"), parse_term("m*v' - lambda*x"),
                   parse_term("y' - w"), parse_term("m*w' - lambda*y - m*g"),
                   parse_term("x^2 + y^2 - l^2")};
  SimConfig cfg;
  cfg.h = 1e-3;
  TraceSample trace = integrate_implicit(sys, init, 1.0, cfg);
  for (double d : constraint_drift(trace, original)) CHECK(d <= 1e-5);
}

TEST_CASE("constraint drift basics") {
  TraceSample trace;
  trace.times = {0.0};
  trace.states = {{{Variable("x"), 5.0}}};
  CHECK(constraint_drift(trace, {}).empty());
  std::vector<double> d = constraint_drift(trace, {parse_term("1")});
  REQUIRE(d.size() == 1);
  CHECK(d[0] == doctest::Approx(1.0));
}

TEST_CASE("differential lemma on splines") {
  Rng rng(99);
  std::vector<Variable> vars{Variable("x"), Variable("y")};
  // Constants deviate by exactly zero.
  TraceSample trace = spline_trace(vars, 0.5, 1e-4, rng);
  CHECK(check_differential_lemma(Term::constant(7), trace) == 0.0);
  // Low-degree polynomials stay within the second-order bound.
  CHECK(check_differential_lemma(parse_term("x^2"), trace) <= 1e-4);
  CHECK(check_differential_lemma(parse_term("x*y + y^3"), trace) <= 1e-4);
}

TEST_CASE("invariant dynamics keep the differential at zero") {
  // x' = -y, y' = y^3, z' = -1/2*y^2*z from x = y = 1, z = 1: along this
  // field (z^2*y)' evaluates to -y^3*z^2 + z^2*y' pointwise, which vanishes.
  DaeSystem sys = DaeSystem::from_decl(parse_system_file(R"(
    system inv {
      states x, y, z;
      eq x' + y = 0;
      eq y' - y^3 = 0;
      eq z' + 1/2*y^2*z = 0;
    })")[0]);
  NumericState s0{{Variable("x"), 1.0}, {Variable("y"), 1.0}, {Variable("z"), 1.0}};
  SimConfig cfg;
  cfg.h = 1e-3;
  NumericState init = consistent_init(sys, s0, cfg);
  TraceSample trace = integrate_implicit(sys, init, 0.3, cfg);
  Term e = parse_term("z^2*y");
  Term de = differential(e);
  Term expected = parse_term("-y^3*z^2 + z^2*y'");
  for (std::size_t i = 0; i < trace.size(); i += 50) {
    double lhs = eval_term(de, trace.states[i]);
    double rhs = eval_term(expected, trace.states[i]);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    CHECK(std::abs(lhs) <= 1e-6);  // z^2*y is invariant along the flow
  }
  std::vector<double> drift = constraint_drift(trace, {parse_term("z^2*y - 1")});
  CHECK(drift[0] <= 1e-6);
}

TEST_CASE("discrete interpreter basics") {
  RationalState s0{{Variable("x"), Rational(0)}};
  auto set1 = run_discrete(parse_program("x := 1"), s0, 3);
  REQUIRE(set1.size() == 1);
  CHECK(set1.begin()->at(Variable("x")) == Rational(1));

  CHECK(run_discrete(parse_program("?1 <= 0"), s0, 3).empty());

  auto reach = run_discrete(parse_program("(x := x + 1)*"), s0, 3);
  REQUIRE(reach.size() == 4);
  std::set<Rational> values;
  for (const auto& s : reach) values.insert(s.at(Variable("x")));
  CHECK(values == std::set<Rational>{Rational(0), Rational(1), Rational(2),
                                     Rational(3)});
}

TEST_CASE("trace and relational interpreters agree") {
  Rng rng(123);
  std::vector<Variable> vars{Variable("x"), Variable("y")};
  std::function<Program(unsigned)> gen = [&](unsigned depth) {
    unsigned pick = depth == 0 ? rng.below(2) : rng.below(5);
    auto rterm = [&] {
      std::vector<Term> fs{Term::constant(rng.int_in(-2, 2))};
      if (rng.below(2)) fs.push_back(Term::var(vars[rng.below(2)]));
      return Term::sum({Term::product(fs), Term::constant(rng.int_in(-1, 1))});
    };
    switch (pick) {
      case 0: return Program::assign(vars[rng.below(2)], rterm());
      case 1: return Program::test(Formula::leq(rterm(), rterm()));
      case 2: return Program::choice(gen(depth - 1), gen(depth - 1));
      case 3: return Program::seq(gen(depth - 1), gen(depth - 1));
      default: return Program::star(gen(depth - 1));
    }
  };
  for (int i = 0; i < 60; ++i) {
    Program prog = gen(3);
    for (int t = 0; t < 5; ++t) {
      RationalState s0;
      for (const auto& v : vars)
        s0[v] = Rational(rng.int_in(-3, 3), 1 + rng.below(2));
      int fuel = 1 + static_cast<int>(rng.below(3));
      CHECK(run_discrete(prog, s0, fuel) ==
            run_discrete_relational(prog, s0, fuel));
    }
  }
}

TEST_CASE("continuous programs are rejected by the interpreter") {
  RationalState s0{{Variable("x"), Rational(1)}};
  CHECK_THROWS_AS(run_discrete(parse_program("{x : x = 1}"), s0, 1), Error);
}
