#include <doctest.h>

#include "dal/eval.hpp"
#include "dal/oracle.hpp"
#include "dal/parser.hpp"
#include "dal/printer.hpp"
#include "dal/rng.hpp"

using namespace dal;

namespace {
ArithQuery query(const std::string& sequent) {
  return query_from_sequent(parse_sequent(sequent), MonomialOrder::lex());
}
}  // namespace

TEST_CASE("ideal membership discharges the multiplier step") {
  Oracle oracle;
  Verdict v = oracle.discharge(
      query("x'*y + x*y' = 0, x*y = 1, x' = -y |- x*y' = y^2"));
  CHECK(v.status == VerdictStatus::Valid);
  CHECK(v.method == "ideal-membership");
}

TEST_CASE("ideal verdicts hold at exact solutions of the hypotheses") {
  // Exact rational points on x*y = 1 with x' = -y and x'y + xy' = 0; the
  // proved goal must evaluate exactly.
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    Rational t(rng.int_in(1, 40), 1 + rng.below(7));
    RationalState s;
    s[Variable("x")] = t;
    s[Variable("y")] = t.inverse();
    s[Variable("x", true)] = -t.inverse();
    // x'y + xy' = 0  =>  y' = -x'y/x = y^2/... solved exactly:
    Rational y = t.inverse();
    Rational xp = -y;
    s[Variable("y", true)] = -(xp * y) / t;
    CHECK(eval_term(parse_term("x*y' - y^2"), s) == Rational(0));
  }
}

TEST_CASE("inequality goals stay outside the equational fragment") {
  Oracle oracle;
  Verdict v = oracle.discharge(query("|- x^2 >= 0"));
  CHECK(v.status == VerdictStatus::Unknown);
  // Exported for an external solver.
  std::string smt = export_smt(query("|- x^2 >= 0"));
  CHECK(smt.find("(set-logic NRA)") != std::string::npos);
  CHECK(smt.find("(check-sat)") != std::string::npos);
}

TEST_CASE("falsifier finds counterexamples and they self-check") {
  Oracle oracle;
  Verdict v = oracle.discharge(query("|- x = 1"));
  REQUIRE(v.status == VerdictStatus::Falsified);
  REQUIRE(v.counterexample.has_value());
  double x = v.counterexample->at(Variable("x"));
  CHECK(std::abs(x - 1.0) > 1e-4);
}

TEST_CASE("falsifier respects equality hypotheses") {
  Oracle oracle;
  // On the circle, x <= 1 always holds: not falsifiable; y <= 0 is.
  Verdict good = oracle.discharge(query("x^2 + y^2 = 1 |- x <= 1"));
  CHECK(good.status != VerdictStatus::Falsified);
  Verdict bad = oracle.discharge(query("x^2 + y^2 = 1 |- y <= 0"));
  REQUIRE(bad.status == VerdictStatus::Falsified);
  const auto& s = *bad.counterexample;
  double cx = s.at(Variable("x"));
  double cy = s.at(Variable("y"));
  CHECK(std::abs(cx * cx + cy * cy - 1.0) <= 1e-8);
  CHECK(cy > 1e-4);
}

TEST_CASE("constant goals decide exactly") {
  Oracle oracle;
  CHECK(oracle.discharge(query("|- 1 != 0")).status == VerdictStatus::Valid);
  CHECK(oracle.discharge(query("|- 0 <= 0")).status == VerdictStatus::Valid);
  CHECK(oracle.discharge(query("m = 1, l = 2 |- m^2*l^2 != 0")).status ==
        VerdictStatus::Valid);
}

TEST_CASE("inconsistent hypotheses prove anything") {
  Oracle oracle;
  Verdict v = oracle.discharge(query("x = 0, x = 1 |- y = 5"));
  CHECK(v.status == VerdictStatus::Valid);
  CHECK(v.method == "ideal-membership");
}

TEST_CASE("recorded external verdicts are labeled") {
  OracleConfig cfg;
  Sequent s = parse_sequent("z^2*y = 1 |- y > 0");
  cfg.external_fixtures[print(s)] = "offline-nra";
  Oracle oracle(cfg);
  Verdict v = oracle.discharge_sequent(s);
  CHECK(v.status == VerdictStatus::Valid);
  CHECK(v.method == "external:offline-nra");
}

TEST_CASE("smt export") {
  ArithQuery empty;
  CHECK(export_smt(empty) == "(check-sat)\n");

  std::string smt = export_smt(query("m != 0, l != 0 |- m^2*l^2 != 0"));
  CHECK(smt.find("(declare-const v_m Real)") != std::string::npos);
  CHECK(smt.find("(declare-const v_l Real)") != std::string::npos);
  CHECK(smt.find("(assert (not (v_m") == std::string::npos);  // well-formed atoms
  CHECK(smt.find("(check-sat)") != std::string::npos);
  // Primed variables use the vp_ prefix deterministically.
  std::string smt2 = export_smt(query("x' = 1 |- x' <= 2"));
  CHECK(smt2.find("vp_x") != std::string::npos);
  CHECK(export_smt(query("x' = 1 |- x' <= 2")) == smt2);
}

TEST_CASE("differentials expand during query conversion") {
  Oracle oracle;
  Verdict v = oracle.discharge(query("x' = -y |- (x^2)' = -2*x*y"));
  CHECK(v.status == VerdictStatus::Valid);
  CHECK(v.method == "ideal-membership");
}

TEST_CASE("unsupported shapes degrade to unknown") {
  Oracle oracle;
  Verdict v = oracle.discharge_sequent(parse_sequent("|- [x := 1] x = 1"));
  CHECK(v.status == VerdictStatus::Unknown);
}
