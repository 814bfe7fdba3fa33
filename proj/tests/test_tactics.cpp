#include <doctest.h>

#include "dal/calculus.hpp"
#include "dal/kernel.hpp"
#include "dal/parser.hpp"
#include "dal/printer.hpp"
#include "dal/rng.hpp"
#include "dal/tactics.hpp"

using namespace dal;

namespace {

CheckReport run(const ProofScript& s) {
  Oracle oracle;
  return check(s, oracle, KernelConfig{});
}

// Closes an open premise by identity when its succedent repeats an
// antecedent member, otherwise by the arithmetic oracle.
std::optional<ProofNode> close_by_id_or_real(const Sequent& goal) {
  ProofNode n;
  n.goal = goal;
  for (std::size_t i = 0; i < goal.ante.size(); ++i)
    for (std::size_t j = 0; j < goal.succ.size(); ++j)
      if (goal.ante[i] == goal.succ[j]) {
        n.rule = "id";
        n.at = {static_cast<int>(i), static_cast<int>(j)};
        return n;
      }
  n.rule = "real";
  return n;
}

const std::vector<std::string> kDwSequence = {"mp", "mp",     "k",   "g",
                                              "implyr", "open", "dw"};

}  // namespace

TEST_CASE("dw replay and acceptance") {
  Sequent goal = parse_sequent(
      "y' = 1 |- [{x,y : x^2 + y^2 - 1 = 0}] x^2 + y^2 = 1");
  TacticResult r = tac_dw(goal, 0);
  CHECK(rule_sequence(r.script) == kDwSequence);
  REQUIRE(r.opens.size() == 1);
  CHECK(r.opens[0] ==
        parse_sequent("x^2 + y^2 - 1 = 0 |- x^2 + y^2 = 1"));
  ProofScript closed = graft(r.script, close_by_id_or_real);
  CHECK(run(closed).status == OverallStatus::Proved);
}

TEST_CASE("dw fuzz over trivially closable goals") {
  Rng rng(31);
  std::vector<Variable> vars{Variable("x"), Variable("y")};
  for (int i = 0; i < 200; ++i) {
    // P == F: the open premise closes by identity.
    long long a = rng.int_in(-5, 5);
    long long b = rng.int_in(-5, 5);
    Formula f = Formula::leq(
        Term::plus(Term::times(Term::constant(a), Term::var(vars[rng.below(2)])),
                   Term::constant(b)),
        Term::constant(rng.int_in(-3, 3)));
    Program sys = Program::dap(VarTuple({Variable("x"), Variable("y")}), f);
    Sequent goal{{}, {Formula::box(sys, f)}};
    TacticResult r = tac_dw(goal, 0);
    ProofScript closed = graft(r.script, close_by_id_or_real);
    CHECK(run(closed).status == OverallStatus::Proved);
  }
}

TEST_CASE("da splits through the permissive constraint") {
  Sequent goal = parse_sequent(
      "|- {x : x = 0 & x <= 1} <=[x] {x : x <= 2}");
  Formula r = parse_formula("x <= 1");
  TacticResult t = tac_da(goal, 0, r);
  REQUIRE(t.opens.size() == 2);
  CHECK(t.opens[0] == parse_sequent("x = 0 & x <= 1 |- x <= 1"));
  CHECK(t.opens[1] == parse_sequent("|- {x : x <= 1} <=[x] {x : x <= 2}"));
  CHECK(rule_sequence(t.script) ==
        std::vector<std::string>{"mp", "tr", "andr", "mp", "tr", "andr", "mp",
                                 "dc", "mp", "mp", "k", "g", "implyr", "open",
                                 "dw", "dr", "open"});

  // Degenerate split through R == F keeps the original right goal.
  Sequent same = parse_sequent("|- {x : x <= 1} <=[x] {x : x <= 2}");
  TacticResult t2 = tac_da(same, 0, parse_formula("x <= 1"));
  CHECK(t2.opens[1] == same);
  CHECK(t2.opens[0] == parse_sequent("x <= 1 |- x <= 1"));
}

TEST_CASE("dhc golden sequence and circle replay") {
  Term circle = parse_term("x^2 + y^2 - 1");
  Formula f = Formula::eq(circle, Term::constant(0));
  Formula c3 = Formula::eq(Term::differential(circle), Term::constant(0));
  VarTuple xs({Variable("x"), Variable("y")});
  Formula goal_formula = Formula::mutual_refines(
      Program::dap(xs, f), Program::dap(xs, Formula::and_(f, c3)), xs);
  Sequent goal{{c3}, {goal_formula}};
  TacticResult t = tac_dhc(goal, 0, {circle});

  CHECK(rule_sequence(t.script) ==
        std::vector<std::string>{"andr", "mp", "tr", "andr", "mp", "dc", "open",
                                 "mp", "tr", "andr", "unfold", "mp", "dm", "mp",
                                 "dc", "cut", "open", "mp", "dhc", "id",
                                 "unfold", "dr", "unfold", "dr"});

  REQUIRE(t.opens.size() == 2);
  // Stated order: first the initial differential condition, then the box.
  CHECK(t.opens[0].succ.back() == c3);
  CHECK(t.opens[1].succ[0] ==
        Formula::box(Program::dap(xs, f), Formula::eq(circle, Term::constant(0))));

  ProofScript closed = graft(t.script, [&](const Sequent& open) {
    if (open.succ.back() == c3) return close_by_id_or_real(open);
    TacticResult dw = tac_dw(open, 0);
    return std::optional<ProofNode>(graft(dw.script, close_by_id_or_real));
  });
  CHECK(run(closed).status == OverallStatus::Proved);
}

TEST_CASE("di golden sequence matches dhc with the induction axiom") {
  Term e = parse_term("z^2*y - 1");
  VarTuple xs({Variable("y"), Variable("z")});
  Formula f = parse_formula("y' = y^3");
  Formula c3 = Formula::leq(e, Term::constant(0));
  Formula goal_formula = Formula::mutual_refines(
      Program::dap(xs, f), Program::dap(xs, Formula::and_(f, c3)), xs);
  Sequent goal{{}, {goal_formula}};
  TacticResult t = tac_di(goal, 0, {e}, /*strict=*/false);
  std::vector<std::string> seq = rule_sequence(t.script);
  REQUIRE(seq.size() == 24);
  CHECK(seq[18] == "dileq");
  CHECK(std::count(seq.begin(), seq.end(), "open") == 2);

  CHECK_THROWS_AS(tac_di(goal, 0, {parse_term("x'")}, false), SideCondition);
}

TEST_CASE("di fuzz with provable premises") {
  Rng rng(47);
  VarTuple xs({Variable("x"), Variable("y")});
  for (int i = 0; i < 50; ++i) {
    // E with F containing E <= 0 makes both premises closable: the initial
    // condition from the context, the differential one by weakening.
    long long a = 1 + static_cast<long long>(rng.below(4));
    Term e = Term::times(Term::constant(a),
                         Term::var(rng.below(2) ? "x" : "y"));
    Formula c2 = Formula::leq(Term::differential(e), Term::constant(0));
    Formula f = c2;  // system constrains the differential directly
    Formula c3 = Formula::leq(e, Term::constant(0));
    Formula goal_formula = Formula::mutual_refines(
        Program::dap(xs, f), Program::dap(xs, Formula::and_(f, c3)), xs);
    Sequent goal{{c3}, {goal_formula}};
    TacticResult t = tac_di(goal, 0, {e}, false);
    ProofScript closed = graft(t.script, [&](const Sequent& open) {
      if (!open.succ.empty() && open.succ.back() == c3)
        return close_by_id_or_real(open);
      TacticResult dw = tac_dw(open, 0);
      return std::optional<ProofNode>(graft(dw.script, close_by_id_or_real));
    });
    CHECK(run(closed).status == OverallStatus::Proved);
  }
}

TEST_CASE("da conservativity over closable splits") {
  Rng rng(71);
  VarTuple xs({Variable("x")});
  for (int i = 0; i < 50; ++i) {
    Formula c = Formula::leq(Term::var("x"), Term::constant(rng.int_in(-5, 5)));
    Formula b = Formula::leq(Term::constant(rng.int_in(-5, 5)), Term::var("x"));
    Formula r = Formula::and_(c, b);
    // Goal {x : C & B} <= {x : B}; the split through R = C & B leaves an
    // identity premise and a premise closed by the restriction axiom.
    Sequent goal{{}, {Formula::refines_on(Program::dap(xs, r),
                                          Program::dap(xs, b), xs)}};
    TacticResult t = tac_da(goal, 0, r);
    ProofScript closed = graft(t.script, [&](const Sequent& open) {
      if (auto n = close_by_id_or_real(open); n && n->rule == "id") return n;
      ProofNode dr;
      dr.goal = open;
      dr.rule = "dr";
      dr.inst.bind("xs", xs)
          .bind("zs", VarTuple{})
          .bind("R", c)
          .bind("F", b);
      dr.at = {0};
      return std::optional<ProofNode>(dr);
    });
    CHECK(run(closed).status == OverallStatus::Proved);
  }
}

TEST_CASE("di with the zero invariant closes trivially") {
  VarTuple xs({Variable("x")});
  Formula f = parse_formula("x <= 9");
  Term zero = Term::constant(0);
  Formula c3 = Formula::leq(zero, Term::constant(0));
  Sequent goal{{}, {Formula::mutual_refines(
                       Program::dap(xs, f),
                       Program::dap(xs, Formula::and_(f, c3)), xs)}};
  TacticResult t = tac_di(goal, 0, {zero}, false);
  ProofScript closed = graft(t.script, [&](const Sequent& open) {
    if (!open.succ.empty() && open.succ.size() > 1)
      return close_by_id_or_real(open);
    TacticResult dw = tac_dw(open, 0);
    return std::optional<ProofNode>(graft(dw.script, close_by_id_or_real));
  });
  CHECK(run(closed).status == OverallStatus::Proved);
}

TEST_CASE("ir base case is the reflexive equivalence") {
  VarTuple xs({Variable("x")});
  Formula f = parse_formula("x' = 0 - x");
  Formula goal_formula = Formula::mutual_refines(Program::dap(xs, f),
                                                 Program::dap(xs, f), xs);
  Sequent goal{{Formula::leq(Term::constant(0), Term::constant(0))},
               {goal_formula}};
  TacticResult t = tac_ir(goal, 0, xs, {f}, {});
  CHECK(rule_sequence(t.script) ==
        std::vector<std::string>{"andr", "mp", "tr", "andr", "mp", "dc", "dw",
                                 "dr", "mp", "tr", "andr", "mp", "dc", "dw",
                                 "dr"});
  CHECK(t.opens.empty());
  CHECK(run(t.script).status == OverallStatus::Proved);
}

TEST_CASE("ir single round on the circle") {
  Term circle = parse_term("x^2 + y^2 - 1");
  Term hidden = differential(circle);
  VarTuple xs({Variable("x"), Variable("y")});
  Formula f0 = Formula::conj({Formula::eq(circle, Term::constant(0))});
  Formula f1 = Formula::conj({Formula::eq(circle, Term::constant(0)),
                              Formula::eq(hidden, Term::constant(0))});
  std::vector<IrRound> rounds{IrRound{{circle}, {hidden}}};
  Formula gamma = ir_gamma_formula(rounds);
  Formula goal_formula = Formula::mutual_refines(
      Program::dap(xs, f1), Program::dap(xs, f0), xs);
  Sequent goal{{gamma}, {goal_formula}};
  TacticResult t = tac_ir(goal, 0, xs, {f0, f1}, rounds);
  REQUIRE(t.opens.size() == 2);
  CHECK(t.opens[0] == Sequent{{gamma}, {gamma}});
  CHECK(t.opens[1] ==
        Sequent{{}, {ir_obligations_formula({f0, f1}, rounds)}});

  ProofNode obligations = ir_obligations_proof({f0, f1}, rounds);
  ProofScript closed = graft(t.script, [&](const Sequent& open) -> std::optional<ProofNode> {
    if (open == t.opens[0]) {
      ProofNode id_node;
      id_node.goal = open;
      id_node.rule = "id";
      id_node.at = {0, 0};
      return id_node;
    }
    if (open == t.opens[1]) return obligations;
    return std::nullopt;
  });
  CHECK(run(closed).status == OverallStatus::Proved);

  // Chain mismatch is rejected up front.
  Formula wrong = Formula::conj({Formula::eq(circle, Term::constant(0)),
                                 Formula::eq(parse_term("x*y"), Term::constant(0))});
  CHECK_THROWS_AS(tac_ir(goal, 0, xs, {f0, wrong}, rounds), ChainMismatch);
}

TEST_CASE("grafting validates the premise goal") {
  Sequent goal = parse_sequent("|- [{x : x <= 1}] x <= 1");
  TacticResult t = tac_dw(goal, 0);
  CHECK_THROWS_AS(graft(t.script,
                        [](const Sequent&) -> std::optional<ProofNode> {
                          ProofNode n;
                          n.goal = parse_sequent("|- 0 <= 1");
                          n.rule = "real";
                          return n;
                        }),
                  ShapeMismatch);
}
