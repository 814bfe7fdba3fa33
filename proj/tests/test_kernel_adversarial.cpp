#include <doctest.h>

#include "dal/kernel.hpp"
#include "dal/parser.hpp"
#include "dal/printer.hpp"

// Scripts that try to smuggle invalid conclusions past the checker. Every
// one of them must come back rejected; a proved verdict here would be a
// soundness hole.

using namespace dal;

namespace {

ProofNode leaf(Sequent goal, std::string rule, Instantiation inst = {},
               std::vector<int> at = {}) {
  ProofNode n;
  n.goal = std::move(goal);
  n.rule = std::move(rule);
  n.inst = std::move(inst);
  n.at = std::move(at);
  return n;
}

bool rejected(const ProofScript& s) {
  Oracle oracle;
  return check(s, oracle, KernelConfig{}).status == OverallStatus::Rejected;
}

}  // namespace

TEST_CASE("false arithmetic cannot close") {
  CHECK(rejected(leaf(parse_sequent("|- 0 = 1"), "real")));
  CHECK(rejected(leaf(parse_sequent("x = 1 |- x = 2"), "real")));
}

TEST_CASE("identity must match both position and formula") {
  ProofNode wrong_pos = leaf(parse_sequent("x <= 1, y <= 2 |- y <= 2"), "id",
                             {}, {0, 0});
  CHECK(rejected(wrong_pos));
  ProofNode oob = leaf(parse_sequent("x <= 1 |- x <= 1"), "id", {}, {0, 5});
  CHECK(rejected(oob));
}

TEST_CASE("weakening cannot invent hypotheses") {
  ProofNode n = leaf(parse_sequent("|- x = 1"), "wk");
  n.children = {leaf(parse_sequent("x = 1 |- x = 1"), "id", {}, {0, 0})};
  CHECK(rejected(n));
}

TEST_CASE("cut premises must carry the cut formula at the end") {
  Instantiation inst;
  inst.bind("C", parse_formula("0 = 1"));
  ProofNode n = leaf(parse_sequent("|- x = 1"), "cut", inst);
  // Both premises pretend the cut formula is already proved.
  n.children = {leaf(parse_sequent("|- x = 1"), "real"),
                leaf(parse_sequent("|- x = 1"), "real")};
  CHECK(rejected(n));
}

TEST_CASE("unfold does not prove idempotence or new conjuncts") {
  // F & F is not AC-equal to F.
  Sequent goal = parse_sequent("|- [{x : x <= 1}] x <= 0");
  ProofNode n = leaf(goal, "unfold", {}, {0});
  n.children = {leaf(parse_sequent("|- [{x : x <= 1 & x <= 1}] x <= 0"), "open")};
  CHECK(rejected(n));
  // Smuggling a stronger constraint in is not reordering.
  ProofNode m = leaf(goal, "unfold", {}, {0});
  m.children = {leaf(parse_sequent("|- [{x : x <= 1 & x <= 0}] x <= 0"), "open")};
  CHECK(rejected(m));
}

TEST_CASE("universal instantiation respects capture") {
  // forall x. exists y. y = x + 1 is true; instantiating x with y inside
  // the binder would capture and prove the false exists y. y = y + 1.
  Sequent goal = parse_sequent("forall x. (exists y. y = x + 1) |- 0 = 1");
  Instantiation witness;
  witness.bind("e", parse_term("y"));
  ProofNode n = leaf(goal, "foralll", witness, {0});
  n.children = {leaf(parse_sequent("exists y. y = y + 1 |- 0 = 1"), "open")};
  CHECK(rejected(n));
}

TEST_CASE("existential witnesses must be fresh") {
  // From exists x. x = 1 and x = 2 one must not identify the witness with
  // the ambient x.
  Sequent goal = parse_sequent("exists x. x = 1, x = 2 |- 1 = 2");
  ProofNode n = leaf(goal, "existsl", {}, {0});
  n.children = {leaf(parse_sequent("x = 1, x = 2 |- 1 = 2"), "real")};
  CHECK(rejected(n));
}

TEST_CASE("ghost axioms reject captured ghosts") {
  // z' = z with z already free in the constraint is not a fresh ghost.
  Instantiation dg;
  dg.bind("xs", parse_var_tuple("[x]"));
  dg.bind("zs", parse_var_tuple("[z]"));
  dg.bind("F", parse_formula("x' = z"));
  dg.bind("A", TermMatrix(parse_term_matrix("[[1]]")));
  dg.bind("B", TermMatrix(parse_term_matrix("[[1]]")));
  dg.bind("C", parse_term_vec("[0]"));
  Formula instance = instantiate_axiom("dg", dg);
  CHECK(rejected(leaf(Sequent{{}, {instance}}, "dg", dg, {0})));
}

TEST_CASE("induction over terms outside the tuple is rejected") {
  // E = l*x with tuple (x): the instance is not valid when l' floats free.
  Instantiation dhc;
  dhc.bind("xs", parse_var_tuple("[x]"));
  dhc.bind("E", parse_term_vec("[l*x]"));
  Formula instance = instantiate_axiom("dhc", dhc);
  CHECK(rejected(leaf(Sequent{{}, {instance}}, "dhc", dhc, {0})));
}

TEST_CASE("axiom leaves must match the goal exactly") {
  Instantiation dw;
  dw.bind("xs", parse_var_tuple("[x]"));
  dw.bind("F", parse_formula("x <= 1"));
  // Goal claims a different postcondition.
  ProofNode n = leaf(parse_sequent("|- [{x : x <= 1}] x <= 2"), "dw", dw, {0});
  CHECK(rejected(n));
  // Polynomially equal but structurally different terms do not match: the
  // kernel performs no ring normalization.
  ProofNode m =
      leaf(parse_sequent("|- [{x : x + x <= 1}] 2*x <= 1"), "dw",
           Instantiation{}
               .bind("xs", parse_var_tuple("[x]"))
               .bind("F", parse_formula("x + x <= 1")),
           {0});
  CHECK(rejected(m));
}

TEST_CASE("modal rules check their premise shapes") {
  // G with a leftover antecedent in the premise.
  ProofNode g = leaf(parse_sequent("x = 1 |- [{y : y = 0}] 0 <= 0"), "g", {}, {0});
  g.children = {leaf(parse_sequent("x = 1 |- 0 <= 0"), "real")};
  CHECK(rejected(g));

  // mp with a premise pair that proves the wrong implication.
  Instantiation inst;
  inst.bind("P", parse_formula("0 = 1"));
  ProofNode m = leaf(parse_sequent("|- x = 1"), "mp", inst, {0});
  m.children = {leaf(parse_sequent("|- 0 = 1 -> x = 1"), "real"),
                leaf(parse_sequent("|- 0 <= 0"), "real")};
  CHECK(rejected(m));
}

TEST_CASE("open premises never count as closed") {
  Sequent goal = parse_sequent("|- 0 <= 0");
  CHECK(rejected(leaf(goal, "open")));
}
