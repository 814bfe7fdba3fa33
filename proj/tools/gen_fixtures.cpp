// Builds the worked safety proof (the z^2*y = 1 invariant implying y > 0
// along x' = -y, x*y = 1) as a checkable proof script, together with the
// recorded-verdict file for its one non-equational arithmetic step.
//
// Usage: gen_fixtures <output-dir>

#include <fstream>
#include <iostream>

#include "dal/calculus.hpp"
#include "dal/kernel.hpp"
#include "dal/parser.hpp"
#include "dal/printer.hpp"
#include "dal/proof_io.hpp"
#include "dal/tactics.hpp"

using namespace dal;

namespace {

ProofNode node(Sequent goal, std::string rule, Instantiation inst = {},
               std::vector<int> at = {}, std::vector<ProofNode> kids = {}) {
  ProofNode n;
  n.goal = std::move(goal);
  n.rule = std::move(rule);
  n.inst = std::move(inst);
  n.at = std::move(at);
  n.children = std::move(kids);
  return n;
}

ProofNode real_node(Sequent goal) { return node(std::move(goal), "real"); }

ProofNode id_node(Sequent goal, int i, int j) {
  return node(std::move(goal), "id", {}, {i, j});
}

// Premise-shape helpers mirroring the kernel's conventions.
ProofNode cut_node(const Sequent& goal, const Formula& c, ProofNode left,
                   ProofNode right) {
  Instantiation inst;
  inst.bind("C", c);
  return node(goal, "cut", std::move(inst), {},
              {std::move(left), std::move(right)});
}

ProofNode mp_node(const Sequent& goal, int at, const Formula& p, ProofNode imp,
                  ProofNode prem) {
  Instantiation inst;
  inst.bind("P", p);
  return node(goal, "mp", std::move(inst), {at},
              {std::move(imp), std::move(prem)});
}

ProofNode andr_node(const Sequent& goal, int at, ProofNode l, ProofNode r) {
  return node(goal, "andr", {}, {at}, {std::move(l), std::move(r)});
}

ProofNode andl_node(const Sequent& goal, int at, ProofNode child) {
  return node(goal, "andl", {}, {at}, {std::move(child)});
}

Sequent with_succ(const Sequent& s, int at, Formula f) {
  Sequent out = s;
  out.succ[static_cast<std::size_t>(at)] = std::move(f);
  return out;
}

Sequent push_succ(const Sequent& s, Formula f) {
  Sequent out = s;
  out.succ.push_back(std::move(f));
  return out;
}

Sequent push_ante(const Sequent& s, Formula f) {
  Sequent out = s;
  out.ante.push_back(std::move(f));
  return out;
}

// Closes every open premise of a tactic result with real-arithmetic leaves.
ProofNode close_real(const TacticResult& t) {
  return graft(t.script, [](const Sequent& open) {
    return std::optional<ProofNode>(real_node(open));
  });
}

// Closes the two premises of an equivalence tactic applied at `at`: the
// appended initial condition arithmetically, the box premise by weakening.
ProofNode close_equivalence(const TacticResult& t, std::size_t base_succ,
                            int at) {
  return graft(t.script, [&](const Sequent& open) -> std::optional<ProofNode> {
    if (open.succ.size() > base_succ) return real_node(open);
    TacticResult dw = tac_dw(open, at);
    return graft(dw.script, [](const Sequent& leaf) {
      return std::optional<ProofNode>(real_node(leaf));
    });
  });
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: gen_fixtures <output-dir>\n";
    return 2;
  }
  std::string dir = argv[1];

  const Variable x("x"), y("y"), z("z");
  const Variable xp = x.prime(), yp = y.prime(), zp = z.prime();

  // The system, its ghost extension, and the program tuples.
  Formula sys_f = parse_formula("x' = -y & x*y = 1");
  VarTuple xy({x, y});
  VarTuple xyz({x, y, z});
  Program alpha = Program::dap(xy, sys_f);
  Formula safety = parse_formula("y > 0");
  Formula goal_box = Formula::box(alpha, safety);

  // Ghost dynamics z' = -1/2*y^2*z as the linear form A z' = B z + C.
  TermMatrix mat_a(parse_term_matrix("[[1]]"));
  TermMatrix mat_b(parse_term_matrix("[[-1/2*y^2]]"));
  TermVec vec_c = parse_term_vec("[0]");
  Instantiation dg_inst;
  dg_inst.bind("xs", xy);
  dg_inst.bind("zs", VarTuple({z}));
  dg_inst.bind("F", sys_f);
  dg_inst.bind("A", mat_a);
  dg_inst.bind("B", mat_b);
  dg_inst.bind("C", vec_c);
  Formula dg_instance = instantiate_axiom("dg", dg_inst);
  // dg_instance == imply(box(alpha, det != 0), forall z. exists z'. ref)
  const Formula& dg_quantified = dg_instance.child().right().child();
  Formula det_cond = dg_instance.child().left().body();
  // The refinement under the quantifiers, with the ghost program beta.
  Formula ref_ab = dg_quantified.body().child().body().child();
  Program beta = ref_ab.ref_rhs();
  Formula beta_c = beta.dap_constraint();

  // Invariant and its differential closure companions.
  Term inv_term = parse_term("z^2*y - 1");
  Formula invariant = Formula::eq(parse_term("z^2*y"), Term::constant(1));
  Term closure_term = parse_term("x*y - 1");
  Formula hidden = Formula::eq(Term::differential(closure_term), Term::constant(0));
  Formula beta_aug_c = Formula::and_(beta_c, hidden);
  Program beta_aug = Program::dap(xyz, beta_aug_c);
  Formula ineq_pair = Formula::and_(
      Formula::leq(inv_term, Term::constant(0)),
      Formula::leq(Term::neg(inv_term), Term::constant(0)));
  Formula beta_inv_c = Formula::and_(beta_aug_c, ineq_pair);
  Program beta_inv = Program::dap(xyz, beta_inv_c);

  // Root: x = 1, y = 1, x' = -1, y' = 1 |- [alpha] y > 0.
  Sequent root{{parse_formula("x = 1"), parse_formula("y = 1"),
                parse_formula("x' = -1"), parse_formula("y' = 1")},
               {goal_box}};

  // Step 5 (innermost): Gamma'' |- [beta_inv] invariant by weakening.
  auto box_invariant_by_dw = [&](const Sequent& g) {
    return close_real(tac_dw(g, 0));
  };

  // Step 4: Gamma'' |- [beta_aug] invariant through the induction
  // equivalence beta_aug ==[xyz] beta_inv.
  auto box_inv_over_aug = [&](const Sequent& g) {
    Formula mutual = Formula::mutual_refines(beta_aug, beta_inv, xyz);
    Sequent cut_left = push_succ(g, mutual);
    TacticResult di = tac_di(cut_left, 1, {inv_term, Term::neg(inv_term)},
                             /*strict=*/false);
    Sequent cut_right = push_ante(g, mutual);
    Sequent split = cut_right;
    split.ante.back() = mutual.left();
    split.ante.push_back(mutual.right());
    Formula use = Formula::and_(mutual.left(), Formula::box(beta_inv, invariant));
    int ref_idx = static_cast<int>(split.ante.size()) - 2;
    Instantiation r_inst;
    r_inst.bind("alpha", beta_aug);
    r_inst.bind("beta", beta_inv);
    r_inst.bind("P", invariant);
    r_inst.bind("xs", xyz);
    ProofNode use_node = mp_node(
        split, 0, use,
        node(with_succ(split, 0, Formula::imply(use, split.succ[0])), "r",
             r_inst, {0}),
        andr_node(with_succ(split, 0, use), 0,
                  id_node(with_succ(split, 0, mutual.left()), ref_idx, 0),
                  box_invariant_by_dw(
                      with_succ(split, 0, Formula::box(beta_inv, invariant)))));
    return cut_node(g, mutual, close_equivalence(di, cut_left.succ.size(), 1),
                    andl_node(cut_right,
                              static_cast<int>(cut_right.ante.size()) - 1,
                              std::move(use_node)));
  };

  // Step 3: Gamma' |- [beta] invariant through the hidden-constraint
  // equivalence beta ==[xyz] beta_aug.
  auto box_inv_over_beta = [&](const Sequent& g) {
    Formula mutual = Formula::mutual_refines(beta, beta_aug, xyz);
    Sequent cut_left = push_succ(g, mutual);
    TacticResult dhc = tac_dhc(cut_left, 1, {closure_term});
    Sequent cut_right = push_ante(g, mutual);
    Sequent split = cut_right;
    split.ante.back() = mutual.left();
    split.ante.push_back(mutual.right());
    Formula use = Formula::and_(mutual.left(), Formula::box(beta_aug, invariant));
    int ref_idx = static_cast<int>(split.ante.size()) - 2;
    Instantiation r_inst;
    r_inst.bind("alpha", beta);
    r_inst.bind("beta", beta_aug);
    r_inst.bind("P", invariant);
    r_inst.bind("xs", xyz);
    ProofNode use_node = mp_node(
        split, 0, use,
        node(with_succ(split, 0, Formula::imply(use, split.succ[0])), "r",
             r_inst, {0}),
        andr_node(with_succ(split, 0, use), 0,
                  id_node(with_succ(split, 0, mutual.left()), ref_idx, 0),
                  box_inv_over_aug(
                      with_succ(split, 0, Formula::box(beta_aug, invariant)))));
    return cut_node(g, mutual, close_equivalence(dhc, cut_left.succ.size(), 1),
                    andl_node(cut_right,
                              static_cast<int>(cut_right.ante.size()) - 1,
                              std::move(use_node)));
  };

  // Step 2: Gamma' |- [beta] y > 0 from the invariant and one arithmetic
  // inference, via the modal composition.
  auto box_safety_over_beta = [&](const Sequent& g) {
    Formula box_inv = Formula::box(beta, invariant);
    Formula box_impl = Formula::box(beta, Formula::imply(invariant, safety));
    Instantiation k_inst;
    k_inst.bind("alpha", beta);
    k_inst.bind("P", invariant);
    k_inst.bind("Q", safety);
    Sequent impl_goal{{invariant}, {safety}};
    ProofNode positivity = real_node(impl_goal);  // the recorded external leaf
    ProofNode k_chain = mp_node(
        g, 0, box_inv,
        mp_node(with_succ(g, 0, Formula::imply(box_inv, g.succ[0])), 0, box_impl,
                node(with_succ(g, 0,
                               Formula::imply(box_impl,
                                              Formula::imply(box_inv, g.succ[0]))),
                     "k", k_inst, {0}),
                node(with_succ(g, 0, box_impl), "g", {}, {0},
                     {node(Sequent{{}, {Formula::imply(invariant, safety)}},
                           "implyr", {}, {0}, {std::move(positivity)})})),
        box_inv_over_beta(with_succ(g, 0, box_inv)));
    return k_chain;
  };

  // Step 1: introduce the ghost variable, pin its initial value, extract the
  // refinement from the ghost axiom, and bridge with the refinement axiom.
  Formula exists_z1 = Formula::exists(z, Formula::eq(Term::var(z), Term::constant(1)));

  // |- exists z. z = 1 (with the box goal as a side formula).
  auto prove_exists = [&](const Sequent& g) {
    // g = Gamma |- goal_box, exists_z1
    Formula inner = exists_z1.child();           // forall z. !(z = 1)
    Sequent after_notr = g;
    after_notr.succ.pop_back();
    after_notr.ante.push_back(inner);
    int q_idx = static_cast<int>(after_notr.ante.size()) - 1;
    Formula instantiated = Formula::not_(
        Formula::eq(Term::constant(1), Term::constant(1)));
    Sequent after_inst = after_notr;
    after_inst.ante[static_cast<std::size_t>(q_idx)] = instantiated;
    Sequent after_notl = after_inst;
    after_notl.ante.erase(after_notl.ante.begin() + q_idx);
    after_notl.succ.push_back(Formula::eq(Term::constant(1), Term::constant(1)));
    Instantiation witness;
    witness.bind("e", Term::constant(1));
    return node(g, "notr", {}, {1},
                {node(after_notr, "foralll", witness, {q_idx},
                      {node(after_inst, "notl", {}, {q_idx},
                            {real_node(after_notl)})})});
  };

  Sequent with_z = push_ante(root, parse_formula("z = 1"));

  // Gamma, z = 1 |- [alpha] y > 0:
  //   cut in the ghost-axiom conclusion, instantiate and extract.
  Formula c1 = dg_quantified;
  Sequent c1_left = push_succ(with_z, c1);
  Sequent c1_right = push_ante(with_z, c1);
  int c1_idx = static_cast<int>(c1_right.ante.size()) - 1;

  // Prove the cut formula by the ghost axiom and a weakening of the
  // determinant condition.
  Formula box_det = Formula::box(alpha, det_cond);
  ProofNode dg_side = mp_node(
      c1_left, 1, box_det,
      node(with_succ(c1_left, 1, Formula::imply(box_det, c1)), "dg", dg_inst,
           {1}),
      close_real(tac_dw(with_succ(c1_left, 1, box_det), 1)));

  // forall-instantiate (trivially) and peel the existential.
  Formula exists_zp = substitute(c1.body(), z, Term::var(z));
  Sequent after_forall = c1_right;
  after_forall.ante[static_cast<std::size_t>(c1_idx)] = exists_zp;
  Sequent after_exists = after_forall;
  after_exists.ante[static_cast<std::size_t>(c1_idx)] = ref_ab;

  // Use the refinement bridge.
  Formula use = Formula::and_(ref_ab, Formula::box(beta, safety));
  Instantiation r_inst;
  r_inst.bind("alpha", alpha);
  r_inst.bind("beta", beta);
  r_inst.bind("P", safety);
  r_inst.bind("xs", xy);
  ProofNode bridge = mp_node(
      after_exists, 0, use,
      node(with_succ(after_exists, 0, Formula::imply(use, goal_box)), "r",
           r_inst, {0}),
      andr_node(with_succ(after_exists, 0, use), 0,
                id_node(with_succ(after_exists, 0, ref_ab), c1_idx, 0),
                box_safety_over_beta(
                    with_succ(after_exists, 0, Formula::box(beta, safety)))));

  Instantiation z_ident;
  z_ident.bind("e", Term::var(z));
  ProofNode use_c1 = node(
      c1_right, "foralll", z_ident, {c1_idx},
      {node(after_forall, "existsl", {}, {c1_idx}, {std::move(bridge)})});

  ProofNode with_z_proof = cut_node(with_z, c1, std::move(dg_side), std::move(use_c1));

  Sequent exists_right = push_ante(root, exists_z1);
  ProofNode script = cut_node(
      root, exists_z1, prove_exists(push_succ(root, exists_z1)),
      node(exists_right, "existsl", {},
           {static_cast<int>(exists_right.ante.size()) - 1},
           {std::move(with_z_proof)}));

  // Record the single non-equational leaf for the external tier.
  Sequent positivity_goal{{invariant}, {safety}};
  std::string fixtures_json =
      std::string("{\n  \"schema\": \"dal-solver-fixtures/1\",\n") +
      "  \"entries\": [\n    {\n      \"sequent\": \"" + print(positivity_goal) +
      "\",\n      \"solver\": \"offline-nra\",\n"
      "      \"note\": \"z^2*y = 1 forces y = 1/z^2 > 0; checked offline\"\n"
      "    }\n  ]\n}\n";

  std::ofstream proof(dir + "/safety.dalproof");
  proof << write_proof(script);
  proof.close();
  std::ofstream fx(dir + "/solver_fixtures.json");
  fx << fixtures_json;
  fx.close();

  // Sanity: the script must check as conditional (one external leaf) with
  // every other leaf at the ideal tier.
  OracleConfig ocfg;
  ocfg.external_fixtures[print(positivity_goal)] = "offline-nra";
  Oracle oracle(ocfg);
  CheckReport report = check(script, oracle, KernelConfig{});
  int ideal = 0, external = 0, rejected = 0;
  for (const auto& n : report.nodes) {
    if (n.verdict != "accepted") {
      ++rejected;
      std::cerr << "node " << n.id << " (" << n.rule << "): " << n.verdict
                << " - " << n.detail << "\n";
    }
    if (n.tier == "ideal-membership") ++ideal;
    if (n.tier.rfind("external:", 0) == 0) ++external;
  }
  std::cout << "safety script: " << to_string(report.status) << ", "
            << report.nodes.size() << " nodes, " << ideal
            << " ideal leaves, " << external << " external, " << rejected
            << " rejected\n";
  return report.status == OverallStatus::Conditional && rejected == 0 ? 0 : 1;
}
