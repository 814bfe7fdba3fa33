#include "dal/tactics.hpp"

#include <algorithm>

#include "dal/errors.hpp"
#include "dal/printer.hpp"

namespace dal {

namespace {

ProofNode mk(Sequent goal, std::string rule, Instantiation inst = {},
             std::vector<int> at = {}, std::vector<ProofNode> kids = {}) {
  ProofNode n;
  n.goal = std::move(goal);
  n.rule = std::move(rule);
  n.inst = std::move(inst);
  n.at = std::move(at);
  n.children = std::move(kids);
  return n;
}

ProofNode open_leaf(Sequent goal) { return mk(std::move(goal), "open"); }

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

Formula vec_cmp_zero(const TermVec& es, bool strict) {
  std::vector<Formula> fs;
  fs.reserve(es.size());
  for (const auto& e : es)
    fs.push_back(strict ? Formula::lt(e, Term::constant(0))
                        : Formula::leq(e, Term::constant(0)));
  return Formula::conj(fs);
}

Formula vec_diff_eq_zero(const TermVec& es) {
  std::vector<Formula> fs;
  fs.reserve(es.size());
  for (const auto& e : es)
    fs.push_back(Formula::eq(Term::differential(e), Term::constant(0)));
  return Formula::conj(fs);
}

Formula vec_diff_leq_zero(const TermVec& es) {
  std::vector<Formula> fs;
  fs.reserve(es.size());
  for (const auto& e : es)
    fs.push_back(Formula::leq(Term::differential(e), Term::constant(0)));
  return Formula::conj(fs);
}

Instantiation inst_of(std::initializer_list<std::pair<std::string, Payload>> xs) {
  Instantiation inst;
  for (const auto& [k, v] : xs) inst.bind(k, v);
  return inst;
}

// Gamma |- [{xs:F}] P, Delta via K composition, generalization and the
// weakening axiom; the remaining premise F |- P is produced by `premise`.
ProofNode dw_rule(const Sequent& goal, int at, const VarTuple& xs,
                  const Formula& f, const Formula& p,
                  const std::function<ProofNode(const Sequent&)>& premise) {
  Program sys = Program::dap(xs, f);
  Formula box_f = Formula::box(sys, f);
  Formula box_p = Formula::box(sys, p);
  Formula box_fp = Formula::box(sys, Formula::imply(f, p));
  Sequent leaf_goal{{f}, {p}};
  ProofNode open_node = premise(leaf_goal);
  return mk(
      goal, "mp", inst_of({{"P", box_f}}), {at},
      {mk(with_succ(goal, at, Formula::imply(box_f, box_p)), "mp",
          inst_of({{"P", box_fp}}), {at},
          {mk(with_succ(goal, at,
                        Formula::imply(box_fp, Formula::imply(box_f, box_p))),
              "k", inst_of({{"alpha", sys}, {"P", f}, {"Q", p}}), {at}),
           mk(with_succ(goal, at, box_fp), "g", {}, {at},
              {mk(Sequent{{}, {Formula::imply(f, p)}}, "implyr", {}, {0},
                  {std::move(open_node)})})}),
       mk(with_succ(goal, at, box_f), "dw",
          inst_of({{"xs", xs}, {"F", f}}), {at})});
}

// Gamma |- {xs:F} <=[xs] {xs:F}, Delta.
ProofNode refl_refinement(const Sequent& goal, int at, const VarTuple& xs,
                          const Formula& f) {
  Program d = Program::dap(xs, f);
  Program dff = Program::dap(xs, Formula::and_(f, f));
  Formula ref1 = Formula::refines_on(d, dff, xs);
  Formula ref2 = Formula::refines_on(dff, d, xs);
  Formula pair = Formula::and_(ref1, ref2);
  Formula box_f = Formula::box(d, f);
  return mk(
      goal, "mp", inst_of({{"P", pair}}), {at},
      {mk(with_succ(goal, at,
                    Formula::imply(pair, goal.succ[static_cast<std::size_t>(at)])),
          "tr",
          inst_of({{"alpha", d}, {"beta", dff}, {"gamma", d}, {"xs", xs}}), {at}),
       mk(with_succ(goal, at, pair), "andr", {}, {at},
          {mk(with_succ(goal, at, ref1), "mp", inst_of({{"P", box_f}}), {at},
              {mk(with_succ(goal, at, Formula::imply(box_f, ref1)), "dc",
                  inst_of({{"xs", xs}, {"F", f}, {"R", f}}), {at}),
               mk(with_succ(goal, at, box_f), "dw",
                  inst_of({{"xs", xs}, {"F", f}}), {at})}),
           mk(with_succ(goal, at, ref2), "dr",
              inst_of({{"xs", xs}, {"zs", VarTuple{}}, {"R", f}, {"F", f}}),
              {at})})});
}

// Gamma |- {xs:A} <=[xs] {xs : A & B}, Delta, with the box premise reduced by
// the weakening rule to A |- B (closed by `premise`).
ProofNode constraint_intro(const Sequent& goal, int at, const VarTuple& xs,
                           const Formula& a, const Formula& b,
                           const std::function<ProofNode(const Sequent&)>& premise) {
  Program da = Program::dap(xs, a);
  Formula box_b = Formula::box(da, b);
  Sequent box_goal = with_succ(goal, at, box_b);
  return mk(goal, "mp", inst_of({{"P", box_b}}), {at},
            {mk(with_succ(goal, at,
                          Formula::imply(box_b, goal.succ[static_cast<std::size_t>(at)])),
                "dc", inst_of({{"xs", xs}, {"F", a}, {"R", b}}), {at}),
             dw_rule(box_goal, at, xs, a, b, premise)});
}

// Gamma |- {xs : conj AC-equal to and(R,F)} <=[xs] {xs:F}, Delta by the
// restriction axiom behind a reordering step.
ProofNode constraint_drop(const Sequent& goal, int at, const VarTuple& xs,
                          const Formula& r, const Formula& f) {
  Formula dr_instance = Formula::refines_on(
      Program::dap(xs, Formula::and_(r, f)), Program::dap(xs, f), xs);
  return mk(goal, "unfold", {}, {at},
            {mk(with_succ(goal, at, dr_instance), "dr",
                inst_of({{"xs", xs}, {"zs", VarTuple{}}, {"R", r}, {"F", f}}),
                {at})});
}

// Transitivity split: from proofs of a <= b and b <= c conclude a <= c.
ProofNode tr_split(const Sequent& goal, int at, const VarTuple& xs,
                   const Program& pa, const Program& pb, const Program& pc,
                   ProofNode left, ProofNode right) {
  Formula ref_ab = Formula::refines_on(pa, pb, xs);
  Formula ref_bc = Formula::refines_on(pb, pc, xs);
  Formula pair = Formula::and_(ref_ab, ref_bc);
  return mk(
      goal, "mp", inst_of({{"P", pair}}), {at},
      {mk(with_succ(goal, at,
                    Formula::imply(pair, goal.succ[static_cast<std::size_t>(at)])),
          "tr",
          inst_of({{"alpha", pa}, {"beta", pb}, {"gamma", pc}, {"xs", xs}}), {at}),
       mk(with_succ(goal, at, pair), "andr", {}, {at},
          {std::move(left), std::move(right)})});
}

// The left-to-right half shared by the induction and hidden-constraint
// tactics: Gamma |- {xs:F} <=[xs] {xs : F & C3}, Delta via the chain
// F, F & C2, F & C3 & C2, F & C3 (the system
// constraint added by the axiom is C2, the invariant constraint is C3).
//
// axiom_id is dileq, dilt or dhc; its instance must be imply(C3-pre,
// box({xs:C2}, C3-pre)) with C3-pre == c3.
ProofNode add_constraint_ltr(
    const Sequent& goal, int at, const VarTuple& xs, const Formula& f,
    const Formula& c2, const Formula& c3, const std::string& axiom_id,
    const TermVec& es,
    const std::function<ProofNode(const Sequent&)>& close_initial,
    const std::function<ProofNode(const Sequent&)>& close_box) {
  Program d_f = Program::dap(xs, f);
  Formula g2 = Formula::and_(f, c2);
  Formula g3 = Formula::and_(f, Formula::and_(c3, c2));
  Formula g4 = Formula::and_(f, c3);
  Program d_g2 = Program::dap(xs, g2);
  Program d_g3 = Program::dap(xs, g3);
  Program d_g4 = Program::dap(xs, g4);

  // G1 -> G2: constraint introduction via the cut axiom; the box premise is
  // the tactic's open differential obligation.
  Formula box_c2 = Formula::box(d_f, c2);
  ProofNode g1g2 =
      mk(with_succ(goal, at, Formula::refines_on(d_f, d_g2, xs)), "mp",
         inst_of({{"P", box_c2}}), {at},
         {mk(with_succ(goal, at,
                       Formula::imply(box_c2, Formula::refines_on(d_f, d_g2, xs))),
             "dc", inst_of({{"xs", xs}, {"F", f}, {"R", c2}}), {at}),
          close_box(with_succ(goal, at, box_c2))});

  // G2 -> G3: monotonicity around the core step {xs:C2} <= {xs:C2 & C3},
  // whose box premise is closed by cutting in C3 and the axiom itself.
  Program d_c2 = Program::dap(xs, c2);
  Program d_c2c3 = Program::dap(xs, Formula::and_(c2, c3));
  Formula core = Formula::refines_on(d_c2, d_c2c3, xs);
  Formula box_c3 = Formula::box(d_c2, c3);
  Sequent box_c3_goal = with_succ(goal, at, box_c3);
  Sequent cut_left = push_succ(box_c3_goal, c3);
  Sequent cut_right = push_ante(box_c3_goal, c3);
  ProofNode core_box =
      mk(box_c3_goal, "cut", inst_of({{"C", c3}}), {},
         {close_initial(cut_left),
          mk(cut_right, "mp", inst_of({{"P", c3}}), {at},
             {mk(with_succ(cut_right, at, Formula::imply(c3, box_c3)), axiom_id,
                 inst_of({{"xs", xs}, {"E", es}}), {at}),
              mk(with_succ(cut_right, at, c3), "id", {},
                 {static_cast<int>(cut_right.ante.size()) - 1, at})})});
  Formula dm_conclusion = Formula::refines_on(
      Program::dap(xs, Formula::and_(c2, f)),
      Program::dap(xs, Formula::and_(Formula::and_(c2, c3), f)), xs);
  ProofNode g2g3 =
      mk(with_succ(goal, at, Formula::refines_on(d_g2, d_g3, xs)), "unfold", {},
         {at},
         {mk(with_succ(goal, at, dm_conclusion), "mp", inst_of({{"P", core}}),
             {at},
             {mk(with_succ(goal, at, Formula::imply(core, dm_conclusion)), "dm",
                 inst_of({{"xs", xs},
                          {"F", c2},
                          {"G", Formula::and_(c2, c3)},
                          {"R", f}}),
                 {at}),
              mk(with_succ(goal, at, core), "mp", inst_of({{"P", box_c3}}), {at},
                 {mk(with_succ(goal, at, Formula::imply(box_c3, core)), "dc",
                     inst_of({{"xs", xs}, {"F", c2}, {"R", c3}}), {at}),
                  std::move(core_box)})})});

  // G3 -> G4: drop C2 again.
  ProofNode g3g4 = constraint_drop(
      with_succ(goal, at, Formula::refines_on(d_g3, d_g4, xs)), at, xs, c2, g4);

  ProofNode g2g4 =
      tr_split(with_succ(goal, at, Formula::refines_on(d_g2, d_g4, xs)), at, xs,
               d_g2, d_g3, d_g4, std::move(g2g3), std::move(g3g4));
  return tr_split(goal, at, xs, d_f, d_g2, d_g4, std::move(g1g2),
                  std::move(g2g4));
}

std::vector<Sequent> collect_opens(const ProofNode& n) {
  std::vector<Sequent> out;
  std::function<void(const ProofNode&)> walk = [&](const ProofNode& node) {
    if (node.rule == "open") out.push_back(node.goal);
    for (const auto& c : node.children) walk(c);
  };
  walk(n);
  return out;
}

struct DapShape {
  VarTuple xs;
  Formula constraint;
};

DapShape dap_shape(const Program& p, const std::string& who) {
  if (p.kind() != ProgramKind::Dap)
    throw ShapeMismatch(who + ": expected a continuous program");
  return {p.dap_tuple(), p.dap_constraint()};
}

const Formula& principal(const Sequent& goal, int at, const std::string& who) {
  if (at < 0 || static_cast<std::size_t>(at) >= goal.succ.size())
    throw ShapeMismatch(who + ": position outside the succedent");
  return goal.succ[static_cast<std::size_t>(at)];
}

}  // namespace

TacticResult tac_dw(const Sequent& goal, int at) {
  const Formula& f = principal(goal, at, "dw");
  if (f.kind() != FormulaKind::Box) throw ShapeMismatch("dw: expected a box goal");
  DapShape s = dap_shape(f.program(), "dw");
  ProofNode script = dw_rule(goal, at, s.xs, s.constraint, f.body(),
                             [](const Sequent& g) { return open_leaf(g); });
  return {script, collect_opens(script)};
}

TacticResult tac_da(const Sequent& goal, int at, const Formula& r) {
  const Formula& f = principal(goal, at, "da");
  if (f.kind() != FormulaKind::RefinesOn)
    throw ShapeMismatch("da: expected a refinement goal");
  DapShape lhs = dap_shape(f.ref_lhs(), "da");
  DapShape rhs = dap_shape(f.ref_rhs(), "da");
  if (!(lhs.xs == rhs.xs) || !(lhs.xs == f.ref_tuple()))
    throw ShapeMismatch("da: tuple mismatch");
  const VarTuple& xs = lhs.xs;
  Program d_f = f.ref_lhs();
  Program d_r = Program::dap(xs, r);
  Program d_fr = Program::dap(xs, Formula::and_(lhs.constraint, r));
  ProofNode left = tr_split(
      with_succ(goal, at, Formula::refines_on(d_f, d_r, xs)), at, xs, d_f, d_fr,
      d_r,
      constraint_intro(
          with_succ(goal, at, Formula::refines_on(d_f, d_fr, xs)), at, xs,
          lhs.constraint, r, [](const Sequent& g) { return open_leaf(g); }),
      mk(with_succ(goal, at, Formula::refines_on(d_fr, d_r, xs)), "dr",
         inst_of({{"xs", xs}, {"zs", VarTuple{}}, {"R", lhs.constraint}, {"F", r}}),
         {at}));
  ProofNode script =
      tr_split(goal, at, xs, d_f, d_r, f.ref_rhs(), std::move(left),
               open_leaf(with_succ(goal, at, Formula::refines_on(d_r, f.ref_rhs(), xs))));
  return {script, collect_opens(script)};
}

namespace {

TacticResult mutual_add(const Sequent& goal, int at, const TermVec& es,
                        const Formula& c2, const Formula& c3,
                        const std::string& axiom_id, const std::string& who) {
  const Formula& f = principal(goal, at, who);
  if (f.kind() != FormulaKind::And)
    throw ShapeMismatch(who + ": expected a mutual refinement goal");
  const Formula& fwd = f.left();
  const Formula& bwd = f.right();
  if (fwd.kind() != FormulaKind::RefinesOn || bwd.kind() != FormulaKind::RefinesOn)
    throw ShapeMismatch(who + ": expected a mutual refinement goal");
  DapShape lhs = dap_shape(fwd.ref_lhs(), who);
  DapShape rhs = dap_shape(fwd.ref_rhs(), who);
  const VarTuple& xs = fwd.ref_tuple();
  if (!(lhs.xs == xs) || !(rhs.xs == xs))
    throw ShapeMismatch(who + ": tuple mismatch");
  Formula g4 = Formula::and_(lhs.constraint, c3);
  if (!(rhs.constraint == g4))
    throw ShapeMismatch(who + ": augmented constraint must be F & " + print(c3));
  if (!(bwd.ref_lhs() == fwd.ref_rhs()) || !(bwd.ref_rhs() == fwd.ref_lhs()) ||
      !(bwd.ref_tuple() == xs))
    throw ShapeMismatch(who + ": the two directions do not mirror");

  // Forward: the transitivity chain. Backward: drop C3.
  ProofNode forward = add_constraint_ltr(
      with_succ(goal, at, fwd), at, xs, lhs.constraint, c2, c3, axiom_id, es,
      [](const Sequent& g) { return open_leaf(g); },
      [](const Sequent& g) { return open_leaf(g); });
  ProofNode backward = constraint_drop(with_succ(goal, at, bwd), at, xs, c3,
                                       lhs.constraint);
  ProofNode script =
      mk(goal, "andr", {}, {at}, {std::move(forward), std::move(backward)});
  // Stated order: the initial-condition premise (recognizable by its appended
  // succedent) before the box premise.
  std::vector<Sequent> opens = collect_opens(script);
  std::stable_sort(opens.begin(), opens.end(),
                   [&](const Sequent& a, const Sequent& b) {
                     return a.succ.size() > b.succ.size();
                   });
  return {script, std::move(opens)};
}

}  // namespace

TacticResult tac_di(const Sequent& goal, int at, const TermVec& es, bool strict) {
  for (const auto& e : es)
    if (contains_differential(e) || contains_primed(e))
      throw SideCondition("di: invariant terms must be differential-free and unprimed");
  return mutual_add(goal, at, es, vec_diff_leq_zero(es), vec_cmp_zero(es, strict),
                    strict ? "dilt" : "dileq", "di");
}

TacticResult tac_dhc(const Sequent& goal, int at, const TermVec& es) {
  for (const auto& e : es)
    if (contains_differential(e) || contains_primed(e))
      throw SideCondition("dhc: constraint terms must be differential-free and unprimed");
  return mutual_add(goal, at, es, Formula::vec_eq_zero(es), vec_diff_eq_zero(es),
                    "dhc", "dhc");
}

Formula ir_gamma_formula(const std::vector<IrRound>& rounds) {
  std::vector<Formula> fs;
  fs.reserve(rounds.size());
  for (const auto& r : rounds) fs.push_back(vec_diff_eq_zero(r.algebraic));
  return Formula::conj(fs);
}

Formula ir_obligations_formula(const std::vector<Formula>& systems,
                               const std::vector<IrRound>& rounds) {
  std::vector<Formula> fs;
  fs.reserve(rounds.size());
  for (std::size_t i = 0; i < rounds.size(); ++i)
    fs.push_back(Formula::imply(systems[i],
                                Formula::vec_eq_zero(rounds[i].algebraic)));
  return Formula::conj(fs);
}

ProofNode ir_obligations_proof(const std::vector<Formula>& systems,
                               const std::vector<IrRound>& rounds) {
  // |- I_0 & (I_1 & ...): right conjunction introductions, one implication
  // introduction per round, real-arithmetic leaves.
  std::function<ProofNode(std::size_t, const Formula&)> build =
      [&](std::size_t k, const Formula& remaining) -> ProofNode {
    Formula ik = Formula::imply(systems[k], Formula::vec_eq_zero(rounds[k].algebraic));
    ProofNode prove_ik =
        mk(Sequent{{}, {ik}}, "implyr", {}, {0},
           {mk(Sequent{{systems[k]}, {Formula::vec_eq_zero(rounds[k].algebraic)}},
               "real")});
    if (k + 1 == rounds.size()) return prove_ik;
    const Formula& rest = remaining.right();
    return mk(Sequent{{}, {remaining}}, "andr", {}, {0},
              {std::move(prove_ik), build(k + 1, rest)});
  };
  return build(0, ir_obligations_formula(systems, rounds));
}

TacticResult tac_ir(const Sequent& goal, int at, const VarTuple& xs,
                    const std::vector<Formula>& systems,
                    const std::vector<IrRound>& rounds) {
  if (systems.size() != rounds.size() + 1)
    throw ChainMismatch("ir: need one system per round plus the original");
  const std::size_t m = rounds.size();
  for (std::size_t i = 0; i < m; ++i) {
    Formula expected =
        Formula::and_(systems[i], Formula::vec_eq_zero(rounds[i].reduced));
    if (!(ac_normal(expected) == ac_normal(systems[i + 1])))
      throw ChainMismatch("ir: system " + std::to_string(i + 1) +
                          " is not the recorded augmentation of its predecessor");
  }
  const Formula& f = principal(goal, at, "ir");
  Formula want = Formula::mutual_refines(Program::dap(xs, systems[m]),
                                         Program::dap(xs, systems[0]), xs);
  if (!(f == want))
    throw ShapeMismatch("ir: goal must be the reduced-against-original equivalence");

  Formula gamma = ir_gamma_formula(rounds);
  Formula obligations = ir_obligations_formula(systems, rounds);
  std::vector<Program> daps;
  daps.reserve(systems.size());
  for (const auto& s : systems) daps.push_back(Program::dap(xs, s));

  // Closes Gamma' |- Delta', (R_k)' = 0 by cutting the aggregate premise and
  // selecting its k-th conjunct.
  auto close_initial = [&](const Sequent& g, std::size_t k) -> ProofNode {
    Sequent o1{goal.ante, {gamma}};
    Sequent left = push_succ(g, gamma);
    Sequent right = push_ante(g, gamma);
    int target = static_cast<int>(g.succ.size()) - 1;
    // Split the aggregate into its first k+1 conjuncts; the last round needs
    // one split fewer since it is the tail of the nested conjunction.
    std::size_t splits = std::min(k + 1, rounds.size() - 1);
    ProofNode inner;
    {
      std::vector<ProofNode> chain;
      Sequent cur = right;
      int base = static_cast<int>(cur.ante.size()) - 1;
      int pos = base;
      for (std::size_t j = 0; j < splits; ++j) {
        const Formula& conj = cur.ante[static_cast<std::size_t>(pos)];
        Sequent next = cur;
        next.ante[static_cast<std::size_t>(pos)] = conj.left();
        next.ante.insert(next.ante.begin() + pos + 1, conj.right());
        chain.push_back(mk(cur, "andl", {}, {pos}));
        cur = next;
        ++pos;
      }
      inner = mk(cur, "id", {}, {base + static_cast<int>(k), target});
      for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
        it->children = {std::move(inner)};
        inner = std::move(*it);
      }
    }
    return mk(g, "cut", inst_of({{"C", gamma}}), {},
              {mk(left, "wk", {}, {}, {open_leaf(o1)}), std::move(inner)});
  };

  // Closes F_k |- R_k = 0 by cutting the aggregate implication bundle.
  auto close_dw_premise = [&](const Sequent& g, std::size_t k) -> ProofNode {
    Sequent o2{{}, {obligations}};
    Sequent left = push_succ(g, obligations);
    Sequent right = push_ante(g, obligations);
    Formula rk_eq = Formula::vec_eq_zero(rounds[k].algebraic);
    // Expose the k-th implication.
    std::vector<ProofNode> chain;
    Sequent cur = right;
    int pos = static_cast<int>(cur.ante.size()) - 1;
    for (std::size_t j = 0; j + 1 <= k; ++j) {
      const Formula& conj = cur.ante[static_cast<std::size_t>(pos)];
      Sequent next = cur;
      next.ante[static_cast<std::size_t>(pos)] = conj.left();
      next.ante.insert(next.ante.begin() + pos + 1, conj.right());
      chain.push_back(mk(cur, "andl", {}, {pos}));
      cur = next;
      ++pos;
    }
    // cur.ante[pos] is I_k (or I_k itself when k is the last round).
    Formula ik = cur.ante[static_cast<std::size_t>(pos)];
    if (ik.kind() == FormulaKind::And) {
      Sequent next = cur;
      next.ante[static_cast<std::size_t>(pos)] = ik.left();
      next.ante.insert(next.ante.begin() + pos + 1, ik.right());
      chain.push_back(mk(cur, "andl", {}, {pos}));
      cur = next;
      ik = cur.ante[static_cast<std::size_t>(pos)];
    }
    // ik == imply(systems[k], rk_eq) == !(systems[k] & !rk_eq)
    Sequent after_notl = cur;
    after_notl.ante.erase(after_notl.ante.begin() + pos);
    Formula inner_and = Formula::and_(systems[k], Formula::not_(rk_eq));
    after_notl.succ.push_back(inner_and);
    int and_pos = static_cast<int>(after_notl.succ.size()) - 1;
    Sequent left_branch = after_notl;
    left_branch.succ[static_cast<std::size_t>(and_pos)] = systems[k];
    Sequent right_branch = after_notl;
    right_branch.succ[static_cast<std::size_t>(and_pos)] = Formula::not_(rk_eq);
    Sequent notr_goal = right_branch;
    notr_goal.succ.erase(notr_goal.succ.begin() + and_pos);
    notr_goal.ante.push_back(rk_eq);
    ProofNode leafs =
        mk(cur, "notl", {}, {pos},
           {mk(after_notl, "andr", {}, {and_pos},
               {mk(left_branch, "id", {}, {0, and_pos}),
                mk(right_branch, "notr", {}, {and_pos},
                   {mk(notr_goal, "id", {},
                       {static_cast<int>(notr_goal.ante.size()) - 1, 0})})})});
    ProofNode inner = std::move(leafs);
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      it->children = {std::move(inner)};
      inner = std::move(*it);
    }
    return mk(g, "cut", inst_of({{"C", obligations}}), {},
              {mk(left, "wk", {}, {}, {open_leaf(o2)}), std::move(inner)});
  };

  // Forward link for round k: {xs:F_k} <= {xs:F_{k+1}}.
  auto forward_link = [&](std::size_t k, const Sequent& g) -> ProofNode {
    const Formula& fk = systems[k];
    Formula c3 = vec_diff_eq_zero(rounds[k].algebraic);
    Formula c2 = Formula::vec_eq_zero(rounds[k].algebraic);
    Formula aug = Formula::and_(fk, c3);  // F_k & (R_k)' = 0
    Program d_fk = daps[k];
    Program d_aug = Program::dap(xs, aug);
    Program d_next = daps[k + 1];
    // Step 1: the hidden-constraint chain F_k -> F_k & (R_k)'=0.
    ProofNode step1 = add_constraint_ltr(
        with_succ(g, at, Formula::refines_on(d_fk, d_aug, xs)), at, xs, fk, c2,
        c3, "dhc", rounds[k].algebraic,
        [&](const Sequent& open_goal) { return close_initial(open_goal, k); },
        [&](const Sequent& open_goal) {
          // Gamma' |- [{xs:F_k}] R_k = 0 via weakening to F_k |- R_k = 0.
          return dw_rule(open_goal, at, xs, fk, c2, [&](const Sequent& leaf) {
            return close_dw_premise(leaf, k);
          });
        });
    // Step 2: certified rewrite, introducing the reduced form.
    Formula red_eq = Formula::vec_eq_zero(rounds[k].reduced);
    Formula aug_red = Formula::and_(aug, red_eq);
    Program d_aug_red = Program::dap(xs, aug_red);
    ProofNode step2 = constraint_intro(
        with_succ(g, at, Formula::refines_on(d_aug, d_aug_red, xs)), at, xs, aug,
        red_eq, [&](const Sequent& leaf) { return mk(leaf, "real"); });
    // Step 3: drop the differential form, landing on F_{k+1}.
    ProofNode step3 = constraint_drop(
        with_succ(g, at, Formula::refines_on(d_aug_red, d_next, xs)), at, xs, c3,
        systems[k + 1]);
    ProofNode right = tr_split(
        with_succ(g, at, Formula::refines_on(d_aug, d_next, xs)), at, xs, d_aug,
        d_aug_red, d_next, std::move(step2), std::move(step3));
    return tr_split(g, at, xs, d_fk, d_aug, d_next, std::move(step1),
                    std::move(right));
  };

  // Discover direction: {xs:F_0} <= {xs:F_m} by chaining forward links.
  std::function<ProofNode(std::size_t, const Sequent&)> discover =
      [&](std::size_t k, const Sequent& g) -> ProofNode {
    if (k == 0) {
      return refl_refinement(g, at, xs, systems[0]);
    }
    if (k == 1) return forward_link(0, g);
    Sequent lower =
        with_succ(g, at, Formula::refines_on(daps[0], daps[k - 1], xs));
    Sequent step =
        with_succ(g, at, Formula::refines_on(daps[k - 1], daps[k], xs));
    return tr_split(g, at, xs, daps[0], daps[k - 1], daps[k],
                    discover(k - 1, lower), forward_link(k - 1, step));
  };

  // Forget direction: {xs:F_m} <= {xs:F_0} by dropping recorded constraints.
  std::function<ProofNode(std::size_t, const Sequent&)> forget =
      [&](std::size_t k, const Sequent& g) -> ProofNode {
    if (k == 0) return refl_refinement(g, at, xs, systems[0]);
    ProofNode link = constraint_drop(
        with_succ(g, at, Formula::refines_on(daps[k], daps[k - 1], xs)), at, xs,
        Formula::vec_eq_zero(rounds[k - 1].reduced), systems[k - 1]);
    if (k == 1) return link;
    Sequent lower =
        with_succ(g, at, Formula::refines_on(daps[k - 1], daps[0], xs));
    return tr_split(g, at, xs, daps[k], daps[k - 1], daps[0], std::move(link),
                    forget(k - 1, lower));
  };

  Sequent forget_goal =
      with_succ(goal, at, Formula::refines_on(daps[m], daps[0], xs));
  Sequent discover_goal =
      with_succ(goal, at, Formula::refines_on(daps[0], daps[m], xs));
  ProofNode script =
      mk(goal, "andr", {}, {at},
         {forget(m, forget_goal), discover(m, discover_goal)});
  TacticResult out{script, {}};
  if (m > 0) {
    out.opens.push_back(Sequent{goal.ante, {gamma}});
    out.opens.push_back(Sequent{{}, {obligations}});
  }
  return out;
}

ProofNode graft(const ProofNode& script,
                const std::function<std::optional<ProofNode>(const Sequent&)>& provider) {
  ProofNode out = script;
  if (out.rule == "open") {
    auto sub = provider(out.goal);
    if (sub) {
      if (!(sub->goal == out.goal))
        throw ShapeMismatch("graft: subproof goal differs from the open premise");
      return *sub;
    }
    return out;
  }
  for (auto& c : out.children) c = graft(c, provider);
  return out;
}

std::vector<std::string> rule_sequence(const ProofNode& script) {
  std::vector<std::string> out;
  std::function<void(const ProofNode&)> walk = [&](const ProofNode& n) {
    out.push_back(n.rule);
    for (const auto& c : n.children) walk(c);
  };
  walk(script);
  return out;
}

}  // namespace dal
