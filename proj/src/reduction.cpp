#include "dal/reduction.hpp"

#include <algorithm>

#include "dal/errors.hpp"
#include "dal/printer.hpp"

namespace dal {

DaeSystem DaeSystem::build(std::string name, VarTuple states,
                           std::vector<Variable> params, TermVec equations) {
  DaeSystem sys;
  sys.name = std::move(name);
  sys.state_vars = std::move(states);
  sys.params = std::move(params);
  sys.equations = std::move(equations);
  for (const auto& p : sys.params) {
    if (p.primed) throw Error("parameters must be unprimed");
    if (sys.state_vars.contains(p))
      throw Error("variable " + p.name() + " is both state and parameter");
  }
  for (const auto& eq : sys.equations) {
    if (contains_differential(eq))
      throw Error("system equations must not contain differential terms");
    for (const auto& v : free_vars(eq)) {
      Variable base = v.unprime();
      if (v.primed && !sys.state_vars.contains(base))
        throw Error("differential variable " + v.name() +
                    " has no corresponding state");
      if (!sys.state_vars.contains(base) &&
          std::find(sys.params.begin(), sys.params.end(), base) ==
              sys.params.end())
        throw Error("variable " + base.name() + " is neither state nor parameter");
    }
  }
  // Record explicitly solved derivatives: equations of the shape x' - e (or
  // e - x') with e unprimed.
  OrderPtr ord = sys.order();
  for (const auto& eq : sys.equations) {
    Polynomial p = Polynomial::from_term(eq, ord);
    for (const auto& v : sys.state_vars) {
      Variable vp = v.prime();
      Monomial bare{{vp, 1}};
      Rational coeff(0);
      Polynomial rest(ord);
      bool other_primed = false;
      for (const auto& [m, c] : p.terms()) {
        if (m == bare) {
          coeff = c;
          continue;
        }
        bool primed_here = false;
        for (const auto& [mv, e] : m)
          if (mv.primed) primed_here = true;
        if (primed_here) {
          other_primed = true;
          break;
        }
        rest = rest + Polynomial(c, ord).mono_scaled(m, Rational(1));
      }
      if (other_primed || coeff.is_zero()) continue;
      if (coeff != Rational(1) && coeff != Rational(-1)) continue;
      Polynomial solved = coeff == Rational(1) ? -rest : rest;
      sys.solved_derivatives.emplace(vp, solved.to_term());
    }
  }
  return sys;
}

DaeSystem DaeSystem::from_decl(const SystemDecl& decl) {
  return build(decl.name, VarTuple(decl.states), decl.params, decl.equations);
}

OrderPtr DaeSystem::order() const {
  std::vector<Variable> priority(state_vars.vars());
  priority.insert(priority.end(), params.begin(), params.end());
  return MonomialOrder::lex(std::move(priority));
}

std::vector<Polynomial> DaeSystem::equation_polys() const {
  OrderPtr ord = order();
  std::vector<Polynomial> out;
  out.reserve(equations.size());
  for (const auto& eq : equations) out.push_back(Polynomial::from_term(eq, ord));
  return out;
}

bool DaeSystem::is_param(const Variable& v) const {
  Variable base = v.unprime();
  return std::find(params.begin(), params.end(), base) != params.end();
}

Formula DaeSystem::constraint_formula() const {
  std::vector<Formula> fs;
  fs.reserve(equations.size() + params.size());
  for (const auto& eq : equations)
    fs.push_back(Formula::eq(eq, Term::constant(0)));
  for (const auto& p : params)
    fs.push_back(Formula::eq(Term::var(p.prime()), Term::constant(0)));
  return Formula::conj(fs);
}

VarTuple DaeSystem::program_tuple() const {
  std::vector<Variable> vars(state_vars.vars());
  vars.insert(vars.end(), params.begin(), params.end());
  return VarTuple(std::move(vars));
}

namespace {

Polynomial substitute_known(Polynomial p, const DaeSystem& sys) {
  // Solved state derivatives, then parameter rigidity.
  OrderPtr ord = p.order();
  for (const auto& [vp, e] : sys.solved_derivatives)
    p = p.substitute(vp, Polynomial::from_term(e, ord));
  for (const auto& par : sys.params)
    p = p.substitute(par.prime(), Polynomial(Rational(0), ord));
  return p;
}

std::vector<Polynomial> rigid_equation_polys(const DaeSystem& sys) {
  // Parameter primes are ideal generators under rigidity; including them
  // keeps reductions of differentiated constraints exact.
  std::vector<Polynomial> polys = sys.equation_polys();
  OrderPtr ord = sys.order();
  for (const auto& par : sys.params)
    polys.push_back(Polynomial::variable(par.prime(), ord));
  return polys;
}

}  // namespace

std::vector<Polynomial> extract_algebraic_part(
    const DaeSystem& sys, ExtractStrategy strategy,
    const std::vector<Polynomial>& previous, const GroebnerConfig& cfg) {
  std::vector<Polynomial> prev_basis = groebner_basis(previous, cfg);
  std::vector<Polynomial> found;
  auto consider = [&](Polynomial cand) {
    if (cand.is_zero() || cand.has_primed()) return;
    std::vector<Polynomial> basis = prev_basis;
    for (const auto& f : found) basis.push_back(f);
    basis = groebner_basis(basis, cfg);
    if (!in_ideal(cand, basis)) found.push_back(cand);
  };
  if (strategy == ExtractStrategy::Syntactic) {
    for (const auto& p : sys.equation_polys()) consider(substitute_known(p, sys));
  } else {
    std::vector<Polynomial> gens;
    for (const auto& p : sys.equation_polys())
      gens.push_back(substitute_known(p, sys));
    std::vector<Polynomial> basis = groebner_basis(gens, cfg);
    std::vector<Polynomial> candidates;
    for (const auto& g : basis)
      if (!g.has_primed()) candidates.push_back(g);
    std::sort(candidates.begin(), candidates.end(),
              [](const Polynomial& a, const Polynomial& b) {
                if (a.degree() != b.degree()) return a.degree() < b.degree();
                return a.term_count() < b.term_count();
              });
    for (const auto& g : candidates) consider(g);
  }
  return found;
}

std::vector<Polynomial> reduce_modulo(const TermVec& terms, const DaeSystem& sys,
                                      const std::vector<Polynomial>& algebraic,
                                      const GroebnerConfig& cfg) {
  OrderPtr ord = sys.order();
  std::vector<Polynomial> alg_basis = groebner_basis(algebraic, cfg);
  std::vector<Polynomial> out;
  for (const auto& t : terms) {
    Polynomial s = substitute_known(Polynomial::from_term(t, ord), sys);
    s = normal_form(s, alg_basis);
    if (s.is_zero()) continue;
    if (!s.has_primed()) {
      out.push_back(s);
      continue;
    }
    // Elimination: new algebraic consequences of the augmented ideal.
    std::vector<Polynomial> gens = rigid_equation_polys(sys);
    gens.push_back(s);
    std::vector<Polynomial> basis = groebner_basis(gens, cfg);
    std::vector<Polynomial> candidates;
    for (const auto& g : basis)
      if (!g.has_primed()) candidates.push_back(g);
    // Prefer the simplest new generators; higher-degree combinations are
    // usually consequences of them and get filtered out.
    std::sort(candidates.begin(), candidates.end(),
              [](const Polynomial& a, const Polynomial& b) {
                if (a.degree() != b.degree()) return a.degree() < b.degree();
                return a.term_count() < b.term_count();
              });
    std::vector<Polynomial> fresh;
    for (const auto& g : candidates) {
      std::vector<Polynomial> check = alg_basis;
      for (const auto& f : fresh) check.push_back(f);
      check = groebner_basis(check, cfg);
      if (!in_ideal(g, check)) fresh.push_back(g);
    }
    if (!fresh.empty()) {
      out.insert(out.end(), fresh.begin(), fresh.end());
      continue;
    }
    // Keep the differential form, reduced against the full system.
    std::vector<Polynomial> full = groebner_basis(rigid_equation_polys(sys), cfg);
    out.push_back(normal_form(s, full));
  }
  return out;
}

ClosureInfo closure_check(const DaeSystem& sys) {
  ClosureInfo info;
  info.state_count = sys.state_vars.size();

  struct Row {
    Term eq;
    std::size_t key;
    std::size_t index;
  };
  std::vector<Row> rows;
  for (std::size_t i = 0; i < sys.equations.size(); ++i) {
    const Term& eq = sys.equations[i];
    std::size_t key = sys.state_vars.size();
    for (std::size_t j = 0; j < sys.state_vars.size(); ++j) {
      if (free_vars(eq).count(sys.state_vars[j].prime())) {
        key = j;
        break;
      }
    }
    if (key < sys.state_vars.size()) rows.push_back({eq, key, i});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return a.key < b.key;
  });
  info.differential_count = rows.size();

  if (rows.size() != sys.state_vars.size()) {
    info.closed = false;
    info.notes.push_back("differential subsystem has " +
                         std::to_string(rows.size()) + " equations for " +
                         std::to_string(sys.state_vars.size()) + " states");
    return info;
  }

  TermVec subsystem;
  subsystem.reserve(rows.size());
  for (const auto& r : rows) subsystem.push_back(r.eq);
  info.jacobian = jacobian(subsystem, sys.state_vars, /*primed=*/true);
  info.det = determinant(info.jacobian);
  info.det_poly = normalize(info.det, sys.order());
  info.closed = !info.det_poly.is_zero();
  if (!info.closed) {
    info.notes.push_back("Jacobian determinant is identically zero");
    return info;
  }

  // Parameter conditions from the monomial content; even powers collapse.
  Monomial content = info.det_poly.monomial_content();
  for (const auto& [v, e] : content) {
    Formula cond = Formula::neq(Term::var(v), Term::constant(0));
    if (sys.is_param(v)) {
      info.parameter_condition.push_back(cond);
    } else {
      info.notes.push_back("state-dependent factor: " + v.name() +
                           " must stay nonzero");
      info.parameter_condition.push_back(cond);
    }
  }
  Polynomial rest(info.det_poly.order());
  {
    // det / content
    for (const auto& [m, c] : info.det_poly.terms())
      rest = rest + Polynomial(c, info.det_poly.order())
                        .mono_scaled(mono_div(m, content), Rational(1));
  }
  if (!rest.is_constant()) {
    info.notes.push_back("residual nonsingularity obligation: " +
                         rest.to_string() + " != 0");
    info.parameter_condition.push_back(
        Formula::neq(rest.to_term(), Term::constant(0)));
  }
  return info;
}

ReductionResult reduce(const DaeSystem& sys, const ReduceConfig& cfg) {
  ReductionResult result;
  result.original = sys;

  DaeSystem current = sys;
  std::vector<Polynomial> extracted;  // all algebraic parts found so far
  std::vector<Formula> system_formulas{current.constraint_formula()};
  result.closure = closure_check(current);

  auto run_round = [&](bool closure_stage) -> bool {
    std::vector<Polynomial> part =
        extract_algebraic_part(current, cfg.strategy, extracted, cfg.groebner);
    if (part.empty()) return false;
    ReductionRound round;
    round.closure_stage = closure_stage;
    for (const auto& p : part) {
      extracted.push_back(p);
      round.algebraic.push_back(p.to_term());
    }
    round.differentiated = differential(round.algebraic);
    std::vector<Polynomial> reduced =
        reduce_modulo(round.differentiated, current, extracted, cfg.groebner);
    TermVec new_eqs;
    for (const auto& rp : reduced) {
      round.reduced.push_back(rp.to_term());
      new_eqs.push_back(rp.to_term());
    }
    if (new_eqs.empty()) return false;
    TermVec eqs = current.equations;
    eqs.insert(eqs.end(), new_eqs.begin(), new_eqs.end());
    current = DaeSystem::build(current.name, current.state_vars, current.params,
                               std::move(eqs));
    round.augmented_system = current.equations;
    result.rounds.push_back(std::move(round));
    system_formulas.push_back(current.constraint_formula());
    result.closure = closure_check(current);
    return true;
  };

  result.status = ReductionStatus::NoNewGenerators;
  bool exhausted = false;
  for (std::size_t i = 0; i < cfg.max_rounds && !result.closure.closed; ++i) {
    if (!run_round(false)) {
      exhausted = true;
      break;
    }
    result.status = result.closure.closed ? ReductionStatus::Closed
                                          : ReductionStatus::MaxRounds;
  }
  // Closure completion: reveal derivative information for constraints found
  // in the final rounds, one attempt per state variable.
  for (std::size_t i = 0;
       i < sys.state_vars.size() && !result.closure.closed && !exhausted; ++i) {
    if (!run_round(true)) exhausted = true;
  }
  if (result.closure.closed)
    result.status = ReductionStatus::Closed;
  else if (exhausted)
    result.status = ReductionStatus::NoNewGenerators;

  result.reduced_system = current;

  std::vector<IrRound> ir_rounds;
  ir_rounds.reserve(result.rounds.size());
  for (const auto& r : result.rounds)
    ir_rounds.push_back(IrRound{r.algebraic, r.reduced});
  result.gamma = ir_gamma_formula(ir_rounds);

  if (cfg.emit_certificate) {
    VarTuple tuple = sys.program_tuple();
    Formula goal_formula = Formula::mutual_refines(
        Program::dap(tuple, system_formulas.back()),
        Program::dap(tuple, system_formulas.front()), tuple);
    Sequent root{{result.gamma}, {goal_formula}};
    result.certificate_goal = root;
    TacticResult tac = tac_ir(root, 0, tuple, system_formulas, ir_rounds);
    Sequent gamma_open{root.ante, {result.gamma}};
    Formula obligations = ir_obligations_formula(system_formulas, ir_rounds);
    Sequent obligations_open{{}, {obligations}};
    ProofNode obligations_proof =
        result.rounds.empty()
            ? ProofNode{}
            : ir_obligations_proof(system_formulas, ir_rounds);
    result.certificate =
        graft(tac.script, [&](const Sequent& open) -> std::optional<ProofNode> {
          if (open == gamma_open) {
            ProofNode id_node;
            id_node.goal = open;
            id_node.rule = "id";
            id_node.at = {0, 0};
            return id_node;
          }
          if (!result.rounds.empty() && open == obligations_open)
            return obligations_proof;
          return std::nullopt;
        });
  }
  return result;
}

}  // namespace dal
