#include "dal/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dal/calculus.hpp"
#include "dal/errors.hpp"
#include "dal/printer.hpp"
#include "dal/rng.hpp"

namespace dal {

namespace {

// Rewrites differential subterms via the term axioms so queries are
// polynomial. Fails on nested differentials or primed arguments.
Term expand_differentials(const Term& t) {
  switch (t.kind()) {
    case TermKind::Const:
    case TermKind::Var:
      return t;
    case TermKind::Plus:
      return Term::plus(expand_differentials(t.lhs()), expand_differentials(t.rhs()));
    case TermKind::Times:
      return Term::times(expand_differentials(t.lhs()), expand_differentials(t.rhs()));
    case TermKind::Differential:
      return differential(t.inner());
  }
  return t;
}

bool match_eq_pair(const Formula& f, Term& a, Term& b) {
  if (f.kind() != FormulaKind::And) return false;
  const Formula& l = f.left();
  const Formula& r = f.right();
  if (l.kind() != FormulaKind::Leq || r.kind() != FormulaKind::Leq) return false;
  if (l.leq_lhs() == r.leq_rhs() && l.leq_rhs() == r.leq_lhs()) {
    a = l.leq_lhs();
    b = l.leq_rhs();
    return true;
  }
  return false;
}

// Collects the conjunctive atoms of a formula; returns false when some part
// is not a polynomial (in)equality.
bool atoms_of(const Formula& f, const OrderPtr& order, std::vector<Atom>& out) {
  Term a, b;
  if (match_eq_pair(f, a, b)) {
    out.push_back({normalize(Term::minus(expand_differentials(a),
                                         expand_differentials(b)),
                             order),
                   Rel::Eq});
    return true;
  }
  switch (f.kind()) {
    case FormulaKind::And:
      return atoms_of(f.left(), order, out) && atoms_of(f.right(), order, out);
    case FormulaKind::Leq:
      out.push_back({normalize(Term::minus(expand_differentials(f.leq_lhs()),
                                           expand_differentials(f.leq_rhs())),
                               order),
                     Rel::Le});
      return true;
    case FormulaKind::Not: {
      const Formula& c = f.child();
      if (c.kind() == FormulaKind::Leq) {
        out.push_back({normalize(Term::minus(expand_differentials(c.leq_rhs()),
                                             expand_differentials(c.leq_lhs())),
                                 order),
                       Rel::Lt});
        return true;
      }
      if (match_eq_pair(c, a, b)) {
        out.push_back({normalize(Term::minus(expand_differentials(a),
                                             expand_differentials(b)),
                                 order),
                       Rel::Ne});
        return true;
      }
      return false;
    }
    default:
      return false;
  }
}

bool atom_holds(const Atom& at, const NumericState& s, double eq_tol) {
  double v = at.poly.evaluate(s);
  switch (at.rel) {
    case Rel::Eq:
      return std::abs(v) <= eq_tol;
    case Rel::Le:
      return v <= eq_tol;
    case Rel::Lt:
      return v < -eq_tol / 2;
    case Rel::Ne:
      return std::abs(v) > eq_tol;
  }
  return false;
}

// Robustly false: violated by a clear margin.
bool atom_robustly_false(const Atom& at, const NumericState& s, double margin) {
  double v = at.poly.evaluate(s);
  switch (at.rel) {
    case Rel::Eq:
      return std::abs(v) > margin;
    case Rel::Le:
      return v > margin;
    case Rel::Lt:
      return v > margin;
    case Rel::Ne:
      return false;  // cannot robustly hit a variety by sampling
  }
  return false;
}

// Gauss-Newton least-squares step: solve (J J^T) y = -r, delta = J^T y.
bool least_squares_step(const std::vector<std::vector<double>>& jac,
                        const std::vector<double>& residual,
                        std::vector<double>& delta) {
  std::size_t m = jac.size();
  std::size_t n = m ? jac[0].size() : 0;
  std::vector<std::vector<double>> a(m, std::vector<double>(m + 1, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double dot = 0;
      for (std::size_t k = 0; k < n; ++k) dot += jac[i][k] * jac[j][k];
      a[i][j] = dot;
    }
    a[i][m] = -residual[i];
  }
  // Gaussian elimination with partial pivoting.
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < m; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-12) return false;
    std::swap(a[piv], a[col]);
    for (std::size_t r = 0; r < m; ++r) {
      if (r == col) continue;
      double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= m; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::vector<double> y(m);
  for (std::size_t i = 0; i < m; ++i) y[i] = a[i][m] / a[i][i];
  delta.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < m; ++i) delta[k] += jac[i][k] * y[i];
  return true;
}

}  // namespace

ArithQuery query_from_sequent(const Sequent& s, const OrderPtr& order) {
  ArithQuery q;
  q.key = print(s);
  for (const auto& f : s.ante) {
    std::vector<Atom> atoms;
    if (atoms_of(f, order, atoms))
      q.hyps.insert(q.hyps.end(), atoms.begin(), atoms.end());
    else
      q.unsupported_hyp = true;
  }
  for (const auto& f : s.succ) {
    std::vector<Atom> atoms;
    if (atoms_of(f, order, atoms))
      q.goals.push_back(std::move(atoms));
    else
      q.unsupported_goal = true;
  }
  return q;
}

Verdict Oracle::discharge(const ArithQuery& q) {
  auto it = cache_.find(q.key);
  if (it != cache_.end()) return it->second;

  Verdict v = equational(q);
  if (v.status != VerdictStatus::Valid) {
    if (auto f = falsify(q)) {
      v = *f;
    } else if (auto fx = cfg_.external_fixtures.find(q.key);
               fx != cfg_.external_fixtures.end()) {
      v = {VerdictStatus::Valid, "external:" + fx->second, std::nullopt,
           "recorded external verdict"};
    } else {
      v = Verdict::unknown("outside the equational fragment");
    }
  }
  cache_.emplace(q.key, v);
  return v;
}

Verdict Oracle::discharge_sequent(const Sequent& s) {
  static const OrderPtr order = MonomialOrder::lex();
  try {
    return discharge(query_from_sequent(s, order));
  } catch (const Error& e) {
    return Verdict::unknown(std::string("query conversion failed: ") + e.what());
  }
}

Verdict Oracle::equational(const ArithQuery& q) const {
  std::vector<Polynomial> gens;
  for (const auto& h : q.hyps)
    if (h.rel == Rel::Eq && !h.poly.is_zero()) gens.push_back(h.poly);
  // A pair of opposite nonstrict inequalities pins an equality.
  for (std::size_t i = 0; i < q.hyps.size(); ++i) {
    if (q.hyps[i].rel != Rel::Le) continue;
    for (std::size_t j = i + 1; j < q.hyps.size(); ++j) {
      if (q.hyps[j].rel != Rel::Le) continue;
      if ((q.hyps[i].poly + q.hyps[j].poly).is_zero() &&
          !q.hyps[i].poly.is_zero())
        gens.push_back(q.hyps[i].poly);
    }
  }
  std::vector<Polynomial> basis;
  try {
    basis = groebner_basis(gens, cfg_.groebner);
  } catch (const ResourceLimit& e) {
    return Verdict::unknown(e.what());
  }
  // Inconsistent equality hypotheses prove anything.
  bool inconsistent = false;
  for (const auto& g : basis)
    if (g.is_constant() && !g.is_zero()) inconsistent = true;
  if (inconsistent)
    return Verdict::valid_ideal("equality hypotheses are inconsistent");

  for (const auto& goal : q.goals) {
    if (goal.empty()) continue;
    bool all = true;
    for (const auto& at : goal) {
      Polynomial r = normal_form(at.poly, basis);
      bool ok = false;
      if (at.rel == Rel::Eq) {
        ok = r.is_zero();
      } else if (r.is_constant()) {
        const Rational c = r.constant_value();
        switch (at.rel) {
          case Rel::Le: ok = c <= Rational(0); break;
          case Rel::Lt: ok = c < Rational(0); break;
          case Rel::Ne: ok = !c.is_zero(); break;
          case Rel::Eq: break;
        }
      }
      if (!ok) {
        all = false;
        break;
      }
    }
    if (all) return Verdict::valid_ideal();
  }
  return Verdict::unknown("goal does not reduce to zero modulo the hypothesis ideal");
}

std::optional<Verdict> Oracle::falsify(const ArithQuery& q) const {
  if (q.unsupported_hyp || q.unsupported_goal) return std::nullopt;

  VarSet vars;
  for (const auto& h : q.hyps)
    for (const auto& v : h.poly.variables()) vars.insert(v);
  for (const auto& g : q.goals)
    for (const auto& at : g)
      for (const auto& v : at.poly.variables()) vars.insert(v);
  std::vector<Variable> varv(vars.begin(), vars.end());

  std::vector<Polynomial> eqs;
  for (const auto& h : q.hyps)
    if (h.rel == Rel::Eq) eqs.push_back(h.poly);

  Rng rng(cfg_.seed);
  const double margin = 1e-4;
  for (std::size_t trial = 0; trial < cfg_.samples; ++trial) {
    NumericState s;
    for (const auto& v : varv) s[v] = rng.uniform(-2.0, 2.0);
    // Newton projection onto the equality hypotheses.
    bool projected = eqs.empty();
    for (int iter = 0; iter < cfg_.newton_max_iters && !projected; ++iter) {
      std::vector<double> residual(eqs.size());
      double norm = 0;
      for (std::size_t i = 0; i < eqs.size(); ++i) {
        residual[i] = eqs[i].evaluate(s);
        norm = std::max(norm, std::abs(residual[i]));
      }
      if (norm <= cfg_.newton_tol) {
        projected = true;
        break;
      }
      std::vector<std::vector<double>> jac(eqs.size(),
                                           std::vector<double>(varv.size()));
      for (std::size_t i = 0; i < eqs.size(); ++i)
        for (std::size_t k = 0; k < varv.size(); ++k)
          jac[i][k] = eqs[i].partial(varv[k]).evaluate(s);
      std::vector<double> delta;
      if (!least_squares_step(jac, residual, delta)) break;
      for (std::size_t k = 0; k < varv.size(); ++k) s[varv[k]] += delta[k];
    }
    if (!projected && !eqs.empty()) {
      std::vector<double> residual(eqs.size());
      double norm = 0;
      for (std::size_t i = 0; i < eqs.size(); ++i)
        norm = std::max(norm, std::abs(eqs[i].evaluate(s)));
      if (norm > cfg_.newton_tol) continue;
    }
    // All hypotheses must hold at the sample.
    bool hyps_ok = true;
    for (const auto& h : q.hyps)
      if (!atom_holds(h, s, 1e-8)) {
        hyps_ok = false;
        break;
      }
    if (!hyps_ok) continue;
    // Every goal disjunct must fail robustly.
    bool all_goals_false = true;
    for (const auto& g : q.goals) {
      bool goal_false = false;
      for (const auto& at : g)
        if (atom_robustly_false(at, s, margin)) {
          goal_false = true;
          break;
        }
      if (!goal_false) {
        all_goals_false = false;
        break;
      }
    }
    if (!all_goals_false) continue;
    Verdict v;
    v.status = VerdictStatus::Falsified;
    v.method = "sampling";
    v.counterexample = s;
    v.detail = "counterexample found after " + std::to_string(trial + 1) +
               " samples";
    return v;
  }
  return std::nullopt;
}

namespace {

void smt_rational(std::ostream& os, const Rational& r) {
  bool neg = r.is_negative();
  Rational a = r.abs();
  std::ostringstream inner;
  if (a.is_integer())
    inner << a.num().str();
  else
    inner << "(/ " << a.num().str() << " " << a.den().str() << ")";
  if (neg)
    os << "(- " << inner.str() << ")";
  else
    os << inner.str();
}

std::string smt_var(const Variable& v) {
  return (v.primed ? "vp_" : "v_") + v.base;
}

void smt_poly(std::ostream& os, const Polynomial& p) {
  if (p.is_zero()) {
    os << "0";
    return;
  }
  const auto& ts = p.terms();
  if (ts.size() > 1) os << "(+ ";
  bool first_term = true;
  for (const auto& [m, c] : ts) {
    if (!first_term) os << " ";
    first_term = false;
    std::size_t factors = 0;
    for (const auto& [v, e] : m) factors += e;
    bool with_coeff = !(c.is_one() && factors > 0);
    std::size_t count = factors + (with_coeff ? 1 : 0);
    if (count > 1) os << "(* ";
    bool first = true;
    if (with_coeff) {
      smt_rational(os, c);
      first = false;
    }
    for (const auto& [v, e] : m)
      for (unsigned k = 0; k < e; ++k) {
        if (!first) os << " ";
        os << smt_var(v);
        first = false;
      }
    if (count > 1) os << ")";
  }
  if (ts.size() > 1) os << ")";
}

void smt_atom(std::ostream& os, const Atom& at) {
  switch (at.rel) {
    case Rel::Eq: os << "(= "; break;
    case Rel::Le: os << "(<= "; break;
    case Rel::Lt: os << "(< "; break;
    case Rel::Ne: os << "(not (= "; break;
  }
  smt_poly(os, at.poly);
  os << " 0)";
  if (at.rel == Rel::Ne) os << ")";
}

}  // namespace

std::string export_smt(const ArithQuery& q) {
  std::ostringstream os;
  bool trivial = q.hyps.empty() && q.goals.empty();
  if (trivial) {
    os << "(check-sat)\n";
    return os.str();
  }
  os << "(set-logic NRA)\n";
  VarSet vars;
  for (const auto& h : q.hyps)
    for (const auto& v : h.poly.variables()) vars.insert(v);
  for (const auto& g : q.goals)
    for (const auto& at : g)
      for (const auto& v : at.poly.variables()) vars.insert(v);
  for (const auto& v : vars)
    os << "(declare-const " << smt_var(v) << " Real)\n";
  for (const auto& h : q.hyps) {
    os << "(assert ";
    smt_atom(os, h);
    os << ")\n";
  }
  // Negate the goal disjunction; unsat of the script means validity.
  os << "(assert (not ";
  if (q.goals.empty()) {
    os << "false";
  } else {
    if (q.goals.size() > 1) os << "(or ";
    for (std::size_t i = 0; i < q.goals.size(); ++i) {
      if (i) os << " ";
      const auto& g = q.goals[i];
      if (g.size() > 1) os << "(and ";
      for (std::size_t j = 0; j < g.size(); ++j) {
        if (j) os << " ";
        smt_atom(os, g[j]);
      }
      if (g.size() > 1) os << ")";
    }
    if (q.goals.size() > 1) os << ")";
  }
  os << "))\n(check-sat)\n";
  return os.str();
}

}  // namespace dal
