#include "dal/syntax.hpp"

#include <algorithm>
#include <cctype>

namespace dal {

bool valid_identifier(const std::string& s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

VarTuple::VarTuple(std::vector<Variable> vars) : vars_(std::move(vars)) {
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (vars_[i].primed)
      throw Error("variable tuple entries must be unprimed: " + vars_[i].name());
    for (std::size_t j = i + 1; j < vars_.size(); ++j)
      if (vars_[i] == vars_[j])
        throw Error("duplicate variable in tuple: " + vars_[i].name());
  }
}

bool VarTuple::contains(const Variable& v) const {
  return std::find(vars_.begin(), vars_.end(), v) != vars_.end();
}

VarSet VarTuple::with_primes() const {
  VarSet out;
  for (const auto& v : vars_) {
    out.insert(v);
    out.insert(v.prime());
  }
  return out;
}

struct TermNode {
  TermKind kind;
  Rational value;
  Variable var;
  Term a, b;
};

Term Term::constant(Rational c) {
  TermNode n;
  n.kind = TermKind::Const;
  n.value = std::move(c);
  return Term(std::make_shared<const TermNode>(std::move(n)));
}

Term Term::var(Variable v) {
  if (!valid_identifier(v.base)) throw Error("invalid variable name: " + v.base);
  TermNode n;
  n.kind = TermKind::Var;
  n.var = std::move(v);
  return Term(std::make_shared<const TermNode>(std::move(n)));
}

Term Term::plus(Term a, Term b) {
  TermNode n;
  n.kind = TermKind::Plus;
  n.a = std::move(a);
  n.b = std::move(b);
  return Term(std::make_shared<const TermNode>(std::move(n)));
}

Term Term::times(Term a, Term b) {
  TermNode n;
  n.kind = TermKind::Times;
  n.a = std::move(a);
  n.b = std::move(b);
  return Term(std::make_shared<const TermNode>(std::move(n)));
}

Term Term::differential(Term e) {
  TermNode n;
  n.kind = TermKind::Differential;
  n.a = std::move(e);
  return Term(std::make_shared<const TermNode>(std::move(n)));
}

Term Term::pow(Term base, unsigned n) {
  if (n == 0) return constant(1);
  Term out = base;
  for (unsigned i = 1; i < n; ++i) out = times(out, base);
  return out;
}

Term Term::sum(const std::vector<Term>& ts) {
  if (ts.empty()) return constant(0);
  Term out = ts[0];
  for (std::size_t i = 1; i < ts.size(); ++i) out = plus(out, ts[i]);
  return out;
}

Term Term::product(const std::vector<Term>& ts) {
  if (ts.empty()) return constant(1);
  Term out = ts[0];
  for (std::size_t i = 1; i < ts.size(); ++i) out = times(out, ts[i]);
  return out;
}

TermKind Term::kind() const { return node_->kind; }
const Rational& Term::value() const { return node_->value; }
const Variable& Term::variable() const { return node_->var; }
const Term& Term::lhs() const { return node_->a; }
const Term& Term::rhs() const { return node_->b; }
const Term& Term::inner() const { return node_->a; }

struct FormulaNode {
  FormulaKind kind;
  Term t1, t2;
  Formula f1, f2;
  Variable var;
  Program p1, p2;
  VarTuple tuple;
};

Formula Formula::leq(Term a, Term b) {
  FormulaNode n;
  n.kind = FormulaKind::Leq;
  n.t1 = std::move(a);
  n.t2 = std::move(b);
  return Formula(std::make_shared<const FormulaNode>(std::move(n)));
}

Formula Formula::not_(Formula p) {
  FormulaNode n;
  n.kind = FormulaKind::Not;
  n.f1 = std::move(p);
  return Formula(std::make_shared<const FormulaNode>(std::move(n)));
}

Formula Formula::and_(Formula p, Formula q) {
  FormulaNode n;
  n.kind = FormulaKind::And;
  n.f1 = std::move(p);
  n.f2 = std::move(q);
  return Formula(std::make_shared<const FormulaNode>(std::move(n)));
}

Formula Formula::forall(Variable v, Formula p) {
  FormulaNode n;
  n.kind = FormulaKind::Forall;
  n.var = std::move(v);
  n.f1 = std::move(p);
  return Formula(std::make_shared<const FormulaNode>(std::move(n)));
}

Formula Formula::box(Program a, Formula p) {
  FormulaNode n;
  n.kind = FormulaKind::Box;
  n.p1 = std::move(a);
  n.f1 = std::move(p);
  return Formula(std::make_shared<const FormulaNode>(std::move(n)));
}

Formula Formula::refines_on(Program a, Program b, VarTuple xs) {
  FormulaNode n;
  n.kind = FormulaKind::RefinesOn;
  n.p1 = std::move(a);
  n.p2 = std::move(b);
  n.tuple = std::move(xs);
  return Formula(std::make_shared<const FormulaNode>(std::move(n)));
}

Formula Formula::eq(Term a, Term b) { return and_(leq(a, b), leq(b, a)); }
Formula Formula::lt(Term a, Term b) { return not_(leq(std::move(b), std::move(a))); }
Formula Formula::or_(Formula p, Formula q) {
  return not_(and_(not_(std::move(p)), not_(std::move(q))));
}
Formula Formula::imply(Formula p, Formula q) {
  return not_(and_(std::move(p), not_(std::move(q))));
}
Formula Formula::iff(Formula p, Formula q) {
  return and_(imply(p, q), imply(q, p));
}
Formula Formula::exists(Variable v, Formula p) {
  return not_(forall(std::move(v), not_(std::move(p))));
}
Formula Formula::mutual_refines(Program a, Program b, VarTuple xs) {
  return and_(refines_on(a, b, xs), refines_on(b, a, xs));
}

Formula Formula::conj(const std::vector<Formula>& fs) {
  if (fs.empty()) return leq(Term::constant(0), Term::constant(0));
  Formula out = fs.back();
  for (std::size_t i = fs.size() - 1; i-- > 0;) out = and_(fs[i], out);
  return out;
}

Formula Formula::vec_eq_zero(const TermVec& es) {
  std::vector<Formula> fs;
  fs.reserve(es.size());
  for (const auto& e : es) fs.push_back(eq(e, Term::constant(0)));
  return conj(fs);
}

FormulaKind Formula::kind() const { return node_->kind; }
const Term& Formula::leq_lhs() const { return node_->t1; }
const Term& Formula::leq_rhs() const { return node_->t2; }
const Formula& Formula::child() const { return node_->f1; }
const Formula& Formula::left() const { return node_->f1; }
const Formula& Formula::right() const { return node_->f2; }
const Variable& Formula::binder() const { return node_->var; }
const Formula& Formula::body() const { return node_->f1; }
const Program& Formula::program() const { return node_->p1; }
const Program& Formula::ref_lhs() const { return node_->p1; }
const Program& Formula::ref_rhs() const { return node_->p2; }
const VarTuple& Formula::ref_tuple() const { return node_->tuple; }

struct ProgramNode {
  ProgramKind kind;
  Variable var;
  Term term;
  Formula formula;
  VarTuple tuple;
  Program a, b;
};

Program Program::assign(Variable x, Term e) {
  if (x.primed) throw Error("assignment target must be unprimed: " + x.name());
  ProgramNode n;
  n.kind = ProgramKind::Assign;
  n.var = std::move(x);
  n.term = std::move(e);
  return Program(std::make_shared<const ProgramNode>(std::move(n)));
}

Program Program::test(Formula q) {
  ProgramNode n;
  n.kind = ProgramKind::Test;
  n.formula = std::move(q);
  return Program(std::make_shared<const ProgramNode>(std::move(n)));
}

Program Program::dap(VarTuple xs, Formula f) {
  ProgramNode n;
  n.kind = ProgramKind::Dap;
  n.tuple = std::move(xs);
  n.formula = std::move(f);
  return Program(std::make_shared<const ProgramNode>(std::move(n)));
}

Program Program::choice(Program a, Program b) {
  ProgramNode n;
  n.kind = ProgramKind::Choice;
  n.a = std::move(a);
  n.b = std::move(b);
  return Program(std::make_shared<const ProgramNode>(std::move(n)));
}

Program Program::seq(Program a, Program b) {
  ProgramNode n;
  n.kind = ProgramKind::Seq;
  n.a = std::move(a);
  n.b = std::move(b);
  return Program(std::make_shared<const ProgramNode>(std::move(n)));
}

Program Program::star(Program a) {
  ProgramNode n;
  n.kind = ProgramKind::Star;
  n.a = std::move(a);
  return Program(std::make_shared<const ProgramNode>(std::move(n)));
}

ProgramKind Program::kind() const { return node_->kind; }
const Variable& Program::assign_var() const { return node_->var; }
const Term& Program::assign_term() const { return node_->term; }
const Formula& Program::test_formula() const { return node_->formula; }
const VarTuple& Program::dap_tuple() const { return node_->tuple; }
const Formula& Program::dap_constraint() const { return node_->formula; }
const Program& Program::left() const { return node_->a; }
const Program& Program::right() const { return node_->b; }
const Program& Program::inner() const { return node_->a; }

// ---------------------------------------------------------------------------
// Structural comparison

namespace {
int cmp_var(const Variable& a, const Variable& b) {
  if (a.base != b.base) return a.base < b.base ? -1 : 1;
  if (a.primed != b.primed) return a.primed ? 1 : -1;
  return 0;
}

int cmp_tuple(const VarTuple& a, const VarTuple& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (int c = cmp_var(a[i], b[i])) return c;
  return 0;
}
}  // namespace

int compare(const Term& a, const Term& b) {
  if (a.kind() != b.kind())
    return static_cast<int>(a.kind()) < static_cast<int>(b.kind()) ? -1 : 1;
  switch (a.kind()) {
    case TermKind::Const:
      if (a.value() == b.value()) return 0;
      return a.value() < b.value() ? -1 : 1;
    case TermKind::Var:
      return cmp_var(a.variable(), b.variable());
    case TermKind::Plus:
    case TermKind::Times:
      if (int c = compare(a.lhs(), b.lhs())) return c;
      return compare(a.rhs(), b.rhs());
    case TermKind::Differential:
      return compare(a.inner(), b.inner());
  }
  return 0;
}

int compare(const Formula& a, const Formula& b) {
  if (a.kind() != b.kind())
    return static_cast<int>(a.kind()) < static_cast<int>(b.kind()) ? -1 : 1;
  switch (a.kind()) {
    case FormulaKind::Leq:
      if (int c = compare(a.leq_lhs(), b.leq_lhs())) return c;
      return compare(a.leq_rhs(), b.leq_rhs());
    case FormulaKind::Not:
      return compare(a.child(), b.child());
    case FormulaKind::And:
      if (int c = compare(a.left(), b.left())) return c;
      return compare(a.right(), b.right());
    case FormulaKind::Forall:
      if (int c = cmp_var(a.binder(), b.binder())) return c;
      return compare(a.body(), b.body());
    case FormulaKind::Box:
      if (int c = compare(a.program(), b.program())) return c;
      return compare(a.body(), b.body());
    case FormulaKind::RefinesOn:
      if (int c = compare(a.ref_lhs(), b.ref_lhs())) return c;
      if (int c = compare(a.ref_rhs(), b.ref_rhs())) return c;
      return cmp_tuple(a.ref_tuple(), b.ref_tuple());
  }
  return 0;
}

int compare(const Program& a, const Program& b) {
  if (a.kind() != b.kind())
    return static_cast<int>(a.kind()) < static_cast<int>(b.kind()) ? -1 : 1;
  switch (a.kind()) {
    case ProgramKind::Assign:
      if (int c = cmp_var(a.assign_var(), b.assign_var())) return c;
      return compare(a.assign_term(), b.assign_term());
    case ProgramKind::Test:
      return compare(a.test_formula(), b.test_formula());
    case ProgramKind::Dap:
      if (int c = cmp_tuple(a.dap_tuple(), b.dap_tuple())) return c;
      return compare(a.dap_constraint(), b.dap_constraint());
    case ProgramKind::Choice:
    case ProgramKind::Seq:
      if (int c = compare(a.left(), b.left())) return c;
      return compare(a.right(), b.right());
    case ProgramKind::Star:
      return compare(a.inner(), b.inner());
  }
  return 0;
}

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  return compare(a, b) == 0;
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  return compare(a, b) == 0;
}

bool operator==(const Program& a, const Program& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  return compare(a, b) == 0;
}

// ---------------------------------------------------------------------------
// Variable analyses

VarSet primed_copies(const VarSet& vs) {
  VarSet out;
  for (const auto& v : vs) out.insert(v.primed ? v : v.prime());
  return out;
}

VarSet free_vars(const Term& t) {
  switch (t.kind()) {
    case TermKind::Const:
      return {};
    case TermKind::Var:
      return {t.variable()};
    case TermKind::Plus:
    case TermKind::Times: {
      VarSet out = free_vars(t.lhs());
      VarSet r = free_vars(t.rhs());
      out.insert(r.begin(), r.end());
      return out;
    }
    case TermKind::Differential: {
      VarSet inner = free_vars(t.inner());
      VarSet primes = primed_copies(inner);
      inner.insert(primes.begin(), primes.end());
      return inner;
    }
  }
  return {};
}

VarSet free_vars(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::Leq: {
      VarSet out = free_vars(f.leq_lhs());
      VarSet r = free_vars(f.leq_rhs());
      out.insert(r.begin(), r.end());
      return out;
    }
    case FormulaKind::Not:
      return free_vars(f.child());
    case FormulaKind::And: {
      VarSet out = free_vars(f.left());
      VarSet r = free_vars(f.right());
      out.insert(r.begin(), r.end());
      return out;
    }
    case FormulaKind::Forall: {
      VarSet out = free_vars(f.body());
      out.erase(f.binder());
      return out;
    }
    case FormulaKind::Box: {
      VarSet out = free_vars(f.program());
      VarSet r = free_vars(f.body());
      out.insert(r.begin(), r.end());
      return out;
    }
    case FormulaKind::RefinesOn: {
      VarSet out = free_vars(f.ref_lhs());
      VarSet r = free_vars(f.ref_rhs());
      out.insert(r.begin(), r.end());
      VarSet tup = f.ref_tuple().with_primes();
      out.insert(tup.begin(), tup.end());
      return out;
    }
  }
  return {};
}

VarSet free_vars(const Program& p) {
  switch (p.kind()) {
    case ProgramKind::Assign: {
      VarSet out = free_vars(p.assign_term());
      out.insert(p.assign_var());
      return out;
    }
    case ProgramKind::Test:
      return free_vars(p.test_formula());
    case ProgramKind::Dap: {
      VarSet out = free_vars(p.dap_constraint());
      VarSet tup = p.dap_tuple().with_primes();
      out.insert(tup.begin(), tup.end());
      return out;
    }
    case ProgramKind::Choice:
    case ProgramKind::Seq: {
      VarSet out = free_vars(p.left());
      VarSet r = free_vars(p.right());
      out.insert(r.begin(), r.end());
      return out;
    }
    case ProgramKind::Star:
      return free_vars(p.inner());
  }
  return {};
}

VarSet bound_vars(const Program& p) {
  switch (p.kind()) {
    case ProgramKind::Assign:
      return {p.assign_var()};
    case ProgramKind::Test:
      return {};
    case ProgramKind::Dap:
      return p.dap_tuple().with_primes();
    case ProgramKind::Choice:
    case ProgramKind::Seq: {
      VarSet out = bound_vars(p.left());
      VarSet r = bound_vars(p.right());
      out.insert(r.begin(), r.end());
      return out;
    }
    case ProgramKind::Star:
      return bound_vars(p.inner());
  }
  return {};
}

bool contains_differential(const Term& t) {
  switch (t.kind()) {
    case TermKind::Const:
    case TermKind::Var:
      return false;
    case TermKind::Plus:
    case TermKind::Times:
      return contains_differential(t.lhs()) || contains_differential(t.rhs());
    case TermKind::Differential:
      return true;
  }
  return false;
}

bool contains_primed(const Term& t) {
  switch (t.kind()) {
    case TermKind::Const:
      return false;
    case TermKind::Var:
      return t.variable().primed;
    case TermKind::Plus:
    case TermKind::Times:
      return contains_primed(t.lhs()) || contains_primed(t.rhs());
    case TermKind::Differential:
      return contains_primed(t.inner());
  }
  return false;
}

VarSet collect_variables(const Term& t) {
  switch (t.kind()) {
    case TermKind::Const:
      return {};
    case TermKind::Var:
      return {t.variable()};
    case TermKind::Plus:
    case TermKind::Times: {
      VarSet out = collect_variables(t.lhs());
      VarSet r = collect_variables(t.rhs());
      out.insert(r.begin(), r.end());
      return out;
    }
    case TermKind::Differential:
      return collect_variables(t.inner());
  }
  return {};
}

// ---------------------------------------------------------------------------
// Substitution

namespace {
bool occurs(const Term& t, const Variable& x) {
  return free_vars(t).count(x) > 0;
}
}  // namespace

Term substitute(const Term& e, const Variable& x, const Term& g) {
  if (g.kind() == TermKind::Var && g.variable() == x) return e;
  switch (e.kind()) {
    case TermKind::Const:
      return e;
    case TermKind::Var:
      return e.variable() == x ? g : e;
    case TermKind::Plus:
      return Term::plus(substitute(e.lhs(), x, g), substitute(e.rhs(), x, g));
    case TermKind::Times:
      return Term::times(substitute(e.lhs(), x, g), substitute(e.rhs(), x, g));
    case TermKind::Differential:
      if (occurs(e.inner(), x))
        throw DifferentialCapture("substitution of " + x.name() +
                                  " under a differential");
      return e;
  }
  return e;
}

Program substitute(const Program& p, const Variable& x, const Term& g) {
  if (g.kind() == TermKind::Var && g.variable() == x) return p;
  switch (p.kind()) {
    case ProgramKind::Assign: {
      if (p.assign_var() == x)
        throw DifferentialCapture("substitution of assigned variable " + x.name());
      VarSet gv = free_vars(g);
      if (gv.count(p.assign_var()))
        throw DifferentialCapture("substitution captures assigned variable " +
                                  p.assign_var().name());
      return Program::assign(p.assign_var(), substitute(p.assign_term(), x, g));
    }
    case ProgramKind::Test:
      return Program::test(substitute(p.test_formula(), x, g));
    case ProgramKind::Dap: {
      VarSet bound = p.dap_tuple().with_primes();
      if (bound.count(x))
        throw DifferentialCapture("substitution of program-bound variable " +
                                  x.name());
      VarSet gv = free_vars(g);
      for (const auto& v : gv)
        if (bound.count(v))
          throw DifferentialCapture("substitution captures program variable " +
                                    v.name());
      return Program::dap(p.dap_tuple(), substitute(p.dap_constraint(), x, g));
    }
    case ProgramKind::Choice:
      return Program::choice(substitute(p.left(), x, g), substitute(p.right(), x, g));
    case ProgramKind::Seq:
      return Program::seq(substitute(p.left(), x, g), substitute(p.right(), x, g));
    case ProgramKind::Star:
      return Program::star(substitute(p.inner(), x, g));
  }
  return p;
}

Formula substitute(const Formula& f, const Variable& x, const Term& g) {
  if (g.kind() == TermKind::Var && g.variable() == x) return f;
  switch (f.kind()) {
    case FormulaKind::Leq:
      return Formula::leq(substitute(f.leq_lhs(), x, g), substitute(f.leq_rhs(), x, g));
    case FormulaKind::Not:
      return Formula::not_(substitute(f.child(), x, g));
    case FormulaKind::And:
      return Formula::and_(substitute(f.left(), x, g), substitute(f.right(), x, g));
    case FormulaKind::Forall: {
      if (f.binder() == x) return f;
      if (free_vars(g).count(f.binder()))
        throw DifferentialCapture("substitution captures bound variable " +
                                  f.binder().name());
      return Formula::forall(f.binder(), substitute(f.body(), x, g));
    }
    case FormulaKind::Box:
      return Formula::box(substitute(f.program(), x, g), substitute(f.body(), x, g));
    case FormulaKind::RefinesOn: {
      VarSet bound = f.ref_tuple().with_primes();
      if (bound.count(x))
        throw DifferentialCapture("substitution of refinement-tuple variable " +
                                  x.name());
      return Formula::refines_on(substitute(f.ref_lhs(), x, g),
                                 substitute(f.ref_rhs(), x, g), f.ref_tuple());
    }
  }
  return f;
}

// ---------------------------------------------------------------------------
// AC normalization of conjunctions

namespace {
void gather_conjuncts(const Formula& f, std::vector<Formula>& out) {
  if (f.kind() == FormulaKind::And) {
    gather_conjuncts(f.left(), out);
    gather_conjuncts(f.right(), out);
  } else {
    out.push_back(f);
  }
}

Program ac_normal(const Program& p);

Formula ac_normal_impl(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::Leq:
      return f;
    case FormulaKind::Not:
      return Formula::not_(ac_normal_impl(f.child()));
    case FormulaKind::And: {
      std::vector<Formula> parts;
      gather_conjuncts(f, parts);
      for (auto& part : parts) part = ac_normal_impl(part);
      std::sort(parts.begin(), parts.end(),
                [](const Formula& a, const Formula& b) { return compare(a, b) < 0; });
      Formula out = parts.back();
      for (std::size_t i = parts.size() - 1; i-- > 0;)
        out = Formula::and_(parts[i], out);
      return out;
    }
    case FormulaKind::Forall:
      return Formula::forall(f.binder(), ac_normal_impl(f.body()));
    case FormulaKind::Box:
      return Formula::box(ac_normal(f.program()), ac_normal_impl(f.body()));
    case FormulaKind::RefinesOn:
      return Formula::refines_on(ac_normal(f.ref_lhs()), ac_normal(f.ref_rhs()),
                                 f.ref_tuple());
  }
  return f;
}

Program ac_normal(const Program& p) {
  switch (p.kind()) {
    case ProgramKind::Assign:
      return p;
    case ProgramKind::Test:
      return Program::test(ac_normal_impl(p.test_formula()));
    case ProgramKind::Dap:
      return Program::dap(p.dap_tuple(), ac_normal_impl(p.dap_constraint()));
    case ProgramKind::Choice:
      return Program::choice(ac_normal(p.left()), ac_normal(p.right()));
    case ProgramKind::Seq:
      return Program::seq(ac_normal(p.left()), ac_normal(p.right()));
    case ProgramKind::Star:
      return Program::star(ac_normal(p.inner()));
  }
  return p;
}
}  // namespace

Formula ac_normal(const Formula& f) { return ac_normal_impl(f); }

}  // namespace dal
