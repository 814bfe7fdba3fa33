#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "dal/errors.hpp"
#include "dal/rational.hpp"

namespace dal {

// A program/logic variable. Every base variable x has an associated
// differential variable x'; double priming is unrepresentable.
struct Variable {
  std::string base;
  bool primed = false;

  Variable() = default;
  Variable(std::string b, bool p = false) : base(std::move(b)), primed(p) {}

  Variable prime() const { return Variable(base, true); }
  Variable unprime() const { return Variable(base, false); }

  std::string name() const { return primed ? base + "'" : base; }

  friend bool operator==(const Variable& a, const Variable& b) {
    return a.primed == b.primed && a.base == b.base;
  }
  friend bool operator!=(const Variable& a, const Variable& b) {
    return !(a == b);
  }
  friend bool operator<(const Variable& a, const Variable& b) {
    if (a.base != b.base) return a.base < b.base;
    return a.primed < b.primed;
  }
};

using VarSet = std::set<Variable>;

bool valid_identifier(const std::string& s);

// Ordered, duplicate-free tuple of unprimed variables. Order is significant:
// it fixes refinement subscripts and Jacobian column order.
class VarTuple {
 public:
  VarTuple() = default;
  explicit VarTuple(std::vector<Variable> vars);

  const std::vector<Variable>& vars() const { return vars_; }
  std::size_t size() const { return vars_.size(); }
  bool empty() const { return vars_.empty(); }
  const Variable& operator[](std::size_t i) const { return vars_[i]; }
  bool contains(const Variable& v) const;

  // The tuple's variables together with their primed copies.
  VarSet with_primes() const;

  friend bool operator==(const VarTuple& a, const VarTuple& b) {
    return a.vars_ == b.vars_;
  }
  friend bool operator!=(const VarTuple& a, const VarTuple& b) {
    return !(a == b);
  }

  auto begin() const { return vars_.begin(); }
  auto end() const { return vars_.end(); }

 private:
  std::vector<Variable> vars_;
};

class Term;
class Formula;
class Program;

enum class TermKind { Const, Var, Plus, Times, Differential };

struct TermNode;

class Term {
 public:
  Term() = default;

  static Term constant(Rational c);
  static Term constant(long long c) { return constant(Rational(c)); }
  static Term var(Variable v);
  static Term var(const std::string& name, bool primed = false) {
    return var(Variable(name, primed));
  }
  static Term plus(Term a, Term b);
  static Term times(Term a, Term b);
  static Term differential(Term e);

  // Sugar used throughout construction code; all reduce to the core grammar.
  static Term neg(Term e) { return times(constant(-1), std::move(e)); }
  static Term minus(Term a, Term b) { return plus(std::move(a), neg(std::move(b))); }
  static Term pow(Term base, unsigned n);
  static Term sum(const std::vector<Term>& ts);    // empty -> 0
  static Term product(const std::vector<Term>& ts);  // empty -> 1

  bool valid() const { return node_ != nullptr; }
  TermKind kind() const;
  const Rational& value() const;     // Const
  const Variable& variable() const;  // Var
  const Term& lhs() const;           // Plus / Times
  const Term& rhs() const;           // Plus / Times
  const Term& inner() const;         // Differential

  friend bool operator==(const Term& a, const Term& b);
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }

 private:
  explicit Term(std::shared_ptr<const TermNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const TermNode> node_;
};

using TermVec = std::vector<Term>;

enum class FormulaKind { Leq, Not, And, Forall, Box, RefinesOn };

struct FormulaNode;

class Formula {
 public:
  Formula() = default;

  static Formula leq(Term a, Term b);
  static Formula not_(Formula p);
  static Formula and_(Formula p, Formula q);
  static Formula forall(Variable v, Formula p);
  static Formula box(Program a, Formula p);
  static Formula refines_on(Program a, Program b, VarTuple xs);

  // Desugared connectives (same forms the parser produces).
  static Formula eq(Term a, Term b);           // a<=b & b<=a
  static Formula lt(Term a, Term b);           // !(b<=a)
  static Formula geq(Term a, Term b) { return leq(std::move(b), std::move(a)); }
  static Formula gt(Term a, Term b) { return lt(std::move(b), std::move(a)); }
  static Formula neq(Term a, Term b) { return not_(eq(std::move(a), std::move(b))); }
  static Formula or_(Formula p, Formula q);    // !(!p & !q)
  static Formula imply(Formula p, Formula q);  // !(p & !q)
  static Formula iff(Formula p, Formula q);
  static Formula exists(Variable v, Formula p);  // !forall v. !p
  static Formula mutual_refines(Program a, Program b, VarTuple xs);
  static Formula conj(const std::vector<Formula>& fs);  // empty -> 0<=0
  static Formula vec_eq_zero(const TermVec& es);

  bool valid() const { return node_ != nullptr; }
  FormulaKind kind() const;
  const Term& leq_lhs() const;
  const Term& leq_rhs() const;
  const Formula& child() const;    // Not
  const Formula& left() const;     // And
  const Formula& right() const;    // And
  const Variable& binder() const;  // Forall
  const Formula& body() const;     // Forall / Box
  const Program& program() const;  // Box
  const Program& ref_lhs() const;  // RefinesOn
  const Program& ref_rhs() const;  // RefinesOn
  const VarTuple& ref_tuple() const;

  friend bool operator==(const Formula& a, const Formula& b);
  friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }

 private:
  explicit Formula(std::shared_ptr<const FormulaNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const FormulaNode> node_;
};

enum class ProgramKind { Assign, Test, Dap, Choice, Seq, Star };

struct ProgramNode;

class Program {
 public:
  Program() = default;

  static Program assign(Variable x, Term e);
  static Program test(Formula q);
  static Program dap(VarTuple xs, Formula f);
  static Program choice(Program a, Program b);
  static Program seq(Program a, Program b);
  static Program star(Program a);

  bool valid() const { return node_ != nullptr; }
  ProgramKind kind() const;
  const Variable& assign_var() const;
  const Term& assign_term() const;
  const Formula& test_formula() const;
  const VarTuple& dap_tuple() const;
  const Formula& dap_constraint() const;
  const Program& left() const;   // Choice / Seq
  const Program& right() const;  // Choice / Seq
  const Program& inner() const;  // Star

  friend bool operator==(const Program& a, const Program& b);
  friend bool operator!=(const Program& a, const Program& b) { return !(a == b); }

 private:
  explicit Program(std::shared_ptr<const ProgramNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const ProgramNode> node_;
};

struct Sequent {
  std::vector<Formula> ante;
  std::vector<Formula> succ;

  friend bool operator==(const Sequent& a, const Sequent& b) {
    return a.ante == b.ante && a.succ == b.succ;
  }
  friend bool operator!=(const Sequent& a, const Sequent& b) { return !(a == b); }
};

// Total structural orders, used for canonical sorting (AC normalization,
// deterministic iteration). Constants compare by value.
int compare(const Term& a, const Term& b);
int compare(const Formula& a, const Formula& b);
int compare(const Program& a, const Program& b);

// Free variables. Differential(e) contributes FV(e) plus the primed copies
// of FV(e); primed variables are their own primed copy. Forall binds exactly
// its variable. Boxes and refinements do not bind: their FV is the union of
// the parts plus, for refinements, the tuple and its primes.
VarSet free_vars(const Term& t);
VarSet free_vars(const Formula& f);
VarSet free_vars(const Program& p);

// Bound variables of programs: Assign(x,e) -> {x}; Test -> {}; Dap(xs,F) ->
// xs and their primes; combinators take unions.
VarSet bound_vars(const Program& p);

VarSet primed_copies(const VarSet& vs);
bool contains_differential(const Term& t);
bool contains_primed(const Term& t);
VarSet collect_variables(const Term& t);

// Replaces x by g in e. Strict: if x occurs anywhere under a Differential
// node the substitution is rejected, since the calculus has no
// substitution-under-differential rule.
Term substitute(const Term& e, const Variable& x, const Term& g);

// Capture-checked substitution through formulas and programs. Rejects when
// x is bound by a quantifier or program in whose scope it occurs, or when a
// binder would capture a free variable of g.
Formula substitute(const Formula& f, const Variable& x, const Term& g);
Program substitute(const Program& p, const Variable& x, const Term& g);

// Associativity/commutativity normal form of conjunctions, applied
// recursively through formulas and program constraints. Two formulas with
// equal ac_normal forms are equivalent by reordering of conjuncts alone.
Formula ac_normal(const Formula& f);

}  // namespace dal
