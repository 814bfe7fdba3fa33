#include "dal/printer.hpp"

#include <functional>
#include <sstream>

namespace dal {

namespace {

// Term precedence: + (1), * (2), unary - (3), atoms (4).
// Formula precedence: quantifiers (0), <-> (1) unused, -> (1), | (2), & (3),
// ! and [..] (4), comparisons/refinements (5).
// Program precedence: ++ (1), ; (2), postfix * and atoms (3).

bool is_const(const Term& t, long long v) {
  return t.kind() == TermKind::Const && t.value() == Rational(v);
}

void print_term(std::ostream& os, const Term& t, int min_prec);

void paren_if(std::ostream& os, bool cond, const std::function<void()>& body) {
  if (cond) os << "(";
  body();
  if (cond) os << ")";
}

void print_term(std::ostream& os, const Term& t, int min_prec) {
  switch (t.kind()) {
    case TermKind::Const: {
      bool neg = t.value().is_negative();
      paren_if(os, neg && min_prec > 3,
               [&] { os << t.value().to_string(); });
      return;
    }
    case TermKind::Var:
      os << t.variable().name();
      return;
    case TermKind::Differential:
      os << "(";
      print_term(os, t.inner(), 0);
      os << ")'";
      return;
    case TermKind::Plus: {
      paren_if(os, min_prec > 1, [&] {
        print_term(os, t.lhs(), 1);
        const Term& r = t.rhs();
        // a + (-1)*g prints as a - g.
        if (r.kind() == TermKind::Times && is_const(r.lhs(), -1)) {
          os << " - ";
          print_term(os, r.rhs(), 2);
        } else {
          os << " + ";
          print_term(os, r, 2);
        }
      });
      return;
    }
    case TermKind::Times: {
      // (-1)*g prints as -g unless g is a constant (which would refold).
      if (is_const(t.lhs(), -1) && t.rhs().kind() != TermKind::Const) {
        paren_if(os, min_prec > 3, [&] {
          os << "-";
          print_term(os, t.rhs(), 4);
        });
        return;
      }
      paren_if(os, min_prec > 2, [&] {
        print_term(os, t.lhs(), 2);
        os << "*";
        print_term(os, t.rhs(), 3);
      });
      return;
    }
  }
}

void print_formula(std::ostream& os, const Formula& f, int min_prec);
void print_program(std::ostream& os, const Program& p, int min_prec);

void print_tuple(std::ostream& os, const VarTuple& xs) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) os << ",";
    os << xs[i].name();
  }
}

// Mirror-pair equality pattern: a <= b & b <= a.
bool match_eq(const Formula& f, Term& a, Term& b) {
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

bool match_mutual(const Formula& f, Program& a, Program& b, VarTuple& xs) {
  if (f.kind() != FormulaKind::And) return false;
  const Formula& l = f.left();
  const Formula& r = f.right();
  if (l.kind() != FormulaKind::RefinesOn || r.kind() != FormulaKind::RefinesOn)
    return false;
  if (l.ref_lhs() == r.ref_rhs() && l.ref_rhs() == r.ref_lhs() &&
      l.ref_tuple() == r.ref_tuple()) {
    a = l.ref_lhs();
    b = l.ref_rhs();
    xs = l.ref_tuple();
    return true;
  }
  return false;
}

void print_formula(std::ostream& os, const Formula& f, int min_prec) {
  switch (f.kind()) {
    case FormulaKind::Leq:
      print_term(os, f.leq_lhs(), 0);
      os << " <= ";
      print_term(os, f.leq_rhs(), 0);
      return;
    case FormulaKind::Not: {
      const Formula& c = f.child();
      // a < b desugars to !(b <= a).
      if (c.kind() == FormulaKind::Leq) {
        print_term(os, c.leq_rhs(), 0);
        os << " < ";
        print_term(os, c.leq_lhs(), 0);
        return;
      }
      {
        Term a, b;
        if (c.kind() == FormulaKind::And && match_eq(c, a, b)) {
          print_term(os, a, 0);
          os << " != ";
          print_term(os, b, 0);
          return;
        }
      }
      // exists x. P desugars to !forall x. !P
      if (c.kind() == FormulaKind::Forall &&
          c.body().kind() == FormulaKind::Not) {
        paren_if(os, min_prec > 0, [&] {
          os << "exists " << c.binder().name() << ". ";
          print_formula(os, c.body().child(), 0);
        });
        return;
      }
      if (c.kind() == FormulaKind::And) {
        const Formula& p = c.left();
        const Formula& q = c.right();
        // p | q desugars to !(!p & !q)
        if (p.kind() == FormulaKind::Not && q.kind() == FormulaKind::Not) {
          paren_if(os, min_prec > 2, [&] {
            print_formula(os, p.child(), 3);
            os << " | ";
            print_formula(os, q.child(), 2);
          });
          return;
        }
        // p -> q desugars to !(p & !q)
        if (q.kind() == FormulaKind::Not) {
          paren_if(os, min_prec > 1, [&] {
            print_formula(os, p, 2);
            os << " -> ";
            print_formula(os, q.child(), 1);
          });
          return;
        }
      }
      paren_if(os, min_prec > 4, [&] {
        os << "!";
        print_formula(os, c, 5);
      });
      return;
    }
    case FormulaKind::And: {
      Term a, b;
      if (match_eq(f, a, b)) {
        print_term(os, a, 0);
        os << " = ";
        print_term(os, b, 0);
        return;
      }
      Program pa, pb;
      VarTuple xs;
      if (match_mutual(f, pa, pb, xs)) {
        print_program(os, pa, 3);
        os << " ==[";
        print_tuple(os, xs);
        os << "] ";
        print_program(os, pb, 3);
        return;
      }
      paren_if(os, min_prec > 3, [&] {
        print_formula(os, f.left(), 4);
        os << " & ";
        print_formula(os, f.right(), 3);
      });
      return;
    }
    case FormulaKind::Forall:
      paren_if(os, min_prec > 0, [&] {
        os << "forall " << f.binder().name() << ". ";
        print_formula(os, f.body(), 0);
      });
      return;
    case FormulaKind::Box:
      paren_if(os, min_prec > 4, [&] {
        os << "[";
        print_program(os, f.program(), 0);
        os << "] ";
        print_formula(os, f.body(), 4);
      });
      return;
    case FormulaKind::RefinesOn:
      print_program(os, f.ref_lhs(), 3);
      os << " <=[";
      print_tuple(os, f.ref_tuple());
      os << "] ";
      print_program(os, f.ref_rhs(), 3);
      return;
  }
}

void print_program(std::ostream& os, const Program& p, int min_prec) {
  switch (p.kind()) {
    case ProgramKind::Assign:
      os << p.assign_var().name() << " := ";
      print_term(os, p.assign_term(), 0);
      return;
    case ProgramKind::Test:
      os << "?";
      print_formula(os, p.test_formula(), 5);
      return;
    case ProgramKind::Dap:
      os << "{";
      print_tuple(os, p.dap_tuple());
      os << " : ";
      print_formula(os, p.dap_constraint(), 0);
      os << "}";
      return;
    case ProgramKind::Choice:
      paren_if(os, min_prec > 1, [&] {
        print_program(os, p.left(), 2);
        os << " ++ ";
        print_program(os, p.right(), 1);
      });
      return;
    case ProgramKind::Seq:
      paren_if(os, min_prec > 2, [&] {
        print_program(os, p.left(), 3);
        os << " ; ";
        print_program(os, p.right(), 2);
      });
      return;
    case ProgramKind::Star:
      if (p.inner().kind() == ProgramKind::Assign ||
          p.inner().kind() == ProgramKind::Test) {
        os << "(";
        print_program(os, p.inner(), 0);
        os << ")*";
      } else {
        print_program(os, p.inner(), 3);
        os << "*";
      }
      return;
  }
}

}  // namespace

std::string print(const Term& t) {
  std::ostringstream os;
  print_term(os, t, 0);
  return os.str();
}

std::string print(const Formula& f) {
  std::ostringstream os;
  print_formula(os, f, 0);
  return os.str();
}

std::string print(const Program& p) {
  std::ostringstream os;
  print_program(os, p, 0);
  return os.str();
}

std::string print(const Sequent& s) {
  std::ostringstream os;
  for (std::size_t i = 0; i < s.ante.size(); ++i) {
    if (i) os << ", ";
    print_formula(os, s.ante[i], 0);
  }
  os << (s.ante.empty() ? "|-" : " |-");
  for (std::size_t i = 0; i < s.succ.size(); ++i) {
    os << (i ? ", " : " ");
    print_formula(os, s.succ[i], 0);
  }
  return os.str();
}

std::string print(const VarTuple& xs) {
  std::ostringstream os;
  os << "[";
  print_tuple(os, xs);
  os << "]";
  return os.str();
}

std::string print(const TermVec& es) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < es.size(); ++i) {
    if (i) os << ", ";
    print_term(os, es[i], 0);
  }
  os << "]";
  return os.str();
}

}  // namespace dal
