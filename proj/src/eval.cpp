#include "dal/eval.hpp"

#include "dal/calculus.hpp"
#include "dal/errors.hpp"

namespace dal {

namespace {

template <class Num>
Num eval_impl(const Term& e, const State<Num>& s) {
  switch (e.kind()) {
    case TermKind::Const:
      if constexpr (std::is_same_v<Num, double>)
        return e.value().to_double();
      else
        return e.value();
    case TermKind::Var: {
      auto it = s.find(e.variable());
      if (it == s.end()) throw MissingVariable("no value for " + e.variable().name());
      return it->second;
    }
    case TermKind::Plus:
      return eval_impl(e.lhs(), s) + eval_impl(e.rhs(), s);
    case TermKind::Times:
      return eval_impl(e.lhs(), s) * eval_impl(e.rhs(), s);
    case TermKind::Differential: {
      const Term& inner = e.inner();
      Num acc{};
      for (const auto& v : free_vars(inner)) {
        Variable vp = v.primed ? v : v.prime();
        auto it = s.find(vp);
        if (it == s.end()) throw MissingVariable("no value for " + vp.name());
        acc = acc + it->second * eval_impl(partial(inner, v), s);
      }
      return acc;
    }
  }
  throw Error("invalid term");
}

template <class Num>
bool eval_formula_impl(const Formula& f, const State<Num>& s) {
  switch (f.kind()) {
    case FormulaKind::Leq:
      return eval_impl(f.leq_lhs(), s) <= eval_impl(f.leq_rhs(), s);
    case FormulaKind::Not:
      return !eval_formula_impl(f.child(), s);
    case FormulaKind::And:
      return eval_formula_impl(f.left(), s) && eval_formula_impl(f.right(), s);
    case FormulaKind::Forall:
    case FormulaKind::Box:
    case FormulaKind::RefinesOn:
      throw Error("formula evaluation supports quantifier- and program-free formulas only");
  }
  throw Error("invalid formula");
}

}  // namespace

double eval_term(const Term& e, const NumericState& s) { return eval_impl(e, s); }
Rational eval_term(const Term& e, const RationalState& s) { return eval_impl(e, s); }
bool eval_formula(const Formula& f, const RationalState& s) {
  return eval_formula_impl(f, s);
}
bool eval_formula(const Formula& f, const NumericState& s) {
  return eval_formula_impl(f, s);
}

}  // namespace dal
