#pragma once

#include <map>

#include "dal/syntax.hpp"

namespace dal {

// Total variable-to-number map. Every variable read during evaluation must
// have an entry; a missing one raises MissingVariable, never a default.
template <class Num>
using State = std::map<Variable, Num>;

using NumericState = State<double>;
using RationalState = State<Rational>;

// Term semantics. Constants, sums and products are direct; a differential
// term evaluates as sum over v in FV(e) of s(v') * (de/dv at s).
double eval_term(const Term& e, const NumericState& s);
Rational eval_term(const Term& e, const RationalState& s);

// Quantifier- and program-free formula truth at a state.
bool eval_formula(const Formula& f, const RationalState& s);
bool eval_formula(const Formula& f, const NumericState& s);

}  // namespace dal
