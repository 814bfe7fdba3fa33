#include "dal/calculus.hpp"

#include "dal/errors.hpp"
#include "dal/printer.hpp"

namespace dal {

TermMatrix::TermMatrix(std::vector<TermVec> rows_in) : data(std::move(rows_in)) {
  rows = data.size();
  cols = rows ? data[0].size() : 0;
  for (const auto& r : data)
    if (r.size() != cols) throw Error("ragged term matrix");
}

TermMatrix TermMatrix::identity(std::size_t n) {
  TermMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = Term::constant(1);
  return m;
}

Term differential(const Term& e) {
  switch (e.kind()) {
    case TermKind::Const:
      return Term::constant(0);
    case TermKind::Var:
      if (e.variable().primed)
        throw PrimedInput("differential of a term containing " +
                          e.variable().name());
      return Term::var(e.variable().prime());
    case TermKind::Plus:
      return Term::plus(differential(e.lhs()), differential(e.rhs()));
    case TermKind::Times:
      return Term::plus(Term::times(differential(e.lhs()), e.rhs()),
                        Term::times(e.lhs(), differential(e.rhs())));
    case TermKind::Differential:
      throw NestedDifferential("differential of a differential term");
  }
  return Term::constant(0);
}

TermVec differential(const TermVec& es) {
  TermVec out;
  out.reserve(es.size());
  for (const auto& e : es) out.push_back(differential(e));
  return out;
}

Term partial(const Term& e, const Variable& x) {
  switch (e.kind()) {
    case TermKind::Const:
      return Term::constant(0);
    case TermKind::Var:
      return Term::constant(e.variable() == x ? 1 : 0);
    case TermKind::Plus:
      return Term::plus(partial(e.lhs(), x), partial(e.rhs(), x));
    case TermKind::Times:
      return Term::plus(Term::times(partial(e.lhs(), x), e.rhs()),
                        Term::times(e.lhs(), partial(e.rhs(), x)));
    case TermKind::Differential:
      throw NestedDifferential("partial derivative of a differential term");
  }
  return Term::constant(0);
}

TermMatrix jacobian(const TermVec& es, const std::vector<Variable>& xs) {
  TermMatrix m(es.size(), xs.size());
  for (std::size_t i = 0; i < es.size(); ++i)
    for (std::size_t j = 0; j < xs.size(); ++j)
      m.at(i, j) = partial(es[i], xs[j]);
  return m;
}

TermMatrix jacobian(const TermVec& es, const VarTuple& xs, bool primed) {
  std::vector<Variable> cols;
  cols.reserve(xs.size());
  for (const auto& v : xs) cols.push_back(primed ? v.prime() : v);
  return jacobian(es, cols);
}

Term determinant(const TermMatrix& m) {
  if (!m.square()) throw NonSquare("determinant of a non-square matrix");
  if (m.rows == 0) return Term::constant(1);
  if (m.rows == 1) return m.at(0, 0);
  Term acc;
  bool have = false;
  for (std::size_t j = 0; j < m.cols; ++j) {
    TermMatrix minor(m.rows - 1, m.cols - 1);
    for (std::size_t r = 1; r < m.rows; ++r) {
      std::size_t cc = 0;
      for (std::size_t c = 0; c < m.cols; ++c) {
        if (c == j) continue;
        minor.at(r - 1, cc++) = m.at(r, c);
      }
    }
    Term cof = Term::times(m.at(0, j), determinant(minor));
    if (j % 2 == 1) cof = Term::times(Term::constant(-1), cof);
    acc = have ? Term::plus(acc, cof) : cof;
    have = true;
  }
  return acc;
}

Polynomial normalize(const Term& e, const OrderPtr& order) {
  return Polynomial::from_term(e, order);
}

Polynomial normalize(const Term& e) {
  static const OrderPtr order = MonomialOrder::lex();
  return Polynomial::from_term(e, order);
}

bool poly_equal(const Term& a, const Term& b) {
  return normalize(Term::minus(a, b)).is_zero();
}

}  // namespace dal
