#pragma once

#include <vector>

#include "dal/polynomial.hpp"
#include "dal/syntax.hpp"

namespace dal {

// Rectangular matrix of terms. Entries must be differential-free when the
// matrix is used as a Jacobian.
struct TermMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<TermVec> data;

  TermMatrix() = default;
  TermMatrix(std::size_t r, std::size_t c)
      : rows(r), cols(c), data(r, TermVec(c, Term::constant(0))) {}
  explicit TermMatrix(std::vector<TermVec> rows_in);

  const Term& at(std::size_t i, std::size_t j) const { return data[i][j]; }
  Term& at(std::size_t i, std::size_t j) { return data[i][j]; }
  bool square() const { return rows == cols; }

  static TermMatrix identity(std::size_t n);
  friend bool operator==(const TermMatrix& a, const TermMatrix& b) {
    return a.rows == b.rows && a.cols == b.cols && a.data == b.data;
  }
};

// Total differential by the rewrite rules (c)'->0, (x)'->x', sum and product
// rules. Input must be differential-free and contain no primed variable; the
// result is differential-free.
Term differential(const Term& e);
TermVec differential(const TermVec& es);

// Syntactic partial derivative; structural recursion on sums, products,
// constants and variables. Input must be differential-free.
Term partial(const Term& e, const Variable& x);

// m x n matrix of partials of the entries of es by the variables in xs.
TermMatrix jacobian(const TermVec& es, const std::vector<Variable>& xs);
TermMatrix jacobian(const TermVec& es, const VarTuple& xs, bool primed);

// Cofactor expansion along row 1, exactly as constructed; no simplification
// is performed, callers normalize.
Term determinant(const TermMatrix& m);

Polynomial normalize(const Term& e, const OrderPtr& order);
Polynomial normalize(const Term& e);
bool poly_equal(const Term& a, const Term& b);

}  // namespace dal
