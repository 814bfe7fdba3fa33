#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "dal/syntax.hpp"

namespace dal {

// Exponent vector over a sparse variable set; primed variables are distinct
// indeterminates.
using Monomial = std::map<Variable, unsigned>;

unsigned total_degree(const Monomial& m);
Monomial mono_mul(const Monomial& a, const Monomial& b);
bool mono_divides(const Monomial& a, const Monomial& b);  // a | b
Monomial mono_div(const Monomial& b, const Monomial& a);  // b / a, requires a|b
Monomial mono_lcm(const Monomial& a, const Monomial& b);
Monomial mono_gcd(const Monomial& a, const Monomial& b);

// Monomial order. Lex supports the elimination block order: every primed
// variable ranks above every unprimed one, so a Groebner basis element with
// an unprimed leading monomial is entirely unprimed.
struct MonomialOrder {
  enum class Kind { Lex, GrLex };
  Kind kind = Kind::Lex;
  // Optional base-variable priority, highest first; unlisted variables rank
  // below all listed ones, alphabetically.
  std::vector<Variable> priority;

  static std::shared_ptr<const MonomialOrder> lex(
      std::vector<Variable> priority = {});
  static std::shared_ptr<const MonomialOrder> grlex(
      std::vector<Variable> priority = {});

  // -1 / 0 / +1 comparison of variables by rank (higher rank first in lex
  // scans). Primed variables outrank all unprimed variables.
  int var_rank_cmp(const Variable& a, const Variable& b) const;
  // -1 if a < b, 0 if equal, +1 if a > b in the monomial order.
  int compare(const Monomial& a, const Monomial& b) const;
};

using OrderPtr = std::shared_ptr<const MonomialOrder>;

// Canonical multivariate polynomial over exact rationals. The zero
// polynomial is the empty map; no zero coefficients are stored.
class Polynomial {
 public:
  explicit Polynomial(OrderPtr order) : order_(std::move(order)) {}
  Polynomial(Rational c, OrderPtr order);

  static Polynomial variable(const Variable& v, OrderPtr order);
  static Polynomial from_term(const Term& t, OrderPtr order);

  const OrderPtr& order() const { return order_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  const Rational& constant_value() const;  // requires is_constant, nonzero ok
  std::size_t term_count() const { return terms_.size(); }
  unsigned degree() const;

  const Monomial& leading_monomial() const;
  const Rational& leading_coefficient() const;

  const std::vector<std::pair<Monomial, Rational>>& terms() const {
    return terms_;
  }

  Polynomial operator-() const;
  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial scaled(const Rational& c) const;
  Polynomial mono_scaled(const Monomial& m, const Rational& c) const;

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.terms_ == b.terms_;
  }
  friend bool operator!=(const Polynomial& a, const Polynomial& b) {
    return !(a == b);
  }

  Polynomial monic() const;
  // Common monomial factor of all terms (zero polynomial -> empty monomial).
  Monomial monomial_content() const;

  bool has_primed() const;
  VarSet variables() const;

  Polynomial substitute(const Variable& v, const Polynomial& g) const;
  Polynomial partial(const Variable& v) const;

  // Rebuild under a different order.
  Polynomial with_order(const OrderPtr& order) const;

  Term to_term() const;
  std::string to_string() const;

  template <class Num>
  Num evaluate(const std::map<Variable, Num>& state) const;

 private:
  void insert_term(const Monomial& m, const Rational& c);
  void sort_terms();

  OrderPtr order_;
  // Sorted descending under the order (leading term first).
  std::vector<std::pair<Monomial, Rational>> terms_;
};

}  // namespace dal
