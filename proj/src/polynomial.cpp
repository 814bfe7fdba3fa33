#include "dal/polynomial.hpp"

#include <algorithm>
#include <sstream>

#include "dal/errors.hpp"
#include "dal/printer.hpp"

namespace dal {

unsigned total_degree(const Monomial& m) {
  unsigned d = 0;
  for (const auto& [v, e] : m) d += e;
  return d;
}

Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial out = a;
  for (const auto& [v, e] : b) out[v] += e;
  return out;
}

bool mono_divides(const Monomial& a, const Monomial& b) {
  for (const auto& [v, e] : a) {
    auto it = b.find(v);
    if (it == b.end() || it->second < e) return false;
  }
  return true;
}

Monomial mono_div(const Monomial& b, const Monomial& a) {
  Monomial out = b;
  for (const auto& [v, e] : a) {
    auto it = out.find(v);
    it->second -= e;
    if (it->second == 0) out.erase(it);
  }
  return out;
}

Monomial mono_lcm(const Monomial& a, const Monomial& b) {
  Monomial out = a;
  for (const auto& [v, e] : b) {
    auto& slot = out[v];
    slot = std::max(slot, e);
  }
  return out;
}

Monomial mono_gcd(const Monomial& a, const Monomial& b) {
  Monomial out;
  for (const auto& [v, e] : a) {
    auto it = b.find(v);
    if (it != b.end()) out[v] = std::min(e, it->second);
  }
  return out;
}

std::shared_ptr<const MonomialOrder> MonomialOrder::lex(
    std::vector<Variable> priority) {
  auto o = std::make_shared<MonomialOrder>();
  o->kind = Kind::Lex;
  o->priority = std::move(priority);
  return o;
}

std::shared_ptr<const MonomialOrder> MonomialOrder::grlex(
    std::vector<Variable> priority) {
  auto o = std::make_shared<MonomialOrder>();
  o->kind = Kind::GrLex;
  o->priority = std::move(priority);
  return o;
}

int MonomialOrder::var_rank_cmp(const Variable& a, const Variable& b) const {
  if (a == b) return 0;
  if (a.primed != b.primed) return a.primed ? -1 : 1;  // primed ranks first
  auto index_of = [this](const Variable& v) -> std::size_t {
    Variable base = v.unprime();
    for (std::size_t i = 0; i < priority.size(); ++i)
      if (priority[i] == base) return i;
    return priority.size();
  };
  std::size_t ia = index_of(a), ib = index_of(b);
  if (ia != ib) return ia < ib ? -1 : 1;
  if (a.base != b.base) return a.base < b.base ? -1 : 1;
  return 0;
}

int MonomialOrder::compare(const Monomial& a, const Monomial& b) const {
  if (kind == Kind::GrLex) {
    unsigned da = total_degree(a), db = total_degree(b);
    if (da != db) return da < db ? -1 : 1;
  }
  // Scan variables from highest rank to lowest; the first differing exponent
  // decides.
  std::vector<Variable> vars;
  vars.reserve(a.size() + b.size());
  for (const auto& [v, e] : a) vars.push_back(v);
  for (const auto& [v, e] : b) vars.push_back(v);
  std::sort(vars.begin(), vars.end(), [this](const Variable& x, const Variable& y) {
    return var_rank_cmp(x, y) < 0;
  });
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  for (const auto& v : vars) {
    auto ia = a.find(v);
    auto ib = b.find(v);
    unsigned ea = ia == a.end() ? 0 : ia->second;
    unsigned eb = ib == b.end() ? 0 : ib->second;
    if (ea != eb) return ea < eb ? -1 : 1;
  }
  return 0;
}

Polynomial::Polynomial(Rational c, OrderPtr order) : order_(std::move(order)) {
  if (!c.is_zero()) terms_.push_back({Monomial{}, std::move(c)});
}

Polynomial Polynomial::variable(const Variable& v, OrderPtr order) {
  Polynomial p(std::move(order));
  p.terms_.push_back({Monomial{{v, 1}}, Rational(1)});
  return p;
}

Polynomial Polynomial::from_term(const Term& t, OrderPtr order) {
  switch (t.kind()) {
    case TermKind::Const:
      return Polynomial(t.value(), order);
    case TermKind::Var:
      return variable(t.variable(), order);
    case TermKind::Plus:
      return from_term(t.lhs(), order) + from_term(t.rhs(), order);
    case TermKind::Times:
      return from_term(t.lhs(), order) * from_term(t.rhs(), order);
    case TermKind::Differential:
      throw NestedDifferential(
          "polynomial normalization requires differential-free input");
  }
  return Polynomial(order);
}

bool Polynomial::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].first.empty());
}

const Rational& Polynomial::constant_value() const {
  static const Rational zero(0);
  if (terms_.empty()) return zero;
  return terms_[0].second;
}

unsigned Polynomial::degree() const {
  unsigned d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, total_degree(m));
  return d;
}

const Monomial& Polynomial::leading_monomial() const {
  if (terms_.empty()) throw Error("leading monomial of zero polynomial");
  return terms_[0].first;
}

const Rational& Polynomial::leading_coefficient() const {
  if (terms_.empty()) throw Error("leading coefficient of zero polynomial");
  return terms_[0].second;
}

Polynomial Polynomial::operator-() const {
  Polynomial out(order_);
  out.terms_ = terms_;
  for (auto& [m, c] : out.terms_) c = -c;
  return out;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial out(order_);
  std::size_t i = 0, j = 0;
  while (i < terms_.size() || j < o.terms_.size()) {
    if (i == terms_.size()) {
      out.terms_.push_back(o.terms_[j++]);
    } else if (j == o.terms_.size()) {
      out.terms_.push_back(terms_[i++]);
    } else {
      int c = order_->compare(terms_[i].first, o.terms_[j].first);
      if (c > 0) {
        out.terms_.push_back(terms_[i++]);
      } else if (c < 0) {
        out.terms_.push_back(o.terms_[j++]);
      } else {
        Rational sum = terms_[i].second + o.terms_[j].second;
        if (!sum.is_zero()) out.terms_.push_back({terms_[i].first, sum});
        ++i;
        ++j;
      }
    }
  }
  return out;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  return *this + (-o);
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  std::map<Monomial, Rational> acc;
  for (const auto& [ma, ca] : terms_)
    for (const auto& [mb, cb] : o.terms_) {
      Monomial m = mono_mul(ma, mb);
      auto [it, inserted] = acc.try_emplace(m, ca * cb);
      if (!inserted) {
        it->second += ca * cb;
        if (it->second.is_zero()) acc.erase(it);
      }
    }
  Polynomial out(order_);
  out.terms_.assign(acc.begin(), acc.end());
  out.sort_terms();
  return out;
}

Polynomial Polynomial::scaled(const Rational& c) const {
  if (c.is_zero()) return Polynomial(order_);
  Polynomial out(order_);
  out.terms_ = terms_;
  for (auto& [m, co] : out.terms_) co *= c;
  return out;
}

Polynomial Polynomial::mono_scaled(const Monomial& m, const Rational& c) const {
  if (c.is_zero()) return Polynomial(order_);
  Polynomial out(order_);
  out.terms_.reserve(terms_.size());
  for (const auto& [mo, co] : terms_)
    out.terms_.push_back({mono_mul(mo, m), co * c});
  out.sort_terms();
  return out;
}

Polynomial Polynomial::monic() const {
  if (terms_.empty()) return *this;
  return scaled(leading_coefficient().inverse());
}

Monomial Polynomial::monomial_content() const {
  Monomial g;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (first) {
      g = m;
      first = false;
    } else {
      g = mono_gcd(g, m);
    }
    if (g.empty()) break;
  }
  return g;
}

bool Polynomial::has_primed() const {
  for (const auto& [m, c] : terms_)
    for (const auto& [v, e] : m)
      if (v.primed) return true;
  return false;
}

VarSet Polynomial::variables() const {
  VarSet out;
  for (const auto& [m, c] : terms_)
    for (const auto& [v, e] : m) out.insert(v);
  return out;
}

Polynomial Polynomial::substitute(const Variable& v, const Polynomial& g) const {
  Polynomial out(order_);
  for (const auto& [m, c] : terms_) {
    auto it = m.find(v);
    if (it == m.end()) {
      Polynomial piece(c, order_);
      out = out + piece.mono_scaled(m, Rational(1));
      continue;
    }
    unsigned e = it->second;
    Monomial rest = m;
    rest.erase(v);
    Polynomial piece(c, order_);
    piece = piece.mono_scaled(rest, Rational(1));
    for (unsigned k = 0; k < e; ++k) piece = piece * g;
    out = out + piece;
  }
  return out;
}

Polynomial Polynomial::partial(const Variable& v) const {
  Polynomial out(order_);
  for (const auto& [m, c] : terms_) {
    auto it = m.find(v);
    if (it == m.end()) continue;
    unsigned e = it->second;
    Monomial d = m;
    if (e == 1)
      d.erase(v);
    else
      d[v] = e - 1;
    out = out + Polynomial(c * Rational(e), order_).mono_scaled(d, Rational(1));
  }
  return out;
}

Polynomial Polynomial::with_order(const OrderPtr& order) const {
  Polynomial out(order);
  out.terms_ = terms_;
  out.sort_terms();
  return out;
}

Term Polynomial::to_term() const {
  if (terms_.empty()) return Term::constant(0);
  std::vector<Term> parts;
  parts.reserve(terms_.size());
  for (const auto& [m, c] : terms_) {
    std::vector<Term> factors;
    if (!(c.is_one() && !m.empty())) factors.push_back(Term::constant(c));
    for (const auto& [v, e] : m)
      for (unsigned k = 0; k < e; ++k) factors.push_back(Term::var(v));
    parts.push_back(Term::product(factors));
  }
  return Term::sum(parts);
}

std::string Polynomial::to_string() const { return print(to_term()); }

void Polynomial::sort_terms() {
  std::sort(terms_.begin(), terms_.end(),
            [this](const auto& a, const auto& b) {
              return order_->compare(a.first, b.first) > 0;
            });
}

template <class Num>
Num Polynomial::evaluate(const std::map<Variable, Num>& state) const {
  Num acc{};
  for (const auto& [m, c] : terms_) {
    Num prod;
    if constexpr (std::is_same_v<Num, double>)
      prod = c.to_double();
    else
      prod = Num(c);
    for (const auto& [v, e] : m) {
      auto it = state.find(v);
      if (it == state.end())
        throw MissingVariable("no value for " + v.name());
      for (unsigned k = 0; k < e; ++k) prod = prod * it->second;
    }
    acc = acc + prod;
  }
  return acc;
}

template double Polynomial::evaluate<double>(
    const std::map<Variable, double>&) const;
template Rational Polynomial::evaluate<Rational>(
    const std::map<Variable, Rational>&) const;

}  // namespace dal
