#include "dal/groebner.hpp"

#include <algorithm>
#include <set>

#include "dal/errors.hpp"

namespace dal {

Polynomial normal_form(Polynomial p, const std::vector<Polynomial>& gs) {
  if (gs.empty()) return p;
  Polynomial r(p.order());
  while (!p.is_zero()) {
    bool reduced = false;
    for (const auto& g : gs) {
      if (g.is_zero()) continue;
      if (mono_divides(g.leading_monomial(), p.leading_monomial())) {
        Monomial q = mono_div(p.leading_monomial(), g.leading_monomial());
        Rational c = p.leading_coefficient() / g.leading_coefficient();
        p = p - g.mono_scaled(q, c);
        reduced = true;
        break;
      }
    }
    if (!reduced) {
      Polynomial lead(p.leading_coefficient(), p.order());
      lead = lead.mono_scaled(p.leading_monomial(), Rational(1));
      r = r + lead;
      p = p - lead;
    }
  }
  return r;
}

namespace {

Polynomial s_polynomial(const Polynomial& f, const Polynomial& g) {
  Monomial l = mono_lcm(f.leading_monomial(), g.leading_monomial());
  Polynomial a = f.mono_scaled(mono_div(l, f.leading_monomial()),
                               f.leading_coefficient().inverse());
  Polynomial b = g.mono_scaled(mono_div(l, g.leading_monomial()),
                               g.leading_coefficient().inverse());
  return a - b;
}

std::vector<Polynomial> interreduce(std::vector<Polynomial> basis) {
  // Drop elements whose leading monomial is divisible by another's.
  std::vector<Polynomial> minimal;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    bool keep = true;
    for (std::size_t j = 0; j < basis.size(); ++j) {
      if (i == j) continue;
      if (basis[j].is_zero()) continue;
      if (mono_divides(basis[j].leading_monomial(), basis[i].leading_monomial())) {
        if (basis[j].leading_monomial() == basis[i].leading_monomial() && j > i)
          continue;  // keep the first of equal leading monomials
        keep = false;
        break;
      }
    }
    if (keep) minimal.push_back(basis[i]);
  }
  // Fully reduce each element against the others.
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < minimal.size(); ++i) {
      std::vector<Polynomial> others;
      for (std::size_t j = 0; j < minimal.size(); ++j)
        if (j != i) others.push_back(minimal[j]);
      Polynomial r = normal_form(minimal[i], others);
      if (r.is_zero()) {
        minimal.erase(minimal.begin() + static_cast<long>(i));
        changed = true;
        break;
      }
      r = r.monic();
      if (r != minimal[i]) {
        minimal[i] = r;
        changed = true;
      }
    }
  }
  std::sort(minimal.begin(), minimal.end(),
            [](const Polynomial& a, const Polynomial& b) {
              return a.order()->compare(a.leading_monomial(),
                                        b.leading_monomial()) > 0;
            });
  return minimal;
}

}  // namespace

std::vector<Polynomial> groebner_basis(std::vector<Polynomial> gens,
                                       const GroebnerConfig& cfg) {
  std::vector<Polynomial> basis;
  for (auto& g : gens)
    if (!g.is_zero()) basis.push_back(g.monic());
  if (basis.empty()) return basis;

  std::set<std::pair<std::size_t, std::size_t>> pending;
  auto add_pairs = [&](std::size_t upto) {
    for (std::size_t i = 0; i < upto; ++i) pending.insert({i, upto});
  };
  for (std::size_t k = 1; k < basis.size(); ++k) add_pairs(k);

  std::size_t processed = 0;
  while (!pending.empty()) {
    if (++processed > cfg.pair_limit)
      throw ResourceLimit("Buchberger pair limit exceeded");
    auto [i, j] = *pending.begin();
    pending.erase(pending.begin());
    const Monomial& li = basis[i].leading_monomial();
    const Monomial& lj = basis[j].leading_monomial();
    // Coprimality criterion.
    if (mono_gcd(li, lj).empty()) continue;
    // Chain criterion: some k whose leading monomial divides lcm(li,lj) and
    // whose pairs with i and j are both settled.
    Monomial l = mono_lcm(li, lj);
    bool skip = false;
    for (std::size_t k = 0; k < basis.size(); ++k) {
      if (k == i || k == j) continue;
      if (!mono_divides(basis[k].leading_monomial(), l)) continue;
      auto key = [&](std::size_t a, std::size_t b) {
        return std::make_pair(std::min(a, b), std::max(a, b));
      };
      if (!pending.count(key(i, k)) && !pending.count(key(j, k))) {
        skip = true;
        break;
      }
    }
    if (skip) continue;
    Polynomial s = normal_form(s_polynomial(basis[i], basis[j]), basis);
    if (s.is_zero()) continue;
    if (s.degree() > cfg.degree_cap)
      throw ResourceLimit("Buchberger degree cap exceeded");
    basis.push_back(s.monic());
    add_pairs(basis.size() - 1);
  }
  return interreduce(std::move(basis));
}

bool in_ideal(const Polynomial& p, const std::vector<Polynomial>& basis) {
  return normal_form(p, basis).is_zero();
}

}  // namespace dal
