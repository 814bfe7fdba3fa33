#pragma once

#include <vector>

#include "dal/polynomial.hpp"

namespace dal {

struct GroebnerConfig {
  std::size_t pair_limit = 50000;
  unsigned degree_cap = 12;
};

// Remainder of p under multivariate division by the given polynomials.
Polynomial normal_form(Polynomial p, const std::vector<Polynomial>& gs);

// Reduced Groebner basis (Buchberger with the coprimality and chain
// criteria); elements are monic and inter-reduced, so the basis is unique
// for the ideal and order up to permutation.
std::vector<Polynomial> groebner_basis(std::vector<Polynomial> gens,
                                       const GroebnerConfig& cfg = {});

bool in_ideal(const Polynomial& p, const std::vector<Polynomial>& basis);

}  // namespace dal
