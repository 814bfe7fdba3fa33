#pragma once

#include <map>
#include <string>
#include <vector>

#include "dal/calculus.hpp"
#include "dal/groebner.hpp"
#include "dal/parser.hpp"
#include "dal/polynomial.hpp"
#include "dal/tactics.hpp"

namespace dal {

// A polynomial DAE: state variables with their differential variables,
// rigid parameters, and equations (each term means = 0, primed variables of
// states allowed). Parameters are never bound; the programs emitted for
// certificates constrain their differential variables to zero.
struct DaeSystem {
  std::string name;
  VarTuple state_vars;
  std::vector<Variable> params;
  TermVec equations;
  std::map<Variable, Term> solved_derivatives;  // x' -> e, shape x' - e

  static DaeSystem build(std::string name, VarTuple states,
                         std::vector<Variable> params, TermVec equations);
  static DaeSystem from_decl(const SystemDecl& decl);

  OrderPtr order() const;  // block lex, primed over unprimed, states first
  std::vector<Polynomial> equation_polys() const;
  bool is_param(const Variable& v) const;
  // Equations = 0 together with the parameter rigidity constraints p' = 0.
  Formula constraint_formula() const;
  VarTuple program_tuple() const;  // states then params
};

enum class ExtractStrategy { Syntactic, Elimination };

enum class ReductionStatus { Closed, NoNewGenerators, MaxRounds };

struct ClosureInfo {
  bool closed = false;
  std::size_t differential_count = 0;
  std::size_t state_count = 0;
  TermMatrix jacobian;
  Term det;
  Polynomial det_poly{MonomialOrder::lex()};
  // Conjunction of (f != 0) over parameter factors of the determinant's
  // monomial content; even powers collapse.
  std::vector<Formula> parameter_condition;
  std::vector<std::string> notes;
};

struct ReductionRound {
  TermVec algebraic;       // R_i^A
  TermVec differentiated;  // (R_i^A)' by the rewrite rules
  TermVec reduced;         // recorded reduced forms
  TermVec augmented_system;
  bool closure_stage = false;
};

struct ReductionResult {
  DaeSystem original;
  DaeSystem reduced_system;
  std::vector<ReductionRound> rounds;
  Formula gamma;  // conjunction of (R_i)' = 0 over rounds
  ClosureInfo closure;
  ProofScript certificate;
  Sequent certificate_goal;
  ReductionStatus status = ReductionStatus::NoNewGenerators;
};

// Kernel of the reduction pipeline. `previous` holds algebraic parts found in
// earlier rounds; results are filtered by ideal membership against them.
std::vector<Polynomial> extract_algebraic_part(
    const DaeSystem& sys, ExtractStrategy strategy,
    const std::vector<Polynomial>& previous, const GroebnerConfig& cfg = {});

// Substitutes solved derivatives (and parameter rigidity), reduces modulo the
// accumulated algebraic ideal, then tries to replace still-primed results by
// new algebraic consequences of the augmented ideal; failing that, reduces
// against the full system and keeps the differential form.
std::vector<Polynomial> reduce_modulo(const TermVec& terms, const DaeSystem& sys,
                                      const std::vector<Polynomial>& algebraic,
                                      const GroebnerConfig& cfg = {});

// Differential subsystem, Jacobian with respect to the state differentials,
// cofactor determinant and parameter conditions. Rows are keyed by the first
// state whose differential occurs, so well-posed systems give the expected
// diagonal shape.
ClosureInfo closure_check(const DaeSystem& sys);

struct ReduceConfig {
  std::size_t max_rounds = 4;
  ExtractStrategy strategy = ExtractStrategy::Syntactic;
  // Elimination bases under the block order need more degree headroom than
  // the oracle's membership checks.
  GroebnerConfig groebner{50000, 24};
  bool emit_certificate = true;
};

// Iterated extract / differentiate / reduce / augment, followed by a closure
// completion stage that differentiates freshly found algebraic constraints
// (at most one completion round per state variable) when the differential
// subsystem is still underdetermined. The certificate's open premises are
// closed with the identity on gamma and the per-round membership leaves.
ReductionResult reduce(const DaeSystem& sys, const ReduceConfig& cfg = {});

}  // namespace dal
