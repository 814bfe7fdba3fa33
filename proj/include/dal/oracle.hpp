#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dal/eval.hpp"
#include "dal/groebner.hpp"
#include "dal/polynomial.hpp"
#include "dal/syntax.hpp"

namespace dal {

// Relation of a polynomial against zero.
enum class Rel { Eq, Le, Lt, Ne };

struct Atom {
  Polynomial poly;
  Rel rel;
};

// Real-arithmetic leaf query: hypotheses (conjunctive) and goal disjuncts
// (each itself a conjunction of atoms), universally closed over free
// variables. Differential terms are expanded during conversion; queries
// containing boxes, refinements or quantifiers are flagged unsupported.
struct ArithQuery {
  std::vector<Atom> hyps;
  std::vector<std::vector<Atom>> goals;
  bool unsupported_hyp = false;
  bool unsupported_goal = false;
  std::string key;  // canonical text of the originating sequent
};

ArithQuery query_from_sequent(const Sequent& s, const OrderPtr& order);

enum class VerdictStatus { Valid, Falsified, Unknown };

struct Verdict {
  VerdictStatus status = VerdictStatus::Unknown;
  // "ideal-membership", "external:<name>" or "assumed".
  std::string method;
  std::optional<NumericState> counterexample;
  std::string detail;

  static Verdict valid_ideal(std::string detail = "") {
    return {VerdictStatus::Valid, "ideal-membership", std::nullopt,
            std::move(detail)};
  }
  static Verdict unknown(std::string detail = "") {
    return {VerdictStatus::Unknown, "", std::nullopt, std::move(detail)};
  }
};

struct OracleConfig {
  std::size_t samples = 50;
  int newton_max_iters = 25;
  double newton_tol = 1e-10;
  std::uint64_t seed = 0;
  GroebnerConfig groebner;
  // Recorded external-solver verdicts, keyed by the canonical sequent text;
  // value is the solver name that produced the validity verdict.
  std::map<std::string, std::string> external_fixtures;
};

class Oracle {
 public:
  explicit Oracle(OracleConfig cfg = {}) : cfg_(std::move(cfg)) {}

  const OracleConfig& config() const { return cfg_; }

  // Pipeline: ideal membership on the equational fragment, then a sampling
  // falsifier with Newton projection onto the equality hypotheses, then
  // recorded external verdicts, then Unknown.
  Verdict discharge(const ArithQuery& q);
  Verdict discharge_sequent(const Sequent& s);

 private:
  Verdict equational(const ArithQuery& q) const;
  std::optional<Verdict> falsify(const ArithQuery& q) const;

  OracleConfig cfg_;
  std::map<std::string, Verdict> cache_;
};

// SMT-LIB2 rendering of the query: hypotheses asserted positively, the goal
// disjunction negated, (check-sat) on the result. Unsat means valid.
std::string export_smt(const ArithQuery& q);

}  // namespace dal
