#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dal/calculus.hpp"
#include "dal/oracle.hpp"
#include "dal/syntax.hpp"

namespace dal {

enum class PayloadKind { Term, TermVec, TermMatrix, Formula, Program, VarTuple, Variable };

using Payload =
    std::variant<Term, TermVec, TermMatrix, Formula, Program, VarTuple, Variable>;

PayloadKind payload_kind(const Payload& p);
std::string payload_text(const Payload& p);
Payload parse_payload(PayloadKind kind, const std::string& text);

// Binding of schema metavariables to concrete syntax.
class Instantiation {
 public:
  Instantiation() = default;

  Instantiation& bind(const std::string& name, Payload p) {
    bindings_[name] = std::move(p);
    return *this;
  }

  bool has(const std::string& name) const { return bindings_.count(name) > 0; }
  const Payload& get(const std::string& name) const;

  const Term& term(const std::string& name) const;
  const TermVec& term_vec(const std::string& name) const;
  const TermMatrix& term_matrix(const std::string& name) const;
  const Formula& formula(const std::string& name) const;
  const Program& program(const std::string& name) const;
  const VarTuple& var_tuple(const std::string& name) const;
  const Variable& variable(const std::string& name) const;

  const std::map<std::string, Payload>& bindings() const { return bindings_; }

 private:
  std::map<std::string, Payload> bindings_;
};

// One derivation step. `at` selects principal formulas: a single succedent
// (or antecedent, rule-dependent) index, or an (antecedent, succedent) pair
// for id. Children are premise subtrees in rule order.
struct ProofNode {
  Sequent goal;
  std::string rule;
  Instantiation inst;
  std::vector<int> at;
  std::vector<ProofNode> children;
};

using ProofScript = ProofNode;

// Schema metavariable kinds per rule (axioms and payload-carrying structural
// rules). Unknown rules are absent.
const std::map<std::string, std::map<std::string, PayloadKind>>& rule_metavars();
bool is_axiom(const std::string& rule);

// Closed formula instance of an axiom schema; side conditions are not
// consulted here.
Formula instantiate_axiom(const std::string& id, const Instantiation& inst);

// Syntactic side-condition violations, empty when the instance is admissible.
std::vector<std::string> check_side_conditions(const std::string& id,
                                               const Instantiation& inst);

struct NodeReport {
  int id = 0;
  std::string rule;
  std::string verdict;  // accepted | side-condition-failure | mismatch | rejected
  std::string tier;     // axiom | structural | ideal-membership | external:* | assumed | open
  std::string detail;
};

enum class OverallStatus { Proved, Conditional, Rejected };

struct CheckReport {
  OverallStatus status = OverallStatus::Rejected;
  std::vector<NodeReport> nodes;

  bool proved() const { return status == OverallStatus::Proved; }
};

std::string to_string(OverallStatus s);

struct KernelConfig {
  bool allow_assumed = false;
};

// The trusted checker. Walks the script, validates every rule application
// structurally (axiom instances up to rational-constant normalization only),
// runs side-condition checks, and delegates real-arithmetic leaves to the
// oracle. Never throws on malformed scripts; problems become node verdicts.
CheckReport check(const ProofScript& script, Oracle& oracle,
                  const KernelConfig& cfg = {});

}  // namespace dal
