#pragma once

#include <functional>
#include <optional>

#include "dal/kernel.hpp"

namespace dal {

// Untrusted proof construction. Every builder emits a script that the kernel
// accepts once its open premises (leaves with rule "open") are replaced by
// accepted subproofs; tactics can fail only by producing rejected scripts.
struct TacticResult {
  ProofScript script;
  std::vector<Sequent> opens;  // goals of open leaves, in emission order
};

// Goal: Gamma |- [{xs : F}] P, Delta at the given succedent position.
// Open premise: F |- P.
TacticResult tac_dw(const Sequent& goal, int at);

// Goal: Gamma |- {xs:F} <=[xs] {xs:G}, Delta. Splits through the more
// permissive constraint R. Open premises: F |- R and the refinement of
// {xs:R} against {xs:G}.
TacticResult tac_da(const Sequent& goal, int at, const Formula& r);

// Goal: Gamma |- {xs:F} ==[xs] {xs : F & E <= 0}, Delta (or strict <).
// Open premises: Gamma |- E <= 0 (appended succedent) and
// Gamma |- [{xs:F}] (E)' <= 0.
TacticResult tac_di(const Sequent& goal, int at, const TermVec& es, bool strict);

// Goal: Gamma |- {xs:F} ==[xs] {xs : F & (E)' = 0}, Delta.
// Open premises: Gamma |- (E)' = 0 and Gamma |- [{xs:F}] E = 0.
TacticResult tac_dhc(const Sequent& goal, int at, const TermVec& es);

// One stage of iterated reduction: the algebraic part and the recorded
// reduced form of its differential.
struct IrRound {
  TermVec algebraic;
  TermVec reduced;
};

// Goal: Gamma |- {xs : F_m} ==[xs] {xs : F_0}, Delta, where systems holds the
// constraint formulas F_0..F_m and systems[i+1] must be systems[i] extended
// with rounds[i].reduced = 0 up to conjunction reordering (ChainMismatch
// otherwise). Open premises: Gamma |- /\ (R_i)' = 0 and
// |- /\ (F_i -> R_i = 0); rewrite obligations become real-arithmetic leaves.
TacticResult tac_ir(const Sequent& goal, int at, const VarTuple& xs,
                    const std::vector<Formula>& systems,
                    const std::vector<IrRound>& rounds);

// The conjunction of (R_i)' = 0 over the rounds, as used for the first open
// premise of tac_ir.
Formula ir_gamma_formula(const std::vector<IrRound>& rounds);
// The conjunction of (F_i -> R_i = 0), the second open premise of tac_ir.
Formula ir_obligations_formula(const std::vector<Formula>& systems,
                               const std::vector<IrRound>& rounds);

// Proof of |- /\ (F_i -> R_i = 0) by introduction rules with one real leaf
// per round.
ProofNode ir_obligations_proof(const std::vector<Formula>& systems,
                               const std::vector<IrRound>& rounds);

// Replaces every open leaf for which the provider returns a subproof; the
// subproof's root goal must equal the open goal.
ProofNode graft(const ProofNode& script,
                const std::function<std::optional<ProofNode>(const Sequent&)>& provider);

// Preorder rule identifiers, for derivation-fidelity tests.
std::vector<std::string> rule_sequence(const ProofNode& script);

}  // namespace dal
