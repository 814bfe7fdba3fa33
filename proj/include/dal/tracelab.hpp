#pragma once

#include <set>
#include <vector>

#include "dal/eval.hpp"
#include "dal/reduction.hpp"
#include "dal/rng.hpp"

namespace dal {

// Sampled trajectory: strictly increasing times starting at 0, one state per
// time including differential variables.
struct TraceSample {
  std::vector<double> times;
  std::vector<NumericState> states;

  double duration() const { return times.empty() ? 0.0 : times.back(); }
  std::size_t size() const { return times.size(); }
};

struct SimConfig {
  double h = 1e-3;
  double newton_tol = 1e-10;
  int newton_max_iters = 25;
  std::uint64_t seed = 0;
};

// Completes a partial state so that every equation of the system holds to
// newton_tol; unknowns are the system variables absent from `partial`.
NumericState consistent_init(const DaeSystem& sys, const NumericState& partial,
                             const SimConfig& cfg = {});

// Integrates the implicitly defined field of a differentially closed system:
// per step the differential subsystem is solved for the state derivatives by
// a warm-started Newton iteration and the state advanced with the classical
// fourth-order Runge-Kutta scheme. Samples carry the solved derivatives.
TraceSample integrate_implicit(const DaeSystem& sys, const NumericState& state0,
                               double t_end, const SimConfig& cfg = {});

// Maximum |value| per constraint over all samples.
std::vector<double> constraint_drift(const TraceSample& trace,
                                     const TermVec& constraints);

// Maximum relative deviation (floored at 1 in the denominator) between the
// centered finite difference of t -> e(trace(t)) and the evaluated
// differential, over the interior samples.
double check_differential_lemma(const Term& e, const TraceSample& trace);

// Natural cubic spline trace through random knots in [-1,1] spaced
// knot_spacing apart, sampled over [0, t_end] at step h; differential
// variables carry the exact spline derivative. Wide spacing keeps the higher
// derivatives small.
TraceSample spline_trace(const std::vector<Variable>& vars, double t_end,
                         double h, Rng& rng, double knot_spacing = 1.5);

// Bounded execution of a continuous-free program: terminal states of the
// point-trace interpreter (loops unrolled at most `fuel` times).
std::set<RationalState> run_discrete(const Program& prog, const RationalState& s0,
                                     int fuel);
// Reference semantics over reachability pairs, for equivalence testing.
std::set<RationalState> run_discrete_relational(const Program& prog,
                                                const RationalState& s0,
                                                int fuel);

}  // namespace dal
