#include "dal/tracelab.hpp"

#include <algorithm>
#include <cmath>

#include "dal/errors.hpp"
#include "dal/printer.hpp"

namespace dal {

namespace {

// Dense Gaussian elimination; returns false on a (near-)singular pivot.
bool solve_linear(std::vector<std::vector<double>> a, std::vector<double> b,
                  std::vector<double>& out) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-13) return false;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = b[i] / a[i][i];
  return true;
}

struct Subsystem {
  TermVec equations;          // differential subsystem, row-sorted
  TermMatrix jac;             // d equations / d states'
  std::vector<Variable> primes;
};

Subsystem differential_subsystem(const DaeSystem& sys) {
  ClosureInfo info = closure_check(sys);
  if (!info.closed)
    throw JacobianDegenerate("system is not differentially closed", 0.0);
  Subsystem sub;
  // Reconstruct the same row order closure_check uses.
  struct Row {
    Term eq;
    std::size_t key;
  };
  std::vector<Row> rows;
  for (const auto& eq : sys.equations) {
    std::size_t key = sys.state_vars.size();
    VarSet fv = free_vars(eq);
    for (std::size_t j = 0; j < sys.state_vars.size(); ++j)
      if (fv.count(sys.state_vars[j].prime())) {
        key = j;
        break;
      }
    if (key < sys.state_vars.size()) rows.push_back({eq, key});
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const Row& a, const Row& b) { return a.key < b.key; });
  for (const auto& r : rows) sub.equations.push_back(r.eq);
  for (const auto& v : sys.state_vars) sub.primes.push_back(v.prime());
  sub.jac = jacobian(sub.equations, sub.primes);
  return sub;
}

double eval_abs_det(const TermMatrix& m, const NumericState& s) {
  const std::size_t n = m.rows;
  std::vector<std::vector<double>> a(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i][j] = eval_term(m.at(i, j), s);
  double det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-300) return 0.0;
    if (piv != col) std::swap(a[piv], a[col]);
    det *= a[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
    }
  }
  return std::abs(det);
}

// Solves the differential subsystem for the state derivatives at `state`,
// starting the iteration from the primed entries already in `state`.
std::vector<double> solve_derivatives(const Subsystem& sub, NumericState state,
                                      const SimConfig& cfg, double time) {
  const std::size_t n = sub.primes.size();
  for (int iter = 0; iter <= cfg.newton_max_iters; ++iter) {
    std::vector<double> residual(n);
    double norm = 0;
    for (std::size_t i = 0; i < n; ++i) {
      residual[i] = eval_term(sub.equations[i], state);
      norm = std::max(norm, std::abs(residual[i]));
    }
    if (norm <= cfg.newton_tol) {
      std::vector<double> out(n);
      for (std::size_t i = 0; i < n; ++i) out[i] = state[sub.primes[i]];
      return out;
    }
    if (iter == cfg.newton_max_iters)
      throw NoConvergence("derivative solve did not converge", norm);
    std::vector<std::vector<double>> jac(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        jac[i][j] = eval_term(sub.jac.at(i, j), state);
    std::vector<double> neg(n);
    for (std::size_t i = 0; i < n; ++i) neg[i] = -residual[i];
    std::vector<double> delta;
    if (!solve_linear(jac, neg, delta))
      throw JacobianDegenerate("singular derivative Jacobian", time);
    for (std::size_t i = 0; i < n; ++i) state[sub.primes[i]] += delta[i];
  }
  return {};
}

}  // namespace

NumericState consistent_init(const DaeSystem& sys, const NumericState& partial,
                             const SimConfig& cfg) {
  // System variables: states, their primes, parameters.
  std::vector<Variable> universe;
  for (const auto& v : sys.state_vars) universe.push_back(v);
  for (const auto& v : sys.state_vars) universe.push_back(v.prime());
  for (const auto& p : sys.params) universe.push_back(p);

  std::vector<Variable> unknowns;
  NumericState state = partial;
  for (const auto& v : universe)
    if (!partial.count(v)) unknowns.push_back(v);
  if (unknowns.empty()) return state;
  if (sys.equations.size() < unknowns.size())
    throw Error("consistent_init: " + std::to_string(unknowns.size()) +
                " unknowns but only " + std::to_string(sys.equations.size()) +
                " constraints");

  Rng rng(cfg.seed);
  for (const auto& v : unknowns) state[v] = 0.1 + 0.05 * rng.uniform();

  const std::size_t m = sys.equations.size();
  const std::size_t n = unknowns.size();
  auto normal_matrix = [&](std::vector<std::vector<double>>& a,
                           std::vector<double>& b,
                           const std::vector<double>& residual) {
    std::vector<std::vector<double>> jac(m, std::vector<double>(n));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j)
        jac[i][j] = eval_term(dal::partial(sys.equations[i], unknowns[j]), state);
    a.assign(n, std::vector<double>(n, 0.0));
    b.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < m; ++i) a[j][k] += jac[i][j] * jac[i][k];
      for (std::size_t i = 0; i < m; ++i) b[j] -= jac[i][j] * residual[i];
    }
  };
  double norm = 0;
  for (int iter = 0; iter <= cfg.newton_max_iters; ++iter) {
    std::vector<double> residual(m);
    norm = 0;
    for (std::size_t i = 0; i < m; ++i) {
      residual[i] = eval_term(sys.equations[i], state);
      norm = std::max(norm, std::abs(residual[i]));
    }
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    normal_matrix(a, b, residual);
    std::vector<double> delta;
    bool regular = solve_linear(a, b, delta);
    if (norm <= cfg.newton_tol) {
      // Converged, but the unknowns must also be locally determined.
      if (!regular)
        throw SingularJacobian("consistent_init: constraints do not determine " +
                               std::to_string(n) + " unknowns at the solution");
      return state;
    }
    if (!regular)
      throw SingularJacobian("consistent_init: singular constraint Jacobian");
    for (std::size_t j = 0; j < n; ++j) state[unknowns[j]] += delta[j];
  }
  throw NoConvergence("consistent_init did not converge", norm);
}

TraceSample integrate_implicit(const DaeSystem& sys, const NumericState& state0,
                               double t_end, const SimConfig& cfg) {
  TraceSample trace;
  if (t_end <= 0) {
    trace.times.push_back(0.0);
    trace.states.push_back(state0);
    return trace;
  }
  Subsystem sub = differential_subsystem(sys);
  if (eval_abs_det(sub.jac, state0) < 1e-9)
    throw JacobianDegenerate("closure Jacobian is numerically singular", 0.0);

  const std::size_t n = sub.primes.size();
  NumericState warm = state0;
  // Fresh starts use the explicit solved derivatives where present.
  for (const auto& v : sys.state_vars) {
    Variable vp = v.prime();
    if (!warm.count(vp)) {
      auto it = sys.solved_derivatives.find(vp);
      warm[vp] = it != sys.solved_derivatives.end()
                     ? eval_term(it->second, state0)
                     : 0.0;
    }
  }

  auto field = [&](const NumericState& x, double time) {
    NumericState probe = x;
    for (std::size_t i = 0; i < n; ++i) probe[sub.primes[i]] = warm[sub.primes[i]];
    std::vector<double> xp = solve_derivatives(sub, probe, cfg, time);
    for (std::size_t i = 0; i < n; ++i) warm[sub.primes[i]] = xp[i];
    return xp;
  };

  NumericState current = warm;
  const std::size_t steps =
      static_cast<std::size_t>(std::llround(t_end / cfg.h));
  auto record = [&](double t) {
    std::vector<double> xp = field(current, t);
    for (std::size_t i = 0; i < n; ++i) current[sub.primes[i]] = xp[i];
    trace.times.push_back(t);
    trace.states.push_back(current);
  };
  record(0.0);
  for (std::size_t step = 0; step < steps; ++step) {
    double t = static_cast<double>(step) * cfg.h;
    auto advance = [&](const std::vector<double>& slope, double factor) {
      NumericState next = current;
      for (std::size_t i = 0; i < n; ++i)
        next[sys.state_vars.vars()[i]] =
            current.at(sys.state_vars.vars()[i]) + factor * slope[i];
      return next;
    };
    std::vector<double> k1 = field(current, t);
    std::vector<double> k2 = field(advance(k1, cfg.h / 2), t + cfg.h / 2);
    std::vector<double> k3 = field(advance(k2, cfg.h / 2), t + cfg.h / 2);
    std::vector<double> k4 = field(advance(k3, cfg.h), t + cfg.h);
    for (std::size_t i = 0; i < n; ++i) {
      double incr = (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]) / 6.0;
      current[sys.state_vars.vars()[i]] += cfg.h * incr;
    }
    record(static_cast<double>(step + 1) * cfg.h);
  }
  return trace;
}

std::vector<double> constraint_drift(const TraceSample& trace,
                                     const TermVec& constraints) {
  std::vector<double> out(constraints.size(), 0.0);
  for (const auto& s : trace.states)
    for (std::size_t i = 0; i < constraints.size(); ++i)
      out[i] = std::max(out[i], std::abs(eval_term(constraints[i], s)));
  return out;
}

double check_differential_lemma(const Term& e, const TraceSample& trace) {
  if (trace.size() < 3) return 0.0;
  Term de = differential(e);
  double worst = 0.0;
  std::vector<double> values(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i)
    values[i] = eval_term(e, trace.states[i]);
  for (std::size_t i = 1; i + 1 < trace.size(); ++i) {
    double fd = (values[i + 1] - values[i - 1]) /
                (trace.times[i + 1] - trace.times[i - 1]);
    double exact = eval_term(de, trace.states[i]);
    double dev = std::abs(fd - exact) / std::max(1.0, std::abs(exact));
    worst = std::max(worst, dev);
  }
  return worst;
}

TraceSample spline_trace(const std::vector<Variable>& vars, double t_end,
                         double h, Rng& rng, double knot_spacing) {
  // One natural cubic spline per variable over equally spaced knots covering
  // the sampled window.
  double dt = knot_spacing;
  const std::size_t k = std::max<std::size_t>(
      3, static_cast<std::size_t>(std::ceil(t_end / dt)) + 2);
  struct Spline {
    std::vector<double> y;
    std::vector<double> m;  // second derivatives at the knots
  };
  std::vector<Spline> splines(vars.size());
  for (auto& sp : splines) {
    sp.y.resize(k);
    for (auto& v : sp.y) v = rng.uniform(-1.0, 1.0);
    // Natural spline: tridiagonal solve for the interior second derivatives.
    sp.m.assign(k, 0.0);
    if (k > 2) {
      std::size_t n = k - 2;
      std::vector<double> a(n, dt / 6), b(n, 2 * dt / 3), c(n, dt / 6), d(n);
      for (std::size_t i = 0; i < n; ++i)
        d[i] = (sp.y[i + 2] - sp.y[i + 1]) / dt - (sp.y[i + 1] - sp.y[i]) / dt;
      for (std::size_t i = 1; i < n; ++i) {
        double f = a[i] / b[i - 1];
        b[i] -= f * c[i - 1];
        d[i] -= f * d[i - 1];
      }
      sp.m[n] = d[n - 1] / b[n - 1];
      for (std::size_t i = n - 1; i-- > 0;)
        sp.m[i + 1] = (d[i] - c[i] * sp.m[i + 2]) / b[i];
    }
  }
  auto eval_spline = [&](const Spline& sp, double t, double& value,
                         double& slope) {
    std::size_t seg = std::min<std::size_t>(
        static_cast<std::size_t>(t / dt), k - 2);
    double t0 = static_cast<double>(seg) * dt;
    double u = t - t0;
    double m0 = sp.m[seg], m1 = sp.m[seg + 1];
    double y0 = sp.y[seg], y1 = sp.y[seg + 1];
    double c1 = (y1 - y0) / dt - dt * (2 * m0 + m1) / 6;
    value = y0 + c1 * u + m0 * u * u / 2 + (m1 - m0) * u * u * u / (6 * dt);
    slope = c1 + m0 * u + (m1 - m0) * u * u / (2 * dt);
  };
  TraceSample trace;
  std::size_t samples = static_cast<std::size_t>(std::llround(t_end / h)) + 1;
  for (std::size_t i = 0; i < samples; ++i) {
    double t = static_cast<double>(i) * h;
    NumericState s;
    for (std::size_t v = 0; v < vars.size(); ++v) {
      double value, slope;
      eval_spline(splines[v], std::min(t, t_end), value, slope);
      s[vars[v]] = value;
      s[vars[v].prime()] = slope;
    }
    trace.times.push_back(t);
    trace.states.push_back(s);
  }
  return trace;
}

namespace {

using StateSet = std::set<RationalState>;
using PointTrace = std::vector<RationalState>;
using TraceSet = std::set<PointTrace>;

// Concatenating point traces merges coinciding junction states: a
// zero-duration step that stays put is the same trace function.
PointTrace with_point(PointTrace t, RationalState s) {
  if (t.empty() || !(t.back() == s)) t.push_back(std::move(s));
  return t;
}

void traces_of(const Program& prog, const RationalState& s0, int fuel,
               const PointTrace& prefix, TraceSet& out) {
  switch (prog.kind()) {
    case ProgramKind::Assign: {
      RationalState next = s0;
      next[prog.assign_var()] = eval_term(prog.assign_term(), s0);
      out.insert(with_point(prefix, std::move(next)));
      return;
    }
    case ProgramKind::Test: {
      if (eval_formula(prog.test_formula(), s0))
        out.insert(with_point(prefix, s0));
      return;
    }
    case ProgramKind::Dap:
      throw Error("discrete interpreter cannot run continuous programs");
    case ProgramKind::Choice: {
      traces_of(prog.left(), s0, fuel, prefix, out);
      traces_of(prog.right(), s0, fuel, prefix, out);
      return;
    }
    case ProgramKind::Seq: {
      TraceSet first;
      traces_of(prog.left(), s0, fuel, prefix, first);
      for (const auto& t : first) traces_of(prog.right(), t.back(), fuel, t, out);
      return;
    }
    case ProgramKind::Star: {
      // alpha^0 is the trivial test.
      PointTrace t = with_point(prefix, s0);
      out.insert(t);
      TraceSet level{t};
      for (int k = 0; k < fuel; ++k) {
        TraceSet next;
        for (const auto& tr : level)
          traces_of(prog.inner(), tr.back(), fuel, tr, next);
        out.insert(next.begin(), next.end());
        level = std::move(next);
        if (level.empty()) break;
      }
      return;
    }
  }
}

StateSet relational(const Program& prog, const RationalState& s0, int fuel) {
  switch (prog.kind()) {
    case ProgramKind::Assign: {
      RationalState next = s0;
      next[prog.assign_var()] = eval_term(prog.assign_term(), s0);
      return {next};
    }
    case ProgramKind::Test:
      return eval_formula(prog.test_formula(), s0) ? StateSet{s0} : StateSet{};
    case ProgramKind::Dap:
      throw Error("discrete interpreter cannot run continuous programs");
    case ProgramKind::Choice: {
      StateSet out = relational(prog.left(), s0, fuel);
      StateSet r = relational(prog.right(), s0, fuel);
      out.insert(r.begin(), r.end());
      return out;
    }
    case ProgramKind::Seq: {
      StateSet out;
      for (const auto& mid : relational(prog.left(), s0, fuel)) {
        StateSet r = relational(prog.right(), mid, fuel);
        out.insert(r.begin(), r.end());
      }
      return out;
    }
    case ProgramKind::Star: {
      StateSet out{s0};
      StateSet level{s0};
      for (int k = 0; k < fuel; ++k) {
        StateSet next;
        for (const auto& s : level) {
          StateSet r = relational(prog.inner(), s, fuel);
          next.insert(r.begin(), r.end());
        }
        out.insert(next.begin(), next.end());
        level = std::move(next);
        if (level.empty()) break;
      }
      return out;
    }
  }
  return {};
}

}  // namespace

std::set<RationalState> run_discrete(const Program& prog, const RationalState& s0,
                                     int fuel) {
  TraceSet traces;
  traces_of(prog, s0, fuel, {s0}, traces);
  StateSet out;
  for (const auto& t : traces) out.insert(t.back());
  return out;
}

std::set<RationalState> run_discrete_relational(const Program& prog,
                                                const RationalState& s0,
                                                int fuel) {
  return relational(prog, s0, fuel);
}

}  // namespace dal
