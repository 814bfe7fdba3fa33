// Batch front-end: parse inputs, check proof scripts, reduce systems,
// simulate closed systems, run the numeric lemma suites, export SMT.
//
// Exit codes: 0 success/proved, 1 rejected/falsified, 2 conditional,
// 3 usage or I/O error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dal/calculus.hpp"
#include "dal/errors.hpp"
#include "dal/oracle.hpp"
#include "dal/parser.hpp"
#include "dal/printer.hpp"
#include "dal/proof_io.hpp"
#include "dal/reduction.hpp"
#include "dal/rng.hpp"
#include "dal/tactics.hpp"
#include "dal/tracelab.hpp"

using nlohmann::ordered_json;

namespace {

constexpr int kOk = 0;
constexpr int kRejected = 1;
constexpr int kConditional = 2;
constexpr int kUsage = 3;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw dal::Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw dal::Error("cannot write " + path);
  out << content;
}

void write_report(const std::string& path, const ordered_json& j) {
  if (path.empty()) return;
  spit(path, j.dump(2) + "\n");
}

std::map<std::string, std::string> load_solver_fixtures(const std::string& path) {
  std::map<std::string, std::string> out;
  if (path.empty()) return out;
  auto j = nlohmann::json::parse(slurp(path));
  for (const auto& e : j.at("entries"))
    out[e.at("sequent").get<std::string>()] = e.at("solver").get<std::string>();
  return out;
}

dal::DaeSystem load_system(const std::string& path, const std::string& name) {
  auto decls = dal::parse_system_file(slurp(path));
  if (decls.empty()) throw dal::Error("no system block in " + path);
  if (name.empty()) return dal::DaeSystem::from_decl(decls.front());
  for (const auto& d : decls)
    if (d.name == name) return dal::DaeSystem::from_decl(d);
  throw dal::Error("no system named " + name + " in " + path);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

dal::NumericState parse_init(const std::string& text) {
  dal::NumericState out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos)
      throw dal::Error("--init entries must look like x=0.5");
    std::string name = item.substr(0, eq);
    while (!name.empty() && name.back() == ' ') name.pop_back();
    while (!name.empty() && name.front() == ' ') name.erase(name.begin());
    bool primed = false;
    if (!name.empty() && name.back() == '\'') {
      primed = true;
      name.pop_back();
    }
    out[dal::Variable(name, primed)] = std::stod(item.substr(eq + 1));
  }
  return out;
}

ordered_json closure_json(const dal::ClosureInfo& info) {
  ordered_json j;
  j["closed"] = info.closed;
  j["differential_equations"] = info.differential_count;
  j["states"] = info.state_count;
  if (info.differential_count == info.state_count && info.state_count > 0) {
    j["det"] = info.det_poly.to_string();
    ordered_json conds = ordered_json::array();
    for (const auto& c : info.parameter_condition) conds.push_back(dal::print(c));
    j["parameter_condition"] = conds;
  }
  if (!info.notes.empty()) j["notes"] = info.notes;
  return j;
}

int cmd_parse(const std::string& file, const std::string& category,
              const std::string& report_path) {
  std::string text = slurp(file);
  ordered_json report;
  report["schema"] = "dal-report/1";
  report["command"] = "parse";
  try {
    std::string printed;
    if (category == "term") printed = dal::print(dal::parse_term(text));
    else if (category == "formula") printed = dal::print(dal::parse_formula(text));
    else if (category == "program") printed = dal::print(dal::parse_program(text));
    else if (category == "sequent") printed = dal::print(dal::parse_sequent(text));
    else throw dal::Error("unknown category " + category);
    std::cout << printed << "\n";
    report["ok"] = true;
    report["printed"] = printed;
    write_report(report_path, report);
    return kOk;
  } catch (const dal::SyntaxError& e) {
    std::cerr << file << ": " << e.what() << "\n";
    report["ok"] = false;
    report["error"] = e.what();
    write_report(report_path, report);
    return kRejected;
  }
}

int cmd_check(const std::vector<std::string>& files, const std::string& oracle_mode,
              const std::string& fixtures_path, std::uint64_t seed,
              const std::string& report_path) {
  dal::OracleConfig ocfg;
  ocfg.seed = seed;
  ocfg.external_fixtures = load_solver_fixtures(fixtures_path);
  dal::KernelConfig kcfg;
  kcfg.allow_assumed = oracle_mode == "permissive";

  ordered_json report;
  report["schema"] = "dal-report/1";
  report["command"] = "check";
  ordered_json entries = ordered_json::array();
  bool any_rejected = false;
  bool any_conditional = false;
  for (const auto& file : files) {
    dal::Oracle oracle(ocfg);
    dal::ProofScript script = dal::read_proof(slurp(file));
    dal::CheckReport result = dal::check(script, oracle, kcfg);
    std::cout << file << ": " << dal::to_string(result.status) << "\n";
    any_rejected |= result.status == dal::OverallStatus::Rejected;
    any_conditional |= result.status == dal::OverallStatus::Conditional;
    ordered_json entry = nlohmann::ordered_json::parse(check_report_json(result));
    entry["file"] = file;
    entries.push_back(entry);
  }
  report["entries"] = entries;
  write_report(report_path, report);
  if (any_rejected) return kRejected;
  if (any_conditional) return kConditional;
  return kOk;
}

int cmd_reduce(const std::string& file, const std::string& system_name,
               std::size_t rounds, const std::string& strategy,
               const std::string& cert_path, const std::string& report_path,
               std::uint64_t seed) {
  dal::DaeSystem sys = load_system(file, system_name);
  dal::ReduceConfig cfg;
  cfg.max_rounds = rounds;
  cfg.strategy = strategy == "elimination" ? dal::ExtractStrategy::Elimination
                                           : dal::ExtractStrategy::Syntactic;
  dal::ReductionResult result = dal::reduce(sys, cfg);

  ordered_json report;
  report["schema"] = "dal-report/1";
  report["command"] = "reduce";
  report["system"] = sys.name;
  report["status"] = result.status == dal::ReductionStatus::Closed
                         ? "closed"
                         : (result.status == dal::ReductionStatus::MaxRounds
                                ? "max-rounds"
                                : "no-new-generators");
  ordered_json rounds_json = ordered_json::array();
  for (const auto& r : result.rounds) {
    ordered_json rj;
    ordered_json alg = ordered_json::array();
    for (const auto& t : r.algebraic) alg.push_back(dal::print(t));
    ordered_json diff = ordered_json::array();
    for (const auto& t : r.differentiated) diff.push_back(dal::print(t));
    ordered_json red = ordered_json::array();
    for (const auto& t : r.reduced) red.push_back(dal::print(t));
    rj["algebraic_part"] = alg;
    rj["differentiated"] = diff;
    rj["reduced"] = red;
    rj["closure_stage"] = r.closure_stage;
    rounds_json.push_back(rj);
  }
  report["rounds"] = rounds_json;
  ordered_json eqs = ordered_json::array();
  for (const auto& t : result.reduced_system.equations) eqs.push_back(dal::print(t));
  report["reduced_equations"] = eqs;
  report["gamma"] = dal::print(result.gamma);
  report["closure"] = closure_json(result.closure);
  report["certificate_goal"] = dal::print(result.certificate_goal);

  if (!cert_path.empty()) spit(cert_path, dal::write_proof(result.certificate));

  // The emitted certificate must check in the same configuration.
  dal::OracleConfig ocfg;
  ocfg.seed = seed;
  dal::Oracle oracle(ocfg);
  dal::CheckReport check = dal::check(result.certificate, oracle);
  report["certificate_status"] = dal::to_string(check.status);
  write_report(report_path, report);

  std::cout << "system " << sys.name << ": "
            << report["status"].get<std::string>() << ", "
            << result.rounds.size() << " rounds, certificate "
            << dal::to_string(check.status) << "\n";
  for (const auto& r : result.rounds)
    for (const auto& t : r.reduced)
      std::cout << "  constraint: " << dal::print(t) << "\n";
  if (check.status == dal::OverallStatus::Rejected) return kRejected;
  if (check.status == dal::OverallStatus::Conditional) return kConditional;
  return kOk;
}

int cmd_prove(const std::string& file, const std::string& tactic, int at,
              const std::string& with_formula, const std::string& terms_text,
              bool strict, const std::string& out_path) {
  dal::Sequent goal = dal::parse_sequent(slurp(file));
  dal::TacticResult result;
  if (tactic == "dw") {
    result = dal::tac_dw(goal, at);
  } else if (tactic == "da") {
    if (with_formula.empty()) throw dal::Error("da needs --with FORMULA");
    result = dal::tac_da(goal, at, dal::parse_formula(with_formula));
  } else if (tactic == "di") {
    if (terms_text.empty()) throw dal::Error("di needs --terms [e1, e2]");
    result = dal::tac_di(goal, at, dal::parse_term_vec(terms_text), strict);
  } else if (tactic == "dhc") {
    if (terms_text.empty()) throw dal::Error("dhc needs --terms [e1, e2]");
    result = dal::tac_dhc(goal, at, dal::parse_term_vec(terms_text));
  } else {
    throw dal::Error("unknown tactic " + tactic);
  }
  spit(out_path, dal::write_proof(result.script));
  std::cout << "wrote " << out_path << " with " << result.opens.size()
            << " open premises\n";
  for (const auto& o : result.opens) std::cout << "  open: " << dal::print(o) << "\n";
  return kOk;
}

int cmd_simulate(const std::string& file, const std::string& system_name,
                 double t_end, double h, const std::string& init_text,
                 std::size_t rounds, const std::string& out_path,
                 std::uint64_t seed, const std::string& report_path) {
  dal::DaeSystem sys = load_system(file, system_name);
  dal::ReduceConfig rcfg;
  rcfg.max_rounds = rounds;
  rcfg.emit_certificate = false;
  dal::ReductionResult reduction = dal::reduce(sys, rcfg);
  if (!reduction.closure.closed)
    throw dal::Error("system is not differentially closed after reduction");
  dal::SimConfig scfg;
  scfg.h = h;
  scfg.seed = seed;
  dal::NumericState init =
      dal::consistent_init(reduction.reduced_system, parse_init(init_text), scfg);
  dal::TraceSample trace =
      dal::integrate_implicit(reduction.reduced_system, init, t_end, scfg);

  std::vector<dal::Variable> cols;
  for (const auto& v : sys.state_vars) cols.push_back(v);
  for (const auto& v : sys.state_vars) cols.push_back(v.prime());
  std::ostringstream csv;
  csv << "t";
  for (const auto& v : cols) csv << "," << v.name();
  csv << "\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    csv << fmt(trace.times[i]);
    for (const auto& v : cols) csv << "," << fmt(trace.states[i].at(v));
    csv << "\n";
  }
  if (out_path.empty())
    std::cout << csv.str();
  else
    spit(out_path, csv.str());

  dal::TermVec constraints;
  for (const auto& eq : reduction.reduced_system.equations)
    if (!dal::contains_primed(eq)) constraints.push_back(eq);
  std::vector<double> drift = dal::constraint_drift(trace, constraints);
  ordered_json report;
  report["schema"] = "dal-report/1";
  report["command"] = "simulate";
  report["system"] = sys.name;
  report["steps"] = trace.size() - 1;
  ordered_json dj = ordered_json::array();
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    ordered_json e;
    e["constraint"] = dal::print(constraints[i]);
    e["max_drift"] = drift[i];
    dj.push_back(e);
  }
  report["drift"] = dj;
  write_report(report_path, report);
  for (std::size_t i = 0; i < constraints.size(); ++i)
    std::cerr << "drift |" << dal::print(constraints[i])
              << "| <= " << fmt(drift[i]) << "\n";
  return kOk;
}

int cmd_lemma_test(const std::string& name, std::size_t count, double h,
                   std::uint64_t seed, const std::string& report_path);

int cmd_export_smt(const std::string& file, const std::string& out_path) {
  dal::Sequent s = dal::parse_sequent(slurp(file));
  dal::ArithQuery q = dal::query_from_sequent(s, dal::MonomialOrder::lex());
  std::string script = dal::export_smt(q);
  if (out_path.empty())
    std::cout << script;
  else
    spit(out_path, script);
  return kOk;
}

// --- lemma suites ----------------------------------------------------------

dal::Term random_poly_term(dal::Rng& rng, const std::vector<dal::Variable>& vars,
                           unsigned max_degree, int coeff_range,
                           std::size_t max_terms) {
  std::vector<dal::Term> parts;
  std::size_t terms = 1 + rng.below(max_terms);
  for (std::size_t i = 0; i < terms; ++i) {
    long long c = rng.int_in(-coeff_range, coeff_range);
    if (c == 0) c = 1;
    std::vector<dal::Term> factors{dal::Term::constant(c)};
    unsigned degree = static_cast<unsigned>(rng.below(max_degree + 1));
    for (unsigned d = 0; d < degree; ++d)
      factors.push_back(dal::Term::var(vars[rng.below(vars.size())]));
    parts.push_back(dal::Term::product(factors));
  }
  return dal::Term::sum(parts);
}

int cmd_lemma_test(const std::string& name, std::size_t count, double h,
                   std::uint64_t seed, const std::string& report_path) {
  ordered_json report;
  report["schema"] = "dal-report/1";
  report["command"] = "lemma-test";
  report["suite"] = name;
  report["count"] = count;
  report["seed"] = seed;
  dal::Rng rng(seed);
  bool pass = false;

  if (name == "differential") {
    // Finite differences of e along spline traces against the evaluated
    // differential, second-order in h.
    std::vector<dal::Variable> vars{dal::Variable("x"), dal::Variable("y"),
                                    dal::Variable("z")};
    double worst = 0;
    for (std::size_t i = 0; i < count; ++i) {
      dal::Term e = random_poly_term(rng, vars, 4, 10, 6);
      dal::TraceSample trace = dal::spline_trace(vars, 0.5, h, rng);
      worst = std::max(worst, dal::check_differential_lemma(e, trace));
    }
    pass = worst <= 1e-4;
    report["max_relative_deviation"] = worst;
    report["bound"] = 1e-4;
    std::cout << (pass ? "PASS" : "FAIL") << " differential: max deviation "
              << fmt(worst) << " (bound 1e-4)\n";
  } else if (name == "determinant") {
    // Symbolic cofactor determinant against a numeric LU determinant.
    std::vector<dal::Variable> vars{dal::Variable("a"), dal::Variable("b"),
                                    dal::Variable("c")};
    double worst = 0;
    for (std::size_t i = 0; i < count; ++i) {
      std::size_t n = 1 + rng.below(4);
      dal::TermMatrix m(n, n);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t cix = 0; cix < n; ++cix)
          m.at(r, cix) = random_poly_term(rng, vars, 2, 5, 3);
      dal::NumericState s;
      for (const auto& v : vars) s[v] = rng.uniform(-2, 2);
      double symbolic = dal::eval_term(dal::determinant(m), s);
      // LU with partial pivoting.
      std::vector<std::vector<double>> a(n, std::vector<double>(n));
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t cix = 0; cix < n; ++cix)
          a[r][cix] = dal::eval_term(m.at(r, cix), s);
      double det = 1.0;
      for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
          if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (piv != col) {
          std::swap(a[piv], a[col]);
          det = -det;
        }
        if (std::abs(a[col][col]) < 1e-300) {
          det = 0;
          break;
        }
        det *= a[col][col];
        for (std::size_t r = col + 1; r < n; ++r) {
          double f = a[r][col] / a[col][col];
          for (std::size_t cix = col; cix < n; ++cix) a[r][cix] -= f * a[col][cix];
        }
      }
      double rel = std::abs(symbolic - det) /
                   std::max(1.0, std::max(std::abs(symbolic), std::abs(det)));
      worst = std::max(worst, rel);
    }
    pass = worst <= 1e-9;
    report["max_relative_deviation"] = worst;
    report["bound"] = 1e-9;
    std::cout << (pass ? "PASS" : "FAIL") << " determinant: max deviation "
              << fmt(worst) << " (bound 1e-9)\n";
  } else if (name == "equivalence") {
    // Trace-style against relational interpretation of discrete programs.
    std::vector<dal::Variable> vars{dal::Variable("x"), dal::Variable("y"),
                                    dal::Variable("z")};
    std::function<dal::Program(unsigned)> gen = [&](unsigned depth) {
      unsigned pick = depth == 0 ? rng.below(2) : rng.below(6);
      auto rand_term = [&] {
        return random_poly_term(rng, vars, 1, 3, 2);
      };
      switch (pick) {
        case 0:
          return dal::Program::assign(vars[rng.below(vars.size())], rand_term());
        case 1:
          return dal::Program::test(
              dal::Formula::leq(rand_term(), rand_term()));
        case 2:
          return dal::Program::choice(gen(depth - 1), gen(depth - 1));
        case 3:
          return dal::Program::seq(gen(depth - 1), gen(depth - 1));
        case 4:
          return dal::Program::star(gen(depth - 1));
        default:
          return dal::Program::seq(gen(depth - 1), gen(depth - 1));
      }
    };
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < count; ++i) {
      dal::Program prog = gen(4);
      for (int trial = 0; trial < 10; ++trial) {
        dal::RationalState s0;
        for (const auto& v : vars)
          s0[v] = dal::Rational(rng.int_in(-4, 4), 1 + rng.below(3));
        int fuel = 1 + static_cast<int>(rng.below(3));
        if (dal::run_discrete(prog, s0, fuel) !=
            dal::run_discrete_relational(prog, s0, fuel))
          ++mismatches;
      }
    }
    pass = mismatches == 0;
    report["mismatches"] = mismatches;
    std::cout << (pass ? "PASS" : "FAIL") << " equivalence: " << mismatches
              << " mismatches\n";
  } else {
    throw dal::Error("unknown lemma suite " + name +
                     " (expected differential|determinant|equivalence)");
  }
  report["pass"] = pass;
  write_report(report_path, report);
  return pass ? kOk : kRejected;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deductive verification toolkit for differential-algebraic programs"};
  app.set_help_flag("--help", "print usage");
  app.require_subcommand(1);

  std::string file, category = "formula", report_path, oracle_mode = "strict";
  std::string fixtures_path, system_name, strategy = "syntactic", cert_path;
  std::string tactic, with_formula, terms_text, out_path, init_text, suite;
  std::vector<std::string> files;
  std::size_t rounds = 4, count = 100;
  std::uint64_t seed = 0;
  double t_end = 1.0, h = 1e-3;
  int at = 0;
  bool strict_cmp = false;

  auto* parse_cmd = app.add_subcommand("parse", "parse and print one input");
  parse_cmd->add_option("file", file)->required();
  parse_cmd->add_option("--category", category,
                        "term|formula|program|sequent");
  parse_cmd->add_option("--report", report_path);

  auto* check_cmd = app.add_subcommand("check", "check proof scripts");
  check_cmd->add_option("files", files)->required();
  check_cmd->add_option("--oracle", oracle_mode, "strict|permissive");
  check_cmd->add_option("--solver-fixtures", fixtures_path);
  check_cmd->add_option("--seed", seed);
  check_cmd->add_option("--report", report_path);

  auto* reduce_cmd = app.add_subcommand("reduce", "index reduction");
  reduce_cmd->add_option("file", file)->required();
  reduce_cmd->add_option("--system", system_name);
  reduce_cmd->add_option("--rounds", rounds);
  reduce_cmd->add_option("--strategy", strategy, "syntactic|elimination");
  reduce_cmd->add_option("--emit-cert", cert_path);
  reduce_cmd->add_option("--seed", seed);
  reduce_cmd->add_option("--report", report_path);

  auto* prove_cmd = app.add_subcommand("prove", "apply a tactic to a goal");
  prove_cmd->add_option("file", file)->required();
  prove_cmd->add_option("--tactic", tactic)->required();
  prove_cmd->add_option("--at", at);
  prove_cmd->add_option("--with", with_formula);
  prove_cmd->add_option("--terms", terms_text);
  prove_cmd->add_flag("--strict-inequality", strict_cmp);
  prove_cmd->add_option("--out", out_path)->required();

  auto* sim_cmd = app.add_subcommand("simulate", "integrate a closed system");
  sim_cmd->add_option("file", file)->required();
  sim_cmd->add_option("--system", system_name);
  sim_cmd->add_option("--T", t_end);
  sim_cmd->add_option("--h", h);
  sim_cmd->add_option("--init", init_text)->required();
  sim_cmd->add_option("--rounds", rounds);
  sim_cmd->add_option("--out", out_path);
  sim_cmd->add_option("--seed", seed);
  sim_cmd->add_option("--report", report_path);

  auto* lemma_cmd = app.add_subcommand("lemma-test", "numeric lemma suites");
  lemma_cmd->add_option("suite", suite)->required();
  lemma_cmd->add_option("--count", count);
  lemma_cmd->add_option("--h", h);
  lemma_cmd->add_option("--seed", seed);
  lemma_cmd->add_option("--report", report_path);

  auto* smt_cmd = app.add_subcommand("export-smt", "SMT-LIB2 rendering");
  smt_cmd->add_option("file", file)->required();
  smt_cmd->add_option("--out", out_path);

  CLI11_PARSE(app, argc, argv);

  try {
    if (parse_cmd->parsed()) return cmd_parse(file, category, report_path);
    if (check_cmd->parsed())
      return cmd_check(files, oracle_mode, fixtures_path, seed, report_path);
    if (reduce_cmd->parsed())
      return cmd_reduce(file, system_name, rounds, strategy, cert_path,
                        report_path, seed);
    if (prove_cmd->parsed())
      return cmd_prove(file, tactic, at, with_formula, terms_text, strict_cmp,
                       out_path);
    if (sim_cmd->parsed())
      return cmd_simulate(file, system_name, t_end, h, init_text, rounds,
                          out_path, seed, report_path);
    if (lemma_cmd->parsed())
      return cmd_lemma_test(suite, count, h, seed, report_path);
    if (smt_cmd->parsed()) return cmd_export_smt(file, out_path);
  } catch (const dal::SyntaxError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRejected;
  } catch (const dal::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
