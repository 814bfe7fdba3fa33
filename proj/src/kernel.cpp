#include "dal/kernel.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "dal/errors.hpp"
#include "dal/parser.hpp"
#include "dal/printer.hpp"

namespace dal {

PayloadKind payload_kind(const Payload& p) {
  return static_cast<PayloadKind>(p.index());
}

std::string payload_text(const Payload& p) {
  switch (payload_kind(p)) {
    case PayloadKind::Term:
      return print(std::get<Term>(p));
    case PayloadKind::TermVec:
      return print(std::get<TermVec>(p));
    case PayloadKind::TermMatrix: {
      const auto& m = std::get<TermMatrix>(p);
      std::string out = "[";
      for (std::size_t i = 0; i < m.rows; ++i) {
        if (i) out += ", ";
        out += print(m.data[i]);
      }
      return out + "]";
    }
    case PayloadKind::Formula:
      return print(std::get<Formula>(p));
    case PayloadKind::Program:
      return print(std::get<Program>(p));
    case PayloadKind::VarTuple:
      return print(std::get<VarTuple>(p));
    case PayloadKind::Variable:
      return std::get<Variable>(p).name();
  }
  return "";
}

Payload parse_payload(PayloadKind kind, const std::string& text) {
  switch (kind) {
    case PayloadKind::Term:
      return parse_term(text);
    case PayloadKind::TermVec:
      return parse_term_vec(text);
    case PayloadKind::TermMatrix:
      return TermMatrix(parse_term_matrix(text));
    case PayloadKind::Formula:
      return parse_formula(text);
    case PayloadKind::Program:
      return parse_program(text);
    case PayloadKind::VarTuple:
      return parse_var_tuple(text);
    case PayloadKind::Variable:
      return parse_variable(text);
  }
  throw Error("unknown payload kind");
}

const Payload& Instantiation::get(const std::string& name) const {
  auto it = bindings_.find(name);
  if (it == bindings_.end()) throw KindMismatch("unbound metavariable " + name);
  return it->second;
}

template <class T>
static const T& payload_as(const Payload& p, const std::string& name) {
  const T* v = std::get_if<T>(&p);
  if (!v) throw KindMismatch("metavariable " + name + " has the wrong kind");
  return *v;
}

const Term& Instantiation::term(const std::string& n) const {
  return payload_as<Term>(get(n), n);
}
const TermVec& Instantiation::term_vec(const std::string& n) const {
  return payload_as<TermVec>(get(n), n);
}
const TermMatrix& Instantiation::term_matrix(const std::string& n) const {
  return payload_as<TermMatrix>(get(n), n);
}
const Formula& Instantiation::formula(const std::string& n) const {
  return payload_as<Formula>(get(n), n);
}
const Program& Instantiation::program(const std::string& n) const {
  return payload_as<Program>(get(n), n);
}
const VarTuple& Instantiation::var_tuple(const std::string& n) const {
  return payload_as<VarTuple>(get(n), n);
}
const Variable& Instantiation::variable(const std::string& n) const {
  return payload_as<Variable>(get(n), n);
}

namespace {

VarTuple tuple_concat(const VarTuple& a, const VarTuple& b) {
  std::vector<Variable> vars(a.vars());
  vars.insert(vars.end(), b.vars().begin(), b.vars().end());
  return VarTuple(std::move(vars));
}

Formula vec_cmp_zero(const TermVec& es, bool strict) {
  std::vector<Formula> fs;
  fs.reserve(es.size());
  for (const auto& e : es)
    fs.push_back(strict ? Formula::lt(e, Term::constant(0))
                        : Formula::leq(e, Term::constant(0)));
  return Formula::conj(fs);
}

Formula vec_diff_eq_zero(const TermVec& es) {
  std::vector<Formula> fs;
  fs.reserve(es.size());
  for (const auto& e : es)
    fs.push_back(Formula::eq(Term::differential(e), Term::constant(0)));
  return Formula::conj(fs);
}

Formula vec_diff_leq_zero(const TermVec& es) {
  std::vector<Formula> fs;
  fs.reserve(es.size());
  for (const auto& e : es)
    fs.push_back(Formula::leq(Term::differential(e), Term::constant(0)));
  return Formula::conj(fs);
}

Term row_times_vars(const TermMatrix& m, std::size_t i,
                    const std::vector<Variable>& vs) {
  std::vector<Term> parts;
  parts.reserve(vs.size());
  for (std::size_t j = 0; j < vs.size(); ++j)
    parts.push_back(Term::times(m.at(i, j), Term::var(vs[j])));
  return Term::sum(parts);
}

Formula forall_close(const std::vector<Variable>& vs, Formula f) {
  for (auto it = vs.rbegin(); it != vs.rend(); ++it)
    f = Formula::forall(*it, std::move(f));
  return f;
}

Formula exists_close(const std::vector<Variable>& vs, Formula f) {
  for (auto it = vs.rbegin(); it != vs.rend(); ++it)
    f = Formula::exists(*it, std::move(f));
  return f;
}

std::vector<Variable> primes_of(const VarTuple& t) {
  std::vector<Variable> out;
  out.reserve(t.size());
  for (const auto& v : t) out.push_back(v.prime());
  return out;
}

bool vec_diff_free(const TermVec& es) {
  for (const auto& e : es)
    if (contains_differential(e)) return false;
  return true;
}

bool vec_unprimed(const TermVec& es) {
  for (const auto& e : es)
    if (contains_primed(e)) return false;
  return true;
}

VarSet vec_free_vars(const TermVec& es) {
  VarSet out;
  for (const auto& e : es) {
    VarSet fv = free_vars(e);
    out.insert(fv.begin(), fv.end());
  }
  return out;
}

VarSet matrix_free_vars(const TermMatrix& m) {
  VarSet out;
  for (const auto& row : m.data) {
    VarSet fv = vec_free_vars(row);
    out.insert(fv.begin(), fv.end());
  }
  return out;
}

}  // namespace

const std::map<std::string, std::map<std::string, PayloadKind>>& rule_metavars() {
  static const std::map<std::string, std::map<std::string, PayloadKind>> table = {
      // Axiom schemas.
      {"diff_var", {{"x", PayloadKind::Variable}}},
      {"diff_const", {{"c", PayloadKind::Term}}},
      {"diff_plus", {{"e", PayloadKind::Term}, {"g", PayloadKind::Term}}},
      {"diff_mul", {{"e", PayloadKind::Term}, {"g", PayloadKind::Term}}},
      {"jacobian", {{"E", PayloadKind::TermVec}, {"xs", PayloadKind::VarTuple}}},
      {"r",
       {{"alpha", PayloadKind::Program},
        {"beta", PayloadKind::Program},
        {"P", PayloadKind::Formula},
        {"xs", PayloadKind::VarTuple}}},
      {"tr",
       {{"alpha", PayloadKind::Program},
        {"beta", PayloadKind::Program},
        {"gamma", PayloadKind::Program},
        {"xs", PayloadKind::VarTuple}}},
      {"dw", {{"xs", PayloadKind::VarTuple}, {"F", PayloadKind::Formula}}},
      {"dileq", {{"xs", PayloadKind::VarTuple}, {"E", PayloadKind::TermVec}}},
      {"dilt", {{"xs", PayloadKind::VarTuple}, {"E", PayloadKind::TermVec}}},
      {"dhc", {{"xs", PayloadKind::VarTuple}, {"E", PayloadKind::TermVec}}},
      {"dc",
       {{"xs", PayloadKind::VarTuple},
        {"F", PayloadKind::Formula},
        {"R", PayloadKind::Formula}}},
      {"dr",
       {{"xs", PayloadKind::VarTuple},
        {"zs", PayloadKind::VarTuple},
        {"R", PayloadKind::Formula},
        {"F", PayloadKind::Formula}}},
      {"dm",
       {{"xs", PayloadKind::VarTuple},
        {"F", PayloadKind::Formula},
        {"G", PayloadKind::Formula},
        {"R", PayloadKind::Formula}}},
      {"dg",
       {{"xs", PayloadKind::VarTuple},
        {"zs", PayloadKind::VarTuple},
        {"F", PayloadKind::Formula},
        {"A", PayloadKind::TermMatrix},
        {"B", PayloadKind::TermMatrix},
        {"C", PayloadKind::TermVec}}},
      {"ag",
       {{"xs", PayloadKind::VarTuple},
        {"zs", PayloadKind::VarTuple},
        {"F", PayloadKind::Formula},
        {"E", PayloadKind::TermVec},
        {"G", PayloadKind::TermVec}}},
      {"dp",
       {{"xs", PayloadKind::VarTuple},
        {"ys", PayloadKind::VarTuple},
        {"F", PayloadKind::Formula},
        {"G", PayloadKind::Formula}}},
      {"k",
       {{"alpha", PayloadKind::Program},
        {"P", PayloadKind::Formula},
        {"Q", PayloadKind::Formula}}},
      // Structural rules with payloads.
      {"cut", {{"C", PayloadKind::Formula}}},
      {"mp", {{"P", PayloadKind::Formula}}},
      {"foralll", {{"e", PayloadKind::Term}}},
  };
  return table;
}

bool is_axiom(const std::string& rule) {
  static const std::set<std::string> axioms = {
      "diff_var", "diff_const", "diff_plus", "diff_mul", "jacobian",
      "r",        "tr",         "dw",        "dileq",    "dilt",
      "dhc",      "dc",         "dr",        "dm",       "dg",
      "ag",       "dp",         "k"};
  return axioms.count(rule) > 0;
}

Formula instantiate_axiom(const std::string& id, const Instantiation& inst) {
  if (id == "diff_var") {
    const Variable& x = inst.variable("x");
    if (x.primed) throw KindMismatch("diff_var expects an unprimed variable");
    return Formula::eq(Term::differential(Term::var(x)), Term::var(x.prime()));
  }
  if (id == "diff_const") {
    const Term& c = inst.term("c");
    if (c.kind() != TermKind::Const)
      throw KindMismatch("diff_const expects a rational constant");
    return Formula::eq(Term::differential(c), Term::constant(0));
  }
  if (id == "diff_plus") {
    const Term& e = inst.term("e");
    const Term& g = inst.term("g");
    return Formula::eq(Term::differential(Term::plus(e, g)),
                       Term::plus(Term::differential(e), Term::differential(g)));
  }
  if (id == "diff_mul") {
    const Term& e = inst.term("e");
    const Term& g = inst.term("g");
    return Formula::eq(
        Term::differential(Term::times(e, g)),
        Term::plus(Term::times(Term::differential(e), g),
                   Term::times(e, Term::differential(g))));
  }
  if (id == "jacobian") {
    const TermVec& es = inst.term_vec("E");
    const VarTuple& xs = inst.var_tuple("xs");
    TermMatrix j = jacobian(es, xs, /*primed=*/false);
    std::vector<Variable> primes = primes_of(xs);
    std::vector<Formula> fs;
    fs.reserve(es.size());
    for (std::size_t i = 0; i < es.size(); ++i)
      fs.push_back(Formula::eq(Term::differential(es[i]),
                               row_times_vars(j, i, primes)));
    return Formula::conj(fs);
  }
  if (id == "r") {
    const Program& a = inst.program("alpha");
    const Program& b = inst.program("beta");
    const Formula& p = inst.formula("P");
    const VarTuple& xs = inst.var_tuple("xs");
    return Formula::imply(
        Formula::and_(Formula::refines_on(a, b, xs), Formula::box(b, p)),
        Formula::box(a, p));
  }
  if (id == "tr") {
    const Program& a = inst.program("alpha");
    const Program& b = inst.program("beta");
    const Program& c = inst.program("gamma");
    const VarTuple& xs = inst.var_tuple("xs");
    return Formula::imply(Formula::and_(Formula::refines_on(a, b, xs),
                                        Formula::refines_on(b, c, xs)),
                          Formula::refines_on(a, c, xs));
  }
  if (id == "dw") {
    const VarTuple& xs = inst.var_tuple("xs");
    const Formula& f = inst.formula("F");
    return Formula::box(Program::dap(xs, f), f);
  }
  if (id == "dileq" || id == "dilt") {
    const VarTuple& xs = inst.var_tuple("xs");
    const TermVec& es = inst.term_vec("E");
    Formula pre = vec_cmp_zero(es, id == "dilt");
    Program sys = Program::dap(xs, vec_diff_leq_zero(es));
    return Formula::imply(pre, Formula::box(sys, pre));
  }
  if (id == "dhc") {
    const VarTuple& xs = inst.var_tuple("xs");
    const TermVec& es = inst.term_vec("E");
    Formula diffzero = vec_diff_eq_zero(es);
    Program sys = Program::dap(xs, Formula::vec_eq_zero(es));
    return Formula::imply(diffzero, Formula::box(sys, diffzero));
  }
  if (id == "dc") {
    const VarTuple& xs = inst.var_tuple("xs");
    const Formula& f = inst.formula("F");
    const Formula& r = inst.formula("R");
    return Formula::imply(
        Formula::box(Program::dap(xs, f), r),
        Formula::refines_on(Program::dap(xs, f),
                            Program::dap(xs, Formula::and_(f, r)), xs));
  }
  if (id == "dr") {
    const VarTuple& xs = inst.var_tuple("xs");
    const VarTuple& zs = inst.var_tuple("zs");
    const Formula& r = inst.formula("R");
    const Formula& f = inst.formula("F");
    Formula ref = Formula::refines_on(
        Program::dap(tuple_concat(xs, zs), Formula::and_(r, f)),
        Program::dap(xs, f), xs);
    std::vector<Variable> all(zs.vars());
    std::vector<Variable> primes = primes_of(zs);
    all.insert(all.end(), primes.begin(), primes.end());
    return forall_close(all, ref);
  }
  if (id == "dm") {
    const VarTuple& xs = inst.var_tuple("xs");
    const Formula& f = inst.formula("F");
    const Formula& g = inst.formula("G");
    const Formula& r = inst.formula("R");
    return Formula::imply(
        Formula::refines_on(Program::dap(xs, f), Program::dap(xs, g), xs),
        Formula::refines_on(Program::dap(xs, Formula::and_(f, r)),
                            Program::dap(xs, Formula::and_(g, r)), xs));
  }
  if (id == "dg") {
    const VarTuple& xs = inst.var_tuple("xs");
    const VarTuple& zs = inst.var_tuple("zs");
    const Formula& f = inst.formula("F");
    const TermMatrix& a = inst.term_matrix("A");
    const TermMatrix& b = inst.term_matrix("B");
    const TermVec& c = inst.term_vec("C");
    if (a.rows != zs.size() || a.cols != zs.size() || b.rows != zs.size() ||
        b.cols != zs.size() || c.size() != zs.size())
      throw KindMismatch("ghost dynamics dimensions do not match the tuple");
    std::vector<Variable> zvars(zs.vars());
    std::vector<Variable> zprimes = primes_of(zs);
    std::vector<Formula> rows;
    rows.reserve(zs.size());
    for (std::size_t i = 0; i < zs.size(); ++i)
      rows.push_back(Formula::eq(
          row_times_vars(a, i, zprimes),
          Term::plus(row_times_vars(b, i, zvars), c[i])));
    Formula lin = Formula::conj(rows);
    Formula ref = Formula::refines_on(
        Program::dap(xs, f),
        Program::dap(tuple_concat(xs, zs), Formula::and_(f, lin)), xs);
    Formula inner = forall_close(zvars, exists_close(zprimes, ref));
    Formula det_cond =
        Formula::neq(determinant(a), Term::constant(0));
    return Formula::imply(Formula::box(Program::dap(xs, f), det_cond), inner);
  }
  if (id == "ag") {
    const VarTuple& xs = inst.var_tuple("xs");
    const VarTuple& zs = inst.var_tuple("zs");
    const Formula& f = inst.formula("F");
    const TermVec& es = inst.term_vec("E");
    const TermVec& gs = inst.term_vec("G");
    if (gs.size() != zs.size())
      throw KindMismatch("ghost witness vector does not match the tuple");
    if (es.size() != xs.size())
      throw KindMismatch("equation vector does not match the tuple");
    TermMatrix j = jacobian(es, xs, /*primed=*/true);
    Formula pre = Formula::and_(
        Formula::vec_eq_zero(es),
        Formula::neq(determinant(j), Term::constant(0)));
    std::vector<Formula> eqs;
    eqs.reserve(zs.size());
    for (std::size_t i = 0; i < zs.size(); ++i)
      eqs.push_back(Formula::eq(Term::var(zs[i]), gs[i]));
    Formula ref = Formula::refines_on(
        Program::dap(xs, f),
        Program::dap(tuple_concat(xs, zs), Formula::and_(f, Formula::conj(eqs))),
        xs);
    std::vector<Variable> zvars(zs.vars());
    std::vector<Variable> zprimes = primes_of(zs);
    Formula inner = exists_close(zvars, exists_close(zprimes, ref));
    return Formula::imply(Formula::box(Program::dap(xs, f), pre), inner);
  }
  if (id == "dp") {
    const VarTuple& xs = inst.var_tuple("xs");
    const VarTuple& ys = inst.var_tuple("ys");
    const Formula& f = inst.formula("F");
    const Formula& g = inst.formula("G");
    std::vector<Variable> yvars(ys.vars());
    std::vector<Variable> yprimes = primes_of(ys);
    auto hide = [&](const Formula& h) {
      return exists_close(yprimes, exists_close(yvars, h));
    };
    VarTuple xy = tuple_concat(xs, ys);
    Formula box1 = Formula::box(Program::dap(xs, hide(f)), f);
    Formula box2 = Formula::box(Program::dap(xy, hide(g)), g);
    Formula ref_small =
        Formula::refines_on(Program::dap(xs, f), Program::dap(xs, g), xs);
    Formula ref_big =
        Formula::refines_on(Program::dap(xy, f), Program::dap(xy, g), xy);
    return Formula::imply(
        Formula::and_(Formula::and_(box1, box2), ref_small), ref_big);
  }
  if (id == "k") {
    const Program& a = inst.program("alpha");
    const Formula& p = inst.formula("P");
    const Formula& q = inst.formula("Q");
    return Formula::imply(Formula::box(a, Formula::imply(p, q)),
                          Formula::imply(Formula::box(a, p), Formula::box(a, q)));
  }
  throw UnknownAxiom("unknown axiom " + id);
}

std::vector<std::string> check_side_conditions(const std::string& id,
                                               const Instantiation& inst) {
  std::vector<std::string> out;
  auto require = [&](bool ok, const std::string& msg) {
    if (!ok) out.push_back(msg);
  };
  auto fresh_from = [&](const VarTuple& zs, const VarSet& fv,
                        const std::string& what) {
    for (const auto& z : zs) {
      if (fv.count(z)) out.push_back("ghost " + z.name() + " occurs in " + what);
      if (fv.count(z.prime()))
        out.push_back("ghost " + z.prime().name() + " occurs in " + what);
    }
  };
  auto diff_free_in_tuple = [&](const TermVec& es, const VarTuple& xs) {
    require(vec_diff_free(es), "term vector contains a differential");
    require(vec_unprimed(es), "term vector contains a primed variable");
    for (const auto& v : vec_free_vars(es))
      require(xs.contains(v.primed ? v.unprime() : v),
              "free variable " + v.name() + " outside the tuple");
  };

  if (id == "dileq" || id == "dilt" || id == "dhc") {
    diff_free_in_tuple(inst.term_vec("E"), inst.var_tuple("xs"));
  } else if (id == "jacobian") {
    diff_free_in_tuple(inst.term_vec("E"), inst.var_tuple("xs"));
  } else if (id == "r") {
    VarSet bv = bound_vars(inst.program("alpha"));
    VarSet bv2 = bound_vars(inst.program("beta"));
    bv.insert(bv2.begin(), bv2.end());
    const VarTuple& xs = inst.var_tuple("xs");
    VarSet allowed = xs.with_primes();
    for (const auto& v : free_vars(inst.formula("P")))
      require(allowed.count(v) || !bv.count(v),
              "free variable " + v.name() +
                  " of P is bound by a program but not in the tuple");
  } else if (id == "dr") {
    fresh_from(inst.var_tuple("zs"), free_vars(inst.formula("F")), "F");
  } else if (id == "dg") {
    const VarTuple& zs = inst.var_tuple("zs");
    const TermMatrix& a = inst.term_matrix("A");
    const TermMatrix& b = inst.term_matrix("B");
    const TermVec& c = inst.term_vec("C");
    fresh_from(zs, free_vars(inst.formula("F")), "F");
    fresh_from(zs, matrix_free_vars(a), "A");
    fresh_from(zs, matrix_free_vars(b), "B");
    fresh_from(zs, vec_free_vars(c), "C");
    require(a.rows == zs.size() && a.cols == zs.size(),
            "A must be square with the ghost dimension");
    require(b.rows == zs.size() && b.cols == zs.size(),
            "B must be square with the ghost dimension");
    require(c.size() == zs.size(), "C must match the ghost dimension");
  } else if (id == "ag") {
    const VarTuple& zs = inst.var_tuple("zs");
    const VarTuple& xs = inst.var_tuple("xs");
    const TermVec& es = inst.term_vec("E");
    const TermVec& gs = inst.term_vec("G");
    fresh_from(zs, free_vars(inst.formula("F")), "F");
    fresh_from(zs, vec_free_vars(es), "E");
    fresh_from(zs, vec_free_vars(gs), "G");
    require(vec_diff_free(es), "E contains a differential");
    require(es.size() == xs.size(), "E must match the tuple dimension");
    require(gs.size() == zs.size(), "G must match the ghost dimension");
  } else if (id == "dp") {
    const VarTuple& xs = inst.var_tuple("xs");
    const VarTuple& ys = inst.var_tuple("ys");
    for (const auto& y : ys)
      require(!xs.contains(y), "tuple overlap on " + y.name());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Checker

namespace {

struct Checker {
  Oracle& oracle;
  const KernelConfig& cfg;
  std::vector<NodeReport> reports;
  bool any_rejected = false;
  bool any_conditional = false;
  int next_id = 0;

  void reject(NodeReport& r, const std::string& verdict, const std::string& why) {
    r.verdict = verdict;
    r.detail = why;
    any_rejected = true;
  }

  static std::vector<Formula> replace_at(const std::vector<Formula>& fs,
                                         std::size_t i, Formula f) {
    std::vector<Formula> out = fs;
    out[i] = std::move(f);
    return out;
  }

  static std::vector<Formula> insert_after(const std::vector<Formula>& fs,
                                           std::size_t i, Formula f) {
    std::vector<Formula> out = fs;
    out.insert(out.begin() + static_cast<long>(i) + 1, std::move(f));
    return out;
  }

  static std::vector<Formula> erase_at(const std::vector<Formula>& fs,
                                       std::size_t i) {
    std::vector<Formula> out = fs;
    out.erase(out.begin() + static_cast<long>(i));
    return out;
  }

  static std::vector<Formula> append(const std::vector<Formula>& fs, Formula f) {
    std::vector<Formula> out = fs;
    out.push_back(std::move(f));
    return out;
  }

  static bool subset_of(const std::vector<Formula>& small,
                        const std::vector<Formula>& big) {
    std::vector<bool> used(big.size(), false);
    for (const auto& f : small) {
      bool found = false;
      for (std::size_t i = 0; i < big.size(); ++i) {
        if (!used[i] && big[i] == f) {
          used[i] = true;
          found = true;
          break;
        }
      }
      if (!found) return false;
    }
    return true;
  }

  void walk(const ProofNode& node) {
    NodeReport r;
    r.id = next_id++;
    r.rule = node.rule;
    r.verdict = "accepted";
    check_node(node, r);
    reports.push_back(r);
    // Children are checked regardless, so every problem in a script is
    // reported in one pass.
    for (const auto& child : node.children) walk(child);
  }

  // True when the expected premises match the children's goals exactly.
  bool match_premises(const ProofNode& node, const std::vector<Sequent>& expected,
                      NodeReport& r) {
    if (node.children.size() != expected.size()) {
      reject(r, "mismatch",
             "expected " + std::to_string(expected.size()) + " premises, found " +
                 std::to_string(node.children.size()));
      return false;
    }
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (!(node.children[i].goal == expected[i])) {
        reject(r, "mismatch",
               "premise " + std::to_string(i) + " should be: " + print(expected[i]));
        return false;
      }
    }
    return true;
  }

  bool index_ok(const std::vector<Formula>& side, int idx) {
    return idx >= 0 && static_cast<std::size_t>(idx) < side.size();
  }

  void check_node(const ProofNode& node, NodeReport& r) {
    const Sequent& goal = node.goal;
    const std::string& rule = node.rule;
    try {
      if (is_axiom(rule)) {
        r.tier = "axiom";
        if (!node.children.empty())
          return reject(r, "mismatch", "axiom nodes take no premises");
        int at = node.at.empty() ? 0 : node.at[0];
        if (!index_ok(goal.succ, at))
          return reject(r, "mismatch", "position outside the succedent");
        Formula instance = instantiate_axiom(rule, node.inst);
        if (!(goal.succ[static_cast<std::size_t>(at)] == instance))
          return reject(r, "mismatch",
                        "goal formula is not the axiom instance: " + print(instance));
        auto violations = check_side_conditions(rule, node.inst);
        if (!violations.empty()) {
          std::string all;
          for (const auto& v : violations) all += (all.empty() ? "" : "; ") + v;
          return reject(r, "side-condition-failure", all);
        }
        return;
      }

      r.tier = "structural";
      if (rule == "id") {
        if (node.at.size() != 2)
          return reject(r, "mismatch", "id takes an antecedent,succedent index pair");
        if (!index_ok(goal.ante, node.at[0]) || !index_ok(goal.succ, node.at[1]))
          return reject(r, "mismatch", "id position outside the sequent");
        if (!(goal.ante[static_cast<std::size_t>(node.at[0])] ==
              goal.succ[static_cast<std::size_t>(node.at[1])]))
          return reject(r, "mismatch", "antecedent and succedent formulas differ");
        if (!node.children.empty())
          return reject(r, "mismatch", "id takes no premises");
        return;
      }
      if (rule == "cut") {
        const Formula& c = node.inst.formula("C");
        std::vector<Sequent> expected = {
            Sequent{goal.ante, append(goal.succ, c)},
            Sequent{append(goal.ante, c), goal.succ}};
        match_premises(node, expected, r);
        return;
      }
      if (rule == "wk") {
        if (node.children.size() != 1)
          return reject(r, "mismatch", "weakening takes one premise");
        const Sequent& child = node.children[0].goal;
        if (!subset_of(child.ante, goal.ante) || !subset_of(child.succ, goal.succ))
          return reject(r, "mismatch", "premise is not a sub-sequent");
        return;
      }
      if (rule == "andr") {
        int at = node.at.empty() ? 0 : node.at[0];
        if (!index_ok(goal.succ, at))
          return reject(r, "mismatch", "position outside the succedent");
        const Formula& f = goal.succ[static_cast<std::size_t>(at)];
        if (f.kind() != FormulaKind::And)
          return reject(r, "mismatch", "principal formula is not a conjunction");
        std::vector<Sequent> expected = {
            Sequent{goal.ante, replace_at(goal.succ, at, f.left())},
            Sequent{goal.ante, replace_at(goal.succ, at, f.right())}};
        match_premises(node, expected, r);
        return;
      }
      if (rule == "andl") {
        int at = node.at.empty() ? 0 : node.at[0];
        if (!index_ok(goal.ante, at))
          return reject(r, "mismatch", "position outside the antecedent");
        const Formula& f = goal.ante[static_cast<std::size_t>(at)];
        if (f.kind() != FormulaKind::And)
          return reject(r, "mismatch", "principal formula is not a conjunction");
        auto ante = replace_at(goal.ante, at, f.left());
        ante = insert_after(ante, at, f.right());
        match_premises(node, {Sequent{ante, goal.succ}}, r);
        return;
      }
      if (rule == "orr") {
        int at = node.at.empty() ? 0 : node.at[0];
        if (!index_ok(goal.succ, at))
          return reject(r, "mismatch", "position outside the succedent");
        const Formula& f = goal.succ[static_cast<std::size_t>(at)];
        // !( !p & !q )
        if (f.kind() != FormulaKind::Not || f.child().kind() != FormulaKind::And ||
            f.child().left().kind() != FormulaKind::Not ||
            f.child().right().kind() != FormulaKind::Not)
          return reject(r, "mismatch", "principal formula is not a disjunction");
        auto succ = replace_at(goal.succ, at, f.child().left().child());
        succ = insert_after(succ, at, f.child().right().child());
        match_premises(node, {Sequent{goal.ante, succ}}, r);
        return;
      }
      if (rule == "implyr") {
        int at = node.at.empty() ? 0 : node.at[0];
        if (!index_ok(goal.succ, at))
          return reject(r, "mismatch", "position outside the succedent");
        const Formula& f = goal.succ[static_cast<std::size_t>(at)];
        // !( p & !q )
        if (f.kind() != FormulaKind::Not || f.child().kind() != FormulaKind::And ||
            f.child().right().kind() != FormulaKind::Not)
          return reject(r, "mismatch", "principal formula is not an implication");
        std::vector<Sequent> expected = {
            Sequent{append(goal.ante, f.child().left()),
                    replace_at(goal.succ, at, f.child().right().child())}};
        match_premises(node, expected, r);
        return;
      }
      if (rule == "notr") {
        int at = node.at.empty() ? 0 : node.at[0];
        if (!index_ok(goal.succ, at))
          return reject(r, "mismatch", "position outside the succedent");
        const Formula& f = goal.succ[static_cast<std::size_t>(at)];
        if (f.kind() != FormulaKind::Not)
          return reject(r, "mismatch", "principal formula is not a negation");
        std::vector<Sequent> expected = {
            Sequent{append(goal.ante, f.child()), erase_at(goal.succ, at)}};
        match_premises(node, expected, r);
        return;
      }
      if (rule == "notl") {
        int at = node.at.empty() ? 0 : node.at[0];
        if (!index_ok(goal.ante, at))
          return reject(r, "mismatch", "position outside the antecedent");
        const Formula& f = goal.ante[static_cast<std::size_t>(at)];
        if (f.kind() != FormulaKind::Not)
          return reject(r, "mismatch", "principal formula is not a negation");
        std::vector<Sequent> expected = {
            Sequent{erase_at(goal.ante, at), append(goal.succ, f.child())}};
        match_premises(node, expected, r);
        return;
      }
      if (rule == "mp") {
        int at = node.at.empty() ? 0 : node.at[0];
        if (!index_ok(goal.succ, at))
          return reject(r, "mismatch", "position outside the succedent");
        const Formula& p = node.inst.formula("P");
        const Formula& q = goal.succ[static_cast<std::size_t>(at)];
        std::vector<Sequent> expected = {
            Sequent{goal.ante, replace_at(goal.succ, at, Formula::imply(p, q))},
            Sequent{goal.ante, replace_at(goal.succ, at, p)}};
        match_premises(node, expected, r);
        return;
      }
      if (rule == "g") {
        int at = node.at.empty() ? 0 : node.at[0];
        if (!index_ok(goal.succ, at))
          return reject(r, "mismatch", "position outside the succedent");
        const Formula& f = goal.succ[static_cast<std::size_t>(at)];
        if (f.kind() != FormulaKind::Box)
          return reject(r, "mismatch", "principal formula is not a box");
        match_premises(node, {Sequent{{}, {f.body()}}}, r);
        return;
      }
      if (rule == "unfold") {
        int at = node.at.empty() ? 0 : node.at[0];
        if (!index_ok(goal.succ, at))
          return reject(r, "mismatch", "position outside the succedent");
        if (node.children.size() != 1)
          return reject(r, "mismatch", "unfold takes one premise");
        const Sequent& child = node.children[0].goal;
        if (child.ante != goal.ante || child.succ.size() != goal.succ.size())
          return reject(r, "mismatch", "unfold premise reshapes the sequent");
        for (std::size_t i = 0; i < goal.succ.size(); ++i) {
          if (static_cast<int>(i) == at) {
            if (!(ac_normal(child.succ[i]) == ac_normal(goal.succ[i])))
              return reject(r, "mismatch",
                            "formulas differ beyond conjunction reordering");
          } else if (!(child.succ[i] == goal.succ[i])) {
            return reject(r, "mismatch", "side formula changed");
          }
        }
        return;
      }
      if (rule == "foralll") {
        int at = node.at.empty() ? 0 : node.at[0];
        if (!index_ok(goal.ante, at))
          return reject(r, "mismatch", "position outside the antecedent");
        const Formula& f = goal.ante[static_cast<std::size_t>(at)];
        if (f.kind() != FormulaKind::Forall)
          return reject(r, "mismatch", "principal formula is not universal");
        const Term& witness = node.inst.term("e");
        Formula instantiated;
        try {
          instantiated = substitute(f.body(), f.binder(), witness);
        } catch (const DifferentialCapture& e) {
          return reject(r, "mismatch",
                        std::string("inadmissible instantiation: ") + e.what());
        }
        match_premises(
            node, {Sequent{replace_at(goal.ante, at, instantiated), goal.succ}}, r);
        return;
      }
      if (rule == "existsl") {
        int at = node.at.empty() ? 0 : node.at[0];
        if (!index_ok(goal.ante, at))
          return reject(r, "mismatch", "position outside the antecedent");
        const Formula& f = goal.ante[static_cast<std::size_t>(at)];
        // ∃x P desugars to !forall x. !P
        if (f.kind() != FormulaKind::Not ||
            f.child().kind() != FormulaKind::Forall ||
            f.child().body().kind() != FormulaKind::Not)
          return reject(r, "mismatch", "principal formula is not existential");
        const Variable& x = f.child().binder();
        VarSet fv;
        for (std::size_t i = 0; i < goal.ante.size(); ++i) {
          if (static_cast<int>(i) == at) continue;
          VarSet s = free_vars(goal.ante[i]);
          fv.insert(s.begin(), s.end());
        }
        for (const auto& g : goal.succ) {
          VarSet s = free_vars(g);
          fv.insert(s.begin(), s.end());
        }
        if (fv.count(x))
          return reject(r, "side-condition-failure",
                        "witness variable " + x.name() + " is not fresh");
        match_premises(node,
                       {Sequent{replace_at(goal.ante, at, f.child().body().child()),
                                goal.succ}},
                       r);
        return;
      }
      if (rule == "real") {
        if (!node.children.empty())
          return reject(r, "mismatch", "real leaves take no premises");
        Verdict v = oracle.discharge_sequent(goal);
        if (v.status == VerdictStatus::Valid) {
          r.tier = v.method;
          r.detail = v.detail;
          if (v.method != "ideal-membership") any_conditional = true;
          return;
        }
        if (v.status == VerdictStatus::Falsified) {
          std::string cex;
          if (v.counterexample) {
            for (const auto& [var, val] : *v.counterexample)
              cex += (cex.empty() ? "" : ", ") + var.name() + "=" +
                     std::to_string(val);
          }
          return reject(r, "rejected", "falsified: " + cex);
        }
        return reject(r, "rejected", "oracle verdict unknown: " + v.detail);
      }
      if (rule == "assume") {
        if (!node.children.empty())
          return reject(r, "mismatch", "assumed leaves take no premises");
        if (!cfg.allow_assumed)
          return reject(r, "rejected", "assumed leaf forbidden by oracle policy");
        r.tier = "assumed";
        any_conditional = true;
        return;
      }
      if (rule == "open") {
        r.tier = "open";
        return reject(r, "rejected", "open premise");
      }
      reject(r, "rejected", "unknown rule " + rule);
    } catch (const Error& e) {
      reject(r, "mismatch", e.what());
    }
  }
};

}  // namespace

std::string to_string(OverallStatus s) {
  switch (s) {
    case OverallStatus::Proved: return "proved";
    case OverallStatus::Conditional: return "conditional";
    case OverallStatus::Rejected: return "rejected";
  }
  return "?";
}

CheckReport check(const ProofScript& script, Oracle& oracle,
                  const KernelConfig& cfg) {
  Checker checker{oracle, cfg, {}, false, false, 0};
  checker.walk(script);
  CheckReport report;
  report.nodes = std::move(checker.reports);
  if (checker.any_rejected)
    report.status = OverallStatus::Rejected;
  else if (checker.any_conditional)
    report.status = OverallStatus::Conditional;
  else
    report.status = OverallStatus::Proved;
  return report;
}

}  // namespace dal
