#pragma once

#include <string>
#include <vector>

#include "dal/syntax.hpp"

namespace dal {

Term parse_term(const std::string& text);
Formula parse_formula(const std::string& text);
Program parse_program(const std::string& text);
Sequent parse_sequent(const std::string& text);

// Payload forms used by proof-script files.
Variable parse_variable(const std::string& text);
VarTuple parse_var_tuple(const std::string& text);    // [x, y]
TermVec parse_term_vec(const std::string& text);      // [e1, e2]
std::vector<TermVec> parse_term_matrix(const std::string& text);  // [[..],[..]]

// A `system name { states ...; params ...; eq ...; }` declaration from a
// .dal file. Each `eq lhs = rhs;` is stored as the term lhs - rhs.
struct SystemDecl {
  std::string name;
  std::vector<Variable> states;
  std::vector<Variable> params;
  TermVec equations;
};

std::vector<SystemDecl> parse_system_file(const std::string& text);

}  // namespace dal
