#pragma once

#include <string>

#include "dal/syntax.hpp"

namespace dal {

// Concrete-syntax printing. parse(print(t)) is structurally the identity;
// sugar (=, <, !=, ->, |, exists, ==[..], a - b, -e) is reconstructed only
// where reparsing yields the identical core tree.
std::string print(const Term& t);
std::string print(const Formula& f);
std::string print(const Program& p);
std::string print(const Sequent& s);
std::string print(const VarTuple& xs);
std::string print(const TermVec& es);

}  // namespace dal
