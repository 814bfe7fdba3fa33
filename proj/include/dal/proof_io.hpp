#pragma once

#include <string>

#include "dal/kernel.hpp"

namespace dal {

// .dalproof format: one parenthesized record per node,
//   (node <id> :goal "<sequent>" :rule <id> :at <i>[,<j>]
//         :inst {<mv> = <payload>, ...} :kids [<id>, ...])
// with payloads in concrete syntax and the root at id 0.
std::string write_proof(const ProofScript& script);
ProofScript read_proof(const std::string& text);

std::string check_report_json(const CheckReport& report);

}  // namespace dal
