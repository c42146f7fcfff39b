#pragma once

#include <string>

#include "gadgetforge/gadgets.hpp"
#include "gadgetforge/pauli.hpp"

namespace gadgetforge {

// JSON operator format:
//   {"n_qubits": 3,
//    "terms": [{"coeff": 0.1, "paulis": [[0, "X"], [1, "Z"], [2, "Z"]]}, ...],
//    "interactions": [{"term": 0, "split": [[0], [1], [2]]}]}
// Each interaction tags one term as a gadget target and lists the qubit
// groups of its factors. Untagged terms form H_else.

OperatorSum parse_operator(const std::string& json_text);
std::string operator_to_json(const OperatorSum& op);

TargetSpec parse_target(const std::string& json_text);
std::string target_to_json(const TargetSpec& target);

TargetSpec load_target(const std::string& path);
void save_target(const TargetSpec& target, const std::string& path);

bool same_target(const TargetSpec& a, const TargetSpec& b);

} // namespace gadgetforge
