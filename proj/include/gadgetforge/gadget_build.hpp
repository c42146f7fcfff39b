#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gadgetforge/pauli.hpp"

namespace gadgetforge {

// H~ = H + V with ancillas appended after the system register.
struct GadgetBuild {
    OperatorSum penalty;
    OperatorSum perturbation;
    OperatorSum total;
    std::vector<std::pair<std::string, int>> ancillas;
    double delta = 0.0;
    OperatorSum target;            // H_targ on the system register
    OperatorSum effective_target;  // H_targ tensored with the ancilla ground projector
    int system_qubits = 0;
    int locality_cap = 0;

    int n_qubits() const { return total.n_qubits(); }
    int ancilla_count() const { return static_cast<int>(ancillas.size()); }
};

} // namespace gadgetforge
