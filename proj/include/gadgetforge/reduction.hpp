#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gadgetforge/gadget_build.hpp"
#include "gadgetforge/search.hpp"
#include "gadgetforge/spectral.hpp"

namespace gadgetforge {

// 0 for k = 3, ceil(log2(k - 2)) for k >= 4.
int iterations_needed(int k);

// A takes the ceil(k/2) lowest-indexed factors.
std::pair<PauliString, PauliString> partition_term(const PauliString& term);
// Same rule with qubits ordered by rank[q] (ties broken by index).
std::pair<PauliString, PauliString> partition_term(const PauliString& term, const std::vector<double>& rank);

enum class DeltaMode { Analytical, Optimized };

struct ReductionOptions {
    DeltaMode mode = DeltaMode::Analytical;
    NumericPolicy policy{};
    double tol_rel = 1e-5;
    int max_probes = 60;
    // Order qubits along the chain with each new ancilla placed at its cut,
    // so later cuts fall between the same neighbours as in the tree diagram.
    bool chain_order = true;
};

struct ReductionIteration {
    struct Split {
        double alpha = 0.0;
        PauliString a;
        PauliString b;
        int ancilla = 0;
    };
    std::vector<Split> partitions;
    double delta = 0.0;
    double analytical_delta = 0.0;
    double h_else_norm = 0.0;
    int ancillas_added = 0;
    int n_qubits = 0;
    double measured_error = 0.0;     // vs the previous iteration
    double error_vs_target = 0.0;    // vs the original target
    std::optional<DeltaSearchResult> search;
};

struct ReductionTrace {
    std::vector<ReductionIteration> iterations;
    double epsilon = 0.0;
    double cumulative_error_budget = 0.0;  // iterations * epsilon
    double measured_cumulative_error = 0.0;
    GadgetBuild final_gadget;              // target is the original Hamiltonian
};

ReductionTrace reduce_k_to_3(const OperatorSum& target, double epsilon, const ReductionOptions& options = {});

double serial_error_budget(const std::vector<double>& per_step_errors);

} // namespace gadgetforge
