#pragma once

#include <vector>

#include "gadgetforge/gadget_build.hpp"
#include "gadgetforge/pauli.hpp"

namespace gadgetforge {

// alpha * factors[0] * factors[1] * ... with factors on disjoint qubits.
struct Interaction {
    double alpha = 0.0;
    std::vector<PauliString> factors;

    PauliString string() const;
    int body() const;
};

struct TargetSpec {
    OperatorSum h_else;
    std::vector<Interaction> interactions;

    int n_qubits() const { return h_else.n_qubits(); }
    OperatorSum operator_sum() const;
    double sum_abs_alpha() const;
    void validate() const;
};

TargetSpec make_target(int n_qubits, const std::vector<Interaction>& interactions,
                       const OperatorSum* h_else = nullptr);

inline double sgn(double x) { return x < 0.0 ? -1.0 : 1.0; }

// ---- closed-form bounds -------------------------------------------------

double subdivision_delta_bound(double alpha, double h_else_norm, double epsilon);
double ot06_subdivision_delta_bound(double alpha, double h_else_norm, double epsilon);
// Same comparison bound with ||H_else + |alpha| I|| evaluated exactly.
double ot06_subdivision_delta_bound(double alpha, const OperatorSum& h_else, double epsilon);
double parallel_subdivision_delta_bound(const std::vector<double>& alphas, double h_else_norm, double epsilon);
double three_to_two_delta_bound(double alpha, double h_else_norm, double epsilon);

enum class ThreeToTwoVariant { Improved, OT06 };

double f_exponent(double r, ThreeToTwoVariant variant);

struct HighOrderBound {
    double order_bound = 0.0;  // bound on the order-(k+2) term
    double tail_bound = 0.0;   // bound summed over orders >= k+2
    double v_s = 0.0;
    double v_f = 0.0;
    bool converges = false;    // 2m v_f < Delta - max_z and m v_f / v_s > 1
};

HighOrderBound parallel_high_order_bound(int k, int m, const std::vector<double>& alphas, double h_else_norm,
                                         double delta, double max_z);

// ---- constructors -------------------------------------------------------

GadgetBuild build_subdivision_gadget(const TargetSpec& target, double delta);
GadgetBuild build_parallel_subdivision_gadget(const TargetSpec& target, double delta);
GadgetBuild build_three_to_two_gadget(const TargetSpec& target, double delta,
                                      ThreeToTwoVariant variant = ThreeToTwoVariant::Improved);
GadgetBuild build_fifth_order_zzz_gadget(const TargetSpec& target, double delta);
GadgetBuild build_yy_gadget(const TargetSpec& target, double delta);

struct CommutationProfile {
    int s0 = 0;
    int s11 = 0;
    int s12 = 0;
    int s1 = 0;  // indicator: min(s11 + s12, 1)
    int s2 = 0;

    int s1_count() const { return s11 + s12; }
};

CommutationProfile commutation_profile(const Interaction& term_i, const Interaction& term_j);

enum class S1Mode { Indicator, Count };

struct ParallelThreeToTwoOptions {
    bool include_v3 = true;
    bool include_4local_gadgets = true;
    S1Mode s1_mode = S1Mode::Indicator;
    // OT06 runs the older construction side by side: r = 2/3 couplings,
    // no V2 and no cross-gadget compensation.
    ThreeToTwoVariant variant = ThreeToTwoVariant::Improved;
};

GadgetBuild build_parallel_three_to_two_gadget(const TargetSpec& target, double delta,
                                               const ParallelThreeToTwoOptions& options = {});

// Pauli-string families (identity included) used for hardware-form checks.
bool in_transverse_ising_family(const PauliString& s);   // I, X_i, Z_i, Z_i Z_j
bool in_zzxx_family(const PauliString& s);               // I, X_i, Z_i, X_i X_j, Z_i Z_j

} // namespace gadgetforge
