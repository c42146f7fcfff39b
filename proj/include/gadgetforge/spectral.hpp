#pragma once

#include <vector>

#include <Eigen/Dense>

#include "gadgetforge/gadget_build.hpp"
#include "gadgetforge/pauli.hpp"

namespace gadgetforge {

// Eigenvalue precision. Low-lying levels of a gadget with a penalty of
// 1e12 lose most of their digits in double arithmetic, so small matrices
// are diagonalized in binary128 by default.
enum class Precision { Double, Quad, Auto };

struct NumericPolicy {
    Precision precision = Precision::Auto;
    int quad_max_dim = 128;

    bool use_quad(Eigen::Index dim) const
    {
        return precision == Precision::Quad || (precision == Precision::Auto && dim <= quad_max_dim);
    }
};

struct EigenSystem {
    Eigen::VectorXd eigenvalues;    // ascending
    Eigen::MatrixXcd eigenvectors;  // columns
};

EigenSystem eigh(const Eigen::MatrixXcd& m);
// Ascending eigenvalues only.
Eigen::VectorXd eigvalsh(const Eigen::MatrixXcd& m, const NumericPolicy& policy = {});
Eigen::VectorXd eigvalsh(const Eigen::MatrixXd& m, const NumericPolicy& policy = {});
Eigen::VectorXd spectrum(const OperatorSum& op, const NumericPolicy& policy = {});
// Penalty and perturbation are realized separately and added as matrices,
// so a large gap never shares a Pauli coefficient with O(1) terms.
Eigen::VectorXd spectrum(const GadgetBuild& gadget, const NumericPolicy& policy = {});

double operator_norm(const OperatorSum& op);
double operator_norm(const Eigen::MatrixXcd& m);

struct SubspaceSplit {
    double cutoff = 0.0;
    Eigen::MatrixXcd projector_minus;
    Eigen::MatrixXcd projector_plus;
    Eigen::MatrixXcd basis_minus;   // isometry onto L-
    Eigen::MatrixXcd basis_plus;    // isometry onto L+, columns are eigenvectors of H
    Eigen::VectorXd levels_plus;    // eigenvalue of H for each basis_plus column
    Eigen::VectorXd levels_minus;
};

// Split by the eigenvalues of H at the cutoff. Diagonal H keeps the
// computational basis.
SubspaceSplit split_subspaces(const OperatorSum& H, double cutoff);

// Diagonal of G+(z) over ancilla strings x (index = bit string), zero at x = 0.
Eigen::VectorXd penalty_resolvent_plus(double z, int m, double delta);

enum class SigmaMode { Exact, Series };

struct SelfEnergyEval {
    double z = 0.0;
    SigmaMode mode = SigmaMode::Exact;
    int order = 0;
    Eigen::MatrixXcd sigma;  // on L-, in split.basis_minus coordinates
    double deviation = 0.0;  // || sigma - H_eff restricted to L- ||
};

SelfEnergyEval self_energy_exact(const OperatorSum& H_tilde, const SubspaceSplit& split, double z,
                                 const OperatorSum& H_eff);
SelfEnergyEval self_energy_series(const OperatorSum& H, const OperatorSum& V, const SubspaceSplit& split, double z,
                                  int order, const OperatorSum& H_eff);
// || V-+ (G+ V+)^k G+ V+- ||
double high_order_term_norm(const OperatorSum& H, const OperatorSum& V, const SubspaceSplit& split, double z, int k);

struct SpectralReport {
    std::vector<double> gadget_levels;
    std::vector<double> target_levels;
    std::vector<double> per_level_error;
    double max_error = 0.0;
};

SpectralReport compare_levels(const Eigen::VectorXd& gadget_sorted, const Eigen::VectorXd& target_sorted);
SpectralReport spectral_error(const GadgetBuild& gadget, const OperatorSum& target, const NumericPolicy& policy = {});
SpectralReport spectral_error(const GadgetBuild& gadget, const NumericPolicy& policy = {});

std::vector<double> z_grid(double max_z, int points = 201);

struct Theorem1Result {
    bool holds = false;
    bool norm_condition = false;
    double v_norm = 0.0;
    double delta = 0.0;
    double worst_z = 0.0;
    double worst_deviation = 0.0;
};

// H must have ground energy 0; its gap is read off its spectrum.
Theorem1Result theorem1_check(const OperatorSum& H, const OperatorSum& V, const OperatorSum& H_eff, double epsilon,
                              const std::vector<double>& zs);

} // namespace gadgetforge
