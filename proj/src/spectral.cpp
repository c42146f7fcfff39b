#include "gadgetforge/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "gadgetforge/errors.hpp"
#include "quad_eigen.hpp"

namespace gadgetforge {

namespace {

constexpr Eigen::Index max_dense_dim = Eigen::Index{1} << 14;

double max_abs(const Eigen::MatrixXcd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

void check_hermitian(const Eigen::MatrixXcd& m)
{
    if (m.rows() != m.cols()) throw ValidationError("matrix is not square");
    if (m.rows() > max_dense_dim) throw DimensionError("matrix dimension exceeds 2^14");
    const double scale = std::max(max_abs(m), std::numeric_limits<double>::min());
    const double asym = max_abs(m - m.adjoint());
    if (asym > 1e-10 * scale) throw ValidationError("matrix is not Hermitian");
}

Eigen::MatrixXcd hermitian_part(const Eigen::MatrixXcd& m) { return 0.5 * (m + m.adjoint()); }

bool is_diagonal(const Eigen::MatrixXcd& m)
{
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            if (i != j && m(i, j) != std::complex<double>(0.0)) return false;
    return true;
}

Eigen::MatrixXcd restrict_to(const Eigen::MatrixXcd& m, const Eigen::MatrixXcd& left, const Eigen::MatrixXcd& right)
{
    return left.adjoint() * m * right;
}

Eigen::VectorXcd plus_resolvent(const SubspaceSplit& split, double z)
{
    Eigen::VectorXcd g(split.levels_plus.size());
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        const double d = z - split.levels_plus(i);
        if (std::abs(d) <= 1e-14 * std::max(1.0, std::abs(split.levels_plus(i))))
            throw NumericalError("z = " + std::to_string(z) + " collides with an excited penalty level");
        g(i) = 1.0 / d;
    }
    return g;
}

} // namespace

EigenSystem eigh(const Eigen::MatrixXcd& m)
{
    check_hermitian(m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitian_part(m));
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
    return {es.eigenvalues(), es.eigenvectors()};
}

Eigen::VectorXd eigvalsh(const Eigen::MatrixXd& m, const NumericPolicy& policy)
{
    if (m.rows() != m.cols()) throw ValidationError("matrix is not square");
    if (m.rows() > max_dense_dim) throw DimensionError("matrix dimension exceeds 2^14");
    const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
    if (policy.use_quad(m.rows())) return detail::eigvals_quad(sym);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
    return es.eigenvalues();
}

Eigen::VectorXd eigvalsh(const Eigen::MatrixXcd& m, const NumericPolicy& policy)
{
    check_hermitian(m);
    const Eigen::MatrixXcd h = hermitian_part(m);
    if (h.imag().cwiseAbs().maxCoeff() == 0.0) return eigvalsh(Eigen::MatrixXd(h.real()), policy);
    if (policy.use_quad(2 * m.rows())) {
        // [[Re, -Im], [Im, Re]] carries every eigenvalue twice.
        const Eigen::Index n = m.rows();
        Eigen::MatrixXd r(2 * n, 2 * n);
        r << h.real(), -h.imag(), h.imag(), h.real();
        const Eigen::VectorXd doubled = detail::eigvals_quad(r);
        Eigen::VectorXd out(n);
        for (Eigen::Index i = 0; i < n; ++i) out(i) = 0.5 * (doubled(2 * i) + doubled(2 * i + 1));
        return out;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
    return es.eigenvalues();
}

Eigen::VectorXd spectrum(const OperatorSum& op, const NumericPolicy& policy)
{
    if (op.is_real()) return eigvalsh(to_real_matrix(op), policy);
    return eigvalsh(to_matrix(op), policy);
}

Eigen::VectorXd spectrum(const GadgetBuild& g, const NumericPolicy& policy)
{
    if (g.penalty.n_qubits() != g.perturbation.n_qubits()) return spectrum(g.total, policy);
    if (g.penalty.is_real() && g.perturbation.is_real())
        return eigvalsh(Eigen::MatrixXd(to_real_matrix(g.penalty) + to_real_matrix(g.perturbation)), policy);
    return eigvalsh(Eigen::MatrixXcd(to_matrix(g.penalty) + to_matrix(g.perturbation)), policy);
}

double operator_norm(const OperatorSum& op)
{
    if (op.empty()) return 0.0;
    const Eigen::VectorXd ev = spectrum(op, {Precision::Double});
    return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

double operator_norm(const Eigen::MatrixXcd& m)
{
    if (m.size() == 0) return 0.0;
    const Eigen::VectorXd ev = eigvalsh(m, {Precision::Double});
    return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

SubspaceSplit split_subspaces(const OperatorSum& H, double cutoff)
{
    const Eigen::MatrixXcd h = to_matrix(H);
    const Eigen::Index dim = h.rows();
    Eigen::VectorXd levels;
    Eigen::MatrixXcd vecs;
    if (is_diagonal(h)) {
        levels = h.diagonal().real();
        vecs = Eigen::MatrixXcd::Identity(dim, dim);
    } else {
        const EigenSystem es = eigh(h);
        levels = es.eigenvalues;
        vecs = es.eigenvectors;
    }
    std::vector<Eigen::Index> lo, hi;
    for (Eigen::Index i = 0; i < dim; ++i) (levels(i) <= cutoff ? lo : hi).push_back(i);

    SubspaceSplit s;
    s.cutoff = cutoff;
    s.basis_minus.resize(dim, static_cast<Eigen::Index>(lo.size()));
    s.basis_plus.resize(dim, static_cast<Eigen::Index>(hi.size()));
    s.levels_minus.resize(static_cast<Eigen::Index>(lo.size()));
    s.levels_plus.resize(static_cast<Eigen::Index>(hi.size()));
    for (std::size_t k = 0; k < lo.size(); ++k) {
        s.basis_minus.col(k) = vecs.col(lo[k]);
        s.levels_minus(k) = levels(lo[k]);
    }
    for (std::size_t k = 0; k < hi.size(); ++k) {
        s.basis_plus.col(k) = vecs.col(hi[k]);
        s.levels_plus(k) = levels(hi[k]);
    }
    s.projector_minus = s.basis_minus * s.basis_minus.adjoint();
    s.projector_plus = s.basis_plus * s.basis_plus.adjoint();
    return s;
}

Eigen::VectorXd penalty_resolvent_plus(double z, int m, double delta)
{
    if (m < 0 || m > 20) throw ValidationError("ancilla count out of range");
    const Eigen::Index n = Eigen::Index{1} << m;
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
    for (Eigen::Index x = 1; x < n; ++x) {
        const double level = static_cast<double>(__builtin_popcountll(static_cast<unsigned long long>(x))) * delta;
        const double d = z - level;
        if (std::abs(d) <= 1e-14 * std::max(1.0, std::abs(level)))
            throw NumericalError("z = " + std::to_string(z) + " collides with penalty level " + std::to_string(level));
        g(x) = 1.0 / d;
    }
    return g;
}

SelfEnergyEval self_energy_exact(const OperatorSum& H_tilde, const SubspaceSplit& split, double z,
                                 const OperatorSum& H_eff)
{
    const Eigen::MatrixXcd ht = to_matrix(H_tilde);
    const Eigen::Index dim = ht.rows();
    if (split.basis_minus.rows() != dim) throw ValidationError("split does not match operator dimension");
    const auto& wm = split.basis_minus;
    const auto& wp = split.basis_plus;
    // Schur complement: H-- + H-+ (z - H++)^-1 H+-
    Eigen::MatrixXcd sigma = restrict_to(ht, wm, wm);
    if (wp.cols() > 0) {
        const Eigen::MatrixXcd h_pm = restrict_to(ht, wp, wm);
        const Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(wp.cols(), wp.cols()) * z - restrict_to(ht, wp, wp);
        Eigen::FullPivLU<Eigen::MatrixXcd> lu(a);
        if (!lu.isInvertible()) throw NumericalError("z - H++ is singular at z = " + std::to_string(z));
        sigma += h_pm.adjoint() * lu.solve(h_pm);
    }

    SelfEnergyEval out;
    out.z = z;
    out.mode = SigmaMode::Exact;
    out.sigma = hermitian_part(sigma);
    const Eigen::MatrixXcd eff = restrict_to(to_matrix(H_eff), split.basis_minus, split.basis_minus);
    out.deviation = operator_norm(hermitian_part(out.sigma - eff));
    return out;
}

SelfEnergyEval self_energy_series(const OperatorSum& H, const OperatorSum& V, const SubspaceSplit& split, double z,
                                  int order, const OperatorSum& H_eff)
{
    if (order < 1) throw ValidationError("series order must be >= 1");
    const Eigen::MatrixXcd h = to_matrix(H);
    const Eigen::MatrixXcd v = to_matrix(V);
    const auto& wm = split.basis_minus;
    const auto& wp = split.basis_plus;

    Eigen::MatrixXcd sigma = restrict_to(h, wm, wm) + restrict_to(v, wm, wm);
    if (order >= 2 && wp.cols() > 0) {
        const Eigen::VectorXcd g = plus_resolvent(split, z);
        const Eigen::MatrixXcd v_mp = restrict_to(v, wm, wp);
        const Eigen::MatrixXcd v_pp = restrict_to(v, wp, wp);
        // right = (G+ V+)^k G+ V+-
        Eigen::MatrixXcd right = g.asDiagonal() * v_mp.adjoint();
        for (int k = 0; k + 2 <= order; ++k) {
            sigma += v_mp * right;
            right = g.asDiagonal() * (v_pp * right);
        }
    }
    SelfEnergyEval out;
    out.z = z;
    out.mode = SigmaMode::Series;
    out.order = order;
    out.sigma = hermitian_part(sigma);
    const Eigen::MatrixXcd eff = restrict_to(to_matrix(H_eff), wm, wm);
    out.deviation = operator_norm(hermitian_part(out.sigma - eff));
    return out;
}

double high_order_term_norm([[maybe_unused]] const OperatorSum& H, const OperatorSum& V, const SubspaceSplit& split, double z, int k)
{
    if (k < 0) throw ValidationError("k must be non-negative");
    if (split.basis_plus.cols() == 0 || V.empty()) return 0.0;
    const Eigen::MatrixXcd v = to_matrix(V);
    const Eigen::VectorXcd g = plus_resolvent(split, z);
    const Eigen::MatrixXcd v_mp = restrict_to(v, split.basis_minus, split.basis_plus);
    const Eigen::MatrixXcd v_pp = restrict_to(v, split.basis_plus, split.basis_plus);
    Eigen::MatrixXcd right = g.asDiagonal() * v_mp.adjoint();
    for (int i = 0; i < k; ++i) right = g.asDiagonal() * (v_pp * right);
    const Eigen::MatrixXcd term = v_mp * right;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(term);
    return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

SpectralReport compare_levels(const Eigen::VectorXd& gadget_sorted, const Eigen::VectorXd& target_sorted)
{
    const Eigen::Index d = target_sorted.size();
    if (gadget_sorted.size() < d) throw ValidationError("gadget has fewer levels than the target");
    SpectralReport r;
    r.gadget_levels.assign(gadget_sorted.data(), gadget_sorted.data() + d);
    r.target_levels.assign(target_sorted.data(), target_sorted.data() + d);
    r.per_level_error.resize(static_cast<std::size_t>(d));
    for (Eigen::Index j = 0; j < d; ++j) {
        r.per_level_error[j] = std::abs(gadget_sorted(j) - target_sorted(j));
        r.max_error = std::max(r.max_error, r.per_level_error[j]);
    }
    return r;
}

SpectralReport spectral_error(const GadgetBuild& gadget, const OperatorSum& target, const NumericPolicy& policy)
{
    if (target.n_qubits() != gadget.system_qubits)
        throw ValidationError("target has " + std::to_string(target.n_qubits()) + " qubits, gadget system has " +
                              std::to_string(gadget.system_qubits));
    return compare_levels(spectrum(gadget, policy), spectrum(target, policy));
}

SpectralReport spectral_error(const GadgetBuild& gadget, const NumericPolicy& policy)
{
    return spectral_error(gadget, gadget.target, policy);
}

std::vector<double> z_grid(double max_z, int points)
{
    if (points < 1) throw ValidationError("z grid needs at least one point");
    if (points == 1) return {0.0};
    std::vector<double> zs(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) zs[i] = -max_z + 2.0 * max_z * i / (points - 1);
    return zs;
}

Theorem1Result theorem1_check(const OperatorSum& H, const OperatorSum& V, const OperatorSum& H_eff, double epsilon,
                              const std::vector<double>& zs)
{
    const Eigen::VectorXd hl = spectrum(H, {Precision::Double});
    const double scale = std::max(1.0, std::abs(hl(hl.size() - 1)));
    if (std::abs(hl(0)) > 1e-9 * scale) throw ValidationError("penalty Hamiltonian must have ground energy 0");
    double gap = 0.0;
    for (Eigen::Index i = 0; i < hl.size(); ++i)
        if (hl(i) > 1e-9 * scale) {
            gap = hl(i);
            break;
        }

    Theorem1Result r;
    r.delta = gap;
    r.v_norm = operator_norm(V);
    r.norm_condition = gap > 0.0 ? r.v_norm <= gap / 2.0 : V.empty();
    const SubspaceSplit split = split_subspaces(H, gap > 0.0 ? gap / 2.0 : 0.0);
    const OperatorSum total = H + V;
    r.worst_deviation = 0.0;
    r.worst_z = zs.empty() ? 0.0 : zs.front();
    for (double z : zs) {
        double dev;
        try {
            dev = self_energy_exact(total, split, z, H_eff).deviation;
        } catch (const NumericalError&) {
            dev = std::numeric_limits<double>::infinity();
        }
        if (dev > r.worst_deviation || !std::isfinite(dev)) {
            r.worst_deviation = dev;
            r.worst_z = z;
        }
    }
    // rounding slack: analytical gaps saturate the deviation bound exactly
    r.holds = r.norm_condition && r.worst_deviation <= epsilon * (1.0 + 1e-9);
    return r;
}

} // namespace gadgetforge
