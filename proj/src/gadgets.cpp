#include "gadgetforge/gadgets.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gadgetforge/errors.hpp"

namespace gadgetforge {

PauliString Interaction::string() const
{
    std::uint64_t x = 0, z = 0, seen = 0;
    for (const auto& f : factors) {
        if (f.support() & seen) throw ValidationError("interaction factors overlap");
        seen |= f.support();
        x |= f.x_mask();
        z |= f.z_mask();
    }
    return PauliString::from_masks(x, z);
}

int Interaction::body() const { return string().weight(); }

OperatorSum TargetSpec::operator_sum() const
{
    std::vector<PauliTerm> t = h_else.terms();
    for (const auto& it : interactions) t.push_back({it.alpha, it.string()});
    return OperatorSum(n_qubits(), t);
}

double TargetSpec::sum_abs_alpha() const
{
    double s = 0.0;
    for (const auto& it : interactions) s += std::abs(it.alpha);
    return s;
}

void TargetSpec::validate() const
{
    for (const auto& it : interactions) {
        if (!std::isfinite(it.alpha)) throw ValidationError("interaction coefficient is not finite");
        if (it.factors.empty()) throw ValidationError("interaction has no factors");
        for (const auto& f : it.factors)
            if (f.is_identity()) throw ValidationError("interaction factor is the identity");
        if (it.string().max_qubit() >= n_qubits()) throw ValidationError("interaction exceeds the register");
    }
}

TargetSpec make_target(int n_qubits, const std::vector<Interaction>& interactions, const OperatorSum* h_else)
{
    TargetSpec t;
    t.h_else = h_else ? *h_else : OperatorSum(n_qubits);
    if (t.h_else.n_qubits() != n_qubits) throw ValidationError("H_else register mismatch");
    t.interactions = interactions;
    t.validate();
    return t;
}

// ---------------------------------------------------------------------------

namespace {

OperatorSum op(int n, const PauliString& s, double c = 1.0) { return OperatorSum::term(n, c, s); }
OperatorSum x_on(int n, int q) { return op(n, PauliString::single(q, PauliAxis::X)); }
OperatorSum p0(int n, int q) { return projector_term(n, q, 0); }
OperatorSum p1(int n, int q) { return projector_term(n, q, 1); }

// Ordered product of strings; the accumulated phase must be real.
OperatorSum chain(int n, const std::vector<PauliString>& strings)
{
    std::complex<double> phase = 1.0;
    PauliString acc;
    for (const auto& s : strings) {
        const auto p = multiply(acc, s);
        phase *= p.phase;
        acc = p.product;
    }
    if (std::abs(phase.imag()) > 0.5) throw std::domain_error("string product is anti-Hermitian");
    return op(n, acc, phase.real());
}

void require_delta(double delta)
{
    if (!(delta > 0.0) || !std::isfinite(delta)) throw ValidationError("delta must be positive");
}

const Interaction& single_interaction(const TargetSpec& t, std::size_t n_factors, const char* who)
{
    t.validate();
    if (t.interactions.size() != 1)
        throw ValidationError(std::string(who) + " gadget needs exactly one interaction term");
    const auto& it = t.interactions.front();
    if (it.factors.size() != n_factors)
        throw ValidationError(std::string(who) + " gadget needs " + std::to_string(n_factors) + " factors");
    (void)it.string();
    return it;
}

void require_single_qubit(const Interaction& it)
{
    for (const auto& f : it.factors)
        if (f.weight() != 1) throw ValidationError("factors must be single-qubit Paulis");
    (void)it.string();
}

GadgetBuild finish(const TargetSpec& t, int n_total, std::vector<std::pair<std::string, int>> anc, double delta,
                   const OperatorSum& v, int cap)
{
    GadgetBuild g;
    g.penalty = OperatorSum(n_total);
    OperatorSum ground = OperatorSum::identity(n_total);
    for (const auto& a : anc) {
        g.penalty += delta * p1(n_total, a.second);
        ground = ground * p0(n_total, a.second);
    }
    g.perturbation = v;
    g.total = g.penalty + v;
    g.ancillas = std::move(anc);
    g.delta = delta;
    g.target = t.operator_sum();
    g.effective_target = g.target.widened(n_total) * ground;
    g.system_qubits = t.n_qubits();
    g.locality_cap = std::max(cap, locality(t.h_else));
    return g;
}

} // namespace

GadgetBuild build_subdivision_gadget(const TargetSpec& t, double delta)
{
    require_delta(delta);
    const Interaction& it = single_interaction(t, 2, "subdivision");
    const int n = t.n_qubits();
    const int N = n + 1;
    const int w = n;
    const double r = std::sqrt(std::abs(it.alpha) * delta / 2.0);
    const double kappa = sgn(it.alpha) * r;
    const double lambda = -r;
    const OperatorSum A = op(N, it.factors[0]);
    const OperatorSum B = op(N, it.factors[1]);

    OperatorSum v = t.h_else.widened(N);
    v += (1.0 / delta) * (kappa * kappa * (A * A) + lambda * lambda * (B * B)) * p0(N, w);
    v += (kappa * A + lambda * B) * x_on(N, w);
    const int cap = std::max(it.factors[0].weight(), it.factors[1].weight()) + 1;
    return finish(t, N, {{"w", w}}, delta, v, cap);
}

GadgetBuild build_parallel_subdivision_gadget(const TargetSpec& t, double delta)
{
    require_delta(delta);
    t.validate();
    if (t.interactions.empty()) throw ValidationError("parallel subdivision needs at least one term");
    const int n = t.n_qubits();
    const int m = static_cast<int>(t.interactions.size());
    const int N = n + m;
    OperatorSum v = t.h_else.widened(N);
    std::vector<std::pair<std::string, int>> anc;
    int cap = 0;
    for (int i = 0; i < m; ++i) {
        const auto& it = t.interactions[i];
        if (it.factors.size() != 2) throw ValidationError("parallel subdivision terms need an A|B split");
        (void)it.string();
        const int w = n + i;
        anc.emplace_back("w" + std::to_string(i), w);
        const double r = std::sqrt(std::abs(it.alpha) * delta / 2.0);
        const double kappa = sgn(it.alpha) * r;
        const double lambda = -r;
        const OperatorSum A = op(N, it.factors[0]);
        const OperatorSum B = op(N, it.factors[1]);
        v += (1.0 / delta) * (kappa * kappa * (A * A) + lambda * lambda * (B * B));
        v += (kappa * A + lambda * B) * x_on(N, w);
        cap = std::max(cap, std::max(it.factors[0].weight(), it.factors[1].weight()) + 1);
    }
    return finish(t, N, anc, delta, v, cap);
}

GadgetBuild build_three_to_two_gadget(const TargetSpec& t, double delta, ThreeToTwoVariant variant)
{
    require_delta(delta);
    const Interaction& it = single_interaction(t, 3, "3-to-2");
    require_single_qubit(it);
    const int n = t.n_qubits();
    const int N = n + 1;
    const int w = n;
    const double s = sgn(it.alpha);
    const double a3 = std::cbrt(std::abs(it.alpha) / 2.0);
    const OperatorSum A = op(N, it.factors[0]);
    const OperatorSum B = op(N, it.factors[1]);
    const OperatorSum C = op(N, it.factors[2]);

    OperatorSum v = t.h_else.widened(N);
    if (variant == ThreeToTwoVariant::Improved) {
        const double kappa = s * a3 * std::pow(delta, 0.75);
        const double lambda = a3 * std::pow(delta, 0.75);
        const double mu = a3 * std::sqrt(delta);
        const double kl2 = kappa * kappa + lambda * lambda;
        v += mu * C * p1(N, w);
        v += (kappa * A + lambda * B) * x_on(N, w);
        // V1
        v += (kl2 / delta) * p0(N, w);
        v += (2.0 * kappa * lambda / delta) * (A * B);
        v += (-kl2 * mu / (delta * delta)) * C * p0(N, w);
        // V2
        const double pre = -2.0 * kappa * lambda * s / (delta * delta * delta);
        v += pre * (kl2 * p0(N, w) + 2.0 * kappa * lambda * (A * B));
    } else {
        // r = 2/3 couplings scaled so that 2 kappa lambda mu / Delta^2 = alpha.
        const double d23 = std::pow(delta, 2.0 / 3.0);
        const double kappa = -s * a3 * d23;
        const double lambda = a3 * d23;
        const double mu = -a3 * d23;
        const OperatorSum D = kappa * A + lambda * B;
        v += mu * C * p1(N, w);
        v += D * x_on(N, w);
        v += (1.0 / delta) * (D * D);
        v += (-(kappa * kappa + lambda * lambda) * mu / (delta * delta)) * C;
    }
    return finish(t, N, {{"w", w}}, delta, v, 2);
}

GadgetBuild build_fifth_order_zzz_gadget(const TargetSpec& t, double delta)
{
    require_delta(delta);
    const Interaction& it = single_interaction(t, 3, "fifth-order");
    require_single_qubit(it);
    for (const auto& f : it.factors)
        if (f.axis_at(f.max_qubit()) != PauliAxis::Z) throw ValidationError("fifth-order gadget targets Z Z Z");
    const int n = t.n_qubits();
    const int N = n + 1;
    const int w = n;
    const double mu = sgn(it.alpha) * std::pow(std::abs(it.alpha) * std::pow(delta, 4) / 6.0, 0.2);
    const OperatorSum Zi = op(N, it.factors[0]);
    const OperatorSum Zj = op(N, it.factors[1]);
    const OperatorSum Zk = op(N, it.factors[2]);
    const OperatorSum S = Zi + Zj + Zk;
    const double d2 = delta * delta, d3 = d2 * delta, d4 = d3 * delta;
    const double mu2 = mu * mu, mu3 = mu2 * mu, mu4 = mu3 * mu, mu5 = mu4 * mu;

    OperatorSum v = t.h_else.widened(N);
    v += mu * S * p1(N, w);
    v += mu * x_on(N, w);
    v += (mu2 / delta) * p0(N, w);
    v += (-(mu3 / d2 + 7.0 * mu5 / d4)) * S * p0(N, w);
    v += (mu4 / d3) * (OperatorSum::identity(N, 3.0) + 2.0 * (Zi * Zj) + 2.0 * (Zi * Zk) + 2.0 * (Zj * Zk));
    return finish(t, N, {{"w", w}}, delta, v, 2);
}

GadgetBuild build_yy_gadget(const TargetSpec& t, double delta)
{
    require_delta(delta);
    const Interaction& it = single_interaction(t, 2, "YY");
    require_single_qubit(it);
    for (const auto& f : it.factors)
        if (f.axis_at(f.max_qubit()) != PauliAxis::Y) throw ValidationError("YY gadget targets Y Y");
    const int n = t.n_qubits();
    const int N = n + 1;
    const int w = n;
    const int q1 = it.factors[0].max_qubit();
    const int q2 = it.factors[1].max_qubit();
    const double s = sgn(it.alpha);
    const double kappa = std::pow(std::abs(it.alpha) * delta * delta * delta / 4.0, 0.25);
    const OperatorSum X1 = op(N, PauliString::single(q1, PauliAxis::X));
    const OperatorSum X2 = op(N, PauliString::single(q2, PauliAxis::X));
    const OperatorSum Z1 = op(N, PauliString::single(q1, PauliAxis::Z));
    const OperatorSum Z2 = op(N, PauliString::single(q2, PauliAxis::Z));

    OperatorSum v = t.h_else.widened(N);
    v += kappa * (Z1 + Z2) * p1(N, w);
    v += kappa * (X1 - s * X2) * x_on(N, w);
    v += (2.0 * kappa * kappa / delta) * (p0(N, w) - s * (X1 * X2));
    v += (-4.0 * std::pow(kappa, 4) / (delta * delta * delta)) * (Z1 * Z2);
    return finish(t, N, {{"w", w}}, delta, v, 2);
}

CommutationProfile commutation_profile(const Interaction& ti, const Interaction& tj)
{
    for (const auto* it : {&ti, &tj}) {
        if (it->factors.size() != 3) throw ValidationError("commutation profile needs 3-body terms");
        require_single_qubit(*it);
    }
    const bool aa = !commutes(ti.factors[0], tj.factors[0]);
    const bool bb = !commutes(ti.factors[1], tj.factors[1]);
    const bool ab = !commutes(ti.factors[0], tj.factors[1]);
    const bool ba = !commutes(ti.factors[1], tj.factors[0]);
    CommutationProfile p;
    p.s2 = aa && bb;
    p.s11 = aa != bb;
    p.s12 = ab || ba;
    p.s1 = std::min(p.s11 + p.s12, 1);
    p.s0 = (p.s1 == 0 && p.s2 == 0) ? 1 : 0;
    return p;
}

GadgetBuild build_parallel_three_to_two_gadget(const TargetSpec& t, double delta,
                                               const ParallelThreeToTwoOptions& opt)
{
    require_delta(delta);
    t.validate();
    const int m = static_cast<int>(t.interactions.size());
    if (m == 0) throw ValidationError("parallel 3-to-2 needs at least one term");
    for (const auto& it : t.interactions) {
        if (it.factors.size() != 3) throw ValidationError("parallel 3-to-2 terms need an A|B|C split");
        require_single_qubit(it);
        const int a = it.factors[0].max_qubit(), b = it.factors[1].max_qubit(), c = it.factors[2].max_qubit();
        if (!(a < b && b < c)) throw ValidationError("parallel 3-to-2 needs qubit order a < b < c in every term");
    }
    const bool improved = opt.variant == ThreeToTwoVariant::Improved;

    struct Pair {
        int i, j;
        CommutationProfile prof;
    };
    std::vector<Pair> subgadget_pairs;
    if (improved && opt.include_v3 && opt.include_4local_gadgets)
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) {
                const auto prof = commutation_profile(t.interactions[i], t.interactions[j]);
                if (prof.s2) subgadget_pairs.push_back({i, j, prof});
            }

    const int n = t.n_qubits();
    const int N = n + m + static_cast<int>(subgadget_pairs.size());
    const double d2 = delta * delta, d3 = d2 * delta;

    std::vector<double> kappa(m), lambda(m), mu(m);
    std::vector<OperatorSum> A, B, C, D;
    for (int i = 0; i < m; ++i) {
        const auto& it = t.interactions[i];
        const double s = sgn(it.alpha);
        const double a3 = std::cbrt(std::abs(it.alpha) / 2.0);
        if (improved) {
            kappa[i] = s * a3 * std::pow(delta, 0.75);
            lambda[i] = a3 * std::pow(delta, 0.75);
            mu[i] = a3 * std::sqrt(delta);
        } else {
            const double d23 = std::pow(delta, 2.0 / 3.0);
            kappa[i] = -s * a3 * d23;
            lambda[i] = a3 * d23;
            mu[i] = -a3 * d23;
        }
        A.push_back(op(N, it.factors[0]));
        B.push_back(op(N, it.factors[1]));
        C.push_back(op(N, it.factors[2]));
        D.push_back(kappa[i] * A[i] + lambda[i] * B[i]);
    }

    OperatorSum v = t.h_else.widened(N);
    std::vector<std::pair<std::string, int>> anc;
    for (int i = 0; i < m; ++i) {
        const int u = n + i;
        anc.emplace_back("u" + std::to_string(i), u);
        v += mu[i] * C[i] * p1(N, u);
        v += D[i] * x_on(N, u);
        // V1
        const OperatorSum D2 = D[i] * D[i];
        v += (1.0 / delta) * D2;
        v += (-(kappa[i] * kappa[i] + lambda[i] * lambda[i]) * mu[i] / d2) * C[i];
        // V2
        if (improved) v += (-1.0 / d3) * (D2 * D2);
    }

    if (improved && opt.include_v3) {
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                if (i == j) continue;
                const auto prof = commutation_profile(t.interactions[i], t.interactions[j]);
                const double s1 = opt.s1_mode == S1Mode::Count ? prof.s1_count() : prof.s1;
                const double kk = kappa[i] * kappa[j];
                v += OperatorSum::identity(N, -s1 * kk * kk / d3);
                if (prof.s2) {
                    v += OperatorSum::identity(N, -2.0 * kk * kk / d3);
                    if (!opt.include_4local_gadgets)
                        v += (2.0 * kk * lambda[i] * lambda[j] / d3) *
                             chain(N, {t.interactions[i].factors[0], t.interactions[j].factors[0],
                                       t.interactions[i].factors[1], t.interactions[j].factors[1]});
                }
            }
    }

    // Appendix-B sub-gadgets: each generates the 4-local A_i A_j B_i B_j
    // compensation at fourth order through its own ancilla.
    std::vector<OperatorSum> flips;
    for (std::size_t p = 0; p < subgadget_pairs.size(); ++p) {
        const int i = subgadget_pairs[p].i, j = subgadget_pairs[p].j;
        const int u = n + m + static_cast<int>(p);
        anc.emplace_back("u" + std::to_string(i) + "_" + std::to_string(j), u);
        const double lam_i = -lambda[i];
        const OperatorSum F = kappa[i] * A[i] + lambda[j] * B[j];
        const OperatorSum E = kappa[j] * A[j] + lam_i * B[i];
        const OperatorSum F2 = F * F;
        v += F * x_on(N, u);
        v += E * p1(N, u);
        v += (1.0 / delta) * F2;
        v += (1.0 / d3) * ((kappa[j] * kappa[j] + lam_i * lam_i) * F2 -
                           2.0 * kappa[j] * lam_i * (kappa[i] * kappa[i] + lambda[j] * lambda[j]) * (A[j] * B[i]));
        v += (-1.0 / d3) * (F2 * F2);
        flips.push_back(F);
    }
    // Fourth-order interference of each sub-gadget with every other flip
    // channel: +(i[F, G])^2 / (2 Delta^3), cancelled here.
    for (std::size_t a = 0; a < flips.size(); ++a) {
        auto cancel = [&](const OperatorSum& g) {
            const OperatorSum c = i_commutator(flips[a], g);
            v += (-0.5 / d3) * (c * c);
        };
        for (int k = 0; k < m; ++k) cancel(D[k]);
        for (std::size_t b = a + 1; b < flips.size(); ++b) cancel(flips[b]);
    }
    return finish(t, N, anc, delta, v, 2);
}

bool in_transverse_ising_family(const PauliString& s)
{
    const int w = s.weight();
    if (w == 0) return true;
    if (s.y_count() > 0) return false;
    if (w == 1) return true;
    return w == 2 && s.x_mask() == 0;
}

bool in_zzxx_family(const PauliString& s)
{
    const int w = s.weight();
    if (w == 0) return true;
    if (s.y_count() > 0) return false;
    if (w == 1) return true;
    return w == 2 && (s.x_mask() == 0 || s.z_mask() == 0);
}

} // namespace gadgetforge
