#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gadgetforge/errors.hpp"
#include "gadgetforge/gadgets.hpp"
#include "gadgetforge/search.hpp"
#include "gadgetforge/spectral.hpp"
#include "oracle.hpp"

using namespace gadgetforge;

namespace {

PauliString P(const char* s) { return PauliString::parse(s); }

TargetSpec zz(double a) { return make_target(2, {{a, {P("Z0"), P("Z1")}}}); }
TargetSpec zzz(double a) { return make_target(3, {{a, {P("Z0"), P("Z1"), P("Z2")}}}); }

// Smallest Delta satisfying the closing 3-to-2 error inequality at equality,
// solved as a quadratic in sqrt(Delta) by bisection.
double three_to_two_reference(double alpha, double h, double eps)
{
    const double a = std::abs(alpha);
    const double mz = h + a + eps;
    const double eta = h + std::pow(2.0, 2.0 / 3.0) * std::pow(a, 4.0 / 3.0);
    const double xi = std::pow(2.0, -1.0 / 3.0) * std::pow(a, 1.0 / 3.0) + std::pow(2.0, 1.0 / 3.0) * std::pow(a, 2.0 / 3.0);
    const double g = std::pow(2.0, 4.0 / 3.0) * std::pow(a, 2.0 / 3.0);
    auto excess = [&](double x) {
        const double den = x * x - xi * x - (mz + eta);
        return g * ((mz + eta + xi * xi) * x + xi * (mz + eta)) - eps * den;
    };
    double lo = xi + std::sqrt(mz + eta), hi = 1e9;  // den > 0 above lo
    for (int i = 0; i < 400; ++i) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) > 0.0 ? lo : hi) = mid;
    }
    return hi * hi;
}

bool all_in(const OperatorSum& op, bool (*family)(const PauliString&))
{
    for (const auto& t : op.terms())
        if (!family(t.string)) return false;
    return true;
}

} // namespace

// ---- closed-form bounds ---------------------------------------------------------

TEST(Bounds, Subdivision)
{
    EXPECT_NEAR(subdivision_delta_bound(1.0, 0.0, 0.05), 41.0 * 1.05, 1e-12);
    EXPECT_NEAR(subdivision_delta_bound(-1.0, 0.0, 0.05), 43.05, 1e-12);
    EXPECT_NEAR(subdivision_delta_bound(0.0, 0.0, 0.05), 0.05, 1e-15);
    EXPECT_NEAR(subdivision_delta_bound(0.0, 2.0, 0.05), 4.05, 1e-15);
    EXPECT_THROW(subdivision_delta_bound(1.0, 0.0, 0.0), ValidationError);
    EXPECT_THROW(subdivision_delta_bound(1.0, -1.0, 0.1), ValidationError);
}

TEST(Bounds, Ot06Subdivision)
{
    const double ref = std::pow(1.0 + std::sqrt(2.0), 6) / 0.0025;
    EXPECT_NEAR(ot06_subdivision_delta_bound(1.0, 0.0, 0.05), ref, 1e-9 * ref);
    EXPECT_NEAR(ref, 79198.0, 1.0);
    EXPECT_EQ(ot06_subdivision_delta_bound(0.0, 0.0, 0.05), 0.0);
    EXPECT_LT(subdivision_delta_bound(1.0, 0.0, 0.05), ot06_subdivision_delta_bound(1.0, 0.0, 0.05));

    // exact-norm overload agrees when H_else vanishes
    EXPECT_NEAR(ot06_subdivision_delta_bound(1.0, OperatorSum(2), 0.05), ref, 1e-9 * ref);

    // ratio to the improved bound grows like 1/eps
    std::vector<std::pair<double, double>> pts;
    for (double e : log_grid(1e-4, 1e-2, 9))
        pts.emplace_back(std::log(1.0 / e),
                         std::log(ot06_subdivision_delta_bound(1.0, 0.0, e) / subdivision_delta_bound(1.0, 0.0, e)));
    EXPECT_NEAR(fit_slope(pts).slope, 1.0, 0.02);
}

TEST(Bounds, ParallelSubdivision)
{
    EXPECT_NEAR(parallel_subdivision_delta_bound({1.0}, 0.0, 0.05), 41.0 * 2.05, 1e-12);
    EXPECT_GT(parallel_subdivision_delta_bound({1.0}, 0.0, 0.05), subdivision_delta_bound(1.0, 0.0, 0.05));
    EXPECT_NEAR(parallel_subdivision_delta_bound({1.0, 1.0}, 0.0, 0.05), 161.0 * 4.05, 1e-10);
    EXPECT_NEAR(parallel_subdivision_delta_bound({0.0, 0.0}, 0.0, 0.05), 0.05, 1e-15);
}

TEST(Bounds, ThreeToTwo)
{
    for (double a : {0.1, 0.5, 1.0, 2.0})
        for (double h : {0.0, 0.3})
            for (double e : {0.001, 0.01, 0.1}) {
                const double ref = three_to_two_reference(a, h, e);
                EXPECT_NEAR(three_to_two_delta_bound(a, h, e), ref, 1e-8 * ref) << a << " " << h << " " << e;
            }
    EXPECT_NEAR(three_to_two_delta_bound(1.0, 0.0, 0.01), 2.96e6, 0.05e6);

    const double r = three_to_two_delta_bound(1.0, 0.0, 1e-4) / three_to_two_delta_bound(1.0, 0.0, 2e-4);
    EXPECT_NEAR(r, 4.0, 0.05);
    double prev = INFINITY;
    for (double e : log_grid(1e-4, 0.5, 30)) {
        const double b = three_to_two_delta_bound(1.0, 0.0, e);
        EXPECT_LT(b, prev);
        prev = b;
    }
}

TEST(Bounds, Exponent)
{
    EXPECT_NEAR(f_exponent(0.75, ThreeToTwoVariant::Improved), -0.5, 1e-15);
    EXPECT_NEAR(f_exponent(2.0 / 3.0, ThreeToTwoVariant::OT06), -1.0 / 3.0, 1e-15);
    EXPECT_NEAR(f_exponent(1.0 - 1e-9, ThreeToTwoVariant::Improved), 1.0, 1e-8);
    // the minimizers
    for (double r = 0.51; r < 0.99; r += 0.01) {
        EXPECT_GE(f_exponent(r, ThreeToTwoVariant::Improved), -0.5 - 1e-12);
        EXPECT_GE(f_exponent(r, ThreeToTwoVariant::OT06), -1.0 / 3.0 - 1e-12);
    }
    EXPECT_THROW(f_exponent(0.5, ThreeToTwoVariant::Improved), ValidationError);
}

// ---- subdivision ---------------------------------------------------------------

TEST(Subdivision, AnalyticalGapMeetsEpsilon)
{
    const GadgetBuild g = build_subdivision_gadget(zz(1.0), 43.05);
    EXPECT_LE(operator_norm(g.perturbation), g.delta / 2.0);
    EXPECT_LE(spectral_error(g).max_error, 0.05);
    EXPECT_EQ(g.ancilla_count(), 1);
    EXPECT_EQ(g.n_qubits(), 3);
}

TEST(Subdivision, RandomInstancesWithinBound)
{
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
        const double a = u(rng);
        const double eps = 0.01 + 0.1 * std::abs(u(rng));
        const OperatorSum he = oracle::random_operator(rng, 3, 3, 0.3);
        const TargetSpec t = make_target(3, {{a, {P("X0 Z2"), P("Y1")}}}, &he);
        const GadgetBuild g = build_subdivision_gadget(t, subdivision_delta_bound(a, operator_norm(he), eps));
        EXPECT_LE(spectral_error(g).max_error, eps) << "trial " << trial;
        EXPECT_LE(locality(g.total), 3);
    }
}

TEST(Subdivision, ZeroCoupling)
{
    const OperatorSum he = OperatorSum::term(2, 0.3, P("X0"));
    const TargetSpec t = make_target(2, {{0.0, {P("Z0"), P("Z1")}}}, &he);
    const GadgetBuild g = build_subdivision_gadget(t, 5.0);
    EXPECT_EQ(g.perturbation, he.widened(3));
    EXPECT_LT(spectral_error(g).max_error, 1e-14);
}

TEST(Subdivision, FourBodyTermBecomesThreeLocal)
{
    const TargetSpec t = make_target(4, {{0.5, {P("X0 X1"), P("X2 X3")}}});
    const GadgetBuild g = build_subdivision_gadget(t, subdivision_delta_bound(0.5, 0.0, 0.05));
    EXPECT_LE(locality(g.total), 3);
    EXPECT_LE(spectral_error(g).max_error, 0.05);
}

TEST(Subdivision, RejectsBadInput)
{
    EXPECT_THROW(build_subdivision_gadget(zz(1.0), 0.0), ValidationError);
    EXPECT_THROW(build_subdivision_gadget(zzz(1.0), 10.0), ValidationError);
}

// ---- parallel subdivision -------------------------------------------------------

TEST(ParallelSubdivision, PenaltySpectrum)
{
    const TargetSpec t = make_target(4, {{0.3, {P("Z0"), P("Z1")}}, {-0.2, {P("X2"), P("X3")}}});
    const GadgetBuild g = build_parallel_subdivision_gadget(t, 7.0);
    ASSERT_EQ(g.ancilla_count(), 2);
    const Eigen::VectorXd h = spectrum(g.penalty);
    ASSERT_EQ(h.size(), 64);
    for (Eigen::Index i = 0; i < 16; ++i) EXPECT_NEAR(h(i), 0.0, 1e-12);
    for (Eigen::Index i = 16; i < 48; ++i) EXPECT_NEAR(h(i), 7.0, 1e-12);
    for (Eigen::Index i = 48; i < 64; ++i) EXPECT_NEAR(h(i), 14.0, 1e-12);
}

TEST(ParallelSubdivision, BoundMeetsEpsilon)
{
    // second iteration of the 7-body reduction: two terms sharing no qubits
    const double a = 5e-3, eps = 5e-4;
    const TargetSpec t = make_target(7, {{a, {P("X0 X1 X2"), P("X3 X4")}}, {a, {P("X5"), P("X6")}}});
    const GadgetBuild g = build_parallel_subdivision_gadget(t, parallel_subdivision_delta_bound({a, a}, 0.0, eps));
    EXPECT_LE(spectral_error(g).max_error, eps);
}

// ---- 3-to-2 ----------------------------------------------------------------------

TEST(ThreeToTwo, AnalyticalGapMeetsEpsilon)
{
    const double d = three_to_two_delta_bound(1.0, 0.0, 0.01);
    const GadgetBuild g = build_three_to_two_gadget(zzz(1.0), d);
    EXPECT_LE(locality(g.total), 2);
    EXPECT_LE(spectral_error(g).max_error, 0.01);
}

TEST(ThreeToTwo, NegativeCouplingAndHelse)
{
    const OperatorSum he = OperatorSum::term(3, 0.2, P("X1")) + OperatorSum::term(3, -0.1, P("Z0 Z2"));
    const TargetSpec t = make_target(3, {{-0.6, {P("X0"), P("Z1"), P("Y2")}}}, &he);
    const GadgetBuild g = build_three_to_two_gadget(t, three_to_two_delta_bound(-0.6, operator_norm(he), 0.02));
    EXPECT_LE(spectral_error(g).max_error, 0.02);
    EXPECT_LE(locality(g.total), 2);
}

TEST(ThreeToTwo, Ot06VariantIsTwoLocalAndConverges)
{
    const GadgetBuild a = build_three_to_two_gadget(zzz(1.0), 1e6, ThreeToTwoVariant::OT06);
    const GadgetBuild b = build_three_to_two_gadget(zzz(1.0), 1e8, ThreeToTwoVariant::OT06);
    EXPECT_LE(locality(a.total), 2);
    const double ea = spectral_error(a).max_error, eb = spectral_error(b).max_error;
    EXPECT_LT(eb, ea);
    // error ~ Delta^(-1/3)
    EXPECT_NEAR(std::log(ea / eb) / std::log(100.0), 1.0 / 3.0, 0.05);
}

// ---- fifth order and YY -----------------------------------------------------------

TEST(FifthOrder, HardwareFamilyAndCoupling)
{
    for (double a : {0.1, -0.4}) {
        const double d = 50.0;
        const GadgetBuild g = build_fifth_order_zzz_gadget(zzz(a), d);
        EXPECT_TRUE(all_in(g.total, in_transverse_ising_family));
        // the ancilla field is mu X_w
        const double mu = g.perturbation.coeff(P("X3"));
        EXPECT_NEAR(6.0 * std::pow(mu, 5) / std::pow(d, 4), a, 1e-12 * std::abs(a));
    }
}

TEST(FifthOrder, ErrorShrinksWithGap)
{
    const double e1 = spectral_error(build_fifth_order_zzz_gadget(zzz(0.1), 1e3)).max_error;
    const double e2 = spectral_error(build_fifth_order_zzz_gadget(zzz(0.1), 1e5)).max_error;
    EXPECT_LT(e2, e1);
}

TEST(YY, HardwareFamily)
{
    const GadgetBuild g = build_yy_gadget(make_target(2, {{0.3, {P("Y0"), P("Y1")}}}), 100.0);
    EXPECT_TRUE(all_in(g.total, in_zzxx_family));
    EXPECT_LE(locality(g.total), 2);
}

TEST(YY, SignOfCouplingIsReproduced)
{
    // H_else breaks the +alpha / -alpha spectral symmetry
    const OperatorSum he = OperatorSum::term(2, 0.15, P("Z0")) + OperatorSum::term(2, 0.3, P("Z1")) +
                           OperatorSum::term(2, 0.1, P("X0 X1"));
    for (double a : {0.5, -0.5}) {
        const TargetSpec t = make_target(2, {{a, {P("Y0"), P("Y1")}}}, &he);
        const GadgetBuild g = build_yy_gadget(t, 1e8);
        const OperatorSum flipped = he + OperatorSum::term(2, -a, P("Y0 Y1"));
        const double err = spectral_error(g).max_error;
        const double err_flip = spectral_error(g, flipped).max_error;
        EXPECT_LT(err, 0.01) << a;
        EXPECT_GT(err_flip, 0.1) << a;
    }
}

TEST(Families, Predicates)
{
    EXPECT_TRUE(in_transverse_ising_family(P("I")));
    EXPECT_TRUE(in_transverse_ising_family(P("X3")));
    EXPECT_TRUE(in_transverse_ising_family(P("Z0 Z4")));
    EXPECT_FALSE(in_transverse_ising_family(P("X0 X1")));
    EXPECT_FALSE(in_transverse_ising_family(P("Y0")));
    EXPECT_TRUE(in_zzxx_family(P("X0 X1")));
    EXPECT_FALSE(in_zzxx_family(P("X0 Z1")));
    EXPECT_FALSE(in_zzxx_family(P("Z0 Z1 Z2")));
}

// ---- parallel 3-to-2 -------------------------------------------------------------

TEST(CommutationProfile, Cases)
{
    auto it = [](const char* a, const char* b, const char* c) { return Interaction{1.0, {P(a), P(b), P(c)}}; };
    const auto p0 = commutation_profile(it("X0", "Z1", "Z2"), it("X3", "X4", "Z5"));
    EXPECT_EQ(p0.s0, 1);
    EXPECT_EQ(p0.s1 + p0.s2, 0);
    const auto p1 = commutation_profile(it("X0", "Z1", "Z2"), it("Z0", "Z1", "X2"));
    EXPECT_EQ(p1.s11, 1);
    EXPECT_EQ(p1.s2, 0);
    const auto p2 = commutation_profile(it("X0", "X1", "Z5"), it("Z0", "Z1", "X5"));
    EXPECT_EQ(p2.s2, 1);
    EXPECT_EQ(p2.s0, 0);
}

TEST(ParallelThreeToTwo, SingleTermHasNoCrossCompensation)
{
    ParallelThreeToTwoOptions with, without;
    without.include_v3 = false;
    const GadgetBuild a = build_parallel_three_to_two_gadget(zzz(0.5), 1e5, with);
    const GadgetBuild b = build_parallel_three_to_two_gadget(zzz(0.5), 1e5, without);
    EXPECT_EQ(a.total, b.total);
    EXPECT_LE(locality(a.total), 2);
    EXPECT_LT(spectral_error(a).max_error, spectral_error(build_three_to_two_gadget(zzz(0.5), 1e3)).max_error);
}

TEST(ParallelThreeToTwo, CompensationMatters)
{
    const TargetSpec t = make_target(3, {{0.1, {P("X0"), P("Z1"), P("Z2")}}, {-0.2, {P("X0"), P("X1"), P("Z2")}}});
    ParallelThreeToTwoOptions off;
    off.include_v3 = false;
    const GadgetBuild on_g = build_parallel_three_to_two_gadget(t, 1.1e5);
    EXPECT_LE(locality(on_g.total), 2);
    EXPECT_LE(spectral_error(on_g).max_error, 0.01);
    const double e7 = spectral_error(build_parallel_three_to_two_gadget(t, 1e7, off)).max_error;
    const double e9 = spectral_error(build_parallel_three_to_two_gadget(t, 1e9, off)).max_error;
    EXPECT_GT(e7, 0.05);
    EXPECT_NEAR(e7, e9, 0.01);
}

TEST(ParallelThreeToTwo, AnticommutingPairUsesFourLocalSubGadgets)
{
    const TargetSpec t = make_target(3, {{1.0, {P("Z0"), P("Z1"), P("Z2")}}, {-1.0, {P("X0"), P("X1"), P("X2")}}});
    const GadgetBuild g = build_parallel_three_to_two_gadget(t, 1e8);
    EXPECT_LE(locality(g.total), 2);
    EXPECT_LT(spectral_error(g).max_error, 0.02);

    ParallelThreeToTwoOptions no4;
    no4.include_4local_gadgets = false;
    const GadgetBuild raw = build_parallel_three_to_two_gadget(t, 1e8, no4);
    EXPECT_LT(raw.n_qubits(), g.n_qubits());
}
