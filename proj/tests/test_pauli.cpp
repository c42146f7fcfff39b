#include <gtest/gtest.h>

#include <cstdlib>
#include <random>

#include "gadgetforge/errors.hpp"
#include "gadgetforge/pauli.hpp"
#include "oracle.hpp"

using namespace gadgetforge;

namespace {

PauliString P(const char* s) { return PauliString::parse(s); }

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

} // namespace

TEST(PauliString, ParseAndPrint)
{
    EXPECT_EQ(P("X0 Z1 Y3").str(), "X0 Z1 Y3");
    EXPECT_EQ(P("X0Z1Y3"), P("X0 Z1 Y3"));
    EXPECT_TRUE(P("I").is_identity());
    EXPECT_TRUE(P("").is_identity());
    EXPECT_EQ(P("Y5").y_count(), 1);
    EXPECT_EQ(P("X0 Y2 Z7").weight(), 3);
    EXPECT_EQ(P("X0 Y2 Z7").max_qubit(), 7);
    EXPECT_EQ(P("X0 Y2 Z7").axis_at(2), PauliAxis::Y);
    EXPECT_THROW(P("Q0"), ValidationError);
    EXPECT_THROW(P("X0 Z0"), ValidationError);
    EXPECT_THROW(PauliString::single(64, PauliAxis::X), ValidationError);
}

TEST(PauliString, SingleQubitProducts)
{
    auto xy = multiply(P("X0"), P("Y0"));
    EXPECT_EQ(xy.product, P("Z0"));
    EXPECT_EQ(xy.phase, std::complex<double>(0, 1));

    auto xx = multiply(P("X0"), P("X0"));
    EXPECT_TRUE(xx.product.is_identity());
    EXPECT_EQ(xx.phase, std::complex<double>(1, 0));

    auto yx = multiply(P("Y0"), P("X0"));
    EXPECT_EQ(yx.phase, std::complex<double>(0, -1));
}

TEST(PauliString, ProductPhaseMatchesDenseProduct)
{
    // X0 Z1 * Z0 Z1 against a 4x4 multiplication
    auto r = multiply(P("X0 Z1"), P("Z0 Z1"));
    EXPECT_EQ(r.product, P("Y0"));
    const oracle::Mat lhs = oracle::pauli("XZ") * oracle::pauli("ZZ");
    EXPECT_LT(max_abs(lhs - r.phase * oracle::pauli("YI")), 1e-15);
}

TEST(PauliString, RandomProductsAgreeWithKroneckerOracle)
{
    std::mt19937 rng(7);
    for (int trial = 0; trial < 400; ++trial) {
        const int n = 1 + trial % 4;
        const PauliString a = oracle::random_string(rng, n, 0.25);
        const PauliString b = oracle::random_string(rng, n, 0.25);
        const auto r = multiply(a, b);
        const oracle::Mat lhs = oracle::pauli(oracle::axes_of(a, n)) * oracle::pauli(oracle::axes_of(b, n));
        const oracle::Mat rhs = r.phase * oracle::pauli(oracle::axes_of(r.product, n));
        ASSERT_EQ(max_abs(lhs - rhs), 0.0) << a.str() << " * " << b.str();

        const bool c = max_abs(lhs - oracle::pauli(oracle::axes_of(b, n)) * oracle::pauli(oracle::axes_of(a, n))) == 0.0;
        ASSERT_EQ(commutes(a, b), c) << a.str() << " , " << b.str();
    }
}

TEST(PauliString, Commutation)
{
    EXPECT_FALSE(commutes(P("X0"), P("Z0")));
    EXPECT_TRUE(commutes(P("X0 X1"), P("Z0 Z1")));
    EXPECT_TRUE(commutes(P("X0"), P("Z1")));
    EXPECT_FALSE(commutes(P("X0 Y1"), P("Z0 Y1")));
}

TEST(OperatorSum, Canonicalization)
{
    const OperatorSum z0 = OperatorSum::term(2, 1.0, P("Z0"));
    const OperatorSum x1 = OperatorSum::term(2, 1.0, P("X1"));
    EXPECT_TRUE((2.0 * z0 + (-2.0) * z0).empty());
    EXPECT_TRUE(scale(z0, 0.0).empty());
    const OperatorSum s = (z0 + x1) + z0;
    EXPECT_EQ(s.size(), 2u);
    EXPECT_DOUBLE_EQ(s.coeff(P("Z0")), 2.0);
    EXPECT_DOUBLE_EQ(s.coeff(P("X1")), 1.0);
    EXPECT_DOUBLE_EQ(s.coeff(P("Y1")), 0.0);

    // tiny coefficients are dropped
    const OperatorSum t = z0 + OperatorSum::term(2, 1e-14, P("X0"));
    EXPECT_EQ(t.size(), 1u);

    // construction order does not matter
    const OperatorSum a(3, {{1.0, P("Z0")}, {2.0, P("X1 X2")}, {0.5, P("I")}});
    const OperatorSum b(3, {{2.0, P("X1 X2")}, {0.5, P("I")}, {1.0, P("Z0")}});
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.str(), b.str());
}

TEST(OperatorSum, RejectsStringsOutsideRegister)
{
    EXPECT_THROW(OperatorSum(2, {{1.0, P("X2")}}), ValidationError);
    EXPECT_THROW(OperatorSum::term(1, 1.0, P("Z0")) + OperatorSum::term(2, 1.0, P("Z1")), ValidationError);
}

TEST(OperatorSum, ProductMatchesDenseOracle)
{
    std::mt19937 rng(11);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 1 + trial % 3;
        const OperatorSum a = oracle::random_operator(rng, n, 4);
        const OperatorSum b = oracle::random_operator(rng, n, 4);
        const oracle::Mat da = oracle::dense(a), db = oracle::dense(b);
        EXPECT_LT(max_abs(oracle::dense(a + b) - (da + db)), 1e-12);
        EXPECT_LT(max_abs(oracle::dense(i_commutator(a, b)) - std::complex<double>(0, 1) * (da * db - db * da)),
                  1e-11);
        const OperatorSum sq = a * a;
        EXPECT_LT(max_abs(oracle::dense(sq) - da * da), 1e-11);
    }
}

TEST(OperatorSum, NonHermitianProductThrows)
{
    const OperatorSum x = OperatorSum::term(1, 1.0, P("X0"));
    const OperatorSum z = OperatorSum::term(1, 1.0, P("Z0"));
    EXPECT_THROW(x * z, std::domain_error);
}

TEST(OperatorSum, Projectors)
{
    const OperatorSum p1 = projector_term(1, 0, 1);
    EXPECT_DOUBLE_EQ(p1.coeff(P("I")), 0.5);
    EXPECT_DOUBLE_EQ(p1.coeff(P("Z0")), -0.5);
    const Eigen::MatrixXcd m = to_matrix(p1);
    EXPECT_EQ(m(0, 0), std::complex<double>(0.0));
    EXPECT_EQ(m(1, 1), std::complex<double>(1.0));

    const OperatorSum sum = projector_term(3, 1, 0) + projector_term(3, 1, 1);
    EXPECT_EQ(sum, OperatorSum::identity(3));
    const OperatorSum p = projector_term(3, 2, 0);
    EXPECT_EQ(p * p, p);
    EXPECT_THROW(projector_term(2, 0, 2), ValidationError);
}

TEST(OperatorSum, MatrixRealization)
{
    Eigen::MatrixXcd z = to_matrix(OperatorSum::term(1, 1.0, P("Z0")));
    EXPECT_EQ(z(0, 0), std::complex<double>(1.0));
    EXPECT_EQ(z(1, 1), std::complex<double>(-1.0));
    Eigen::MatrixXcd x = to_matrix(OperatorSum::term(1, 1.0, P("X0")));
    EXPECT_EQ(x(0, 1), std::complex<double>(1.0));
    EXPECT_EQ(x(1, 0), std::complex<double>(1.0));
    Eigen::MatrixXcd zz = to_matrix(OperatorSum::term(2, 0.5, P("Z0 Z1")));
    EXPECT_EQ(zz.diagonal().real(), Eigen::Vector4d(0.5, -0.5, -0.5, 0.5));

    std::mt19937 rng(3);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 1 + trial % 4;
        const OperatorSum op = oracle::random_operator(rng, n, 6);
        EXPECT_LT(max_abs(to_matrix(op) - oracle::dense(op)), 1e-13);
        if (op.is_real()) {
            EXPECT_LT(max_abs(to_real_matrix(op).cast<std::complex<double>>() - oracle::dense(op)), 1e-13);
        }
    }
    EXPECT_THROW(to_real_matrix(OperatorSum::term(1, 1.0, P("Y0"))), std::domain_error);
}

TEST(OperatorSum, Locality)
{
    EXPECT_EQ(locality(OperatorSum::term(3, 1.0, P("Z0 Z1 Z2"))), 3);
    EXPECT_EQ(locality(OperatorSum::identity(3)), 0);
    EXPECT_EQ(locality(OperatorSum(3)), 0);
}

TEST(OperatorSum, Widening)
{
    const OperatorSum a = OperatorSum::term(2, 0.3, P("X0 Z1"));
    const OperatorSum w = a.widened(4);
    EXPECT_EQ(w.n_qubits(), 4);
    EXPECT_DOUBLE_EQ(w.coeff(P("X0 Z1")), 0.3);
    EXPECT_THROW(a.widened(1), ValidationError);
}

TEST(OperatorSum, DimensionCap)
{
    ::setenv("GADGETFORGE_MAX_QUBITS", "3", 1);
    EXPECT_EQ(max_dense_qubits(), 3);
    EXPECT_THROW(to_matrix(OperatorSum::identity(4)), DimensionError);
    ::setenv("GADGETFORGE_MAX_QUBITS", "junk", 1);
    EXPECT_THROW(max_dense_qubits(), ValidationError);
    ::unsetenv("GADGETFORGE_MAX_QUBITS");
    EXPECT_EQ(max_dense_qubits(), 14);
}
