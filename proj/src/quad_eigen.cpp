#include "quad_eigen.hpp"

#include <boost/multiprecision/float128.hpp>
#include <Eigen/Eigenvalues>

#include "gadgetforge/errors.hpp"

using quad = boost::multiprecision::float128;

namespace Eigen {

// boost's own Eigen glue predates Eigen 3.4, so spell out the traits here.
template <>
struct NumTraits<quad> : GenericNumTraits<quad> {
    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 1,
        RequireInitialization = 1,
        ReadCost = 1,
        AddCost = 4,
        MulCost = 8
    };
    static quad dummy_precision() { return quad(1e-30); }
    static int digits10() { return 33; }
};

} // namespace Eigen

namespace gadgetforge::detail {

Eigen::VectorXd eigvals_quad(const Eigen::MatrixXd& m)
{
    using MatQ = Eigen::Matrix<quad, Eigen::Dynamic, Eigen::Dynamic>;
    MatQ q = m.cast<quad>();
    Eigen::SelfAdjointEigenSolver<MatQ> es(q, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("binary128 eigensolver did not converge");
    Eigen::VectorXd out(m.rows());
    for (Eigen::Index i = 0; i < m.rows(); ++i) out(i) = static_cast<double>(es.eigenvalues()(i));
    return out;
}

} // namespace gadgetforge::detail
