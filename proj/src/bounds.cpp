#include <cmath>
#include <limits>
#include <string>

#include "gadgetforge/errors.hpp"
#include "gadgetforge/gadgets.hpp"
#include "gadgetforge/spectral.hpp"

namespace gadgetforge {

namespace {

void require_eps(double epsilon)
{
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ValidationError("epsilon must be positive");
}

void require_norm(double h)
{
    if (!(h >= 0.0) || !std::isfinite(h)) throw ValidationError("||H_else|| must be non-negative");
}

double binom(int n, int k)
{
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

} // namespace

double subdivision_delta_bound(double alpha, double h_else_norm, double epsilon)
{
    require_eps(epsilon);
    require_norm(h_else_norm);
    const double a = std::abs(alpha);
    return (2.0 * a / epsilon + 1.0) * (2.0 * h_else_norm + a + epsilon);
}

double ot06_subdivision_delta_bound(double alpha, double h_else_norm, double epsilon)
{
    require_eps(epsilon);
    require_norm(h_else_norm);
    const double a = std::abs(alpha);
    return std::pow(h_else_norm + a + std::sqrt(2.0 * a), 6) / (epsilon * epsilon);
}

double ot06_subdivision_delta_bound(double alpha, const OperatorSum& h_else, double epsilon)
{
    require_eps(epsilon);
    const double a = std::abs(alpha);
    const double shifted = operator_norm(h_else + OperatorSum::identity(h_else.n_qubits(), a));
    return std::pow(shifted + std::sqrt(2.0 * a), 6) / (epsilon * epsilon);
}

double parallel_subdivision_delta_bound(const std::vector<double>& alphas, double h_else_norm, double epsilon)
{
    require_eps(epsilon);
    require_norm(h_else_norm);
    double root_sum = 0.0, abs_sum = 0.0;
    for (double a : alphas) {
        root_sum += std::sqrt(std::abs(a));
        abs_sum += std::abs(a);
    }
    return (2.0 * root_sum * root_sum / epsilon + 1.0) * (2.0 * h_else_norm + 2.0 * abs_sum + epsilon);
}

double three_to_two_delta_bound(double alpha, double h_else_norm, double epsilon)
{
    require_eps(epsilon);
    require_norm(h_else_norm);
    const double a = std::abs(alpha);
    const double max_z = h_else_norm + a + epsilon;
    const double eta = h_else_norm + std::pow(2.0, 2.0 / 3.0) * std::pow(a, 4.0 / 3.0);
    const double xi = std::pow(2.0, -1.0 / 3.0) * std::cbrt(a) + std::pow(2.0, 1.0 / 3.0) * std::pow(a, 2.0 / 3.0);
    const double g = std::pow(2.0, 4.0 / 3.0) * std::pow(a, 2.0 / 3.0) / epsilon;
    const double b = -(xi + g * (max_z + eta + xi * xi));
    const double c = -(1.0 + g * xi) * (max_z + eta);
    const double root = -b + std::sqrt(b * b - 4.0 * c);
    return 0.25 * root * root;
}

double f_exponent(double r, ThreeToTwoVariant variant)
{
    if (!(r > 0.5 && r < 1.0)) throw ValidationError("r must lie in (1/2, 1)");
    const double a = 1.0 - 2.0 * r;
    const double d = 6.0 * r - 5.0;
    if (variant == ThreeToTwoVariant::Improved) return std::max(a, d);
    return std::max({a, 2.0 * r - 2.0, 4.0 * r - 3.0, d});
}

HighOrderBound parallel_high_order_bound(int k, int m, const std::vector<double>& alphas, double h_else_norm,
                                         double delta, double max_z)
{
    if (k < 2) throw ValidationError("order bound is defined for k >= 2");
    if (m < 1 || static_cast<int>(alphas.size()) != m) throw ValidationError("need one alpha per gadget");
    require_norm(h_else_norm);
    if (!(delta > max_z)) throw ValidationError("delta must exceed max z");

    double s13 = 0.0, s23 = 0.0, s1 = 0.0, s43 = 0.0, cross = 0.0;
    for (double a : alphas) {
        const double x = std::abs(a);
        s13 += std::cbrt(x);
        s23 += std::pow(x, 2.0 / 3.0);
        s1 += x;
        s43 += std::pow(x, 4.0 / 3.0);
    }
    for (std::size_t i = 0; i < alphas.size(); ++i)
        for (std::size_t j = 0; j < alphas.size(); ++j)
            if (i != j)
                cross += 8.0 * std::pow(2.0, -4.0 / 3.0) * std::pow(std::abs(alphas[i]), 2.0 / 3.0) *
                         std::pow(std::abs(alphas[j]), 2.0 / 3.0);

    HighOrderBound out;
    const double sq = std::sqrt(delta);
    out.v_s = h_else_norm + std::pow(2.0, -1.0 / 3.0) * sq * s13 + std::pow(2.0, 4.0 / 3.0) * sq * s23 + s1 +
              std::pow(2.0, 8.0 / 3.0) * s43 + cross;
    out.v_f = std::pow(2.0, 2.0 / 3.0) * std::pow(delta, 0.75) * s13;
    const double gap = delta - max_z;
    out.converges = 2.0 * m * out.v_f < gap && m * out.v_f > out.v_s;
    if (out.v_f == 0.0) return out;

    auto order = [&](int kk) {
        // kf runs over k, k-2, ..., 2 for even k and k-1, ..., 2 for odd k
        double same = 0.0, pair = 0.0;
        for (int kf = (kk % 2 == 0 ? kk : kk - 1); kf >= 2; kf -= 2) {
            const double w = std::pow(out.v_f, kf) * std::pow(out.v_s, kk - kf);
            same += std::pow(m, kf) * binom(kk, kf) * w;
            pair += binom(kk, kf) * binom(kf, 2) * 2.0 * w * std::pow(m, kf - 2);
        }
        const double pre = out.v_f * out.v_f / std::pow(gap, kk + 1);
        return pre * (m * same + binom(m, 2) * pair);
    };

    out.order_bound = order(k);
    if (out.converges) {
        double tail = 0.0;
        for (int kk = k; kk < k + 4000; ++kk) {
            const double t = order(kk);
            tail += t;
            if (!std::isfinite(tail)) break;
            if (t < 1e-17 * tail) break;
        }
        out.tail_bound = tail;
    } else {
        out.tail_bound = std::numeric_limits<double>::infinity();
    }
    return out;
}

} // namespace gadgetforge
