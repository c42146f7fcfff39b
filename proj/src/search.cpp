#include "gadgetforge/search.hpp"

#include <cmath>
#include <limits>

#include "gadgetforge/errors.hpp"

namespace gadgetforge {

double delta_floor(double h_else_norm, double sum_abs_alpha, double epsilon)
{
    return 2.0 * h_else_norm + sum_abs_alpha + epsilon + 1e-6;
}

std::vector<double> log_grid(double lo, double hi, int n)
{
    if (!(lo > 0.0 && hi > 0.0) || n < 1) throw ValidationError("log grid needs positive bounds and n >= 1");
    if (n == 1) return {lo};
    std::vector<double> g(static_cast<std::size_t>(n));
    const double a = std::log(lo), b = std::log(hi);
    for (int i = 0; i < n; ++i) g[i] = std::exp(a + (b - a) * i / (n - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

namespace {

struct Probe {
    const ErrorOfDelta& f;
    DeltaSearchResult& r;
    double operator()(double d)
    {
        const double e = f(d);
        ++r.evaluations;
        if (!std::isfinite(e)) throw NumericalError("spectral error is not finite at delta = " + std::to_string(d));
        return e;
    }
};

void bisect(Probe& err, double lo, double hi, double hi_err, const DeltaSearchOptions& o, DeltaSearchResult& r)
{
    r.bisected = true;
    r.delta_min = hi;
    r.achieved_error = hi_err;
    if (std::abs(hi_err - o.epsilon) <= o.tol_rel * o.epsilon) {
        r.converged = true;
        r.bracket = {lo, hi};
        return;
    }
    while (r.probes < o.max_probes) {
        const double mid = std::sqrt(lo * hi);
        if (!(mid > lo && mid < hi)) break;
        const double e = err(mid);
        ++r.probes;
        if (std::abs(e - o.epsilon) <= o.tol_rel * o.epsilon) {
            r.delta_min = mid;
            r.achieved_error = e;
            r.converged = true;
            break;
        }
        if (e > o.epsilon) {
            lo = mid;
        } else {
            hi = mid;
            r.delta_min = mid;
            r.achieved_error = e;
        }
    }
    r.bracket = {lo, hi};
    if (!r.converged) r.note = "bisection stopped before reaching tolerance";
}

} // namespace

DeltaSearchResult minimal_delta(const ErrorOfDelta& error_of, const DeltaSearchOptions& o)
{
    if (!(o.epsilon > 0.0)) throw ValidationError("epsilon must be positive");
    if (!(o.delta_lo > 0.0)) throw ValidationError("lower bracket must be positive");
    if (!(o.tol_rel > 0.0)) throw ValidationError("tolerance must be positive");

    DeltaSearchResult r;
    Probe err{error_of, r};
    const double lo = o.delta_lo;
    const double lo_err = err(lo);
    if (lo_err <= o.epsilon) {
        r.delta_min = lo;
        r.achieved_error = lo_err;
        r.bracket = {lo, lo};
        r.converged = std::abs(lo_err - o.epsilon) <= o.tol_rel * o.epsilon;
        r.note = "error already within epsilon at the lower bracket";
        return r;
    }

    double hi = o.delta_hi.value_or(2.0 * lo);
    if (hi <= lo) hi = 2.0 * lo;
    const double cap = o.hi_cap_factor * lo;
    double hi_err = err(hi);
    while (hi_err > o.epsilon) {
        if (hi >= cap) {
            r.bracket = {lo, hi};
            r.delta_min = hi;
            r.achieved_error = hi_err;
            r.note = "no upper bracket below the cap";
            return r;
        }
        hi = std::min(2.0 * hi, cap);
        hi_err = err(hi);
    }

    // sampled monotonicity check over the bracket
    const int ns = std::max(o.monotonicity_samples, 2);
    const std::vector<double> ds = log_grid(lo, hi, ns);
    bool monotone = true;
    double prev = std::numeric_limits<double>::infinity();
    for (int i = 0; i < ns; ++i) {
        const double e = i == 0 ? lo_err : (i == ns - 1 ? hi_err : err(ds[i]));
        r.samples.emplace_back(ds[i], e);
        if (e > prev * (1.0 + 1e-9) + 1e-15) monotone = false;
        prev = e;
    }

    if (monotone) {
        // narrow with the samples before bisecting
        double a = lo, b = hi, eb = hi_err;
        for (const auto& [d, e] : r.samples) {
            if (e > o.epsilon) a = d;
            else if (d < b) {
                b = d;
                eb = e;
                break;
            }
        }
        bisect(err, a, b, eb, o, r);
        return r;
    }

    r.fallback_used = true;
    const std::vector<double> grid = log_grid(lo, hi, std::max(o.fallback_grid, 2));
    double a = lo, b = hi, eb = hi_err;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double e = i + 1 == grid.size() ? hi_err : err(grid[i]);
        if (e <= o.epsilon) {
            a = grid[i - 1];
            b = grid[i];
            eb = e;
            break;
        }
    }
    bisect(err, a, b, eb, o, r);
    r.note = r.note.empty() ? "non-monotone samples; grid-scan fallback" : r.note + "; grid-scan fallback";
    return r;
}

DeltaSearchResult minimal_delta(const GadgetBuilder& builder, const OperatorSum& target,
                                const DeltaSearchOptions& options, const NumericPolicy& policy)
{
    const Eigen::VectorXd target_levels = spectrum(target, policy);
    ErrorOfDelta f = [&](double delta) {
        const GadgetBuild g = builder(delta);
        return compare_levels(spectrum(g, policy), target_levels).max_error;
    };
    return minimal_delta(f, options);
}

SlopeFit fit_slope(const std::vector<std::pair<double, double>>& pts)
{
    if (pts.size() < 2) throw ValidationError("slope fit needs at least two points");
    const double n = static_cast<double>(pts.size());
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : pts) {
        mx += x;
        my += y;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [x, y] : pts) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if (sxx == 0.0) throw ValidationError("slope fit needs distinct x values");
    SlopeFit f;
    f.points = pts;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r_squared = syy == 0.0 ? 1.0 : std::min(1.0, std::max(0.0, sxy * sxy / (sxx * syy)));
    return f;
}

ScalingRun scaling_slope(const std::vector<double>& epsilons, const GadgetBuilder& builder,
                         const OperatorSum& target, const SearchSetup& setup, const NumericPolicy& policy)
{
    if (epsilons.size() < 4) throw ValidationError("scaling fit needs at least 4 epsilon points");
    double emin = epsilons.front(), emax = epsilons.front();
    for (double e : epsilons) {
        emin = std::min(emin, e);
        emax = std::max(emax, e);
    }
    if (!(emin > 0.0) || emax / emin < 10.0 * (1.0 - 1e-9))
        throw ValidationError("epsilon grid must be positive and span at least one decade");

    ScalingRun run;
    std::vector<std::pair<double, double>> pts;
    for (double eps : epsilons) {
        ScalingPoint p{eps, minimal_delta(builder, target, setup(eps), policy)};
        if (p.result.converged) pts.emplace_back(std::log(1.0 / eps), std::log(p.result.delta_min));
        run.points.push_back(std::move(p));
    }
    if (pts.size() < 4) throw NumericalError("fewer than 4 converged points in the epsilon sweep");
    run.fit = fit_slope(pts);
    return run;
}

} // namespace gadgetforge
