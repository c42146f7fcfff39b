#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gadgetforge/gadget_build.hpp"
#include "gadgetforge/spectral.hpp"

namespace gadgetforge {

using GadgetBuilder = std::function<GadgetBuild(double delta)>;
using ErrorOfDelta = std::function<double(double delta)>;

struct DeltaSearchOptions {
    double epsilon = 0.0;
    double tol_rel = 1e-5;
    double delta_lo = 0.0;                 // see delta_floor
    std::optional<double> delta_hi;        // analytical bound when one exists
    int max_probes = 60;
    double hi_cap_factor = 1099511627776.0;  // 2^40
    int monotonicity_samples = 5;
    int fallback_grid = 64;
};

struct DeltaSearchResult {
    double delta_min = 0.0;
    double achieved_error = 0.0;
    std::pair<double, double> bracket{0.0, 0.0};
    int probes = 0;        // bisection probes
    int evaluations = 0;   // every error evaluation, sampling included
    bool converged = false;
    bool bisected = false;
    bool fallback_used = false;
    std::vector<std::pair<double, double>> samples;  // monotonicity check (delta, error)
    std::string note;
};

// 2||H_else|| + sum|alpha_i| + eps + 1e-6
double delta_floor(double h_else_norm, double sum_abs_alpha, double epsilon);

DeltaSearchResult minimal_delta(const ErrorOfDelta& error_of, const DeltaSearchOptions& options);
DeltaSearchResult minimal_delta(const GadgetBuilder& builder, const OperatorSum& target,
                                const DeltaSearchOptions& options, const NumericPolicy& policy = {});

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::vector<std::pair<double, double>> points;  // (ln 1/eps, ln delta_min)
};

// Ordinary least squares of y on x.
SlopeFit fit_slope(const std::vector<std::pair<double, double>>& points);

struct ScalingPoint {
    double epsilon = 0.0;
    DeltaSearchResult result;
};

struct ScalingRun {
    SlopeFit fit;
    std::vector<ScalingPoint> points;
};

// Options for one epsilon of a sweep.
using SearchSetup = std::function<DeltaSearchOptions(double epsilon)>;

ScalingRun scaling_slope(const std::vector<double>& epsilons, const GadgetBuilder& builder,
                         const OperatorSum& target, const SearchSetup& setup, const NumericPolicy& policy = {});

std::vector<double> log_grid(double lo, double hi, int n);

} // namespace gadgetforge
