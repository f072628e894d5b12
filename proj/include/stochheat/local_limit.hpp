#pragma once

#include "stochheat/stable_kernel.hpp"
#include "stochheat/walk.hpp"

#include <span>
#include <utility>
#include <vector>

namespace stochheat {

struct LLTErrorReport {
    double epsilon = 0.0;
    double t = 0.0;
    /// max over lattice points |x| <= window_radius of |eps^{-d} P(x) - p_t(x)|
    double sup_error = 0.0;
    /// max over t^{1/alpha} < |x| <= window_radius of error |x|^{d+alpha+a} / (t eps^a);
    /// zero for alpha = 2.
    double tail_stat = 0.0;
    double window_radius = 0.0;
    double a_used = 0.0;
    std::size_t torus_n = 0;
};

struct RateFit {
    std::vector<std::pair<double, double>> points;  ///< (log eps, log error)
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

struct LLTOptions {
    /// <= 0 selects 10 t^{1/alpha}.
    double window_radius = 0.0;
    /// Exponent a of the tail statistic; < 0 selects min(a_hat, a_cap) from
    /// the walk diagnostics.
    double a = -1.0;
    /// 0 selects the smallest torus covering the window with folded mass per
    /// site below wrap_tol.
    std::size_t torus_n = 0;
    double wrap_tol = 1e-8;
};

/// Exponent used by the tail statistic when none is given.
double default_tail_exponent(const DislocationDistribution& walk);

/// Compares the scaled walk law with the stable density of the kernel. The
/// kernel must carry the walk's alpha and nu. Requires t >= eps^alpha.
LLTErrorReport llt_sup_error(const DislocationDistribution& walk, const StableKernel& kernel,
                             double epsilon, double t, const LLTOptions& options = {});

/// Least squares slope of log error against log eps. Needs at least
/// `min_points` distinct eps values spanning two octaves.
RateFit fit_rate(std::span<const double> epsilons, std::span<const double> errors,
                 std::size_t min_points = 4);
RateFit fit_rate(std::span<const LLTErrorReport> reports, std::size_t min_points = 4);

} // namespace stochheat
