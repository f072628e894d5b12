#pragma once

#include "stochheat/local_limit.hpp"
#include "stochheat/oracles.hpp"

#include <cstdint>
#include <vector>

namespace stochheat {

struct RateTargets {
    double eta = 0.0;        ///< (alpha - beta) / 2
    double eta_tilde = 0.0;  ///< (alpha - beta) / (2 alpha)
    double rho = 0.0;        ///< min(eta, a)
};

RateTargets rate_targets(double alpha, double beta, double a);

/// Mean and standard error of a sample, summed in the given order.
struct Estimate {
    double mean = 0.0;
    double se = 0.0;
};
Estimate estimate(std::span<const double> samples);

/// Per-time, per-site moments of orders 1..3.
struct MomentReport {
    std::vector<double> times;
    std::size_t sites = 0;
    std::size_t replicas = 0;
    /// moments[k-1][time * sites + site]
    std::vector<std::vector<Estimate>> moments;

    const Estimate& at(int order, std::size_t time_index, std::size_t site) const {
        return moments[static_cast<std::size_t>(order - 1)][time_index * sites + site];
    }
};

/// Ensemble moments of a model. Replicas run on `threads` workers; every sum
/// runs in replica order, so the report does not depend on the thread count.
MomentReport ensemble_moments(const LatticeModel& model, std::size_t replicas, unsigned threads = 1,
                              std::uint64_t first_replica = 0);

struct ConvergenceReport {
    std::vector<double> epsilons;
    double eps_ref = 0.0;
    int order = 2;
    std::vector<double> errors;     ///< (E|U^eps(0) - <U^ref>_cell|^m)^{1/m}
    std::vector<double> errors_se;  ///< delta-method standard errors
    RateFit fit;                    ///< empty unless >= 3 coarse levels
    bool has_fit = false;
    RateTargets targets;
    std::size_t replicas = 0;
};

/// Coupled self-convergence: `base` is the coarsest lattice, `levels` coarse
/// levels are compared against a reference `levels` refinements below it,
/// all driven by the reference noise. levels = 0 compares the reference with
/// itself. Site 0 of each coarse level is compared with the reference field
/// averaged over the same cell.
ConvergenceReport convergence_study(const SimConfig& base, int levels, int order, std::size_t replicas,
                                    unsigned threads = 1, double a = 1.0);

struct PathwiseReport {
    std::size_t replicas = 0;
    std::size_t checks = 0;      ///< (replica, step, site) triples compared
    std::size_t violations = 0;  ///< U > V + tol
    double fraction = 0.0;
    double max_excess = 0.0;     ///< max of U - V
};

/// U from u0 and V from v0 under shared noise, compared after every step with
/// tol = 1e-9 max(1, max |V|).
PathwiseReport pathwise_comparison(const SimConfig& config, const InitialProfile& u0, const InitialProfile& v0,
                                   std::size_t replicas, unsigned threads = 1);

struct MomentComparisonRow {
    double t = 0.0;
    std::size_t site = 0;
    int order = 1;
    Estimate first;       ///< moment under sigma1
    Estimate second;      ///< moment under sigma2
    double se_difference = 0.0;
    bool ordered = false; ///< first + 3 se_difference >= second
};

struct MomentComparisonReport {
    std::vector<MomentComparisonRow> rows;
    std::size_t replicas = 0;
    bool all_ordered = true;
};

/// Checks sigma1 >= sigma2 >= 0 on [0, range] (ConfigError otherwise), runs
/// both models under shared noise and compares moments of orders 1..3 at the
/// configured output times and every site.
MomentComparisonReport moment_comparison(const SimConfig& config, const SigmaSpec& sigma1, const SigmaSpec& sigma2,
                                         std::size_t replicas, unsigned threads = 1, double range = 100.0);

struct OracleOrderingRow {
    double t = 0.0;
    std::size_t site = 0;
    double m2_first = 0.0;
    double m2_second = 0.0;
};

/// M2(x, x, t) under lambda1 and lambda2 from the moment ODE at each time.
std::vector<OracleOrderingRow> oracle_moment_ordering(const SimConfig& config, double lambda1, double lambda2,
                                                      std::span<const double> times);

struct LyapunovRow {
    double lambda = 0.0;
    GrowthRate gamma2;
    GrowthRate gamma3;
    double ratio = 0.0;            ///< gamma3 / gamma2 (NaN when gamma2 = 0)
    bool intermittent = false;     ///< gamma3 / 3 > gamma2 / 2
    double reference_exponent = 0.0;  ///< (2 alpha - beta) / (alpha - beta)
};

std::vector<LyapunovRow> lyapunov_study(const SimConfig& config, std::span<const double> lambdas);

struct HolderReport {
    double s = 0.0;
    std::vector<double> deltas;
    std::vector<Estimate> increments;  ///< E|U_{s+delta}(0) - U_s(0)|^2
    LineFit fit;                       ///< log increment against log delta
};

/// Time-increment study at the site containing x = 0; the deltas must be
/// whole multiples of dt.
HolderReport holder_study(const SimConfig& config, double s, std::span<const double> deltas,
                          std::size_t replicas, unsigned threads = 1);

} // namespace stochheat
