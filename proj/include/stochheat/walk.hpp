#pragma once

#include "stochheat/common.hpp"

#include <span>
#include <string>
#include <vector>

namespace stochheat {

enum class WalkFamily {
    ProductMoment,     ///< product of symmetric 1-d laws with finite support (alpha = 2)
    HeavyTail,         ///< mu(j) = c |j|^{-d-alpha}, truncated to |j|_inf <= J
    HeavyTailMixture,  ///< mu(j) = c sum_i w_i |j|^{-d-alpha_i}, truncated likewise
};

std::string to_string(WalkFamily f);
WalkFamily walk_family_from_string(const std::string& s);

struct MixtureTerm {
    double alpha = 1.0;
    double weight = 1.0;
};

/// Jump law of a rate-one continuous-time random walk on Z^d. Symmetric, no
/// mass at the origin, weights stored on the cube {-J..J}^d (row-major) and
/// normalized to one.
class DislocationDistribution {
public:
    /// mu(+-e) = 1/2 in d = 1; the product of these laws in higher d.
    static DislocationDistribution nearest_neighbor(int dim);
    /// Product of d copies of the 1-d law putting weights[k-1]/2 on +-k.
    static DislocationDistribution product_moment(int dim, std::vector<double> component_weights);
    static DislocationDistribution heavy_tail(int dim, double alpha, long support_radius);
    static DislocationDistribution heavy_tail_mixture(int dim, std::vector<MixtureTerm> terms,
                                                      long support_radius);

    WalkFamily family() const { return family_; }
    int dim() const { return dim_; }
    /// Stability index of the limit (2 for product laws, the smallest
    /// exponent for mixtures).
    double alpha() const { return alpha_; }
    long support_radius() const { return radius_; }
    const std::vector<double>& weights() const { return weights_; }
    const std::vector<double>& component_weights() const { return component_; }
    const std::vector<MixtureTerm>& mixture() const { return mixture_; }

    double weight(std::span<const long> jump) const;

    /// Characteristic function sum_j mu(j) cos(z·j).
    double mu_hat(std::span<const double> z) const;
    double mu_hat(double z) const { return mu_hat(std::span<const double>(&z, 1)); }

    /// Coefficient nu in 1 - mu_hat(z) = nu |z|^alpha + D(z): half the
    /// component variance for product laws, c · (Riesz Fourier constant) for
    /// the heavy-tailed families (leading exponent only for mixtures).
    double nu() const;

    /// Largest admissible decay exponent a of D(z) = O(|z|^{alpha + a}) for
    /// the family, capped at 1.
    double a_cap() const;

    /// Normalizing constant c of the heavy-tailed families (0 otherwise).
    double normalization() const { return norm_c_; }

    /// Untruncated heavy-tail law c sum_i w_i r^{-d-alpha_i} at radius r; 0
    /// for product laws.
    double tail_weight(double r) const;

    /// Per-axis variance of one jump.
    double jump_variance() const;

    /// Jump law folded onto the torus (index j mod n).
    std::vector<double> torus_kernel(const Torus& torus) const;
    /// mu_hat at the torus frequencies 2 pi m / n.
    std::vector<double> torus_charfn(const Torus& torus) const;

    std::string describe() const;

private:
    DislocationDistribution() = default;
    void finalize();

    WalkFamily family_ = WalkFamily::ProductMoment;
    int dim_ = 1;
    double alpha_ = 2.0;
    long radius_ = 1;
    double norm_c_ = 0.0;
    std::vector<double> component_;
    std::vector<MixtureTerm> mixture_;
    std::vector<double> weights_;
    std::vector<long> support_;  // nonzero entries, flattened offsets (dim per entry)
    std::vector<double> support_w_;
};

struct AssumptionDiagnostics {
    double nu_hat = 0.0;
    double a_hat = 0.0;
    /// Exponent of the plain log-log fit of 1 - mu_hat against |z|.
    double fitted_alpha = 0.0;
    double r_squared = 0.0;
    /// (|z|, |D(z)|) with D(z) = mu_hat(z) - 1 + nu_hat |z|^alpha.
    std::vector<std::pair<double, double>> residual_curve;
    /// Largest value of mu_hat on a 64^d torus grid outside |z| < 0.25.
    double max_charfn_away_from_zero = 0.0;
};

/// log-spaced radii on [lo, hi].
std::vector<double> log_grid(double lo, double hi, std::size_t count);

/// Default diagnostic grid: 40 log-spaced radii in [0.02, 0.5].
std::vector<double> default_diagnostic_grid();

/// Fits 1 - mu_hat(r e_1) = nu r^alpha + C r^{alpha + a} on the given radii.
/// Throws DiagnosticsError if the log-log fit has R^2 < 0.99 or mu_hat
/// reaches 1 away from the origin.
AssumptionDiagnostics diagnose_assumptions(const DislocationDistribution& walk,
                                           std::span<const double> radii);

/// Law of the walk on a periodic lattice at a fixed time.
struct TransitionTable {
    double epsilon = 1.0;
    double t = 0.0;  ///< physical time (walk time t / epsilon^alpha)
    Torus torus;
    std::vector<double> values;  ///< P(X = epsilon k), wrapped
    std::size_t clamped = 0;
    double clamped_mass = 0.0;

    /// epsilon^{-d} P, comparable with a continuum density.
    double density(std::size_t index) const;
    double sum() const;
};

/// Estimated largest per-site probability folded in from outside the torus
/// half-width at walk time t.
double wrap_estimate(const DislocationDistribution& walk, double t, std::size_t n);

/// Smallest FFT-friendly odd size with wrap_estimate below tol.
std::size_t suggest_torus_size(const DislocationDistribution& walk, double t, double tol,
                               std::size_t at_least = 1);

/// P(X_t = k) on the torus by inverse DFT of exp(-t (1 - mu_hat)). Throws
/// MassLeakError if wrap_estimate(t, n) > wrap_tol.
TransitionTable transition_probabilities(const DislocationDistribution& walk, double t,
                                         std::size_t torus_n, double wrap_tol = 1e-8);

/// Law of epsilon X_{t / epsilon^alpha}.
TransitionTable scaled_transition(const DislocationDistribution& walk, double epsilon, double t,
                                  std::size_t torus_n, double wrap_tol = 1e-8);

} // namespace stochheat
