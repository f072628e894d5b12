#pragma once

#include "stochheat/lattice_sde.hpp"

#include <cstdint>
#include <vector>

namespace stochheat {

/// M1(t) = P_t * U0 on the torus.
std::vector<double> pam_mean(const SimConfig& config, double t);

/// Linear moment flow dM/dt = (L + ... + L) M + lambda^2 eps^{-2d} sum_{i<j} R(x_i - x_j) M
/// for the m-point function of the discrete parabolic Anderson model. The
/// state is indexed row-major by (x_1, ..., x_m), each a torus site.
class MomentFlow {
public:
    /// sigma must be linear; N^m <= 40000 where N is the number of sites.
    MomentFlow(const SimConfig& config, int order);

    int order() const { return order_; }
    std::size_t sites() const { return sites_; }
    std::size_t size() const { return size_; }
    /// y = A x
    void apply(std::span<const double> x, std::span<double> y) const;
    /// Coupling diagonal sum_{i<j} lambda^2 eps^{-2d} R(x_i - x_j).
    const std::vector<double>& coupling() const { return coupling_; }
    /// Drift matrix eps^{-alpha}(K - I) of one coordinate (N x N, row-major).
    const std::vector<double>& drift() const { return drift_; }
    /// Product initial state U0(x_1) ... U0(x_m).
    std::vector<double> initial_state() const;
    /// Largest drift eigenvalue magnitude bound 2 eps^{-alpha}.
    double drift_bound() const { return drift_bound_; }

private:
    int order_;
    std::size_t sites_;
    std::size_t size_;
    std::vector<double> drift_;
    std::vector<double> coupling_;
    std::vector<double> u0_;
    double drift_bound_;
};

/// Second moment table M2(x, y, t) = E[U_t(x) U_t(y)] (N x N row-major).
/// Dense symmetric eigendecomposition when N^2 <= 1024, classical RK4 with
/// dt_ode <= eps^alpha / 64 otherwise; N <= 64.
class PamSecondMoment {
public:
    explicit PamSecondMoment(const SimConfig& config);
    std::vector<double> at(double t) const;
    std::size_t sites() const { return flow_.sites(); }

private:
    MomentFlow flow_;
    double epsilon_alpha_;
    std::vector<double> eigvals_;
    std::vector<double> eigvecs_;  // column-major, size^2; empty if RK4 is used
    std::vector<double> coeffs_;   // V^T M0
};

std::vector<double> pam_second_moment(const SimConfig& config, double t);

/// m-point table at time t by RK4 (dt_ode <= eps^alpha / 64).
std::vector<double> pam_moment_tensor(const SimConfig& config, int order, double t);

struct GrowthRate {
    double gamma = 0.0;     ///< top eigenvalue of the moment operator
    double residual = 0.0;  ///< |A v - gamma v| for the returned unit vector
    int iterations = 0;
};

/// gamma(m) = lim (1/t) log E[U_t(0)^m] as the top eigenvalue of MomentFlow,
/// found by Lanczos iteration (full reorthogonalization) started from the
/// all-ones vector until the Ritz residual is below tol * max(1, |gamma|).
/// Throws OracleError if the true residual of the returned vector exceeds
/// 100 tol * max(1, |gamma|).
GrowthRate pam_growth_rate(const SimConfig& config, int order, double tol = 1e-10, int max_iter = 400);

struct ScalarSDE {
    SigmaSpec sigma;
    double r0 = 1.0;           ///< Var(dB) = r0 dt
    double noise_scale = 1.0;  ///< dU = noise_scale sigma(U) dB
    double u0 = 1.0;
};

struct ScalarReference {
    std::vector<double> increments;  ///< coarse dB per step (sum of fine increments)
    double coarse_end = 0.0;         ///< Euler–Maruyama at dt
    double fine_end = 0.0;           ///< Euler–Maruyama at dt / refine on the same path
};

/// Single-site reference: fine and coarse Euler–Maruyama on one Brownian path
/// generated from (seed, replica).
ScalarReference scalar_sde_reference(const ScalarSDE& sde, double dt, double t, std::uint64_t seed,
                                     std::uint64_t replica = 0, int refine = 100);

} // namespace stochheat
