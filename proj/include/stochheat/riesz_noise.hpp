#pragma once

#include "stochheat/common.hpp"
#include "stochheat/walk.hpp"

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace stochheat {

enum class CorrelationKind {
    Riesz,    ///< |x|^{-beta}
    Cauchy,   ///< prod_i 1 / (1 + (x_i / l)^2)
    OU,       ///< exp(-|x| / l)
    Poisson,  ///< (1 + |x|^2 / l^2)^{-(d+1)/2}
    Delta,    ///< white noise: cell covariance eps^d on the diagonal only
};

std::string to_string(CorrelationKind k);
CorrelationKind correlation_from_string(const std::string& s);

struct CorrelationSpec {
    CorrelationKind kind = CorrelationKind::Riesz;
    double beta = 0.5;   ///< Riesz exponent
    double length = 1.0; ///< scale l of the bounded kernels

    double value(std::span<const double> x) const;
    void validate(int dim) const;
};

/// Closed-form d = 1 Riesz cell covariance: the second difference of
/// G(r) = |r|^{2-beta} / ((1-beta)(2-beta)) with step eps, switching to its
/// Taylor series for |m| > 64.
double cell_covariance_1d(long m, double epsilon, double beta);

struct CellQuadrature {
    double rel_tol = 1e-10;
    int max_level = 4;  ///< uniform bisection levels tried on regular boxes
};

/// \int_{C(0)} \int_{C(eps m)} f(x - y) dx dy for eps-cubes, any dimension.
/// Reduced to \int_{[-eps,eps]^d} prod_i (eps - |s_i|) f(s + eps m) ds and
/// integrated orthant by orthant. An orthant whose corner carries the Riesz
/// singularity is split into pyramids with the radial integral done exactly;
/// other orthants use tensor Gauss–Legendre with uniform refinement until two
/// levels agree. Throws QuadratureError with the last two estimates.
double cell_covariance_nd(std::span<const long> offset, double epsilon, const CorrelationSpec& corr,
                          const CellQuadrature& quad = {});
double cell_covariance_nd(std::span<const long> offset, double epsilon, double beta,
                          const CellQuadrature& quad = {});

struct LatticeSpec {
    int dim = 1;
    double epsilon = 1.0;
    std::size_t torus_n = 1;
};

struct CellCovariance {
    double epsilon = 1.0;
    CorrelationSpec correlation;
    Torus torus;
    std::vector<double> table;     ///< R at minimum-image offsets, torus order
    std::vector<double> spectrum;  ///< DFT eigenvalues after clipping
    double min_eigenvalue = 0.0;   ///< before clipping
    double max_eigenvalue = 0.0;
    double clipped_mass = 0.0;     ///< sum of clipped |negatives| / sum of eigenvalues
    std::size_t clipped_count = 0;

    int dim() const { return torus.dim; }
    double beta() const { return correlation.beta; }
    /// Table rebuilt from the clipped spectrum (what the samplers realize).
    std::vector<double> realized_table() const;
};

/// Periodized cell covariance with PSD spectrum. Throws EmbeddingError if the
/// clipped mass exceeds max_clipped_mass.
CellCovariance build_covariance(const LatticeSpec& lattice, const CorrelationSpec& corr,
                                double max_clipped_mass = 1e-6);

/// (1/N) sum_m lambda_m (1 - exp(-2 T kappa_m)) / (2 kappa_m) with
/// kappa_m = eps^{-alpha} (1 - mu_hat(z_m)): the integral over [0, T] of the
/// noise covariance seen through two transition kernels at the origin.
double summability_integral(const CellCovariance& cov, const DislocationDistribution& walk, double T);

enum class SamplerMode { Spectral, Cholesky };

/// Increments with Cov(dB(k), dB(l)) = dt R(k - l). The field for
/// (seed_root, stream, step) is a pure function of those three numbers.
class NoiseSampler {
public:
    NoiseSampler(CellCovariance cov, SamplerMode mode, std::uint64_t seed_root);
    ~NoiseSampler();
    NoiseSampler(NoiseSampler&&) noexcept;
    NoiseSampler& operator=(NoiseSampler&&) noexcept;

    /// Per-thread scratch space; one per concurrent caller.
    class Workspace {
    public:
        explicit Workspace(const NoiseSampler& sampler);
        ~Workspace();
        Workspace(Workspace&&) noexcept;

    private:
        friend class NoiseSampler;
        struct Impl;
        std::unique_ptr<Impl> impl_;
    };

    const CellCovariance& covariance() const { return cov_; }
    SamplerMode mode() const { return mode_; }
    std::uint64_t seed_root() const { return seed_; }

    void sample(Workspace& ws, double dt, std::uint64_t step_index, std::uint64_t stream,
                std::span<double> out) const;
    std::vector<double> sample_increments(double dt, std::uint64_t step_index, std::uint64_t stream = 0) const;

private:
    CellCovariance cov_;
    SamplerMode mode_;
    std::uint64_t seed_;
    std::vector<double> root_spectrum_;
    struct Dense;
    std::unique_ptr<Dense> dense_;
};

/// Sums a field over blocks of 2^d sites (fine sites 2k, 2k+1 per axis) onto
/// the torus of half the size.
std::vector<double> aggregate_to_coarse(const Torus& fine, std::span<const double> field);

} // namespace stochheat
