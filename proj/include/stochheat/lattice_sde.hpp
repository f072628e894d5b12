#pragma once

#include "stochheat/fft.hpp"
#include "stochheat/riesz_noise.hpp"
#include "stochheat/stable_kernel.hpp"
#include "stochheat/walk.hpp"

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace stochheat {

enum class SigmaKind {
    Linear,         ///< lambda u
    Cutoff,         ///< sigma^(N) built from a linear or smooth_bounded base
    SmoothBounded,  ///< lambda u / (1 + u^2)
    Custom,         ///< piecewise linear through table points, flat outside
};

std::string to_string(SigmaKind k);
SigmaKind sigma_kind_from_string(const std::string& s);

struct SigmaSpec {
    SigmaKind kind = SigmaKind::Linear;
    double lambda = 1.0;
    /// Cutoff level N (kind = Cutoff): sigma on [-N, N], zero outside
    /// (-2N, 2N), linear in between.
    double cutoff_n = 1.0;
    SigmaKind base = SigmaKind::Linear;
    std::vector<std::pair<double, double>> table;

    double operator()(double u) const;
    double lip_const() const;
    /// Checks the Lipschitz bound on a grid over [-range, range].
    void validate(double range = 100.0) const;
};

enum class InitialKind { Constant, Linear, HalfLine, GaussianBump, Custom };

std::string to_string(InitialKind k);
InitialKind initial_kind_from_string(const std::string& s);

struct InitialProfile {
    InitialKind kind = InitialKind::Constant;
    double value = 1.0;      ///< constant level / indicator height / bump height
    double slope = 1.0;      ///< Linear: u0(x) = value + slope x_1 ... with value as intercept
    double threshold = 0.0;  ///< HalfLine: u0 = value on x_1 >= threshold
    double width = 1.0;      ///< GaussianBump
    std::function<double(std::span<const double>)> custom;

    double operator()(std::span<const double> x) const;
};

enum class Scheme { EulerMaruyama, Splitting };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

struct SimConfig {
    DislocationDistribution walk = DislocationDistribution::nearest_neighbor(1);
    CorrelationSpec correlation;
    double epsilon = 0.25;
    std::size_t torus_n = 16;
    SigmaSpec sigma;
    InitialProfile u0;
    double dt = 1e-3;
    double t_end = 1.0;
    Scheme scheme = Scheme::Splitting;
    SamplerMode sampler = SamplerMode::Spectral;
    std::uint64_t seed = 1;
    /// Physical position of site 0 (cells are centred at origin + eps k).
    double origin = 0.0;
    /// Times at which fields are recorded; empty means {t_end}.
    std::vector<double> output_times;

    int dim() const { return walk.dim(); }
    double alpha() const { return walk.alpha(); }
    double beta() const { return correlation.beta; }
    StableParams stable() const { return {walk.alpha(), walk.nu(), walk.dim()}; }
    std::size_t steps() const;
    /// Throws ConfigError naming the violated condition.
    void validate() const;
};

struct SimState {
    double time = 0.0;
    std::vector<double> field;
    std::uint64_t step = 0;
};

struct SimPath {
    std::vector<double> times;
    std::vector<std::vector<double>> fields;
    double running_max = 0.0;
    double running_min = 0.0;
    /// Fraction of (step, site) pairs with a negative value.
    double negativity_fraction = 0.0;
};

/// Cell averages eps^{-d} \int_C u0 with an 8-point Gauss rule per axis.
/// Site k sits at origin + eps * min_image(k).
std::vector<double> project_initial(const InitialProfile& u0, double epsilon, const Torus& torus,
                                    double origin = 0.0);

/// eps^{-alpha} sum_j mu(j) [U(x + j) - U(x)] on the torus.
std::vector<double> generator_apply(const DislocationDistribution& walk, double epsilon, const Torus& torus,
                                    std::span<const double> field);

/// Spectrum exp(-(t / eps^alpha)(1 - mu_hat)) of the torus semigroup.
std::vector<std::complex<double>> semigroup_spectrum(const DislocationDistribution& walk, double epsilon,
                                                     const Torus& torus, double t);

/// P_t applied to a field on the torus.
std::vector<double> apply_semigroup(const DislocationDistribution& walk, double epsilon, const Torus& torus,
                                    double t, std::span<const double> field);

/// Shared read-only pieces of a configured model.
class LatticeModel {
public:
    explicit LatticeModel(SimConfig config);

    const SimConfig& config() const { return config_; }
    const Torus& torus() const { return torus_; }
    const CellCovariance& covariance() const { return sampler_.covariance(); }
    const NoiseSampler& sampler() const { return sampler_; }
    std::size_t steps() const { return steps_; }
    double dt() const { return config_.dt; }
    const std::vector<std::size_t>& output_steps() const { return output_steps_; }
    std::vector<double> initial_field() const;
    /// Linear index of the site whose cell contains the physical point x.
    std::size_t site_containing(std::span<const double> x) const;

    /// Per-thread stepping machinery.
    class Stepper {
    public:
        explicit Stepper(const LatticeModel& model);
        /// Increments of this model's own sampler for (replica, step).
        void sample(std::uint64_t replica, std::uint64_t step, std::span<double> out);
        /// One step with the given increments. Throws BlowUpError.
        void step(SimState& state, std::span<const double> dB);

    private:
        const LatticeModel* model_;
        NoiseSampler::Workspace noise_ws_;
        CircularConvolver drift_;
        std::vector<double> work_;
    };

private:
    SimConfig config_;
    Torus torus_;
    NoiseSampler sampler_;
    std::size_t steps_ = 0;
    std::vector<std::size_t> output_steps_;
    std::vector<std::complex<double>> drift_spectrum_;
    double noise_scale_ = 1.0;
    std::vector<double> u0_;
};

SimState step(const LatticeModel& model, SimState state, std::span<const double> dB);

/// One replica; fields at output times. Pure function of (config, replica).
SimPath simulate(const LatticeModel& model, std::uint64_t replica = 0);
SimPath simulate(const SimConfig& config, std::uint64_t replica = 0);

/// Several nested lattices driven by one noise: level 0 is the finest; each
/// next level has twice the spacing, half the sites per axis, the same dt and
/// origin shifted by -eps_fine / 2 relative to the coarse one. Increments of
/// coarse cells are sums of fine sub-cell increments.
class CoupledLadder {
public:
    explicit CoupledLadder(std::vector<SimConfig> finest_first);

    std::size_t levels() const { return models_.size(); }
    const LatticeModel& model(std::size_t level) const { return *models_[level]; }

    /// Paths of every level for one replica (seed taken from the finest config).
    std::vector<SimPath> simulate(std::uint64_t replica) const;

private:
    std::vector<std::unique_ptr<LatticeModel>> models_;
};

/// Coarse/fine pair under the nested-noise coupling.
std::pair<SimPath, SimPath> simulate_coupled_refinement(const SimConfig& coarse, const SimConfig& fine,
                                                        std::uint64_t seed, std::uint64_t replica = 0);

/// Configuration of the next finer level: half spacing, twice the sites, origin
/// moved so that fine cells tile coarse ones.
SimConfig refine(const SimConfig& coarse);

} // namespace stochheat
