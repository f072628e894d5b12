#pragma once

#include "stochheat/common.hpp"

#include <atomic>
#include <span>
#include <vector>

namespace stochheat {

/// Parameters of the generator -nu (-Laplacian)^{alpha/2} on R^dim.
struct StableParams {
    double alpha = 2.0;
    double nu = 1.0;
    int dim = 1;

    /// Throws DomainError unless 0 < alpha <= 2, nu > 0, dim >= 1.
    void validate() const;
};

/// Tensor-grid Fourier quadrature settings for the reference density p_1.
struct QuadratureSpec {
    /// Frequencies are cut at Z with exp(-nu Z^alpha) below this value.
    double cutoff_decay = 1e-14;
    /// Number of dyadic panels grading the quadrature towards frequency 0.
    int grading_levels = 16;
    /// Oscillation budget: panel width is at most this many radians of cos(x z).
    double radians_per_panel = 12.0;
    /// Node budget per axis and for the full tensor grid.
    std::size_t max_nodes_per_axis = 40000;
    std::size_t max_tensor_nodes = 50'000'000;
};

/// Heat kernel p_t(x) of the isotropic alpha-stable process.
///
/// Every evaluation is reduced to the reference time t = 1 through the scaling
/// identity p_t(x) = t^{-d/alpha} p_1(t^{-1/alpha} x). For alpha = 2 (Gaussian)
/// and alpha = 1 (Cauchy) closed forms are used by density(); all other
/// exponents go through Fourier inversion of exp(-nu |z|^alpha) on a tensor
/// Gauss–Legendre grid. Immutable after construction apart from the clamp
/// counter, which is atomic.
class StableKernel {
public:
    explicit StableKernel(StableParams params, QuadratureSpec spec = {});

    const StableParams& params() const { return params_; }
    const QuadratureSpec& spec() const { return spec_; }

    /// Frequency cutoff Z of the reference quadrature.
    double max_frequency() const { return zmax_; }
    bool has_closed_form() const;

    double density(double t, std::span<const double> x) const;
    double density(double t, double x) const { return density(t, std::span<const double>(&x, 1)); }

    /// Fourier-inversion path regardless of closed-form availability.
    double density_fourier(double t, std::span<const double> x) const;
    double density_fourier(double t, double x) const {
        return density_fourier(t, std::span<const double>(&x, 1));
    }

    /// Closed form (alpha in {1, 2}); DomainError otherwise.
    double density_closed_form(double t, std::span<const double> x) const;

    /// Values on the tensor grid axis x axis (x ...), row-major. Uses closed
    /// forms when available; otherwise one shared Fourier node set and
    /// separable contractions (dim <= 2).
    std::vector<double> density_on_grid(double t, std::span<const double> axis) const;

    /// Quadrature nodes per axis needed to evaluate p_1 at sup-norm radius r.
    std::size_t required_nodes_per_axis(double radius) const;

    /// Number of negative quadrature values clamped to zero so far.
    std::size_t clamped_count() const { return clamped_.load(); }

private:
    struct Nodes {
        std::vector<double> z;
        std::vector<double> w;
    };
    Nodes reference_nodes(double radius) const;
    double reference_fourier(const Nodes& nodes, std::span<const double> y) const;
    double clamp(double v) const;

    StableParams params_;
    QuadratureSpec spec_;
    double zmax_ = 0.0;
    mutable std::atomic<std::size_t> clamped_{0};
};

/// Shape min(t^{-d/alpha}, t / |x|^{d+alpha}) of the two-sided heat estimate.
/// Unsupported (DomainError) for alpha = 2, where no polynomial tail exists.
double envelope(const StableParams& params, double t, std::span<const double> x);
inline double envelope(const StableParams& params, double t, double x) {
    return envelope(params, t, std::span<const double>(&x, 1));
}

struct EnvelopeFit {
    double c_lower = 0.0;  ///< min over the grid of p / shape
    double c_upper = 0.0;  ///< max over the grid of p / shape
    std::size_t points = 0;
};

/// Fits the sandwich constants on a one-dimensional radial grid
/// (x along the first axis) for each t.
EnvelopeFit fit_envelope(const StableKernel& kernel, std::span<const double> t_grid,
                         std::span<const double> radii);

/// |grad p_t(x)| t^{1/alpha} / p_t(x/2), gradient by central differences with
/// step 1e-4 t^{1/alpha}.
double gradient_ratio(const StableKernel& kernel, double t, std::span<const double> x);
inline double gradient_ratio(const StableKernel& kernel, double t, double x) {
    return gradient_ratio(kernel, t, std::span<const double>(&x, 1));
}

/// \int p_{2t}(w - offset) |w|^{-beta} dw, i.e. the Riesz correlation seen
/// through two heat kernels. Requires 0 < beta < min(alpha, d).
double correlation_smoothing(const StableKernel& kernel, double t, std::span<const double> offset,
                             double beta);
inline double correlation_smoothing(const StableKernel& kernel, double t, double offset,
                                    double beta) {
    return correlation_smoothing(kernel, t, std::span<const double>(&offset, 1), beta);
}

/// Constant C with \int (1 - cos(z·x)) |x|^{-d-alpha} dx = C |z|^alpha.
double riesz_fourier_constant(int dim, double alpha);

/// Constant c with F(|x|^{-beta})(xi) = c |xi|^{beta - d} (Fourier transform
/// of the Riesz kernel in the distributional sense).
double riesz_kernel_transform_constant(int dim, double beta);

/// Grid sum of p_t times cell volume over the cube [-radius, radius]^d with
/// the given spacing.
double grid_mass(const StableKernel& kernel, double t, double spacing, double radius);

} // namespace stochheat
