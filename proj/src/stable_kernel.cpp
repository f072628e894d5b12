#include "stochheat/stable_kernel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace stochheat {

namespace {

constexpr double pi = std::numbers::pi;

double norm2(std::span<const double> x) {
    double s = 0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

double norm_inf(std::span<const double> x) {
    double s = 0;
    for (double v : x) s = std::max(s, std::abs(v));
    return s;
}

double unit_sphere_area(int dim) {
    return 2.0 * std::pow(pi, dim / 2.0) / std::tgamma(dim / 2.0);
}

// Composite 20-point Gauss–Legendre over consecutive breakpoints.
template <class F>
double integrate_panels(std::span<const double> breaks, F&& f) {
    const auto& g = gauss_legendre20();
    KahanSum sum;
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        const double a = breaks[p], b = breaks[p + 1];
        if (!(b > a)) continue;
        const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
        double s = 0;
        for (std::size_t i = 0; i < g.nodes.size(); ++i) s += g.weights[i] * f(mid + half * g.nodes[i]);
        sum.add(s * half);
    }
    return sum.value();
}

} // namespace

void StableParams::validate() const {
    if (!(alpha > 0.0 && alpha <= 2.0))
        throw DomainError("stability index alpha must lie in (0, 2]");
    if (!(nu > 0.0)) throw DomainError("diffusivity nu must be positive");
    if (dim < 1) throw DomainError("dimension must be at least 1");
}

StableKernel::StableKernel(StableParams params, QuadratureSpec spec)
    : params_(params), spec_(spec) {
    params_.validate();
    if (!(spec_.cutoff_decay > 0.0 && spec_.cutoff_decay < 1.0))
        throw DomainError("cutoff_decay must lie in (0, 1)");
    zmax_ = std::pow(-std::log(spec_.cutoff_decay) / params_.nu, 1.0 / params_.alpha);
}

bool StableKernel::has_closed_form() const { return params_.alpha == 2.0 || params_.alpha == 1.0; }

double StableKernel::clamp(double v) const {
    if (v < 0.0) {
        clamped_.fetch_add(1);
        return 0.0;
    }
    return v;
}

std::size_t StableKernel::required_nodes_per_axis(double radius) const {
    const double h = std::min(zmax_ / 16.0, spec_.radians_per_panel / (1.0 + radius));
    const auto uniform = static_cast<std::size_t>(std::ceil((zmax_ - h) / h));
    return (static_cast<std::size_t>(spec_.grading_levels) + 1 + uniform) * gauss_legendre20().nodes.size();
}

StableKernel::Nodes StableKernel::reference_nodes(double radius) const {
    const std::size_t need = required_nodes_per_axis(radius);
    if (need > spec_.max_nodes_per_axis) {
        std::ostringstream os;
        os << "Fourier quadrature underresolved at radius " << radius << ": needs " << need
           << " nodes per axis, budget " << spec_.max_nodes_per_axis;
        throw ResolutionError(os.str(), need);
    }
    const double h = std::min(zmax_ / 16.0, spec_.radians_per_panel / (1.0 + radius));
    std::vector<double> breaks{0.0};
    for (int k = spec_.grading_levels; k >= 1; --k) breaks.push_back(h * std::ldexp(1.0, -k));
    for (double z = h; z < zmax_; z += h) breaks.push_back(z);
    breaks.push_back(zmax_);

    const auto& g = gauss_legendre20();
    Nodes nodes;
    nodes.z.reserve(need);
    nodes.w.reserve(need);
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        const double a = breaks[p], b = breaks[p + 1];
        if (!(b > a)) continue;
        const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
        for (std::size_t i = 0; i < g.nodes.size(); ++i) {
            nodes.z.push_back(mid + half * g.nodes[i]);
            nodes.w.push_back(half * g.weights[i]);
        }
    }
    return nodes;
}

// p_1(y) = pi^{-d} \int_{[0,Z]^d} prod_k cos(y_k z_k) exp(-nu |z|^alpha) dz
// (the integrand is even in every coordinate).
double StableKernel::reference_fourier(const Nodes& nodes, std::span<const double> y) const {
    const int d = params_.dim;
    const std::size_t N = nodes.z.size();
    const double a = params_.alpha, nu = params_.nu;
    std::vector<std::vector<double>> c(static_cast<std::size_t>(d), std::vector<double>(N));
    for (int k = 0; k < d; ++k)
        for (std::size_t i = 0; i < N; ++i)
            c[static_cast<std::size_t>(k)][i] = nodes.w[i] * std::cos(y[static_cast<std::size_t>(k)] * nodes.z[i]);

    auto decay = [&](double r2) { return std::exp(-nu * std::pow(r2, 0.5 * a)); };
    double total = 0;
    if (d == 1) {
        KahanSum s;
        for (std::size_t i = 0; i < N; ++i) s.add(c[0][i] * decay(nodes.z[i] * nodes.z[i]));
        total = s.value();
    } else if (d == 2) {
        KahanSum s;
        for (std::size_t i = 0; i < N; ++i) {
            const double zi2 = nodes.z[i] * nodes.z[i];
            double inner = 0;
            for (std::size_t j = 0; j < N; ++j) inner += c[1][j] * decay(zi2 + nodes.z[j] * nodes.z[j]);
            s.add(c[0][i] * inner);
        }
        total = s.value();
    } else if (d == 3) {
        const double count = static_cast<double>(N) * N * N;
        if (count > static_cast<double>(spec_.max_tensor_nodes))
            throw ResolutionError("tensor Fourier grid exceeds node budget in d = 3",
                                  static_cast<std::size_t>(count));
        KahanSum s;
        for (std::size_t i = 0; i < N; ++i) {
            const double zi2 = nodes.z[i] * nodes.z[i];
            double mid = 0;
            for (std::size_t j = 0; j < N; ++j) {
                const double zij2 = zi2 + nodes.z[j] * nodes.z[j];
                double inner = 0;
                for (std::size_t l = 0; l < N; ++l) inner += c[2][l] * decay(zij2 + nodes.z[l] * nodes.z[l]);
                mid += c[1][j] * inner;
            }
            s.add(c[0][i] * mid);
        }
        total = s.value();
    } else {
        throw DomainError("Fourier inversion implemented for dim <= 3");
    }
    return total / std::pow(pi, d);
}

double StableKernel::density_closed_form(double t, std::span<const double> x) const {
    if (!(t > 0.0)) throw DomainError("heat kernel requires t > 0");
    const int d = params_.dim;
    const double r2 = [&] {
        double s = 0;
        for (double v : x) s += v * v;
        return s;
    }();
    if (params_.alpha == 2.0) {
        // Gaussian with variance 2 nu t per axis.
        const double var = 2.0 * params_.nu * t;
        return std::pow(2.0 * pi * var, -0.5 * d) * std::exp(-0.5 * r2 / var);
    }
    if (params_.alpha == 1.0) {
        const double s = params_.nu * t;
        return std::tgamma(0.5 * (d + 1)) / std::pow(pi, 0.5 * (d + 1)) * s /
               std::pow(s * s + r2, 0.5 * (d + 1));
    }
    throw DomainError("closed form available only for alpha in {1, 2}");
}

double StableKernel::density_fourier(double t, std::span<const double> x) const {
    if (!(t > 0.0)) throw DomainError("heat kernel requires t > 0");
    if (x.size() != static_cast<std::size_t>(params_.dim)) throw DomainError("point dimension mismatch");
    const double scale = std::pow(t, -1.0 / params_.alpha);
    std::vector<double> y(x.begin(), x.end());
    for (auto& v : y) v *= scale;
    const Nodes nodes = reference_nodes(norm_inf(y));
    return std::pow(scale, params_.dim) * clamp(reference_fourier(nodes, y));
}

double StableKernel::density(double t, std::span<const double> x) const {
    if (has_closed_form()) {
        if (!(t > 0.0)) throw DomainError("heat kernel requires t > 0");
        if (x.size() != static_cast<std::size_t>(params_.dim)) throw DomainError("point dimension mismatch");
        return density_closed_form(t, x);
    }
    return density_fourier(t, x);
}

std::vector<double> StableKernel::density_on_grid(double t, std::span<const double> axis) const {
    if (!(t > 0.0)) throw DomainError("heat kernel requires t > 0");
    const int d = params_.dim;
    const std::size_t m = axis.size();
    std::size_t total = 1;
    for (int k = 0; k < d; ++k) total *= m;
    std::vector<double> out(total);

    if (has_closed_form() || d == 1) {
        Torus grid{d, m};
        std::vector<double> pt(static_cast<std::size_t>(d));
        if (has_closed_form()) {
            for (std::size_t i = 0; i < total; ++i) {
                const auto c = grid.coords(i);
                for (int k = 0; k < d; ++k) pt[static_cast<std::size_t>(k)] = axis[static_cast<std::size_t>(c[static_cast<std::size_t>(k)])];
                out[i] = density_closed_form(t, pt);
            }
            return out;
        }
        const double scale = std::pow(t, -1.0 / params_.alpha);
        double rmax = 0;
        for (double v : axis) rmax = std::max(rmax, std::abs(v) * scale);
        const Nodes nodes = reference_nodes(rmax);
        for (std::size_t i = 0; i < m; ++i) {
            const double y = axis[i] * scale;
            out[i] = scale * clamp(reference_fourier(nodes, std::span<const double>(&y, 1)));
        }
        return out;
    }
    if (d != 2) throw DomainError("grid Fourier evaluation implemented for dim <= 2");

    // p = pi^{-2} C E C^T with C(a, i) = w_i cos(y_a z_i), E(i, j) = exp(-nu |z|^alpha).
    const double scale = std::pow(t, -1.0 / params_.alpha);
    double rmax = 0;
    for (double v : axis) rmax = std::max(rmax, std::abs(v) * scale);
    const Nodes nodes = reference_nodes(rmax);
    const auto N = static_cast<Eigen::Index>(nodes.z.size());
    if (static_cast<double>(N) * N > static_cast<double>(spec_.max_tensor_nodes))
        throw ResolutionError("tensor Fourier grid exceeds node budget", static_cast<std::size_t>(N) * N);
    Eigen::MatrixXd C(static_cast<Eigen::Index>(m), N);
    for (std::size_t a = 0; a < m; ++a)
        for (Eigen::Index i = 0; i < N; ++i)
            C(static_cast<Eigen::Index>(a), i) = nodes.w[static_cast<std::size_t>(i)] *
                std::cos(axis[a] * scale * nodes.z[static_cast<std::size_t>(i)]);
    Eigen::MatrixXd E(N, N);
    for (Eigen::Index i = 0; i < N; ++i)
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double zi = nodes.z[static_cast<std::size_t>(i)], zj = nodes.z[static_cast<std::size_t>(j)];
            E(i, j) = E(j, i) = std::exp(-params_.nu * std::pow(zi * zi + zj * zj, 0.5 * params_.alpha));
        }
    const Eigen::MatrixXd P = (C * E) * C.transpose();
    const double pref = scale * scale / (pi * pi);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b)
            out[a * m + b] = pref * clamp(P(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)));
    return out;
}

double envelope(const StableParams& params, double t, std::span<const double> x) {
    params.validate();
    if (params.alpha >= 2.0)
        throw DomainError("two-sided polynomial heat estimate does not hold for alpha = 2");
    if (!(t > 0.0)) throw DomainError("envelope requires t > 0");
    const double r = norm2(x);
    const double near = std::pow(t, -params.dim / params.alpha);
    if (r == 0.0) return near;
    return std::min(near, t / std::pow(r, params.dim + params.alpha));
}

EnvelopeFit fit_envelope(const StableKernel& kernel, std::span<const double> t_grid,
                         std::span<const double> radii) {
    const int d = kernel.params().dim;
    EnvelopeFit fit;
    fit.c_lower = std::numeric_limits<double>::infinity();
    std::vector<double> x(static_cast<std::size_t>(d), 0.0);
    for (double t : t_grid)
        for (double r : radii) {
            x[0] = r;
            const double ratio = kernel.density(t, x) / envelope(kernel.params(), t, x);
            fit.c_lower = std::min(fit.c_lower, ratio);
            fit.c_upper = std::max(fit.c_upper, ratio);
            ++fit.points;
        }
    return fit;
}

double gradient_ratio(const StableKernel& kernel, double t, std::span<const double> x) {
    if (!(t > 0.0)) throw DomainError("gradient check requires t > 0");
    const std::size_t d = x.size();
    const double h = 1e-4 * std::pow(t, 1.0 / kernel.params().alpha);
    std::vector<double> xp(x.begin(), x.end()), xm(x.begin(), x.end());
    double g2 = 0;
    for (std::size_t k = 0; k < d; ++k) {
        xp[k] = x[k] + h;
        xm[k] = x[k] - h;
        const double gk = (kernel.density(t, xp) - kernel.density(t, xm)) / (2.0 * h);
        g2 += gk * gk;
        xp[k] = xm[k] = x[k];
    }
    std::vector<double> half(x.begin(), x.end());
    for (auto& v : half) v *= 0.5;
    return std::sqrt(g2) * std::pow(t, 1.0 / kernel.params().alpha) / kernel.density(t, half);
}

double riesz_fourier_constant(int dim, double alpha) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("Riesz Fourier constant needs 0 < alpha < 2");
    return std::pow(pi, 0.5 * dim) * std::tgamma(1.0 - 0.5 * alpha) /
           (std::pow(2.0, alpha) * 0.5 * alpha * std::tgamma(0.5 * (dim + alpha)));
}

double riesz_kernel_transform_constant(int dim, double beta) {
    if (!(beta > 0.0 && beta < dim)) throw DomainError("Riesz kernel transform needs 0 < beta < d");
    return std::pow(pi, 0.5 * dim) * std::pow(2.0, dim - beta) * std::tgamma(0.5 * (dim - beta)) /
           std::tgamma(0.5 * beta);
}

namespace {

// Spectral route: (2 pi)^{-d} c_{d,beta} \int e^{-i o.xi} e^{-2 t nu |xi|^alpha} |xi|^{beta-d} dxi,
// reduced to a Hankel transform.
double correlation_smoothing_spectral(const StableParams& p, double t, double rho, double beta) {
    const int d = p.dim;
    const double c = riesz_kernel_transform_constant(d, beta);
    const double lam = 2.0 * t * p.nu;
    const double pref = c / std::pow(2.0 * pi, d);
    if (rho == 0.0) {
        return pref * unit_sphere_area(d) * std::tgamma(beta / p.alpha) /
               (p.alpha * std::pow(lam, beta / p.alpha));
    }
    // (2pi)^{d/2} rho^{1-d/2} \int_0^inf J_{d/2-1}(r rho) e^{-lam r^alpha} r^{beta - d/2} dr.
    const double order = 0.5 * d - 1.0;
    auto bessel_ratio = [&](double x) {
        // J_order(x) / x^order, regular at 0.
        if (x < 1e-8) return std::pow(0.5, order) / std::tgamma(order + 1.0);
        return std::cyl_bessel_j(order, x) / std::pow(x, order);
    };
    // integrand = rho^{order} bessel_ratio(r rho) e^{-lam r^alpha} r^{beta-1}
    const double rmax = std::pow(37.0 / lam, 1.0 / p.alpha);
    const double r0 = std::min(rmax / 16.0, 1.0 / (1.0 + rho));
    // [0, r0] in u = r^beta, where r^{beta-1} dr = du / beta.
    std::vector<double> ubreaks{0.0};
    const double u0 = std::pow(r0, beta);
    for (int k = 12; k >= 0; --k) ubreaks.push_back(u0 * std::ldexp(1.0, -k));
    const double head = integrate_panels(ubreaks, [&](double u) {
        const double r = std::pow(u, 1.0 / beta);
        return bessel_ratio(r * rho) * std::exp(-lam * std::pow(r, p.alpha)) / beta;
    });
    const double h = std::min(rmax / 16.0, 6.0 / (1.0 + rho));
    std::vector<double> rbreaks;
    for (double r = r0; r < rmax; r += h) rbreaks.push_back(r);
    rbreaks.push_back(rmax);
    const double body = integrate_panels(rbreaks, [&](double r) {
        return bessel_ratio(r * rho) * std::exp(-lam * std::pow(r, p.alpha)) * std::pow(r, beta - 1.0);
    });
    // rho^{1-d/2} from the Hankel reduction cancels rho^{order} from bessel_ratio.
    return pref * std::pow(2.0 * pi, 0.5 * d) * (head + body);
}

} // namespace

double correlation_smoothing(const StableKernel& kernel, double t, std::span<const double> offset,
                             double beta) {
    const auto& p = kernel.params();
    if (!(t > 0.0)) throw DomainError("correlation smoothing requires t > 0");
    if (!(beta > 0.0 && beta < std::min(p.alpha, static_cast<double>(p.dim))))
        throw DomainError("correlation smoothing requires 0 < beta < min(alpha, d)");
    if (offset.size() != static_cast<std::size_t>(p.dim)) throw DomainError("offset dimension mismatch");
    if (p.dim > 1) return correlation_smoothing_spectral(p, t, norm2(offset), beta);

    // d = 1, real space: \int_0^inf [p(w - o) + p(-w - o)] w^{-beta} dw with p = p_{2t}.
    // Substituting w = s^q, q = 1/(1 - beta), turns w^{-beta} dw into q ds.
    const double o = offset[0];
    const double sigma = std::pow(2.0 * t * p.nu, 1.0 / p.alpha);
    const double far = 200.0 * sigma;
    const double wmax = std::abs(o) + far;
    std::vector<double> wb{0.0};
    for (int k = -30; sigma * std::ldexp(1.0, k) < wmax; ++k) wb.push_back(sigma * std::ldexp(1.0, k));
    for (double f : {-4.0, -2.0, -1.0, -0.5, -0.25, 0.0, 0.25, 0.5, 1.0, 2.0, 4.0}) {
        const double w = std::abs(o) + f * sigma;
        if (w > 0.0) wb.push_back(w);
    }
    wb.push_back(wmax);
    std::sort(wb.begin(), wb.end());
    wb.erase(std::unique(wb.begin(), wb.end()), wb.end());

    const double q = 1.0 / (1.0 - beta);
    std::vector<double> sb(wb.size());
    std::transform(wb.begin(), wb.end(), sb.begin(), [&](double w) { return std::pow(w, 1.0 - beta); });
    const double body = q * integrate_panels(sb, [&](double s) {
        const double w = std::pow(s, q);
        return kernel.density(2.0 * t, w - o) + kernel.density(2.0 * t, -w - o);
    });
    double tail = 0.0;
    if (p.alpha < 2.0) {
        // p_{2t}(w) ~ A 2t |w|^{-1-alpha} for |w| >> sigma.
        const double A = std::tgamma(1.0 + p.alpha) * std::sin(0.5 * pi * p.alpha) * p.nu / pi;
        tail = 2.0 * A * 2.0 * t * std::pow(wmax, -p.alpha - beta) / (p.alpha + beta);
    }
    return body + tail;
}

double grid_mass(const StableKernel& kernel, double t, double spacing, double radius) {
    if (!(spacing > 0.0 && radius > 0.0)) throw DomainError("grid mass needs positive spacing and radius");
    const int d = kernel.params().dim;
    const auto half = static_cast<long>(std::floor(radius / spacing + 1e-9));
    if (kernel.has_closed_form()) {
        // Quadrant sum with multiplicities; evaluation is cheap.
        if (d > 2) throw DomainError("grid mass implemented for dim <= 2");
        KahanSum s;
        std::vector<double> x(static_cast<std::size_t>(d));
        if (d == 1) {
            for (long i = 0; i <= half; ++i) {
                x[0] = i * spacing;
                s.add((i == 0 ? 1.0 : 2.0) * kernel.density_closed_form(t, x));
            }
            return s.value() * spacing;
        }
        for (long i = 0; i <= half; ++i) {
            double row = 0;
            x[0] = i * spacing;
            for (long j = 0; j <= half; ++j) {
                x[1] = j * spacing;
                row += (j == 0 ? 1.0 : 2.0) * kernel.density_closed_form(t, x);
            }
            s.add((i == 0 ? 1.0 : 2.0) * row);
        }
        return s.value() * spacing * spacing;
    }
    std::vector<double> axis;
    for (long i = -half; i <= half; ++i) axis.push_back(i * spacing);
    const auto values = kernel.density_on_grid(t, axis);
    KahanSum s;
    for (double v : values) s.add(v);
    return s.value() * std::pow(spacing, d);
}

} // namespace stochheat
