#include "stochheat/walk.hpp"

#include "stochheat/fft.hpp"
#include "stochheat/stable_kernel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace stochheat {

std::string to_string(WalkFamily f) {
    switch (f) {
    case WalkFamily::ProductMoment: return "product_moment";
    case WalkFamily::HeavyTail: return "heavy_tail";
    case WalkFamily::HeavyTailMixture: return "heavy_tail_mixture";
    }
    return "unknown";
}

WalkFamily walk_family_from_string(const std::string& s) {
    if (s == "product_moment" || s == "nearest_neighbor") return WalkFamily::ProductMoment;
    if (s == "heavy_tail") return WalkFamily::HeavyTail;
    if (s == "heavy_tail_mixture") return WalkFamily::HeavyTailMixture;
    throw ConfigError("unknown walk family '" + s + "'");
}

DislocationDistribution DislocationDistribution::nearest_neighbor(int dim) {
    return product_moment(dim, {1.0});
}

DislocationDistribution DislocationDistribution::product_moment(int dim,
                                                                std::vector<double> component_weights) {
    if (dim < 1) throw DomainError("walk dimension must be at least 1");
    if (component_weights.empty()) throw DomainError("product law needs at least one jump size");
    double total = 0;
    for (double w : component_weights) {
        if (!(w >= 0.0)) throw DomainError("component weights must be nonnegative");
        total += w;
    }
    if (!(total > 0.0)) throw DomainError("component weights must not all vanish");
    for (auto& w : component_weights) w /= total;

    DislocationDistribution d;
    d.family_ = WalkFamily::ProductMoment;
    d.dim_ = dim;
    d.alpha_ = 2.0;
    d.radius_ = static_cast<long>(component_weights.size());
    d.component_ = std::move(component_weights);
    const Torus cube{dim, static_cast<std::size_t>(2 * d.radius_ + 1)};
    d.weights_.assign(cube.size(), 0.0);
    for (std::size_t i = 0; i < cube.size(); ++i) {
        const auto c = cube.coords(i);
        double w = 1.0;
        for (long v : c) {
            const long j = v - d.radius_;
            w *= (j == 0) ? 0.0 : 0.5 * d.component_[static_cast<std::size_t>(std::abs(j) - 1)];
        }
        d.weights_[i] = w;
    }
    d.finalize();
    return d;
}

DislocationDistribution DislocationDistribution::heavy_tail(int dim, double alpha, long support_radius) {
    return heavy_tail_mixture(dim, {MixtureTerm{alpha, 1.0}}, support_radius);
}

DislocationDistribution DislocationDistribution::heavy_tail_mixture(int dim, std::vector<MixtureTerm> terms,
                                                                    long support_radius) {
    if (dim < 1) throw DomainError("walk dimension must be at least 1");
    if (terms.empty()) throw DomainError("mixture needs at least one term");
    if (support_radius < 1) throw DomainError("support radius must be at least 1");
    for (const auto& t : terms) {
        if (!(t.alpha > 0.0 && t.alpha < 2.0)) throw DomainError("heavy-tail exponents must lie in (0, 2)");
        if (!(t.weight > 0.0)) throw DomainError("mixture weights must be positive");
    }
    std::sort(terms.begin(), terms.end(), [](auto& a, auto& b) { return a.alpha < b.alpha; });
    for (std::size_t i = 1; i < terms.size(); ++i)
        if (terms[i].alpha == terms[i - 1].alpha) throw DomainError("mixture exponents must be distinct");

    DislocationDistribution d;
    d.family_ = terms.size() == 1 ? WalkFamily::HeavyTail : WalkFamily::HeavyTailMixture;
    d.dim_ = dim;
    d.alpha_ = terms.front().alpha;
    d.radius_ = support_radius;
    d.mixture_ = std::move(terms);
    const double side = 2.0 * static_cast<double>(support_radius) + 1.0;
    if (std::pow(side, dim) > 5e8) throw DomainError("heavy-tail support too large for this dimension");
    const Torus cube{dim, static_cast<std::size_t>(2 * support_radius + 1)};
    d.weights_.assign(cube.size(), 0.0);
    KahanSum total;
    for (std::size_t i = 0; i < cube.size(); ++i) {
        const auto c = cube.coords(i);
        double r2 = 0;
        for (long v : c) r2 += static_cast<double>((v - support_radius) * (v - support_radius));
        if (r2 == 0.0) continue;
        double w = 0;
        for (const auto& t : d.mixture_) w += t.weight * std::pow(r2, -0.5 * (dim + t.alpha));
        d.weights_[i] = w;
        total.add(w);
    }
    d.norm_c_ = 1.0 / total.value();
    for (auto& w : d.weights_) w *= d.norm_c_;
    d.finalize();
    return d;
}

void DislocationDistribution::finalize() {
    const Torus cube{dim_, static_cast<std::size_t>(2 * radius_ + 1)};
    KahanSum total;
    for (double w : weights_) total.add(w);
    const double inv = 1.0 / total.value();
    for (auto& w : weights_) w *= inv;
    support_.clear();
    support_w_.clear();
    for (std::size_t i = 0; i < cube.size(); ++i) {
        if (weights_[i] == 0.0) continue;
        for (long v : cube.coords(i)) support_.push_back(v - radius_);
        support_w_.push_back(weights_[i]);
    }
}

double DislocationDistribution::weight(std::span<const long> jump) const {
    if (jump.size() != static_cast<std::size_t>(dim_)) throw DomainError("jump dimension mismatch");
    std::size_t idx = 0;
    const std::size_t side = static_cast<std::size_t>(2 * radius_ + 1);
    for (long v : jump) {
        if (std::abs(v) > radius_) return 0.0;
        idx = idx * side + static_cast<std::size_t>(v + radius_);
    }
    return weights_[idx];
}

double DislocationDistribution::mu_hat(std::span<const double> z) const {
    if (z.size() != static_cast<std::size_t>(dim_)) throw DomainError("frequency dimension mismatch");
    KahanSum s;
    const std::size_t d = static_cast<std::size_t>(dim_);
    for (std::size_t e = 0; e < support_w_.size(); ++e) {
        double phase = 0;
        for (std::size_t k = 0; k < d; ++k) phase += z[k] * static_cast<double>(support_[e * d + k]);
        s.add(support_w_[e] * std::cos(phase));
    }
    return s.value();
}

double DislocationDistribution::jump_variance() const {
    KahanSum s;
    const std::size_t d = static_cast<std::size_t>(dim_);
    for (std::size_t e = 0; e < support_w_.size(); ++e) {
        const double j = static_cast<double>(support_[e * d]);
        s.add(support_w_[e] * j * j);
    }
    return s.value();
}

double DislocationDistribution::nu() const {
    if (family_ == WalkFamily::ProductMoment) return 0.5 * jump_variance();
    const auto& lead = mixture_.front();
    return norm_c_ * lead.weight * riesz_fourier_constant(dim_, lead.alpha);
}

double DislocationDistribution::a_cap() const {
    if (family_ == WalkFamily::ProductMoment) return 1.0;
    double a = 2.0 - alpha_;
    if (mixture_.size() > 1) a = std::min(a, mixture_[1].alpha - alpha_);
    return std::min(a, 1.0);
}

double DislocationDistribution::tail_weight(double r) const {
    if (family_ == WalkFamily::ProductMoment) return 0.0;
    double w = 0;
    for (const auto& t : mixture_) w += t.weight * std::pow(r, -(dim_ + t.alpha));
    return norm_c_ * w;
}

std::vector<double> DislocationDistribution::torus_kernel(const Torus& torus) const {
    if (torus.dim != dim_) throw DomainError("torus dimension does not match walk");
    std::vector<double> k(torus.size(), 0.0);
    const std::size_t d = static_cast<std::size_t>(dim_);
    for (std::size_t e = 0; e < support_w_.size(); ++e) {
        std::span<const long> jump(&support_[e * d], d);
        k[torus.index(jump)] += support_w_[e];
    }
    return k;
}

std::vector<double> DislocationDistribution::torus_charfn(const Torus& torus) const {
    return circulant_spectrum(torus, torus_kernel(torus));
}

std::string DislocationDistribution::describe() const {
    std::ostringstream os;
    os << to_string(family_) << "(dim=" << dim_ << ", alpha=" << alpha_ << ", J=" << radius_ << ")";
    return os.str();
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
    std::vector<double> g(count);
    for (std::size_t i = 0; i < count; ++i)
        g[i] = lo * std::pow(hi / lo, count == 1 ? 0.0 : static_cast<double>(i) / (count - 1));
    return g;
}

std::vector<double> default_diagnostic_grid() { return log_grid(0.02, 0.5, 40); }

AssumptionDiagnostics diagnose_assumptions(const DislocationDistribution& walk,
                                           std::span<const double> radii) {
    if (radii.size() < 20) throw DomainError("diagnostic grid needs at least 20 radii");
    for (double r : radii)
        if (!(r >= 1e-3 && r <= 0.5)) throw DomainError("diagnostic radii must lie in [1e-3, 0.5]");

    const double alpha = walk.alpha();
    const std::size_t d = static_cast<std::size_t>(walk.dim());
    std::vector<double> gap(radii.size()), lr(radii.size()), lg(radii.size());
    std::vector<double> z(d, 0.0);
    for (std::size_t i = 0; i < radii.size(); ++i) {
        z[0] = radii[i];
        gap[i] = 1.0 - walk.mu_hat(z);
        if (!(gap[i] > 0.0))
            throw DiagnosticsError(walk.describe() + ": 1 - mu_hat vanishes near the origin");
        lr[i] = std::log(radii[i]);
        lg[i] = std::log(gap[i]);
    }
    AssumptionDiagnostics diag;
    const LineFit loglog = fit_line(lr, lg);
    diag.fitted_alpha = loglog.slope;
    diag.r_squared = loglog.r_squared;
    if (loglog.r_squared < 0.99)
        throw DiagnosticsError(walk.describe() + ": log-log fit of 1 - mu_hat has R^2 < 0.99");

    // Variable projection: for each trial a, 1 - mu_hat = nu r^alpha + C r^{alpha+a}
    // is linear in (nu, C); errors are weighted relative to 1 - mu_hat. Truncated
    // heavy tails get an extra constant for the jump mass cut off beyond J.
    const bool truncated = walk.family() != WalkFamily::ProductMoment;
    const int nb = truncated ? 3 : 2;
    double best_err = std::numeric_limits<double>::infinity();
    for (int step = 1; step <= 300; ++step) {
        const double a = 0.01 * step;
        Eigen::MatrixXd A(radii.size(), nb);
        Eigen::VectorXd b = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(radii.size()));
        for (std::size_t i = 0; i < radii.size(); ++i) {
            const auto row = static_cast<Eigen::Index>(i);
            A(row, 0) = std::pow(radii[i], alpha) / gap[i];
            A(row, 1) = std::pow(radii[i], alpha + a) / gap[i];
            if (truncated) A(row, 2) = 1.0 / gap[i];
        }
        const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(b);
        const double err = (A * coef - b).squaredNorm();
        if (std::isfinite(err) && err < best_err) {
            best_err = err;
            diag.nu_hat = coef(0);
        }
    }
    if (!(diag.nu_hat > 0.0)) throw DiagnosticsError(walk.describe() + ": fitted nu is not positive");

    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double D = -gap[i] + diag.nu_hat * std::pow(radii[i], alpha);
        diag.residual_curve.emplace_back(radii[i], std::abs(D));
        if (std::abs(D) > 0.0) {
            lx.push_back(lr[i]);
            ly.push_back(std::log(std::abs(D)));
        }
    }
    diag.a_hat = lx.size() >= 2 ? std::max(0.0, fit_line(lx, ly).slope - alpha) : 0.0;

    const Torus coarse{walk.dim(), 64};
    const auto charfn = walk.torus_charfn(coarse);
    diag.max_charfn_away_from_zero = -1.0;
    for (std::size_t i = 0; i < coarse.size(); ++i) {
        double r2 = 0;
        for (long m : coarse.offset(i)) {
            const double zm = 2.0 * std::numbers::pi * static_cast<double>(m) / 64.0;
            r2 += zm * zm;
        }
        if (r2 < 0.25 * 0.25) continue;
        diag.max_charfn_away_from_zero = std::max(diag.max_charfn_away_from_zero, charfn[i]);
    }
    if (diag.max_charfn_away_from_zero > 1.0 - 1e-3)
        throw DiagnosticsError(walk.describe() + ": mu_hat reaches 1 away from the origin (periodic walk)");
    return diag;
}

double TransitionTable::density(std::size_t index) const {
    return values[index] / std::pow(epsilon, torus.dim);
}

double TransitionTable::sum() const {
    KahanSum s;
    for (double v : values) s.add(v);
    return s.value();
}

double wrap_estimate(const DislocationDistribution& walk, double t, std::size_t n) {
    if (t <= 0.0) return 0.0;
    const double half = 0.5 * static_cast<double>(n);
    const int d = walk.dim();
    // Gaussian bulk with the per-axis variance of the walk; 1.5 safety factor
    // on the variance.
    const double var = 1.5 * t * walk.jump_variance();
    double est = 2.0 * d * std::exp(-half * half / (2.0 * var));
    if (walk.family() != WalkFamily::ProductMoment) {
        // Single big jump: P(X_t = y) ~ t mu(y) beyond the bulk scale.
        const double bulk = 3.0 * std::pow(walk.nu() * t, 1.0 / walk.alpha());
        if (half <= bulk) return 1.0;
        est = 2.0 * d * t * walk.tail_weight(half);
    }
    return std::min(est, 1.0);
}

std::size_t suggest_torus_size(const DislocationDistribution& walk, double t, double tol,
                               std::size_t at_least) {
    std::size_t n = next_fft_size(std::max<std::size_t>(at_least, 3), true);
    while (wrap_estimate(walk, t, n) > tol) n = next_fft_size(n + n / 8 + 2, true);
    return n;
}

TransitionTable transition_probabilities(const DislocationDistribution& walk, double t,
                                         std::size_t torus_n, double wrap_tol) {
    if (!(t >= 0.0)) throw DomainError("transition time must be nonnegative");
    if (torus_n < 1) throw DomainError("torus needs at least one site");
    const double leak = wrap_estimate(walk, t, torus_n);
    if (leak > wrap_tol) {
        const std::size_t suggestion = suggest_torus_size(walk, t, wrap_tol, torus_n);
        std::ostringstream os;
        os << "torus of " << torus_n << " sites too small for " << walk.describe() << " at walk time " << t
           << " (folded mass per site ~" << leak << "); use at least " << suggestion;
        throw MassLeakError(os.str(), suggestion);
    }
    TransitionTable table;
    table.t = t;
    table.torus = Torus{walk.dim(), torus_n};
    const auto charfn = walk.torus_charfn(table.torus);
    std::vector<std::complex<double>> spec(charfn.size());
    for (std::size_t i = 0; i < charfn.size(); ++i) spec[i] = std::exp(-t * (1.0 - charfn[i]));
    TorusFFT fft(table.torus);
    fft.backward(spec);
    const double inv = 1.0 / static_cast<double>(spec.size());
    table.values.resize(spec.size());
    for (std::size_t i = 0; i < spec.size(); ++i) {
        double v = spec[i].real() * inv;
        if (v < 0.0) {
            ++table.clamped;
            table.clamped_mass += -v;
            v = 0.0;
        }
        table.values[i] = v;
    }
    if (table.clamped_mass > 1e-9)
        throw NumericalError("transition table lost more than 1e-9 mass to negative DFT artifacts");
    // Symmetrize exactly; the DFT leaves roundoff-level asymmetry.
    for (std::size_t i = 0; i < table.values.size(); ++i) {
        const std::size_t j = table.torus.negate(i);
        if (j > i) {
            const double m = 0.5 * (table.values[i] + table.values[j]);
            table.values[i] = table.values[j] = m;
        }
    }
    return table;
}

TransitionTable scaled_transition(const DislocationDistribution& walk, double epsilon, double t,
                                  std::size_t torus_n, double wrap_tol) {
    if (!(epsilon > 0.0)) throw DomainError("lattice spacing must be positive");
    auto table = transition_probabilities(walk, t / std::pow(epsilon, walk.alpha()), torus_n, wrap_tol);
    table.epsilon = epsilon;
    table.t = t;
    return table;
}

} // namespace stochheat
