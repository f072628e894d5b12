#include "stochheat/local_limit.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace stochheat {

double default_tail_exponent(const DislocationDistribution& walk) {
    if (walk.alpha() >= 2.0) return walk.a_cap();
    const auto diag = diagnose_assumptions(walk, default_diagnostic_grid());
    return std::clamp(diag.a_hat, 0.0, walk.a_cap());
}

LLTErrorReport llt_sup_error(const DislocationDistribution& walk, const StableKernel& kernel,
                             double epsilon, double t, const LLTOptions& options) {
    const auto& kp = kernel.params();
    const int d = walk.dim();
    const double alpha = walk.alpha();
    if (kp.dim != d || std::abs(kp.alpha - alpha) > 1e-12 ||
        std::abs(kp.nu - walk.nu()) > 1e-10 * walk.nu())
        throw DomainError("stable kernel parameters do not match the walk limit (" + walk.describe() + ")");
    if (!(epsilon > 0.0)) throw DomainError("lattice spacing must be positive");
    if (t < std::pow(epsilon, alpha) * (1.0 - 1e-12))
        throw DomainError("local limit comparison needs t >= eps^alpha");

    LLTErrorReport rep;
    rep.epsilon = epsilon;
    rep.t = t;
    const double scale = std::pow(t, 1.0 / alpha);
    rep.window_radius = options.window_radius > 0.0 ? options.window_radius : 10.0 * scale;
    rep.a_used = alpha < 2.0 ? (options.a >= 0.0 ? options.a : default_tail_exponent(walk)) : 0.0;

    const long K = static_cast<long>(std::floor(rep.window_radius / epsilon + 1e-9));
    const std::size_t cover = static_cast<std::size_t>(2 * K + 1);
    const double walk_time = t / std::pow(epsilon, alpha);
    std::size_t n = options.torus_n;
    if (n == 0) {
        n = suggest_torus_size(walk, walk_time, options.wrap_tol, cover);
    } else if (n < cover) {
        std::ostringstream os;
        os << "window of radius " << rep.window_radius << " needs " << cover << " sites per axis, torus has " << n;
        throw DomainError(os.str());
    }
    rep.torus_n = n;
    const auto table = scaled_transition(walk, epsilon, t, n, options.wrap_tol);

    std::vector<double> axis(cover);
    for (long k = -K; k <= K; ++k) axis[static_cast<std::size_t>(k + K)] = epsilon * static_cast<double>(k);
    std::vector<double> p;
    if (d <= 2) {
        p = kernel.density_on_grid(t, axis);
    } else {
        const Torus box{d, cover};
        p.resize(box.size());
        std::vector<double> x(static_cast<std::size_t>(d));
        for (std::size_t i = 0; i < box.size(); ++i) {
            const auto c = box.coords(i);
            for (int a = 0; a < d; ++a) x[static_cast<std::size_t>(a)] = axis[static_cast<std::size_t>(c[static_cast<std::size_t>(a)])];
            p[i] = kernel.density(t, x);
        }
    }

    const Torus box{d, cover};
    std::vector<long> site(static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < box.size(); ++i) {
        const auto c = box.coords(i);
        double r2 = 0;
        for (int a = 0; a < d; ++a) {
            site[static_cast<std::size_t>(a)] = c[static_cast<std::size_t>(a)] - K;
            const double x = epsilon * static_cast<double>(site[static_cast<std::size_t>(a)]);
            r2 += x * x;
        }
        const double r = std::sqrt(r2);
        if (r > rep.window_radius * (1.0 + 1e-12)) continue;
        const double err = std::abs(table.density(table.torus.index(site)) - p[i]);
        rep.sup_error = std::max(rep.sup_error, err);
        if (alpha < 2.0 && r > scale)
            rep.tail_stat = std::max(rep.tail_stat, err * std::pow(r, d + alpha + rep.a_used) /
                                                        (t * std::pow(epsilon, rep.a_used)));
    }
    return rep;
}

RateFit fit_rate(std::span<const double> epsilons, std::span<const double> errors, std::size_t min_points) {
    if (epsilons.size() != errors.size()) throw DomainError("rate fit needs matching eps and error lists");
    std::set<double> distinct(epsilons.begin(), epsilons.end());
    if (distinct.size() < min_points) {
        std::ostringstream os;
        os << "rate fit needs at least " << min_points << " distinct eps values, got " << distinct.size();
        throw RegressionError(os.str());
    }
    if (*distinct.rbegin() / *distinct.begin() < 4.0 * (1.0 - 1e-12))
        throw RegressionError("rate fit needs eps values spanning at least two octaves");
    RateFit fit;
    std::vector<double> x, y;
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (!(epsilons[i] > 0.0 && errors[i] > 0.0))
            throw RegressionError("rate fit needs positive eps and errors");
        x.push_back(std::log(epsilons[i]));
        y.push_back(std::log(errors[i]));
        fit.points.emplace_back(x.back(), y.back());
    }
    const LineFit lf = fit_line(x, y);
    fit.slope = lf.slope;
    fit.intercept = lf.intercept;
    fit.r_squared = lf.r_squared;
    return fit;
}

RateFit fit_rate(std::span<const LLTErrorReport> reports, std::size_t min_points) {
    std::vector<double> e, err;
    for (const auto& r : reports) {
        e.push_back(r.epsilon);
        err.push_back(r.sup_error);
    }
    return fit_rate(e, err, min_points);
}

} // namespace stochheat
