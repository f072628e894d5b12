#include "doctest.h"

#include "stochheat/stable_kernel.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include <cmath>
#include <numbers>

using namespace stochheat;
using std::numbers::pi;

namespace {

// (1/pi) \int_0^inf cos(x z) exp(-nu z^alpha) dz, computed by Ooura's method.
double oracle_1d(double alpha, double nu, double x) {
    auto f = [&](double z) { return std::exp(-nu * std::pow(z, alpha)); };
    if (x == 0.0) return std::tgamma(1.0 / alpha) / (alpha * pi * std::pow(nu, 1.0 / alpha));
    static boost::math::quadrature::ooura_fourier_cos<double> ooura;
    return ooura.integrate(f, x).first / pi;
}

// (1/2pi) \int_0^inf J0(r z) exp(-z^alpha) z dz on panels up to where the
// integrand is below 1e-17.
double oracle_2d(double alpha, double r) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    auto f = [&](double z) { return boost::math::cyl_bessel_j(0, r * z) * std::exp(-std::pow(z, alpha)) * z; };
    const double zmax = std::pow(40.0, 1.0 / alpha);
    double s = 0.0;
    const int panels = 64;
    for (int i = 0; i < panels; ++i) s += GK::integrate(f, zmax * i / panels, zmax * (i + 1) / panels, 5, 1e-14);
    return s / (2.0 * pi);
}

} // namespace

TEST_SUITE("stable_kernel") {

TEST_CASE("closed forms at the origin") {
    const StableKernel g({2.0, 0.5, 1}), c({1.0, 1.0, 1});
    CHECK(g.density(1.0, 0.0) == doctest::Approx(0.398942).epsilon(1e-6));
    CHECK(c.density(1.0, 0.0) == doctest::Approx(0.318310).epsilon(1e-6));
    CHECK(g.density_fourier(1.0, 0.0) == doctest::Approx(1.0 / std::sqrt(2.0 * pi)).epsilon(1e-6));
    CHECK(c.density_fourier(1.0, 0.0) == doctest::Approx(1.0 / pi).epsilon(1e-6));
    // p_1(0) = 2 p_2(0) for the Cauchy kernel.
    CHECK(2.0 * c.density(2.0, 0.0) == doctest::Approx(1.0 / pi).epsilon(1e-14));
}

TEST_CASE("Fourier path agrees with closed forms away from the origin") {
    for (int d : {1, 2})
        for (double a : {1.0, 2.0}) {
            const StableKernel k({a, 0.7, d});
            for (double r : {0.3, 1.0, 2.5}) {
                std::vector<double> x(static_cast<std::size_t>(d), 0.0);
                x[0] = r;
                if (d == 2) x[1] = -0.5 * r;
                CHECK(k.density_fourier(1.3, x) == doctest::Approx(k.density_closed_form(1.3, x)).epsilon(1e-6));
            }
        }
}

TEST_CASE("alpha = 1.5 densities match independent quadrature") {
    const StableKernel k1({1.5, 1.0, 1});
    for (double x : {0.0, 0.5, 1.0, 3.0, 7.0})
        CHECK(k1.density(1.0, x) == doctest::Approx(oracle_1d(1.5, 1.0, x)).epsilon(1e-8));
    const StableKernel k2({1.5, 1.0, 2});
    for (double r : {0.0, 0.7, 2.0, 5.0}) {
        const double x[2] = {r * 0.6, r * 0.8};
        CHECK(k2.density(1.0, x) == doctest::Approx(oracle_2d(1.5, r)).epsilon(1e-7));
    }
    CHECK(oracle_2d(1.5, 0.0) == doctest::Approx(std::tgamma(2.0 / 1.5) / (1.5 * 2.0 * pi)).epsilon(1e-10));
}

TEST_CASE("scaling identity p_t(x) = c^d p_{c^alpha t}(c x)") {
    for (double a : {0.8, 1.5}) {
        const StableKernel k({a, 1.0, 1});
        for (double c : {0.5, 2.0, 3.0})
            for (double t : {0.5, 1.0})
                for (double x : {0.0, 0.4, 2.0}) {
                    const double lhs = k.density(t, x);
                    CHECK(std::abs(lhs - c * k.density(std::pow(c, a) * t, c * x)) <= 1e-8 * lhs);
                }
    }
}

TEST_CASE("densities are even") {
    const StableKernel k({1.3, 1.0, 2});
    const double x[2] = {0.9, -0.4}, y[2] = {-0.9, 0.4};
    CHECK(k.density(1.0, x) == k.density(1.0, y));
}

TEST_CASE("grid normalization within 1e-3") {
    CHECK(grid_mass(StableKernel({2.0, 0.5, 1}), 1.0, 0.05, 12.0) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(grid_mass(StableKernel({2.0, 1.0, 2}), 0.5, 0.1, 10.0) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(grid_mass(StableKernel({1.0, 1.0, 1}), 1.0, 0.1, 2000.0) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(grid_mass(StableKernel({1.5, 1.0, 1}), 1.0, 0.1, 200.0) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("domain checks") {
    CHECK_THROWS_AS(StableKernel({2.5, 1.0, 1}), DomainError);
    CHECK_THROWS_AS(StableKernel({1.0, 0.0, 1}), DomainError);
    const StableKernel k({1.5, 1.0, 1});
    CHECK_THROWS_AS(k.density(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(k.density(-1.0, 1.0), DomainError);
}

TEST_CASE("envelope shape and sandwich") {
    const StableParams p{1.5, 1.0, 1};
    CHECK(envelope(p, 1.0, 0.0) == 1.0);
    CHECK(envelope(p, 1.0, 10.0) == doctest::Approx(3.1623e-3).epsilon(1e-4));
    CHECK_THROWS_AS(envelope({2.0, 1.0, 1}, 1.0, 1.0), DomainError);
    const StableKernel k(p);
    const std::vector<double> ts{0.5, 1.0, 2.0};
    std::vector<double> radii;
    for (int i = 0; i <= 40; ++i) radii.push_back(0.5 * i);
    const auto fit = fit_envelope(k, ts, radii);
    CHECK(fit.c_lower > 0.0);
    CHECK(fit.c_lower <= fit.c_upper);
    for (double t : ts)
        for (double r : radii) {
            const double v = k.density(t, r), s = envelope(p, t, r);
            CHECK(v >= fit.c_lower * s * (1 - 1e-12));
            CHECK(v <= fit.c_upper * s * (1 + 1e-12));
        }
}

TEST_CASE("gradient ratio") {
    const StableKernel c({1.0, 1.0, 1}), g({2.0, 0.5, 1});
    CHECK(std::abs(gradient_ratio(c, 1.0, 0.0)) < 1e-9);
    // |p'(1)| = (2/pi)/4, p(1/2) = (1/pi)/1.25.
    CHECK(gradient_ratio(c, 1.0, 1.0) == doctest::Approx(0.625).epsilon(1e-6));
    double worst = 0.0;
    for (int i = -100; i <= 100; ++i) worst = std::max(worst, gradient_ratio(g, 1.0, 0.1 * i));
    CHECK(worst < 1.0);
}

TEST_CASE("correlation smoothing") {
    const StableKernel g({2.0, 0.5, 1});
    // p_2 is N(0, 2): E|G|^{-1/2} = 2^{-1/2} Gamma(1/4) / sqrt(pi).
    const double want = std::tgamma(0.25) / std::sqrt(2.0 * pi);
    CHECK(correlation_smoothing(g, 1.0, 0.0, 0.5) == doctest::Approx(want).epsilon(1e-8));
    const StableKernel k({1.5, 1.0, 1});
    double lo = 1e300, hi = 0.0;
    for (double t : {1.0, 0.25, 0.0625}) {
        const double v = correlation_smoothing(k, t, 0.0, 0.5) * std::pow(t, 0.5 / 1.5);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(hi / lo < 1.0 + 1e-6);
    double prev = correlation_smoothing(k, 1.0, 0.0, 0.5);
    for (double off : {0.5, 1.0, 2.0, 5.0, 20.0}) {
        const double v = correlation_smoothing(k, 1.0, off, 0.5);
        CHECK(v < prev);
        prev = v;
    }
    CHECK_THROWS_AS(correlation_smoothing(k, 1.0, 0.0, 1.0), DomainError);
    const StableKernel k2({1.5, 1.0, 2});
    const double o2[2] = {0.0, 0.0};
    CHECK(correlation_smoothing(k2, 1.0, o2, 1.2) > 0.0);
}

TEST_CASE("Riesz constants") {
    // d = 1, alpha = 1: \int (1 - cos x) x^{-2} dx = pi.
    CHECK(riesz_fourier_constant(1, 1.0) == doctest::Approx(pi).epsilon(1e-12));
    // d = 1, beta = 1/2: F(|x|^{-1/2}) = sqrt(2 pi) |xi|^{-1/2}.
    CHECK(riesz_kernel_transform_constant(1, 0.5) == doctest::Approx(std::sqrt(2.0 * pi)).epsilon(1e-12));
}

}
