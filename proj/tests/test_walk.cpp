#include "doctest.h"

#include "stochheat/fft.hpp"
#include "stochheat/walk.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include <cmath>
#include <numbers>

using namespace stochheat;

namespace {

// \int_R (1 - cos x) |x|^{-1-alpha} dx by quadrature: tanh-sinh near 0,
// Gauss-Kronrod panels of width pi further out, analytic bound for the far tail.
double riesz_constant_oracle(double alpha) {
    auto f = [&](double x) {
        if (x < 1e-8) return 0.5 * std::pow(x, 1.0 - alpha);
        const double h = std::sin(0.5 * x);
        return 2.0 * h * h * std::pow(x, -1.0 - alpha);
    };
    boost::math::quadrature::tanh_sinh<double> ts;
    double s = ts.integrate(f, 0.0, 1.0);
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    const double X = 1.0 + 4000.0 * std::numbers::pi;
    for (double a = 1.0; a < X - 1e-9; a += std::numbers::pi) s += GK::integrate(f, a, a + std::numbers::pi, 5, 1e-14);
    s += std::pow(X, -alpha) / alpha;  // mean of 1 - cos is 1 beyond X
    return 2.0 * s;
}

// nu of the truncated 1-d heavy tail: normalization times the Riesz constant.
double heavy_nu_oracle(double alpha, long J) {
    double s = 0.0;
    for (long j = J; j >= 1; --j) s += std::pow(double(j), -1.0 - alpha);
    return riesz_constant_oracle(alpha) / (2.0 * s);
}

double simple_walk_p0(double t) { return std::exp(-t) * boost::math::cyl_bessel_i(0, t); }

} // namespace

TEST_SUITE("walk") {

TEST_CASE("characteristic function of the nearest-neighbor walk") {
    const auto w = DislocationDistribution::nearest_neighbor(1);
    CHECK(w.mu_hat(0.0) == 1.0);
    CHECK(w.mu_hat(std::numbers::pi) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(w.mu_hat(0.1) == doctest::Approx(0.995004).epsilon(1e-6));
    CHECK(w.nu() == 0.5);
    CHECK(w.alpha() == 2.0);
}

TEST_CASE("jump laws are symmetric probability vectors without mass at 0") {
    const std::vector<DislocationDistribution> walks = {
        DislocationDistribution::nearest_neighbor(2),
        DislocationDistribution::product_moment(1, {1.0, 0.5, 0.25}),
        DislocationDistribution::heavy_tail(1, 1.5, 200),
        DislocationDistribution::heavy_tail(2, 1.2, 20),
        DislocationDistribution::heavy_tail_mixture(1, {{1.2, 1.0}, {1.7, 2.0}}, 100),
    };
    for (const auto& w : walks) {
        const auto& v = w.weights();
        const Torus cube{w.dim(), static_cast<std::size_t>(2 * w.support_radius() + 1)};
        double s = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            CHECK(v[i] >= 0.0);
            CHECK(v[i] == v[v.size() - 1 - i]);
            s += v[i];
        }
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(v[v.size() / 2] == 0.0);
        (void)cube;
        for (double z : {0.3, 1.0, 2.5}) CHECK(std::abs(w.mu_hat(std::vector<double>(std::size_t(w.dim()), z))) <= 1.0);
    }
    CHECK(walks[4].alpha() == 1.2);
}

TEST_CASE("nearest-neighbor diagnostics") {
    const auto w = DislocationDistribution::nearest_neighbor(1);
    const auto d = diagnose_assumptions(w, default_diagnostic_grid());
    CHECK(d.nu_hat == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(d.a_hat > 1.5);
    CHECK(d.max_charfn_away_from_zero < 1.0 - 1e-3);
    for (const auto& [z, v] : d.residual_curve) CHECK(v >= 0.0);
}

TEST_CASE("heavy-tail nu against an independent Riesz constant") {
    const double oracle = heavy_nu_oracle(1.5, 10000);
    const auto w = DislocationDistribution::heavy_tail(1, 1.5, 10000);
    CHECK(w.nu() == doctest::Approx(oracle).epsilon(1e-6));
    const auto d = diagnose_assumptions(w, default_diagnostic_grid());
    CHECK(d.nu_hat == doctest::Approx(oracle).epsilon(0.02));
    CHECK(d.nu_hat > 0.0);
    const auto d3 = diagnose_assumptions(DislocationDistribution::heavy_tail(1, 1.5, 1000), default_diagnostic_grid());
    CHECK(std::abs(d3.nu_hat / d.nu_hat - 1.0) < 5e-3);
}

TEST_CASE("diagnostics reject walks with a periodic characteristic function") {
    // Jumps of +-2 only: mu_hat(pi) = 1.
    const auto w = DislocationDistribution::product_moment(1, {0.0, 1.0});
    CHECK_THROWS_AS(diagnose_assumptions(w, default_diagnostic_grid()), DiagnosticsError);
    const auto nn = DislocationDistribution::nearest_neighbor(1);
    CHECK_THROWS_AS(diagnose_assumptions(nn, log_grid(0.01, 0.5, 10)), DomainError);
    CHECK_THROWS_AS(diagnose_assumptions(nn, log_grid(0.01, 0.9, 30)), DomainError);
}

TEST_CASE("transition probabilities of the simple walk") {
    const auto w = DislocationDistribution::nearest_neighbor(1);
    const auto t0 = transition_probabilities(w, 0.0, 31);
    CHECK(t0.values[0] == doctest::Approx(1.0).epsilon(1e-14));
    for (std::size_t i = 1; i < 31; ++i) CHECK(std::abs(t0.values[i]) < 1e-14);
    const auto t1 = transition_probabilities(w, 1.0, 31);
    CHECK(t1.values[0] == doctest::Approx(simple_walk_p0(1.0)).epsilon(1e-12));
    CHECK(t1.values[0] == doctest::Approx(0.465759).epsilon(1e-6));
    CHECK(t1.sum() == doctest::Approx(1.0).epsilon(1e-9));
    // P(X_1 = k) = e^{-1} I_k(1).
    CHECK(t1.values[3] == doctest::Approx(std::exp(-1.0) * boost::math::cyl_bessel_i(3, 1.0)).epsilon(1e-10));
}

TEST_CASE("scaled transition") {
    const auto w = DislocationDistribution::nearest_neighbor(1);
    const auto s = scaled_transition(w, 0.5, 1.0, 63);
    CHECK(s.values[0] == doctest::Approx(simple_walk_p0(4.0)).epsilon(1e-10));
    CHECK(s.values[0] == doctest::Approx(0.207002).epsilon(1e-5));
    CHECK(s.density(0) == doctest::Approx(2.0 * s.values[0]).epsilon(1e-15));
    CHECK(s.sum() == doctest::Approx(1.0).epsilon(1e-9));
    const auto a = scaled_transition(w, 1.0, 2.0, 31), b = transition_probabilities(w, 2.0, 31);
    for (std::size_t i = 0; i < 31; ++i) CHECK(a.values[i] == b.values[i]);
}

TEST_CASE("heavy-tail tables: symmetry, mass, Chapman-Kolmogorov") {
    const auto w = DislocationDistribution::heavy_tail(1, 1.5, 500);
    const double t1 = 0.3, t2 = 0.5;
    const std::size_t n = suggest_torus_size(w, t1 + t2, 1e-8, 101);
    CHECK(n % 2 == 1);
    const auto a = transition_probabilities(w, t1, n), b = transition_probabilities(w, t2, n),
               c = transition_probabilities(w, t1 + t2, n);
    const Torus torus{1, n};
    const auto conv = circular_convolve_direct(torus, a.values, b.values);
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::abs(conv[i] - c.values[i]) < 1e-9);
        CHECK(c.values[i] == c.values[torus.negate(i)]);
        CHECK(c.values[i] >= 0.0);
    }
    CHECK(c.sum() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("too small a torus is a mass leak with a suggestion") {
    const auto w = DislocationDistribution::heavy_tail(1, 1.5, 1000);
    try {
        (void)transition_probabilities(w, 50.0, 15);
        FAIL("expected a mass leak");
    } catch (const MassLeakError& e) {
        CHECK(e.suggested_torus_n() > 15);
        CHECK(e.suggested_torus_n() % 2 == 1);
        CHECK_NOTHROW((void)transition_probabilities(w, 50.0, e.suggested_torus_n()));
    }
}

TEST_CASE("2-d product walk at the origin") {
    // Jumps are diagonal: after k jumps both coordinates are independent
    // k-step simple walks, so P(X_t = 0) = sum_k Poisson(k; t) (C(k, k/2) 2^{-k})^2.
    const double t = 1.5;
    double want = 0.0, pk = std::exp(-t);
    for (int k = 0; k < 80; ++k) {
        if (k > 0) pk *= t / k;
        if (k % 2) continue;
        const double ret = std::exp(std::lgamma(k + 1.0) - 2.0 * std::lgamma(k / 2 + 1.0) - k * std::log(2.0));
        want += pk * ret * ret;
    }
    const auto b = transition_probabilities(DislocationDistribution::nearest_neighbor(2), t, 21);
    CHECK(b.values[0] == doctest::Approx(want).epsilon(1e-10));
    CHECK(b.sum() == doctest::Approx(1.0).epsilon(1e-9));
}

}
