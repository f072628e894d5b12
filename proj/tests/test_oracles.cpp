#include "doctest.h"

#include "stochheat/oracles.hpp"

#include <cmath>

using namespace stochheat;

namespace {

SimConfig pam(std::size_t n, double lambda) {
    SimConfig c;
    c.correlation = {CorrelationKind::Riesz, 0.5, 1.0};
    c.epsilon = 0.25;
    c.torus_n = n;
    c.sigma.lambda = lambda;
    c.dt = 1.0 / 64;
    c.t_end = 1.0;
    return c;
}

} // namespace

TEST_SUITE("oracles") {

TEST_CASE("single site: geometric Brownian motion") {
    auto c = pam(1, 0.7);
    c.u0.value = 1.3;
    const double r0 = cell_covariance_1d(0, 0.25, 0.5);
    const double rate = 0.49 * std::pow(0.25, -2.0) * r0;
    const auto m2 = pam_second_moment(c, 0.8);
    REQUIRE(m2.size() == 1);
    CHECK(m2[0] == doctest::Approx(1.69 * std::exp(rate * 0.8)).epsilon(1e-10));
    CHECK(pam_mean(c, 0.8)[0] == doctest::Approx(1.3).epsilon(1e-14));
    const auto g2 = pam_growth_rate(c, 2), g3 = pam_growth_rate(c, 3);
    CHECK(g2.gamma == doctest::Approx(rate).epsilon(1e-10));
    CHECK(g3.gamma == doctest::Approx(3.0 * rate).epsilon(1e-10));
    CHECK(pam_moment_tensor(c, 3, 0.1)[0] == doctest::Approx(std::pow(1.3, 3) * std::exp(3.0 * rate * 0.1)).epsilon(1e-8));
}

TEST_CASE("mean is the semigroup") {
    auto c = pam(12, 1.0);
    c.u0.kind = InitialKind::GaussianBump;
    c.u0.width = 0.4;
    const LatticeModel model(c);
    const auto m = pam_mean(c, 0.3);
    const auto want = apply_semigroup(c.walk, c.epsilon, model.torus(), 0.3, model.initial_field());
    for (std::size_t i = 0; i < m.size(); ++i) CHECK(m[i] == doctest::Approx(want[i]).epsilon(1e-12));
}

TEST_CASE("first and second moment identities") {
    auto flat = pam(10, 1.0);
    for (double v : pam_mean(flat, 0.7)) CHECK(v == doctest::Approx(1.0).epsilon(1e-13));
    auto ind = pam(10, 1.0);
    ind.u0.kind = InitialKind::HalfLine;
    ind.u0.threshold = 0.0;
    double m0 = 0.0, m1 = 0.0;
    for (double v : pam_mean(ind, 0.0)) m0 += v;
    for (double v : pam_mean(ind, 0.9)) m1 += v;
    CHECK(m1 == doctest::Approx(m0).epsilon(1e-12));

    auto quiet = pam(10, 0.0);
    quiet.u0.kind = InitialKind::GaussianBump;
    const auto m2 = pam_second_moment(quiet, 0.4);
    const auto mean = pam_mean(quiet, 0.4);
    for (std::size_t i = 0; i < 10; ++i)
        for (std::size_t j = 0; j < 10; ++j) CHECK(m2[i * 10 + j] == doctest::Approx(mean[i] * mean[j]).epsilon(1e-10));

    auto weak = pam(10, 0.5), strong = pam(10, 1.0);
    weak.u0.kind = strong.u0.kind = InitialKind::GaussianBump;
    const auto a = pam_second_moment(strong, 0.5), b = pam_second_moment(weak, 0.5);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] >= b[i]);
}

TEST_CASE("eigendecomposition and RK4 agree") {
    auto c = pam(32, 1.0);
    c.u0.kind = InitialKind::GaussianBump;
    c.u0.width = 0.5;
    const auto a = pam_second_moment(c, 0.5);
    const auto b = pam_moment_tensor(c, 2, 0.5);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-7));
}

TEST_CASE("second moment table is symmetric and dominates the squared mean") {
    auto c = pam(16, 0.8);
    c.u0.kind = InitialKind::GaussianBump;
    const auto m2 = pam_second_moment(c, 0.6);
    const auto m1 = pam_mean(c, 0.6);
    for (std::size_t i = 0; i < 16; ++i) {
        CHECK(m2[i * 16 + i] >= m1[i] * m1[i]);
        for (std::size_t j = 0; j < 16; ++j) CHECK(m2[i * 16 + j] == doctest::Approx(m2[j * 16 + i]).epsilon(1e-12));
    }
    const PamSecondMoment flow(c);
    const auto u0 = LatticeModel(c).initial_field();
    CHECK(flow.at(0.0)[1 * 16 + 3] == doctest::Approx(u0[1] * u0[3]).epsilon(1e-12));
}

TEST_CASE("growth rates") {
    CHECK(std::abs(pam_growth_rate(pam(8, 0.0), 2).gamma) < 1e-10);
    CHECK(std::abs(pam_growth_rate(pam(8, 0.0), 3).gamma) < 1e-10);
    const auto c = pam(8, 0.6);
    const auto g = pam_growth_rate(c, 2);
    CHECK(g.residual < 1e-8);
    CHECK(g.iterations > 0);
    // Log-slope of the diagonal second moment at late times.
    const double t1 = 30.0, t2 = 40.0;
    const double slope = (std::log(pam_second_moment(c, t2)[0]) - std::log(pam_second_moment(c, t1)[0])) / (t2 - t1);
    CHECK(slope == doctest::Approx(g.gamma).epsilon(1e-6));
    // Convexity in the moment order.
    CHECK(pam_growth_rate(c, 3).gamma / 3.0 > g.gamma / 2.0);
}

TEST_CASE("oracle limits") {
    CHECK_THROWS_AS(MomentFlow(pam(300, 1.0), 2), OracleError);
    CHECK_THROWS_AS(MomentFlow(pam(8, 1.0), 4), DomainError);
    auto nl = pam(8, 1.0);
    nl.sigma.kind = SigmaKind::SmoothBounded;
    CHECK_THROWS_AS(MomentFlow(nl, 2), DomainError);
    const MomentFlow f(pam(6, 1.0), 3);
    CHECK(f.size() == 216);
    CHECK(f.coupling().size() == 216);
    CHECK(f.drift_bound() == doctest::Approx(2.0 * 16.0));
}

TEST_CASE("scalar reference") {
    ScalarSDE sde;
    sde.sigma.lambda = 0.5;
    sde.r0 = 2.0;
    sde.u0 = 1.0;
    const auto r = scalar_sde_reference(sde, 0.01, 1.0, 7, 0, 200);
    REQUIRE(r.increments.size() == 100);
    double coarse = 1.0, b = 0.0;
    for (double dB : r.increments) {
        coarse *= 1.0 + 0.5 * dB;
        b += dB;
    }
    CHECK(r.coarse_end == doctest::Approx(coarse).epsilon(1e-12));
    // Fine Euler is close to the exact exp(lambda B - lambda^2 r0 t / 2).
    CHECK(r.fine_end == doctest::Approx(std::exp(0.5 * b - 0.25)).epsilon(2e-2));
    const auto again = scalar_sde_reference(sde, 0.01, 1.0, 7, 0, 200);
    CHECK(again.fine_end == r.fine_end);
    CHECK(scalar_sde_reference(sde, 0.01, 1.0, 7, 1, 200).fine_end != r.fine_end);
    CHECK_THROWS_AS(scalar_sde_reference(sde, 0.0, 1.0, 7), DomainError);
    ScalarSDE still = sde;
    still.sigma.lambda = 0.0;
    CHECK(scalar_sde_reference(still, 0.01, 1.0, 7).fine_end == 1.0);
}

TEST_CASE("scalar reference: log-normal second moment") {
    ScalarSDE sde;
    sde.sigma.lambda = 0.5;
    sde.r0 = 1.0;
    const int reps = 10000;
    double s = 0.0, s2 = 0.0;
    for (int r = 0; r < reps; ++r) {
        const double u = scalar_sde_reference(sde, 0.02, 1.0, 3, std::uint64_t(r), 50).fine_end;
        s += u * u;
        s2 += u * u * u * u;
    }
    const double mean = s / reps, se = std::sqrt((s2 / reps - mean * mean) / reps);
    CHECK(std::abs(mean - std::exp(0.25)) < 3.0 * se);
}

TEST_CASE("scalar reference: strong order one half") {
    ScalarSDE sde;
    sde.sigma.lambda = 0.3;
    std::vector<double> dts, errs;
    for (double dt : {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128}) {
        double acc = 0.0;
        const int reps = 2000;
        for (int r = 0; r < reps; ++r) {
            const auto ref = scalar_sde_reference(sde, dt, 1.0, 5, std::uint64_t(r), 64);
            acc += (ref.coarse_end - ref.fine_end) * (ref.coarse_end - ref.fine_end);
        }
        dts.push_back(std::log(dt));
        errs.push_back(0.5 * std::log(acc / reps));
    }
    const auto fit = fit_line(dts, errs);
    CHECK(fit.slope > 0.4);
    CHECK(fit.slope < 0.65);
}

}
