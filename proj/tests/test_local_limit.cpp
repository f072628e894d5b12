#include "doctest.h"

#include "stochheat/local_limit.hpp"

#include <cmath>
#include <vector>

using namespace stochheat;

TEST_SUITE("local_limit") {

TEST_CASE("simple walk converges to the Gaussian at second order") {
    const auto w = DislocationDistribution::nearest_neighbor(1);
    const StableKernel k({2.0, 0.5, 1});
    std::vector<LLTErrorReport> reps;
    for (double e : {1.0 / 4, 1.0 / 8, 1.0 / 16, 1.0 / 32}) reps.push_back(llt_sup_error(w, k, e, 1.0));
    for (const auto& r : reps) {
        CHECK(r.tail_stat == 0.0);
        CHECK(r.a_used == 0.0);
        CHECK(r.window_radius == doctest::Approx(10.0));
        CHECK(r.torus_n >= std::size_t(2 * std::floor(10.0 / r.epsilon) + 1));
    }
    for (std::size_t i = 1; i < reps.size(); ++i) CHECK(reps[i].sup_error < reps[i - 1].sup_error);
    const auto fit = fit_rate(reps);
    CHECK(fit.slope > 1.8);
    CHECK(fit.slope < 2.2);
    CHECK(fit.points.size() == 4);
}

TEST_CASE("heavy tail reports the tail statistic") {
    const auto w = DislocationDistribution::heavy_tail(1, 1.5, 2000);
    const StableKernel k({1.5, w.nu(), 1});
    LLTOptions opt;
    opt.a = 0.5;
    const auto r = llt_sup_error(w, k, 1.0 / 8, 1.0, opt);
    CHECK(r.a_used == 0.5);
    CHECK(r.tail_stat > 0.0);
    CHECK(std::isfinite(r.tail_stat));
    CHECK(r.sup_error > 0.0);
    const double a = default_tail_exponent(w);
    CHECK(a > 0.0);
    CHECK(a <= w.a_cap() + 1e-12);
}

TEST_CASE("fit_rate on an exact power law") {
    const std::vector<double> eps{0.5, 0.25, 0.125, 0.0625};
    std::vector<double> err;
    for (double e : eps) err.push_back(3.0 * std::pow(e, 1.25));
    const auto f = fit_rate(eps, err);
    CHECK(f.slope == doctest::Approx(1.25).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fit_rate refuses thin designs") {
    const std::vector<double> three{0.5, 0.25, 0.125}, e3{1, 0.5, 0.25};
    CHECK_THROWS_AS(fit_rate(three, e3), RegressionError);
    CHECK_NOTHROW(fit_rate(three, e3, 3));
    const std::vector<double> narrow{0.5, 0.45, 0.4, 0.35}, e4{1, 0.9, 0.8, 0.7};
    CHECK_THROWS_AS(fit_rate(narrow, e4), RegressionError);
    const std::vector<double> eps{0.5, 0.25, 0.125, 0.0625}, zero{1, 0.5, 0.0, 0.1};
    CHECK_THROWS_AS(fit_rate(eps, zero), RegressionError);
    CHECK_THROWS_AS(fit_rate(eps, e3), DomainError);
}

TEST_CASE("argument checks") {
    const auto w = DislocationDistribution::nearest_neighbor(1);
    const StableKernel good({2.0, 0.5, 1}), wrong_nu({2.0, 1.0, 1}), wrong_dim({2.0, 0.5, 2});
    CHECK_THROWS_AS(llt_sup_error(w, wrong_nu, 0.25, 1.0), DomainError);
    CHECK_THROWS_AS(llt_sup_error(w, wrong_dim, 0.25, 1.0), DomainError);
    // t < eps^alpha
    CHECK_THROWS_AS(llt_sup_error(w, good, 0.5, 0.2), DomainError);
    CHECK_NOTHROW(llt_sup_error(w, good, 0.5, 0.25));
    LLTOptions small;
    small.torus_n = 11;
    CHECK_THROWS_AS(llt_sup_error(w, good, 0.25, 1.0, small), DomainError);
}

}
