#include "doctest.h"

#include "stochheat/riesz_noise.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>

using namespace stochheat;

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 61>;

// eps^{2-beta} \int_{-1}^{1} (1 - |u|) |u + m|^{-beta} du, split at the kink
// and at the singularity so that tanh-sinh sees them only at endpoints.
double riesz_1d_oracle(long m, double eps, double beta) {
    boost::math::quadrature::tanh_sinh<double> ts;
    auto f = [&](double u) { return (1.0 - std::abs(u)) * std::pow(std::abs(u + double(m)), -beta); };
    return std::pow(eps, 2.0 - beta) * (ts.integrate(f, -1.0, 0.0) + ts.integrate(f, 0.0, 1.0));
}

// Same reduction for a bounded 1-d kernel f(r).
template <class F>
double bounded_1d_oracle(long m, double eps, F f) {
    auto g = [&](double s) { return (eps - std::abs(s)) * f(std::abs(s + eps * double(m))); };
    return GK::integrate(g, -eps, 0.0, 8, 1e-14) + GK::integrate(g, 0.0, eps, 8, 1e-14);
}

// d = 2 Riesz, diagonal cell: polar coordinates on the first quadrant,
// 4 \int_0^{pi/2} \int_0^{r_max} (eps - r cos) (eps - r sin) r^{1-beta} dr dth.
double riesz_2d_diag_oracle(double eps, double beta) {
    boost::math::quadrature::tanh_sinh<double> ts;
    auto outer = [&](double th) {
        const double c = std::cos(th), s = std::sin(th), rmax = eps / std::max(c, s);
        auto inner = [&](double r) { return (eps - r * c) * (eps - r * s) * std::pow(r, 1.0 - beta); };
        return ts.integrate(inner, 0.0, rmax);
    };
    const double q = std::numbers::pi / 4;
    return 4.0 * (GK::integrate(outer, 0.0, q, 8, 1e-13) + GK::integrate(outer, q, 2 * q, 8, 1e-13));
}

// d = 2, off-diagonal cell: smooth integrand, nested Gauss-Kronrod.
double riesz_2d_oracle(long m1, long m2, double eps, double beta) {
    auto outer = [&](double s1) {
        auto inner = [&](double s2) {
            const double x = s1 + eps * double(m1), y = s2 + eps * double(m2);
            return (eps - std::abs(s2)) * std::pow(x * x + y * y, -0.5 * beta);
        };
        return (eps - std::abs(s1)) * (GK::integrate(inner, -eps, 0.0, 6, 1e-13) + GK::integrate(inner, 0.0, eps, 6, 1e-13));
    };
    return GK::integrate(outer, -eps, 0.0, 6, 1e-13) + GK::integrate(outer, 0.0, eps, 6, 1e-13);
}

} // namespace

TEST_SUITE("riesz_noise") {

TEST_CASE("diagonal value of the 1-d Riesz cell covariance") {
    // eps = 1, beta = 1/2: 2 \int_0^1 (1 - u) u^{-1/2} du = 8/3
    CHECK(cell_covariance_1d(0, 1.0, 0.5) == doctest::Approx(8.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("1-d Riesz cell covariance against quadrature") {
    for (double beta : {0.2, 0.5, 0.9})
        for (long m : {0L, 1L, 2L, 5L, 40L, 64L, 65L, 200L, 5000L}) {
            const double want = riesz_1d_oracle(m, 0.25, beta);
            CHECK(cell_covariance_1d(m, 0.25, beta) == doctest::Approx(want).epsilon(1e-9));
            CHECK(cell_covariance_1d(-m, 0.25, beta) == cell_covariance_1d(m, 0.25, beta));
        }
    CHECK_THROWS_AS(cell_covariance_1d(0, 0.25, 1.0), DomainError);
    CHECK_THROWS_AS(cell_covariance_1d(0, 0.0, 0.5), DomainError);
}

TEST_CASE("general-dimension routine reduces to the 1-d closed form") {
    for (long m : {0L, 1L, 3L, 17L}) {
        const long off[1] = {m};
        CHECK(cell_covariance_nd(off, 0.5, 0.6) == doctest::Approx(cell_covariance_1d(m, 0.5, 0.6)).epsilon(1e-9));
    }
}

TEST_CASE("2-d Riesz cell covariance against polar and tensor quadrature") {
    for (double beta : {0.5, 1.2}) {
        const long zero[2] = {0, 0};
        CHECK(cell_covariance_nd(zero, 0.5, beta) == doctest::Approx(riesz_2d_diag_oracle(0.5, beta)).epsilon(1e-8));
        for (auto [a, b] : {std::pair{2L, 1L}, std::pair{3L, 0L}, std::pair{4L, 4L}}) {
            const long off[2] = {a, b}, flipped[2] = {-b, a};
            const double v = cell_covariance_nd(off, 0.5, beta);
            CHECK(v == doctest::Approx(riesz_2d_oracle(a, b, 0.5, beta)).epsilon(1e-8));
            CHECK(cell_covariance_nd(flipped, 0.5, beta) == doctest::Approx(v).epsilon(1e-12));
        }
    }
}

TEST_CASE("far offsets approach the point value") {
    const long off[2] = {20, 0};
    const double v = cell_covariance_nd(off, 0.1, 1.0);
    const double ratio = v / (std::pow(0.1, 4) / (0.1 * 20.0));
    CHECK(ratio > 0.999);
    CHECK(ratio < 1.001);
    const long zero[2] = {0, 0};
    const double d = cell_covariance_nd(zero, 1.0, 1.0);
    CHECK(std::isfinite(d));
    CHECK(d > 0.0);
    CHECK(cell_covariance_1d(5, 0.1, 0.5) == doctest::Approx(riesz_1d_oracle(5, 0.1, 0.5)).epsilon(1e-8));
}

TEST_CASE("bounded correlation kernels") {
    const double eps = 0.5;
    CorrelationSpec ou{CorrelationKind::OU, 0.5, 2.0};
    CorrelationSpec cauchy{CorrelationKind::Cauchy, 0.5, 1.5};
    CorrelationSpec poisson{CorrelationKind::Poisson, 0.5, 1.0};
    for (long m : {0L, 1L, 4L}) {
        const long off[1] = {m};
        CHECK(cell_covariance_nd(off, eps, ou) ==
              doctest::Approx(bounded_1d_oracle(m, eps, [](double r) { return std::exp(-r / 2.0); })).epsilon(1e-9));
        CHECK(cell_covariance_nd(off, eps, cauchy) ==
              doctest::Approx(bounded_1d_oracle(m, eps, [](double r) { return 1.0 / (1.0 + r * r / 2.25); })).epsilon(1e-9));
        CHECK(cell_covariance_nd(off, eps, poisson) ==
              doctest::Approx(bounded_1d_oracle(m, eps, [](double r) { return 1.0 / (1.0 + r * r); })).epsilon(1e-9));
    }
    CorrelationSpec delta{CorrelationKind::Delta, 0.5, 1.0};
    const long o0[2] = {0, 0}, o1[2] = {1, 0};
    CHECK(cell_covariance_nd(o0, eps, delta) == doctest::Approx(eps * eps));
    CHECK(cell_covariance_nd(o1, eps, delta) == 0.0);
    CHECK_THROWS_AS(CorrelationSpec({CorrelationKind::OU, 0.5, 0.0}).validate(1), DomainError);
    CHECK_THROWS_AS(CorrelationSpec({CorrelationKind::Riesz, 1.0, 1.0}).validate(1), DomainError);
    CHECK_NOTHROW(CorrelationSpec({CorrelationKind::Riesz, 1.0, 1.0}).validate(2));
}

TEST_CASE("correlation names round-trip") {
    for (auto k : {CorrelationKind::Riesz, CorrelationKind::Cauchy, CorrelationKind::OU, CorrelationKind::Poisson,
                   CorrelationKind::Delta})
        CHECK(correlation_from_string(to_string(k)) == k);
    CHECK_THROWS_AS(correlation_from_string("gauss"), ConfigError);
}

TEST_CASE("periodized covariance") {
    const auto cov = build_covariance({1, 0.25, 63}, {CorrelationKind::Riesz, 0.5, 1.0});
    CHECK(cov.clipped_count == 0);
    CHECK(cov.min_eigenvalue > 0.0);
    CHECK(cov.max_eigenvalue >= cov.min_eigenvalue);
    const auto back = cov.realized_table();
    for (std::size_t i = 0; i < cov.table.size(); ++i) {
        CHECK(back[i] == doctest::Approx(cov.table[i]).epsilon(1e-10));
        CHECK(cov.table[i] == cov.table[cov.torus.negate(i)]);
    }
    CHECK(cov.table[0] == doctest::Approx(cell_covariance_1d(0, 0.25, 0.5)).epsilon(1e-15));
    CHECK(cov.table[5] == doctest::Approx(cell_covariance_1d(5, 0.25, 0.5)).epsilon(1e-15));
    CHECK_THROWS_AS(build_covariance({1, 0.25, 0}, {}), DomainError);
}

TEST_CASE("spectra in limiting cases") {
    const auto unit = build_covariance({1, 1.0, 63}, {CorrelationKind::Riesz, 0.5, 1.0});
    CHECK(unit.min_eigenvalue >= -1e-10 * unit.max_eigenvalue);
    // Nearly flat correlation: almost all spectral mass at frequency 0.
    auto zero_share = [](const CellCovariance& c) {
        double total = 0.0;
        for (double v : c.spectrum) total += v;
        return c.spectrum[0] / total;
    };
    const auto flat = build_covariance({1, 0.25, 31}, {CorrelationKind::Riesz, 0.05, 1.0});
    const auto rough = build_covariance({1, 0.25, 31}, {CorrelationKind::Riesz, 0.5, 1.0});
    CHECK(zero_share(flat) > 0.8);
    CHECK(zero_share(flat) > 2.0 * zero_share(rough));
    CHECK(flat.table[15] / flat.table[0] > 0.8);
    // Diagonal covariance: every eigenvalue equals the diagonal entry.
    const auto delta = build_covariance({2, 0.5, 6}, {CorrelationKind::Delta, 0.5, 1.0});
    for (double v : delta.spectrum) CHECK(v == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("clipping beyond the limit is an embedding error") {
    // A non-PSD circulant: Cauchy kernel truncated on a small even torus.
    bool found = false;
    for (std::size_t n : {4, 6, 8, 10, 12})
        for (double l : {0.5, 1.0, 3.0, 10.0}) {
            const auto cov = build_covariance({1, 1.0, n}, {CorrelationKind::Cauchy, 0.5, l}, 1.0);
            if (cov.clipped_mass <= 0.0) continue;
            found = true;
            CHECK(cov.clipped_count > 0);
            for (double v : cov.spectrum) CHECK(v >= 0.0);
            CHECK_THROWS_AS(build_covariance({1, 1.0, n}, {CorrelationKind::Cauchy, 0.5, l}, 0.5 * cov.clipped_mass),
                            EmbeddingError);
        }
    CHECK(found);
}

TEST_CASE("noise sampler keys and scaling") {
    const auto cov = build_covariance({2, 0.5, 8}, {CorrelationKind::Riesz, 1.0, 1.0}, 1e-3);
    const NoiseSampler s(cov, SamplerMode::Spectral, 99);
    const auto a = s.sample_increments(0.01, 3, 1), b = s.sample_increments(0.01, 3, 1);
    CHECK(a == b);
    CHECK(s.sample_increments(0.01, 4, 1) != a);
    CHECK(s.sample_increments(0.01, 3, 2) != a);
    CHECK(NoiseSampler(cov, SamplerMode::Spectral, 98).sample_increments(0.01, 3, 1) != a);
    const auto c = s.sample_increments(0.04, 3, 1);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(c[i] == doctest::Approx(2.0 * a[i]).epsilon(1e-14));
    for (double v : s.sample_increments(0.0, 3, 1)) CHECK(v == 0.0);
    NoiseSampler::Workspace ws(s);
    std::vector<double> wrong(3);
    CHECK_THROWS_AS(s.sample(ws, 0.01, 0, 0, wrong), DomainError);
}

TEST_CASE("Cholesky sampler is deterministic and centred") {
    const auto cov = build_covariance({1, 0.25, 15}, {CorrelationKind::Riesz, 0.5, 1.0});
    const NoiseSampler s(cov, SamplerMode::Cholesky, 5);
    CHECK(s.sample_increments(1.0, 7) == s.sample_increments(1.0, 7));
    double mean = 0.0;
    const int reps = 4000;
    for (int k = 0; k < reps; ++k) mean += s.sample_increments(1.0, std::uint64_t(k))[0];
    mean /= reps;
    CHECK(std::abs(mean) < 4.0 * std::sqrt(cov.table[0] / reps));
}

TEST_CASE("aggregation to the coarse torus") {
    const Torus fine{2, 4};
    std::vector<double> f(fine.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = double(i);
    const auto c = aggregate_to_coarse(fine, f);
    REQUIRE(c.size() == 4);
    // coarse (0, 0) holds fine (0, 0), (0, 1), (1, 0), (1, 1)
    const long c00[2] = {0, 0}, c01[2] = {0, 1}, c10[2] = {1, 0}, c11[2] = {1, 1};
    CHECK(c[0] == f[fine.index(c00)] + f[fine.index(c01)] + f[fine.index(c10)] + f[fine.index(c11)]);
    double total = 0.0;
    for (double v : c) total += v;
    CHECK(total == doctest::Approx(120.0));
    CHECK_THROWS_AS(aggregate_to_coarse(Torus{1, 5}, std::vector<double>(5)), CouplingError);
}

TEST_CASE("summability integral") {
    const auto cov = build_covariance({1, 0.25, 63}, {CorrelationKind::Riesz, 0.5, 1.0});
    const auto w = DislocationDistribution::nearest_neighbor(1);
    const double a = summability_integral(cov, w, 0.5), b = summability_integral(cov, w, 1.0);
    CHECK(a > 0.0);
    CHECK(b > a);
    CHECK(b < 2.0 * a);
    CHECK_THROWS_AS(summability_integral(cov, w, 0.0), DomainError);
    CHECK_THROWS_AS(summability_integral(cov, DislocationDistribution::nearest_neighbor(2), 1.0), DomainError);
}

}
