#include "stochheat/common.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

namespace stochheat {

std::size_t Torus::size() const {
    std::size_t s = 1;
    for (int i = 0; i < dim; ++i) s *= n;
    return s;
}

std::vector<long> Torus::coords(std::size_t index) const {
    std::vector<long> c(static_cast<std::size_t>(dim));
    for (int i = dim - 1; i >= 0; --i) {
        c[static_cast<std::size_t>(i)] = static_cast<long>(index % n);
        index /= n;
    }
    return c;
}

std::size_t Torus::index(std::span<const long> c) const {
    const long nn = static_cast<long>(n);
    std::size_t idx = 0;
    for (long v : c) {
        long w = v % nn;
        if (w < 0) w += nn;
        idx = idx * n + static_cast<std::size_t>(w);
    }
    return idx;
}

long Torus::min_image(long c) const {
    const long nn = static_cast<long>(n);
    long w = c % nn;
    if (w < 0) w += nn;
    if (2 * w > nn) w -= nn;
    return w;
}

std::vector<long> Torus::offset(std::size_t index) const {
    auto c = coords(index);
    for (auto& v : c) v = min_image(v);
    return c;
}

std::size_t Torus::negate(std::size_t index) const {
    auto c = coords(index);
    for (auto& v : c) v = -v;
    return this->index(c);
}

std::size_t Torus::add(std::size_t a, std::size_t b) const {
    auto ca = coords(a);
    const auto cb = coords(b);
    for (std::size_t i = 0; i < ca.size(); ++i) ca[i] += cb[i];
    return index(ca);
}

std::size_t Torus::sub(std::size_t a, std::size_t b) const {
    auto ca = coords(a);
    const auto cb = coords(b);
    for (std::size_t i = 0; i < ca.size(); ++i) ca[i] -= cb[i];
    return index(ca);
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw RegressionError("line fit needs at least two (x, y) pairs");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0) || !std::isfinite(sxx))
        throw RegressionError("degenerate abscissa spread in line fit");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    if (syy > 0.0) {
        double sse = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = y[i] - (f.slope * x[i] + f.intercept);
            sse += r * r;
        }
        f.r_squared = std::clamp(1.0 - sse / syy, 0.0, 1.0);
    } else {
        f.r_squared = 1.0;
    }
    return f;
}

void KahanSum::add(double v) {
    // Neumaier variant: also correct when |v| > |sum|.
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
        comp_ += (sum_ - t) + v;
    else
        comp_ += (v - t) + sum_;
    sum_ = t;
}

const GaussRule& gauss_legendre20() {
    static const GaussRule rule = [] {
        using G = boost::math::quadrature::gauss<double, 20>;
        GaussRule r;
        const auto& a = G::abscissa();
        const auto& w = G::weights();
        for (std::size_t i = 0; i < a.size(); ++i) {
            r.nodes.push_back(a[i]);
            r.weights.push_back(w[i]);
            if (a[i] != 0.0) {
                r.nodes.push_back(-a[i]);
                r.weights.push_back(w[i]);
            }
        }
        return r;
    }();
    return rule;
}

void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count || failed.load()) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                failed = true;
            }
        }
    };
    const unsigned nthreads = static_cast<unsigned>(
        std::min<std::size_t>(threads, count));
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    // splitmix64 finalizer applied to a combined word.
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::size_t next_fft_size(std::size_t n, bool odd) {
    for (std::size_t m = std::max<std::size_t>(n, 1);; ++m) {
        if (odd && m % 2 == 0) continue;
        std::size_t r = m;
        for (std::size_t p : {2u, 3u, 5u, 7u})
            while (r % p == 0) r /= p;
        if (r == 1) return m;
    }
}

} // namespace stochheat
