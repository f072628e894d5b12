#include "stochheat/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace stochheat {

RateTargets rate_targets(double alpha, double beta, double a) {
    if (!(beta > 0.0 && beta < alpha)) throw DomainError("rate targets need 0 < beta < alpha");
    RateTargets r;
    r.eta = 0.5 * (alpha - beta);
    r.eta_tilde = r.eta / alpha;
    r.rho = std::min(r.eta, a);
    return r;
}

Estimate estimate(std::span<const double> samples) {
    Estimate e;
    const std::size_t n = samples.size();
    if (n == 0) return e;
    KahanSum s;
    for (double v : samples) s.add(v);
    e.mean = s.value() / static_cast<double>(n);
    if (n < 2) return e;
    KahanSum q;
    for (double v : samples) q.add((v - e.mean) * (v - e.mean));
    e.se = std::sqrt(q.value() / static_cast<double>(n - 1) / static_cast<double>(n));
    return e;
}

MomentReport ensemble_moments(const LatticeModel& model, std::size_t replicas, unsigned threads,
                              std::uint64_t first_replica) {
    if (replicas == 0) throw DomainError("ensemble needs at least one replica");
    std::vector<SimPath> paths(replicas);
    parallel_for(replicas, threads, [&](std::size_t r) { paths[r] = simulate(model, first_replica + r); });
    MomentReport rep;
    rep.times = paths[0].times;
    rep.sites = model.torus().size();
    rep.replicas = replicas;
    const std::size_t cells = rep.times.size() * rep.sites;
    rep.moments.assign(3, std::vector<Estimate>(cells));
    std::vector<double> sample(replicas);
    for (int k = 1; k <= 3; ++k)
        for (std::size_t ti = 0; ti < rep.times.size(); ++ti)
            for (std::size_t x = 0; x < rep.sites; ++x) {
                for (std::size_t r = 0; r < replicas; ++r) sample[r] = std::pow(paths[r].fields[ti][x], k);
                rep.moments[static_cast<std::size_t>(k - 1)][ti * rep.sites + x] = estimate(sample);
            }
    return rep;
}

ConvergenceReport convergence_study(const SimConfig& base, int levels, int order, std::size_t replicas,
                                    unsigned threads, double a) {
    if (levels < 0) throw DomainError("number of levels must be nonnegative");
    if (order < 1 || order > 3) throw DomainError("error order must be 1, 2 or 3");
    if (replicas == 0) throw DomainError("convergence study needs at least one replica");
    ConvergenceReport rep;
    rep.order = order;
    rep.replicas = replicas;
    rep.targets = rate_targets(base.alpha(), base.beta(), a);

    // Coarse levels base, base/2, ...; reference `levels` halvings below base.
    std::vector<SimConfig> chain{base};
    for (int l = 0; l < levels; ++l) chain.push_back(refine(chain.back()));
    if (levels == 0) {
        rep.epsilons = {base.epsilon};
        rep.eps_ref = base.epsilon;
        rep.errors = {0.0};
        rep.errors_se = {0.0};
        return rep;
    }
    std::vector<SimConfig> finest_first(chain.rbegin(), chain.rend());
    for (auto& c : finest_first) c.seed = base.seed;
    CoupledLadder ladder(std::move(finest_first));
    rep.eps_ref = ladder.model(0).config().epsilon;

    // Level l site 0 covers the reference sites j with j_a / 2^l = 0 on every
    // axis; the reference is averaged over that cell.
    const Torus& fine = ladder.model(0).torus();
    std::vector<std::vector<std::size_t>> block(ladder.levels());
    for (std::size_t l = 1; l < ladder.levels(); ++l)
        for (std::size_t j = 0; j < fine.size(); ++j) {
            const auto c = fine.coords(j);
            if (std::all_of(c.begin(), c.end(), [&](long v) { return (v >> l) == 0; })) block[l].push_back(j);
        }

    // samples[level - 1][replica]; level 0 is the reference.
    const std::size_t coarse = ladder.levels() - 1;
    std::vector<std::vector<double>> samples(coarse, std::vector<double>(replicas));
    parallel_for(replicas, threads, [&](std::size_t r) {
        const auto paths = ladder.simulate(r);
        const auto& ref = paths[0].fields.back();
        for (std::size_t l = 1; l < paths.size(); ++l) {
            KahanSum avg;
            for (std::size_t j : block[l]) avg.add(ref[j]);
            const double mean = avg.value() / static_cast<double>(block[l].size());
            samples[l - 1][r] = std::pow(std::abs(paths[l].fields.back()[0] - mean), order);
        }
    });
    // Report coarse-to-fine.
    for (std::size_t l = coarse; l >= 1; --l) {
        const auto e = estimate(samples[l - 1]);
        const double err = std::pow(e.mean, 1.0 / order);
        rep.epsilons.push_back(ladder.model(l).config().epsilon);
        rep.errors.push_back(err);
        rep.errors_se.push_back(err > 0.0 ? e.se / (order * std::pow(e.mean, (order - 1.0) / order)) : 0.0);
    }
    if (rep.epsilons.size() >= 3) {
        rep.fit = fit_rate(rep.epsilons, rep.errors, 3);
        rep.has_fit = true;
    }
    return rep;
}

PathwiseReport pathwise_comparison(const SimConfig& config, const InitialProfile& u0, const InitialProfile& v0,
                                   std::size_t replicas, unsigned threads) {
    SimConfig cu = config, cv = config;
    cu.u0 = u0;
    cv.u0 = v0;
    const LatticeModel mu(cu), mv(cv);
    struct Tally {
        std::size_t checks = 0, violations = 0;
        double max_excess = -std::numeric_limits<double>::infinity();
    };
    std::vector<Tally> tallies(replicas);
    parallel_for(replicas, threads, [&](std::size_t r) {
        LatticeModel::Stepper su(mu), sv(mv);
        SimState a, b;
        a.field = mu.initial_field();
        b.field = mv.initial_field();
        std::vector<double> dB(mu.torus().size());
        auto& t = tallies[r];
        auto compare = [&] {
            double scale = 1.0;
            for (double v : b.field) scale = std::max(scale, std::abs(v));
            const double tol = 1e-9 * scale;
            for (std::size_t i = 0; i < a.field.size(); ++i) {
                const double excess = a.field[i] - b.field[i];
                t.max_excess = std::max(t.max_excess, excess);
                t.violations += excess > tol;
                ++t.checks;
            }
        };
        compare();
        for (std::size_t k = 0; k < mu.steps(); ++k) {
            su.sample(r, k, dB);
            su.step(a, dB);
            sv.step(b, dB);
            compare();
        }
    });
    PathwiseReport rep;
    rep.replicas = replicas;
    rep.max_excess = -std::numeric_limits<double>::infinity();
    for (const auto& t : tallies) {
        rep.checks += t.checks;
        rep.violations += t.violations;
        rep.max_excess = std::max(rep.max_excess, t.max_excess);
    }
    rep.fraction = rep.checks ? static_cast<double>(rep.violations) / static_cast<double>(rep.checks) : 0.0;
    return rep;
}

MomentComparisonReport moment_comparison(const SimConfig& config, const SigmaSpec& sigma1, const SigmaSpec& sigma2,
                                         std::size_t replicas, unsigned threads, double range) {
    const int grid = 2001;
    if (std::abs(sigma1(0.0)) > 0.0 || std::abs(sigma2(0.0)) > 0.0)
        throw ConfigError("moment comparison needs sigma(0) = 0 for both coefficients");
    for (int i = 0; i < grid; ++i) {
        const double u = range * i / (grid - 1);
        const double s1 = sigma1(u), s2 = sigma2(u);
        if (s2 < 0.0) throw ConfigError("moment comparison needs sigma2 >= 0 on [0, range]");
        if (s1 < s2) {
            std::ostringstream os;
            os << "moment comparison needs sigma1 >= sigma2 on [0, range]; fails at u = " << u;
            throw ConfigError(os.str());
        }
    }
    SimConfig c1 = config, c2 = config;
    c1.sigma = sigma1;
    c2.sigma = sigma2;
    const LatticeModel m1(c1), m2(c2);
    std::vector<SimPath> p1(replicas), p2(replicas);
    parallel_for(replicas, threads, [&](std::size_t r) {
        p1[r] = simulate(m1, r);
        p2[r] = simulate(m2, r);
    });
    MomentComparisonReport rep;
    rep.replicas = replicas;
    const std::size_t N = m1.torus().size();
    std::vector<double> a(replicas), b(replicas), d(replicas);
    for (std::size_t ti = 0; ti < p1[0].times.size(); ++ti)
        for (std::size_t x = 0; x < N; ++x)
            for (int k = 1; k <= 3; ++k) {
                for (std::size_t r = 0; r < replicas; ++r) {
                    a[r] = std::pow(p1[r].fields[ti][x], k);
                    b[r] = std::pow(p2[r].fields[ti][x], k);
                    d[r] = a[r] - b[r];
                }
                MomentComparisonRow row;
                row.t = p1[0].times[ti];
                row.site = x;
                row.order = k;
                row.first = estimate(a);
                row.second = estimate(b);
                row.se_difference = estimate(d).se;
                row.ordered = row.first.mean + 3.0 * row.se_difference >= row.second.mean;
                rep.all_ordered = rep.all_ordered && row.ordered;
                rep.rows.push_back(row);
            }
    return rep;
}

std::vector<OracleOrderingRow> oracle_moment_ordering(const SimConfig& config, double lambda1, double lambda2,
                                                      std::span<const double> times) {
    SimConfig c1 = config, c2 = config;
    c1.sigma = SigmaSpec{};
    c1.sigma.lambda = lambda1;
    c2.sigma = SigmaSpec{};
    c2.sigma.lambda = lambda2;
    const PamSecondMoment o1(c1), o2(c2);
    const std::size_t N = o1.sites();
    std::vector<OracleOrderingRow> rows;
    for (double t : times) {
        const auto a = o1.at(t), b = o2.at(t);
        for (std::size_t x = 0; x < N; ++x) rows.push_back({t, x, a[x * N + x], b[x * N + x]});
    }
    return rows;
}

std::vector<LyapunovRow> lyapunov_study(const SimConfig& config, std::span<const double> lambdas) {
    std::vector<LyapunovRow> rows;
    for (double lambda : lambdas) {
        SimConfig c = config;
        c.sigma = SigmaSpec{};
        c.sigma.lambda = lambda;
        LyapunovRow row;
        row.lambda = lambda;
        row.gamma2 = pam_growth_rate(c, 2);
        row.gamma3 = pam_growth_rate(c, 3);
        row.ratio = row.gamma2.gamma != 0.0 ? row.gamma3.gamma / row.gamma2.gamma
                                            : std::numeric_limits<double>::quiet_NaN();
        row.intermittent = row.gamma3.gamma / 3.0 > row.gamma2.gamma / 2.0;
        row.reference_exponent = (2.0 * c.alpha() - c.beta()) / (c.alpha() - c.beta());
        rows.push_back(row);
    }
    return rows;
}

HolderReport holder_study(const SimConfig& config, double s, std::span<const double> deltas, std::size_t replicas,
                          unsigned threads) {
    if (deltas.size() < 2) throw DomainError("Hölder study needs at least two time increments");
    SimConfig c = config;
    c.output_times = {s};
    double tmax = s;
    for (double d : deltas) {
        if (!(d > 0.0)) throw DomainError("time increments must be positive");
        c.output_times.push_back(s + d);
        tmax = std::max(tmax, s + d);
    }
    c.t_end = tmax;
    const LatticeModel model(c);
    const std::vector<double> origin(static_cast<std::size_t>(c.dim()), 0.0);
    const std::size_t site = model.site_containing(origin);
    const auto& outs = model.output_steps();
    auto slot = [&](double t) {
        const auto k = static_cast<std::size_t>(std::llround(t / c.dt));
        return static_cast<std::size_t>(std::find(outs.begin(), outs.end(), k) - outs.begin());
    };
    std::vector<std::vector<double>> sq(deltas.size(), std::vector<double>(replicas));
    parallel_for(replicas, threads, [&](std::size_t r) {
        const auto path = simulate(model, r);
        const double base = path.fields[slot(s)][site];
        for (std::size_t i = 0; i < deltas.size(); ++i) {
            const double v = path.fields[slot(s + deltas[i])][site] - base;
            sq[i][r] = v * v;
        }
    });
    HolderReport rep;
    rep.s = s;
    rep.deltas.assign(deltas.begin(), deltas.end());
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        rep.increments.push_back(estimate(sq[i]));
        lx.push_back(std::log(deltas[i]));
        ly.push_back(std::log(rep.increments.back().mean));
    }
    rep.fit = fit_line(lx, ly);
    return rep;
}

} // namespace stochheat
