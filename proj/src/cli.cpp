#include "stochheat/cli.hpp"

#include "stochheat/config.hpp"
#include "stochheat/experiments.hpp"

#include "CLI11.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#ifndef STOCHHEAT_VERSION
#define STOCHHEAT_VERSION "0.0.0"
#endif

namespace stochheat::cli {

namespace fs = std::filesystem;

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read '" + path + "' for hashing");
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("SHA-256 init failed");
    char buf[1 << 15];
    while (in) {
        in.read(buf, sizeof buf);
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md, &len);
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return os.str();
}

void write_atomic(const std::string& path, const std::string& contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open '" + tmp + "' for writing");
        out << contents;
        out.flush();
        if (!out) throw Error("write to '" + tmp + "' failed");
    }
    fs::rename(tmp, path);
}

namespace {

class Csv {
public:
    explicit Csv(const std::vector<std::string>& header) {
        os_ << std::setprecision(17);
        for (std::size_t i = 0; i < header.size(); ++i) os_ << (i ? "," : "") << header[i];
        os_ << '\n';
    }
    template <class... T>
    void row(const T&... v) {
        std::size_t i = 0;
        ((os_ << (i++ ? "," : "") << v), ...);
        os_ << '\n';
    }
    void cells(const std::vector<double>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) os_ << (i ? "," : "") << v[i];
        os_ << '\n';
    }
    std::string str() const { return os_.str(); }

private:
    std::ostringstream os_;
};

// Everything one run produces; files are kept in memory until the end so a
// failing run leaves nothing half-written.
struct Run {
    std::string subcommand;
    Json config;
    unsigned threads = 1;
    std::vector<std::pair<std::string, std::string>> files;
    Json summary = Json::object();
    Json assertions = Json::object();

    void add(const std::string& name, const Csv& csv) { files.emplace_back(name, csv.str()); }
    void check(const std::string& name, bool ok) { assertions[name] = ok; }
};

std::vector<double> site_position(const Torus& torus, std::size_t i, double epsilon, double origin) {
    const auto k = torus.offset(i);
    std::vector<double> x(k.size());
    for (std::size_t a = 0; a < k.size(); ++a) x[a] = origin + epsilon * static_cast<double>(k[a]);
    return x;
}

double tail_exponent(const Json& cfg, const DislocationDistribution& walk) {
    const double a = cfg.at("a").get<double>();
    return a >= 0.0 ? a : default_tail_exponent(walk);
}

void run_kernel(Run& r) {
    const auto& c = r.config;
    StableParams p;
    p.alpha = c.at("alpha").get<double>();
    p.nu = c.contains("nu") ? c.at("nu").get<double>() : 1.0;
    p.dim = c.at("dim").get<int>();
    try {
        p.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("kernel: ") + e.what());
    }
    if (p.dim > 2) throw ConfigError("key 'dim': the kernel grid dump supports d <= 2");
    const StableKernel kernel(p);
    const double radius = c.at("grid_radius").get<double>();
    const std::size_t points = c.at("grid_points").get<std::size_t>();
    if (points < 2 || !(radius > 0.0)) throw ConfigError("keys 'grid_points' >= 2 and 'grid_radius' > 0 required");
    std::vector<double> axis(points);
    for (std::size_t i = 0; i < points; ++i) axis[i] = -radius + 2.0 * radius * i / (points - 1);
    const double h = axis[1] - axis[0];

    std::vector<std::string> header{"t", "x1"};
    if (p.dim == 2) header.push_back("x2");
    header.push_back("p");
    Csv csv(header);
    Json masses = Json::array();
    bool nonnegative = true;
    for (double t : c.at("times").get<std::vector<double>>()) {
        if (!(t > 0.0)) throw ConfigError("key 'times' entries must be positive");
        const auto vals = kernel.density_on_grid(t, axis);
        for (std::size_t i = 0; i < vals.size(); ++i) {
            nonnegative = nonnegative && vals[i] >= 0.0;
            if (p.dim == 1) csv.row(t, axis[i], vals[i]);
            else csv.row(t, axis[i / points], axis[i % points], vals[i]);
        }
        masses.push_back({{"t", t}, {"grid_mass", grid_mass(kernel, t, h, radius)}});
    }
    const double zero[2] = {0.0, 0.0};
    r.summary = {{"alpha", p.alpha},
                 {"nu", p.nu},
                 {"dim", p.dim},
                 {"p1_origin", kernel.density(1.0, std::span<const double>(zero, static_cast<std::size_t>(p.dim)))},
                 {"closed_form", kernel.has_closed_form()},
                 {"masses", masses},
                 {"clamped", kernel.clamped_count()}};
    r.check("density_nonnegative", nonnegative);
    r.add("kernel.csv", csv);
}

void run_walk(Run& r) {
    const auto& c = r.config;
    const auto walk = walk_from_config(c);
    const auto diag = diagnose_assumptions(walk, default_diagnostic_grid());
    Csv charfn({"r", "mu_hat", "one_minus_mu_hat", "abs_D"});
    for (const auto& [z, d] : diag.residual_curve) {
        std::vector<double> zz(static_cast<std::size_t>(walk.dim()), 0.0);
        zz[0] = z;
        const double mh = walk.mu_hat(zz);
        charfn.row(z, mh, 1.0 - mh, d);
    }
    r.add("walk_charfn.csv", charfn);

    const double t = c.at("t").get<double>();
    const double tol = c.at("wrap_tol").get<double>();
    const std::size_t n = suggest_torus_size(walk, t, tol);
    const auto table = transition_probabilities(walk, t, n, tol);
    std::vector<std::string> header;
    for (int a = 0; a < walk.dim(); ++a) header.push_back("k" + std::to_string(a + 1));
    header.push_back("p");
    Csv trans(header);
    for (std::size_t i = 0; i < table.values.size(); ++i) {
        std::vector<double> row;
        for (long k : table.torus.offset(i)) row.push_back(static_cast<double>(k));
        row.push_back(table.values[i]);
        trans.cells(row);
    }
    r.add("walk_transition.csv", trans);
    r.summary = {{"family", to_string(walk.family())},
                 {"describe", walk.describe()},
                 {"alpha", walk.alpha()},
                 {"nu", walk.nu()},
                 {"nu_hat", diag.nu_hat},
                 {"a_hat", diag.a_hat},
                 {"a_cap", walk.a_cap()},
                 {"fitted_alpha", diag.fitted_alpha},
                 {"r_squared", diag.r_squared},
                 {"max_charfn_away_from_zero", diag.max_charfn_away_from_zero},
                 {"t", t},
                 {"torus_n", n},
                 {"transition_mass", table.sum()},
                 {"clamped_mass", table.clamped_mass}};
    r.check("nu_hat_matches_nu", std::abs(diag.nu_hat / walk.nu() - 1.0) < 5e-3);
    r.check("transition_mass_one", std::abs(table.sum() - 1.0) < 1e-9);
}

void run_llt(Run& r) {
    const auto& c = r.config;
    const auto walk = walk_from_config(c);
    const StableKernel kernel(StableParams{walk.alpha(), walk.nu(), walk.dim()});
    LLTOptions opt;
    opt.window_radius = c.at("window_radius").get<double>();
    opt.a = tail_exponent(c, walk);
    opt.wrap_tol = c.at("wrap_tol").get<double>();
    const double t = c.at("t").get<double>();
    std::vector<LLTErrorReport> reports;
    Csv csv({"epsilon", "t", "sup_error", "tail_stat", "window_radius", "a_used", "torus_n"});
    for (double eps : c.at("epsilons").get<std::vector<double>>()) {
        reports.push_back(llt_sup_error(walk, kernel, eps, t, opt));
        const auto& e = reports.back();
        csv.row(e.epsilon, e.t, e.sup_error, e.tail_stat, e.window_radius, e.a_used, e.torus_n);
    }
    r.add("llt.csv", csv);
    const auto fit = fit_rate(reports);
    const double threshold = 0.9 * opt.a;
    r.summary = {{"alpha", walk.alpha()}, {"nu", walk.nu()},       {"a", opt.a},
                 {"slope", fit.slope},    {"intercept", fit.intercept}, {"r_squared", fit.r_squared},
                 {"slope_threshold", threshold}};
    r.check("slope_at_least_0.9a", fit.slope >= threshold);
    if (walk.alpha() < 2.0) {
        double lo = reports[0].tail_stat, hi = lo;
        for (const auto& e : reports) {
            lo = std::min(lo, e.tail_stat);
            hi = std::max(hi, e.tail_stat);
        }
        r.summary["tail_stat_ratio"] = hi / lo;
        r.check("tail_stat_bounded", lo > 0.0 && hi / lo < 10.0);
    }
}

void run_noise(Run& r) {
    const auto& c = r.config;
    LatticeSpec lat;
    lat.dim = c.at("dim").get<int>();
    lat.epsilon = c.at("epsilon").get<double>();
    lat.torus_n = c.at("torus_n").get<std::size_t>();
    const auto corr = correlation_from_config(c);
    const auto cov = build_covariance(lat, corr, c.at("max_clipped_mass").get<double>());
    std::vector<std::string> header;
    for (int a = 0; a < lat.dim; ++a) header.push_back("m" + std::to_string(a + 1));
    header.push_back("R");
    header.push_back("R_realized");
    Csv table(header);
    const auto realized = cov.realized_table();
    for (std::size_t i = 0; i < cov.table.size(); ++i) {
        std::vector<double> row;
        for (long k : cov.torus.offset(i)) row.push_back(static_cast<double>(k));
        row.push_back(cov.table[i]);
        row.push_back(realized[i]);
        table.cells(row);
    }
    r.add("noise_table.csv", table);
    Csv spec({"mode", "eigenvalue"});
    for (std::size_t i = 0; i < cov.spectrum.size(); ++i) spec.row(i, cov.spectrum[i]);
    r.add("noise_spectrum.csv", spec);
    r.summary = {{"correlation", to_string(corr.kind)},
                 {"R0", cov.table[0]},
                 {"min_eigenvalue", cov.min_eigenvalue},
                 {"max_eigenvalue", cov.max_eigenvalue},
                 {"clipped_mass", cov.clipped_mass},
                 {"clipped_count", cov.clipped_count}};
    r.check("clipped_mass_below_limit", cov.clipped_mass < c.at("max_clipped_mass").get<double>());
}

void run_simulate(Run& r) {
    const auto& c = r.config;
    const LatticeModel model(sim_config_from(c));
    const auto path = simulate(model, 0);
    Csv fields(model.config().dim() == 1 ? std::vector<std::string>{"t", "site", "x1", "u"}
                                         : std::vector<std::string>{"t", "site", "x1", "x2", "u"});
    const auto& torus = model.torus();
    for (std::size_t ti = 0; ti < path.times.size(); ++ti)
        for (std::size_t i = 0; i < torus.size(); ++i) {
            std::vector<double> row{path.times[ti], static_cast<double>(i)};
            for (double x : site_position(torus, i, model.config().epsilon, model.config().origin)) row.push_back(x);
            row.push_back(path.fields[ti][i]);
            fields.cells(row);
        }
    r.add("simulate_fields.csv", fields);

    const std::size_t replicas = c.at("replicas").get<std::size_t>();
    const auto mom = ensemble_moments(model, replicas, r.threads);
    Csv moments({"t", "site", "m1", "se1", "m2", "se2", "m3", "se3"});
    for (std::size_t ti = 0; ti < mom.times.size(); ++ti)
        for (std::size_t i = 0; i < mom.sites; ++i)
            moments.row(mom.times[ti], i, mom.at(1, ti, i).mean, mom.at(1, ti, i).se, mom.at(2, ti, i).mean,
                        mom.at(2, ti, i).se, mom.at(3, ti, i).mean, mom.at(3, ti, i).se);
    r.add("simulate_moments.csv", moments);
    r.summary = {{"steps", model.steps()},
                 {"sites", torus.size()},
                 {"replicas", replicas},
                 {"running_max", path.running_max},
                 {"running_min", path.running_min},
                 {"negativity_fraction", path.negativity_fraction}};
    bool finite = true;
    for (const auto& v : mom.moments)
        for (const auto& e : v) finite = finite && std::isfinite(e.mean) && std::isfinite(e.se);
    r.check("moments_finite", finite);
}

std::vector<double> report_times(const SimConfig& sc) {
    return sc.output_times.empty() ? std::vector<double>{sc.t_end} : sc.output_times;
}

void run_oracle(Run& r) {
    const auto& c = r.config;
    const auto sc = sim_config_from(c);
    const auto times = report_times(sc);
    const PamSecondMoment m2(sc);
    const std::size_t n = m2.sites();
    Csv moments({"t", "site", "m1", "m2"});
    for (double t : times) {
        const auto m1 = pam_mean(sc, t);
        const auto tab = m2.at(t);
        for (std::size_t i = 0; i < n; ++i) moments.row(t, i, m1[i], tab[i * n + i]);
    }
    r.add("oracle_moments.csv", moments);
    Csv growth({"order", "gamma", "residual", "iterations"});
    Json rates = Json::array();
    bool positive = true;
    for (double o : c.at("orders").get<std::vector<double>>()) {
        const int order = static_cast<int>(std::lround(o));
        const auto g = pam_growth_rate(sc, order);
        growth.row(order, g.gamma, g.residual, g.iterations);
        rates.push_back({{"order", order}, {"gamma", g.gamma}});
        positive = positive && (sc.sigma.lambda == 0.0 || g.gamma > 0.0);
    }
    r.add("oracle_growth.csv", growth);
    r.summary = {{"sites", n}, {"growth_rates", rates}};
    r.check("growth_rates_positive", positive);
}

void run_converge(Run& r) {
    const auto& c = r.config;
    const auto sc = sim_config_from(c);
    const double a = tail_exponent(c, sc.walk);
    const auto rep = convergence_study(sc, c.at("levels").get<int>(), c.at("order").get<int>(),
                                       c.at("replicas").get<std::size_t>(), r.threads, a);
    Csv csv({"epsilon", "error", "se"});
    for (std::size_t i = 0; i < rep.epsilons.size(); ++i) csv.row(rep.epsilons[i], rep.errors[i], rep.errors_se[i]);
    r.add("converge.csv", csv);
    r.summary = {{"eps_ref", rep.eps_ref},
                 {"order", rep.order},
                 {"replicas", rep.replicas},
                 {"eta", rep.targets.eta},
                 {"rho", rep.targets.rho},
                 {"a", a}};
    if (rep.has_fit) {
        const double threshold = 0.9 * rep.targets.rho;
        r.summary["slope"] = rep.fit.slope;
        r.summary["r_squared"] = rep.fit.r_squared;
        r.summary["slope_threshold"] = threshold;
        r.check("slope_at_least_0.9rho", rep.fit.slope >= threshold);
    }
}

void run_compare_path(Run& r) {
    const auto& c = r.config;
    const auto sc = sim_config_from(c);
    const auto u0 = initial_from_config(c, "u0");
    const auto v0 = initial_from_config(c, "v0");
    const Torus torus{sc.dim(), sc.torus_n};
    const auto fu = project_initial(u0, sc.epsilon, torus, sc.origin);
    const auto fv = project_initial(v0, sc.epsilon, torus, sc.origin);
    for (std::size_t i = 0; i < fu.size(); ++i)
        if (fu[i] > fv[i]) throw ConfigError("keys 'u0'/'v0': pathwise comparison needs u0 <= v0 on every cell");
    const auto rep = pathwise_comparison(sc, u0, v0, c.at("replicas").get<std::size_t>(), r.threads);
    Csv csv({"replicas", "checks", "violations", "fraction", "max_excess"});
    csv.row(rep.replicas, rep.checks, rep.violations, rep.fraction, rep.max_excess);
    r.add("compare_path.csv", csv);
    r.summary = {{"replicas", rep.replicas},
                 {"checks", rep.checks},
                 {"violations", rep.violations},
                 {"fraction", rep.fraction},
                 {"max_excess", rep.max_excess}};
    r.check("no_violations", rep.violations == 0);
}

void run_compare_moment(Run& r) {
    const auto& c = r.config;
    const auto sc = sim_config_from(c);
    const auto s1 = sc.sigma;
    const auto s2 = sigma_from_config(c, "2");
    const auto rep = moment_comparison(sc, s1, s2, c.at("replicas").get<std::size_t>(), r.threads,
                                       c.at("range").get<double>());
    Csv csv({"t", "site", "order", "first", "first_se", "second", "second_se", "se_difference", "ordered"});
    std::size_t ordered = 0;
    for (const auto& row : rep.rows) {
        csv.row(row.t, row.site, row.order, row.first.mean, row.first.se, row.second.mean, row.second.se,
                row.se_difference, int(row.ordered));
        ordered += row.ordered;
    }
    r.add("compare_moment.csv", csv);
    r.summary = {{"replicas", rep.replicas}, {"rows", rep.rows.size()}, {"ordered_rows", ordered}};
    r.check("moments_ordered_within_3se", rep.all_ordered);
    if (s1.kind == SigmaKind::Linear && s2.kind == SigmaKind::Linear) {
        const auto times = report_times(sc);
        const auto orows = oracle_moment_ordering(sc, s1.lambda, s2.lambda, times);
        Csv oc({"t", "site", "m2_first", "m2_second"});
        bool strict = true;
        for (const auto& o : orows) {
            oc.row(o.t, o.site, o.m2_first, o.m2_second);
            strict = strict && (s1.lambda == s2.lambda ? o.m2_first == o.m2_second : o.m2_first > o.m2_second);
        }
        r.add("compare_moment_oracle.csv", oc);
        r.check("oracle_m2_ordered", strict);
    }
}

void run_lyapunov(Run& r) {
    const auto& c = r.config;
    const auto sc = sim_config_from(c);
    const auto lambdas = c.at("lambdas").get<std::vector<double>>();
    const auto rows = lyapunov_study(sc, lambdas);
    Csv csv({"lambda", "gamma2", "gamma3", "ratio", "intermittent", "reference_exponent"});
    bool ok = true;
    for (const auto& row : rows) {
        csv.row(row.lambda, row.gamma2.gamma, row.gamma3.gamma, row.ratio, int(row.intermittent),
                row.reference_exponent);
        if (row.lambda != 0.0) ok = ok && row.gamma2.gamma > 0.0 && row.intermittent;
    }
    r.add("lyapunov.csv", csv);
    r.summary = {{"reference_exponent", rows.empty() ? 0.0 : rows[0].reference_exponent}, {"rows", rows.size()}};
    r.check("intermittent", ok);
}

void dispatch(Run& r) {
    const auto& s = r.subcommand;
    if (s == "kernel") run_kernel(r);
    else if (s == "walk") run_walk(r);
    else if (s == "llt") run_llt(r);
    else if (s == "noise") run_noise(r);
    else if (s == "simulate") run_simulate(r);
    else if (s == "oracle") run_oracle(r);
    else if (s == "converge") run_converge(r);
    else if (s == "compare-path") run_compare_path(r);
    else if (s == "compare-moment") run_compare_moment(r);
    else if (s == "lyapunov") run_lyapunov(r);
    else throw ConfigError("unknown subcommand '" + s + "'");
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Lattice stochastic heat equation toolkit", "stochheat"};
    app.require_subcommand(1);
    std::string config_path, out_dir;
    std::vector<std::string> overrides;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    if (const char* env = std::getenv("STOCHHEAT_OUT")) out_dir = env;
    if (out_dir.empty()) out_dir = "out";
    for (const auto& name : subcommands()) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON config or run manifest");
        sub->add_option("--seed", seed, "overrides the config seed");
        sub->add_option("--out", out_dir, "output directory (default $STOCHHEAT_OUT or ./out)");
        sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--override", overrides, "key=value, repeatable");
    }
    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return Ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return ConfigFailure;
    }

    Run r;
    r.subcommand = app.get_subcommands().front()->get_name();
    r.threads = threads;
    const auto start = std::chrono::steady_clock::now();
    try {
        Json raw = config_path.empty() ? Json::object() : load_json_file(config_path);
        if (raw.contains("subcommand") && raw.contains("config")) raw = resolve_config(raw, r.subcommand);
        for (const auto& o : overrides) apply_override(raw, o);
        if (app.get_subcommands().front()->count("--seed")) raw["seed"] = seed;
        r.config = resolve_config(raw, r.subcommand);
        dispatch(r);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return ConfigFailure;
    } catch (const DomainError& e) {
        err << "config error: " << e.what() << "\n";
        return ConfigFailure;
    } catch (const Json::exception& e) {
        err << "config error: " << e.what() << "\n";
        return ConfigFailure;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return NumericalFailure;
    } catch (const AssertionFailure& e) {
        err << "assertion failed: " << e.what() << "\n";
        return AssertionFailed;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    try {
        fs::create_directories(out_dir);
        Json summary = r.summary;
        summary["subcommand"] = r.subcommand;
        summary["assertions"] = r.assertions;
        r.files.emplace_back(r.subcommand + "_summary.json", dump(summary));
        Json outputs = Json::array();
        for (const auto& [name, contents] : r.files) {
            const std::string path = (fs::path(out_dir) / name).string();
            write_atomic(path, contents);
            outputs.push_back({{"file", name}, {"bytes", contents.size()}, {"sha256", sha256_file(path)}});
        }
        bool all = true;
        for (const auto& [k, v] : r.assertions.items()) all = all && v.get<bool>();
        const Json manifest = {{"subcommand", r.subcommand},
                               {"config", r.config},
                               {"seed", r.config.at("seed")},
                               {"threads", r.threads},
                               {"version", STOCHHEAT_VERSION},
                               {"modules",
                                {{"stable_kernel", STOCHHEAT_VERSION},
                                 {"walk", STOCHHEAT_VERSION},
                                 {"local_limit", STOCHHEAT_VERSION},
                                 {"riesz_noise", STOCHHEAT_VERSION},
                                 {"lattice_sde", STOCHHEAT_VERSION},
                                 {"oracles", STOCHHEAT_VERSION},
                                 {"experiments", STOCHHEAT_VERSION}}},
                               {"wall_time_s", wall},
                               {"outputs", outputs},
                               {"assertions", r.assertions},
                               {"passed", all}};
        write_atomic((fs::path(out_dir) / (r.subcommand + "_manifest.json")).string(), dump(manifest));
        for (const auto& o : outputs) out << o.at("sha256").get<std::string>() << "  " << o.at("file").get<std::string>() << "\n";
        for (const auto& [k, v] : r.assertions.items()) out << (v.get<bool>() ? "PASS " : "FAIL ") << k << "\n";
        return all ? Ok : AssertionFailed;
    } catch (const std::exception& e) {
        err << "output error: " << e.what() << "\n";
        return NumericalFailure;
    }
}

} // namespace stochheat::cli
