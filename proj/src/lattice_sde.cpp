#include "stochheat/lattice_sde.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace stochheat {

std::string to_string(SigmaKind k) {
    switch (k) {
    case SigmaKind::Linear: return "linear";
    case SigmaKind::Cutoff: return "cutoff";
    case SigmaKind::SmoothBounded: return "smooth_bounded";
    case SigmaKind::Custom: return "custom";
    }
    return "unknown";
}

SigmaKind sigma_kind_from_string(const std::string& s) {
    if (s == "linear") return SigmaKind::Linear;
    if (s == "cutoff") return SigmaKind::Cutoff;
    if (s == "smooth_bounded") return SigmaKind::SmoothBounded;
    if (s == "custom") return SigmaKind::Custom;
    throw ConfigError("unknown sigma kind '" + s + "' (linear|cutoff|smooth_bounded|custom)");
}

namespace {

double base_sigma(SigmaKind base, double lambda, double u) {
    if (base == SigmaKind::SmoothBounded) return lambda * u / (1.0 + u * u);
    return lambda * u;
}

} // namespace

double SigmaSpec::operator()(double u) const {
    switch (kind) {
    case SigmaKind::Linear: return lambda * u;
    case SigmaKind::SmoothBounded: return lambda * u / (1.0 + u * u);
    case SigmaKind::Cutoff: {
        const double N = cutoff_n;
        if (u >= -N && u <= N) return base_sigma(base, lambda, u);
        if (u >= 2.0 * N || u <= -2.0 * N) return 0.0;
        if (u > N) return base_sigma(base, lambda, N) * (2.0 * N - u) / N;
        return base_sigma(base, lambda, -N) * (u + 2.0 * N) / N;
    }
    case SigmaKind::Custom: {
        if (table.empty()) return 0.0;
        if (u <= table.front().first) return table.front().second;
        if (u >= table.back().first) return table.back().second;
        auto it = std::lower_bound(table.begin(), table.end(), u,
                                   [](const auto& p, double v) { return p.first < v; });
        const auto& hi = *it;
        const auto& lo = *(it - 1);
        return lo.second + (hi.second - lo.second) * (u - lo.first) / (hi.first - lo.first);
    }
    }
    return 0.0;
}

double SigmaSpec::lip_const() const {
    switch (kind) {
    case SigmaKind::Linear:
    case SigmaKind::SmoothBounded:
    case SigmaKind::Cutoff: return std::abs(lambda);
    case SigmaKind::Custom: {
        double L = 0;
        for (std::size_t i = 1; i < table.size(); ++i)
            L = std::max(L, std::abs(table[i].second - table[i - 1].second) / (table[i].first - table[i - 1].first));
        return L;
    }
    }
    return 0.0;
}

void SigmaSpec::validate(double range) const {
    if (!std::isfinite(lambda)) throw ConfigError("sigma.lambda must be finite");
    if (kind == SigmaKind::Cutoff) {
        if (!(cutoff_n > 0.0)) throw ConfigError("sigma.cutoff_n must be positive");
        if (base != SigmaKind::Linear && base != SigmaKind::SmoothBounded)
            throw ConfigError("sigma.base must be linear or smooth_bounded");
    }
    if (kind == SigmaKind::Custom) {
        if (table.size() < 2) throw ConfigError("custom sigma needs at least two table points");
        for (std::size_t i = 1; i < table.size(); ++i)
            if (!(table[i].first > table[i - 1].first))
                throw ConfigError("custom sigma table abscissae must increase strictly");
    }
    const double L = lip_const();
    const int n = 4001;
    double prev = (*this)(-range);
    for (int i = 1; i < n; ++i) {
        const double h = 2.0 * range / (n - 1);
        const double cur = (*this)(-range + h * i);
        if (std::abs(cur - prev) > L * h * (1.0 + 1e-9) + 1e-12)
            throw ConfigError("sigma violates its Lipschitz constant");
        prev = cur;
    }
}

std::string to_string(InitialKind k) {
    switch (k) {
    case InitialKind::Constant: return "constant";
    case InitialKind::Linear: return "linear";
    case InitialKind::HalfLine: return "half_line";
    case InitialKind::GaussianBump: return "gaussian_bump";
    case InitialKind::Custom: return "custom";
    }
    return "unknown";
}

InitialKind initial_kind_from_string(const std::string& s) {
    if (s == "constant") return InitialKind::Constant;
    if (s == "linear") return InitialKind::Linear;
    if (s == "half_line") return InitialKind::HalfLine;
    if (s == "gaussian_bump") return InitialKind::GaussianBump;
    throw ConfigError("unknown u0 kind '" + s + "' (constant|linear|half_line|gaussian_bump)");
}

double InitialProfile::operator()(std::span<const double> x) const {
    switch (kind) {
    case InitialKind::Constant: return value;
    case InitialKind::Linear: return value + slope * x[0];
    case InitialKind::HalfLine: return x[0] >= threshold ? value : 0.0;
    case InitialKind::GaussianBump: {
        double r2 = 0;
        for (double v : x) r2 += v * v;
        return value * std::exp(-0.5 * r2 / (width * width));
    }
    case InitialKind::Custom: return custom ? custom(x) : 0.0;
    }
    return 0.0;
}

std::string to_string(Scheme s) { return s == Scheme::EulerMaruyama ? "em" : "splitting"; }

Scheme scheme_from_string(const std::string& s) {
    if (s == "em") return Scheme::EulerMaruyama;
    if (s == "splitting") return Scheme::Splitting;
    throw ConfigError("unknown scheme '" + s + "' (em|splitting)");
}

namespace {

std::size_t whole_steps(double t, double dt, const char* what) {
    const double r = t / dt;
    const auto n = static_cast<std::size_t>(std::llround(r));
    if (std::abs(r - static_cast<double>(n)) > 1e-9 * std::max(1.0, r)) {
        std::ostringstream os;
        os << what << " = " << t << " is not a whole number of steps dt = " << dt;
        throw ConfigError(os.str());
    }
    return n;
}

} // namespace

std::size_t SimConfig::steps() const { return whole_steps(t_end, dt, "t_end"); }

void SimConfig::validate() const {
    std::ostringstream os;
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (torus_n < 1) throw ConfigError("torus_n must be at least 1");
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    if (!(t_end > 0.0)) throw ConfigError("t_end must be positive");
    if (correlation.kind == CorrelationKind::Riesz) {
        if (!(correlation.beta > 0.0)) throw ConfigError("beta must be positive");
        if (!(correlation.beta < alpha())) {
            os << "beta < alpha required for a function-valued solution (beta = " << correlation.beta
               << ", alpha = " << alpha() << ")";
            throw ConfigError(os.str());
        }
        if (!(correlation.beta < dim())) {
            os << "beta < d required for a locally integrable correlation (beta = " << correlation.beta
               << ", d = " << dim() << ")";
            throw ConfigError(os.str());
        }
    }
    try {
        correlation.validate(dim());
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    if (scheme == Scheme::EulerMaruyama && dt > 0.25 * std::pow(epsilon, alpha()) * (1.0 + 1e-12)) {
        os << "Euler-Maruyama needs dt <= eps^alpha / 4 = " << 0.25 * std::pow(epsilon, alpha()) << ", got " << dt;
        throw ConfigError(os.str());
    }
    sigma.validate();
    switch (u0.kind) {
    case InitialKind::Linear: throw ConfigError("u0 must be bounded; linear profiles are for projection only");
    case InitialKind::Constant:
    case InitialKind::HalfLine:
    case InitialKind::GaussianBump:
        if (!(u0.value >= 0.0 && std::isfinite(u0.value))) throw ConfigError("u0 must be bounded and nonnegative");
        if (u0.kind == InitialKind::GaussianBump && !(u0.width > 0.0)) throw ConfigError("u0.width must be positive");
        break;
    case InitialKind::Custom: break;
    }
    (void)steps();
    for (double t : output_times) {
        if (!(t >= 0.0 && t <= t_end * (1.0 + 1e-12))) throw ConfigError("output times must lie in [0, t_end]");
        (void)whole_steps(t, dt, "output time");
    }
}

std::vector<double> project_initial(const InitialProfile& u0, double epsilon, const Torus& torus, double origin) {
    using Rule = boost::math::quadrature::gauss<double, 8>;
    std::vector<double> nodes, weights;
    for (std::size_t i = 0; i < Rule::abscissa().size(); ++i) {
        nodes.push_back(Rule::abscissa()[i]);
        weights.push_back(Rule::weights()[i]);
        nodes.push_back(-Rule::abscissa()[i]);
        weights.push_back(Rule::weights()[i]);
    }
    const std::size_t q = nodes.size();
    const std::size_t d = static_cast<std::size_t>(torus.dim);
    std::size_t per_cell = 1;
    for (std::size_t a = 0; a < d; ++a) per_cell *= q;
    std::vector<double> out(torus.size());
    std::vector<double> x(d);
    for (std::size_t i = 0; i < torus.size(); ++i) {
        const auto k = torus.offset(i);
        KahanSum s;
        for (std::size_t flat = 0; flat < per_cell; ++flat) {
            std::size_t rem = flat;
            double w = 1.0;
            for (std::size_t a = 0; a < d; ++a) {
                const std::size_t j = rem % q;
                rem /= q;
                x[a] = origin + epsilon * static_cast<double>(k[a]) + 0.5 * epsilon * nodes[j];
                w *= 0.5 * weights[j];
            }
            s.add(w * u0(x));
        }
        out[i] = s.value();
    }
    return out;
}

std::vector<double> generator_apply(const DislocationDistribution& walk, double epsilon, const Torus& torus,
                                    std::span<const double> field) {
    if (field.size() != torus.size()) throw DomainError("field size does not match torus");
    const auto kernel = walk.torus_kernel(torus);
    const std::size_t support = static_cast<std::size_t>(std::count_if(kernel.begin(), kernel.end(),
                                                                       [](double v) { return v != 0.0; }));
    std::vector<double> conv;
    if (support <= 64) {
        conv = circular_convolve_direct(torus, kernel, field);
    } else {
        CircularConvolver c(torus, kernel);
        conv = c.apply(field);
    }
    const double rate = std::pow(epsilon, -walk.alpha());
    for (std::size_t i = 0; i < conv.size(); ++i) conv[i] = rate * (conv[i] - field[i]);
    return conv;
}

std::vector<std::complex<double>> semigroup_spectrum(const DislocationDistribution& walk, double epsilon,
                                                     const Torus& torus, double t) {
    const auto charfn = walk.torus_charfn(torus);
    const double s = t / std::pow(epsilon, walk.alpha());
    std::vector<std::complex<double>> spec(charfn.size());
    for (std::size_t m = 0; m < charfn.size(); ++m) spec[m] = std::exp(-s * (1.0 - charfn[m]));
    return spec;
}

std::vector<double> apply_semigroup(const DislocationDistribution& walk, double epsilon, const Torus& torus,
                                    double t, std::span<const double> field) {
    CircularConvolver c(torus, semigroup_spectrum(walk, epsilon, torus, t));
    return c.apply(field);
}

LatticeModel::LatticeModel(SimConfig config)
    : config_((config.validate(), std::move(config))),
      torus_{config_.dim(), config_.torus_n},
      sampler_(build_covariance({config_.dim(), config_.epsilon, config_.torus_n}, config_.correlation),
               config_.sampler, config_.seed) {
    steps_ = config_.steps();
    if (config_.output_times.empty()) {
        output_steps_.push_back(steps_);
    } else {
        for (double t : config_.output_times) output_steps_.push_back(whole_steps(t, config_.dt, "output time"));
        std::sort(output_steps_.begin(), output_steps_.end());
        output_steps_.erase(std::unique(output_steps_.begin(), output_steps_.end()), output_steps_.end());
    }
    if (config_.scheme == Scheme::Splitting) {
        drift_spectrum_ = semigroup_spectrum(config_.walk, config_.epsilon, torus_, config_.dt);
    } else {
        const auto charfn = config_.walk.torus_charfn(torus_);
        drift_spectrum_.assign(charfn.begin(), charfn.end());
    }
    noise_scale_ = std::pow(config_.epsilon, -config_.dim());
    u0_ = project_initial(config_.u0, config_.epsilon, torus_, config_.origin);
}

std::vector<double> LatticeModel::initial_field() const { return u0_; }

std::size_t LatticeModel::site_containing(std::span<const double> x) const {
    std::vector<long> k(x.size());
    for (std::size_t a = 0; a < x.size(); ++a)
        k[a] = static_cast<long>(std::floor((x[a] - config_.origin) / config_.epsilon + 0.5));
    return torus_.index(k);
}

LatticeModel::Stepper::Stepper(const LatticeModel& model)
    : model_(&model), noise_ws_(model.sampler_), drift_(model.torus_, model.drift_spectrum_),
      work_(model.torus_.size()) {}

void LatticeModel::Stepper::sample(std::uint64_t replica, std::uint64_t step, std::span<double> out) {
    model_->sampler_.sample(noise_ws_, model_->config_.dt, step, replica, out);
}

void LatticeModel::Stepper::step(SimState& state, std::span<const double> dB) {
    const auto& cfg = model_->config_;
    auto& u = state.field;
    if (dB.size() != u.size()) throw DomainError("increment size does not match field");
    drift_.apply(u, work_);
    if (cfg.scheme == Scheme::Splitting) {
        for (std::size_t i = 0; i < u.size(); ++i)
            u[i] = work_[i] + model_->noise_scale_ * cfg.sigma(work_[i]) * dB[i];
    } else {
        const double rate = cfg.dt * std::pow(cfg.epsilon, -cfg.alpha());
        for (std::size_t i = 0; i < u.size(); ++i)
            u[i] += rate * (work_[i] - u[i]) + model_->noise_scale_ * cfg.sigma(u[i]) * dB[i];
    }
    ++state.step;
    state.time = static_cast<double>(state.step) * cfg.dt;
    for (double v : u)
        if (!std::isfinite(v)) {
            std::ostringstream os;
            os << "field became non-finite at t = " << state.time;
            throw BlowUpError(os.str(), state.time);
        }
}

SimState step(const LatticeModel& model, SimState state, std::span<const double> dB) {
    LatticeModel::Stepper s(model);
    s.step(state, dB);
    return state;
}

namespace {

struct PathRecorder {
    SimPath path;
    std::size_t negatives = 0;
    std::size_t seen = 0;
    std::size_t next_output = 0;

    void start(const std::vector<double>& u) {
        path.running_max = *std::max_element(u.begin(), u.end());
        path.running_min = *std::min_element(u.begin(), u.end());
    }
    void observe(const LatticeModel& m, const SimState& s) {
        for (double v : s.field) {
            path.running_max = std::max(path.running_max, v);
            path.running_min = std::min(path.running_min, v);
            negatives += v < 0.0;
        }
        seen += s.field.size();
        record(m, s);
    }
    void record(const LatticeModel& m, const SimState& s) {
        const auto& outs = m.output_steps();
        while (next_output < outs.size() && outs[next_output] == s.step) {
            path.times.push_back(static_cast<double>(s.step) * m.dt());
            path.fields.push_back(s.field);
            ++next_output;
        }
    }
    SimPath finish() {
        path.negativity_fraction = seen ? static_cast<double>(negatives) / static_cast<double>(seen) : 0.0;
        return std::move(path);
    }
};

} // namespace

SimPath simulate(const LatticeModel& model, std::uint64_t replica) {
    LatticeModel::Stepper stepper(model);
    SimState state;
    state.field = model.initial_field();
    PathRecorder rec;
    rec.start(state.field);
    rec.record(model, state);
    std::vector<double> dB(model.torus().size());
    for (std::size_t k = 0; k < model.steps(); ++k) {
        stepper.sample(replica, k, dB);
        stepper.step(state, dB);
        rec.observe(model, state);
    }
    return rec.finish();
}

SimPath simulate(const SimConfig& config, std::uint64_t replica) {
    LatticeModel model(config);
    return simulate(model, replica);
}

SimConfig refine(const SimConfig& coarse) {
    SimConfig fine = coarse;
    fine.epsilon = 0.5 * coarse.epsilon;
    fine.torus_n = 2 * coarse.torus_n;
    fine.origin = coarse.origin - 0.25 * coarse.epsilon;
    return fine;
}

CoupledLadder::CoupledLadder(std::vector<SimConfig> finest_first) {
    if (finest_first.empty()) throw CouplingError("coupled ladder needs at least one level");
    for (std::size_t l = 1; l < finest_first.size(); ++l) {
        const auto& f = finest_first[l - 1];
        const auto& c = finest_first[l];
        std::ostringstream os;
        os << "levels " << l - 1 << " and " << l << " are not nested: ";
        if (f.dim() != c.dim()) throw CouplingError(os.str() + "dimensions differ");
        if (std::abs(c.epsilon - 2.0 * f.epsilon) > 1e-12 * c.epsilon)
            throw CouplingError(os.str() + "coarse spacing must be twice the fine spacing");
        if (f.torus_n != 2 * c.torus_n) throw CouplingError(os.str() + "fine torus must have twice the sites");
        if (std::abs(f.origin - (c.origin - 0.25 * c.epsilon)) > 1e-12 * c.epsilon)
            throw CouplingError(os.str() + "fine cells must tile coarse cells (origin shift eps_coarse / 4)");
        if (std::abs(f.dt - c.dt) > 1e-15 * c.dt || f.steps() != c.steps())
            throw CouplingError(os.str() + "time grids differ");
    }
    for (auto& cfg : finest_first) models_.push_back(std::make_unique<LatticeModel>(std::move(cfg)));
}

std::vector<SimPath> CoupledLadder::simulate(std::uint64_t replica) const {
    const std::size_t L = models_.size();
    std::vector<LatticeModel::Stepper> steppers;
    std::vector<SimState> states(L);
    std::vector<PathRecorder> recs(L);
    for (std::size_t l = 0; l < L; ++l) {
        steppers.emplace_back(*models_[l]);
        states[l].field = models_[l]->initial_field();
        recs[l].start(states[l].field);
        recs[l].record(*models_[l], states[l]);
    }
    std::vector<double> dB(models_[0]->torus().size());
    for (std::size_t k = 0; k < models_[0]->steps(); ++k) {
        steppers[0].sample(replica, k, dB);
        std::vector<double> level_dB = dB;
        for (std::size_t l = 0; l < L; ++l) {
            if (l > 0) level_dB = aggregate_to_coarse(models_[l - 1]->torus(), level_dB);
            steppers[l].step(states[l], level_dB);
            recs[l].observe(*models_[l], states[l]);
        }
    }
    std::vector<SimPath> out;
    for (auto& r : recs) out.push_back(r.finish());
    return out;
}

std::pair<SimPath, SimPath> simulate_coupled_refinement(const SimConfig& coarse, const SimConfig& fine,
                                                        std::uint64_t seed, std::uint64_t replica) {
    SimConfig f = fine;
    SimConfig c = coarse;
    f.seed = seed;
    c.seed = seed;
    CoupledLadder ladder({f, c});
    auto paths = ladder.simulate(replica);
    return {std::move(paths[1]), std::move(paths[0])};
}

} // namespace stochheat
