#include "stochheat/oracles.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <sstream>

namespace stochheat {

std::vector<double> pam_mean(const SimConfig& config, double t) {
    const Torus torus{config.dim(), config.torus_n};
    const auto u0 = project_initial(config.u0, config.epsilon, torus, config.origin);
    if (t == 0.0) return u0;
    return apply_semigroup(config.walk, config.epsilon, torus, t, u0);
}

MomentFlow::MomentFlow(const SimConfig& config, int order) : order_(order) {
    if (config.sigma.kind != SigmaKind::Linear) throw DomainError("moment equations close only for linear sigma");
    if (order < 1 || order > 3) throw DomainError("moment order must be 1, 2 or 3");
    const Torus torus{config.dim(), config.torus_n};
    sites_ = torus.size();
    size_ = 1;
    for (int i = 0; i < order; ++i) size_ *= sites_;
    if (size_ > 40000) {
        std::size_t n = config.torus_n;
        while (n > 1 && std::pow(static_cast<double>(n), config.dim() * order) > 40000.0) --n;
        std::ostringstream os;
        os << "moment state space of " << size_ << " entries exceeds 40000; use torus_n <= " << n;
        throw OracleError(os.str());
    }
    const double rate = std::pow(config.epsilon, -config.alpha());
    drift_bound_ = 2.0 * rate;
    const auto kernel = config.walk.torus_kernel(torus);
    drift_.assign(sites_ * sites_, 0.0);
    for (std::size_t x = 0; x < sites_; ++x) {
        for (std::size_t y = 0; y < sites_; ++y) drift_[x * sites_ + y] = rate * kernel[torus.sub(y, x)];
        drift_[x * sites_ + x] -= rate;
    }
    const auto cov = build_covariance({config.dim(), config.epsilon, config.torus_n}, config.correlation);
    const auto R = cov.realized_table();
    const double c = config.sigma.lambda * config.sigma.lambda * std::pow(config.epsilon, -2.0 * config.dim());
    coupling_.assign(size_, 0.0);
    std::vector<std::size_t> idx(static_cast<std::size_t>(order));
    for (std::size_t s = 0; s < size_; ++s) {
        std::size_t rem = s;
        for (int i = order; i-- > 0;) {
            idx[static_cast<std::size_t>(i)] = rem % sites_;
            rem /= sites_;
        }
        double v = 0;
        for (int i = 0; i < order; ++i)
            for (int j = i + 1; j < order; ++j)
                v += R[torus.sub(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)])];
        coupling_[s] = c * v;
    }
    u0_ = project_initial(config.u0, config.epsilon, torus, config.origin);
}

void MomentFlow::apply(std::span<const double> x, std::span<double> y) const {
    const std::size_t N = sites_;
    for (std::size_t s = 0; s < size_; ++s) y[s] = coupling_[s] * x[s];
    // Drift along coordinate i: contiguous blocks of `inner` entries share the
    // other coordinates.
    std::size_t inner = size_;
    for (int i = 0; i < order_; ++i) {
        inner /= N;
        const std::size_t outer = size_ / (inner * N);
        for (std::size_t o = 0; o < outer; ++o) {
            const std::size_t base = o * N * inner;
            for (std::size_t a = 0; a < N; ++a) {
                const double* row = &drift_[a * N];
                double* out = &y[base + a * inner];
                for (std::size_t b = 0; b < N; ++b) {
                    const double w = row[b];
                    if (w == 0.0) continue;
                    const double* in = &x[base + b * inner];
                    for (std::size_t r = 0; r < inner; ++r) out[r] += w * in[r];
                }
            }
        }
    }
}

std::vector<double> MomentFlow::initial_state() const {
    std::vector<double> s(size_, 1.0);
    for (std::size_t k = 0; k < size_; ++k) {
        std::size_t rem = k;
        for (int i = 0; i < order_; ++i) {
            s[k] *= u0_[rem % sites_];
            rem /= sites_;
        }
    }
    return s;
}

namespace {

std::vector<double> rk4(const MomentFlow& flow, std::vector<double> state, double t, double dt_max) {
    if (t <= 0.0) return state;
    const auto steps = static_cast<std::size_t>(std::ceil(t / dt_max - 1e-9));
    const double h = t / static_cast<double>(steps);
    const std::size_t n = state.size();
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    for (std::size_t s = 0; s < steps; ++s) {
        flow.apply(state, k1);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = state[i] + 0.5 * h * k1[i];
        flow.apply(tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = state[i] + 0.5 * h * k2[i];
        flow.apply(tmp, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = state[i] + h * k3[i];
        flow.apply(tmp, k4);
        for (std::size_t i = 0; i < n; ++i) state[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return state;
}

} // namespace

PamSecondMoment::PamSecondMoment(const SimConfig& config)
    : flow_(config, 2), epsilon_alpha_(std::pow(config.epsilon, config.alpha())) {
    const std::size_t N = flow_.sites();
    if (N > 64) {
        std::ostringstream os;
        os << "second-moment oracle is limited to 64 sites, got " << N << "; use torus_n <= "
           << static_cast<std::size_t>(std::floor(std::pow(64.0, 1.0 / config.dim())));
        throw OracleError(os.str());
    }
    const std::size_t S = flow_.size();
    if (S > 1024) return;
    Eigen::MatrixXd A(static_cast<Eigen::Index>(S), static_cast<Eigen::Index>(S));
    std::vector<double> e(S, 0.0), col(S);
    for (std::size_t j = 0; j < S; ++j) {
        e[j] = 1.0;
        flow_.apply(e, col);
        e[j] = 0.0;
        for (std::size_t i = 0; i < S; ++i) A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (A + A.transpose()));
    if (es.info() != Eigen::Success) throw OracleError("eigendecomposition of the second-moment operator failed");
    const auto m0 = flow_.initial_state();
    const Eigen::VectorXd c = es.eigenvectors().transpose() * Eigen::Map<const Eigen::VectorXd>(m0.data(), static_cast<Eigen::Index>(S));
    eigvals_.assign(es.eigenvalues().data(), es.eigenvalues().data() + S);
    eigvecs_.assign(es.eigenvectors().data(), es.eigenvectors().data() + S * S);
    coeffs_.assign(c.data(), c.data() + S);
}

std::vector<double> PamSecondMoment::at(double t) const {
    if (!(t >= 0.0)) throw DomainError("time must be nonnegative");
    const std::size_t S = flow_.size();
    if (eigvecs_.empty()) return rk4(flow_, flow_.initial_state(), t, epsilon_alpha_ / 64.0);
    Eigen::VectorXd w(static_cast<Eigen::Index>(S));
    for (std::size_t i = 0; i < S; ++i) w(static_cast<Eigen::Index>(i)) = std::exp(eigvals_[i] * t) * coeffs_[i];
    const Eigen::Map<const Eigen::MatrixXd> V(eigvecs_.data(), static_cast<Eigen::Index>(S), static_cast<Eigen::Index>(S));
    const Eigen::VectorXd m = V * w;
    std::vector<double> out(m.data(), m.data() + S);
    // The operator commutes with swapping coordinates; enforce it exactly.
    const std::size_t N = flow_.sites();
    for (std::size_t x = 0; x < N; ++x)
        for (std::size_t y = x + 1; y < N; ++y) {
            const double v = 0.5 * (out[x * N + y] + out[y * N + x]);
            out[x * N + y] = out[y * N + x] = v;
        }
    return out;
}

std::vector<double> pam_second_moment(const SimConfig& config, double t) { return PamSecondMoment(config).at(t); }

std::vector<double> pam_moment_tensor(const SimConfig& config, int order, double t) {
    MomentFlow flow(config, order);
    return rk4(flow, flow.initial_state(), t, std::pow(config.epsilon, config.alpha()) / 64.0);
}

GrowthRate pam_growth_rate(const SimConfig& config, int order, double tol, int max_iter) {
    MomentFlow flow(config, order);
    const std::size_t S = flow.size();
    const int kmax = static_cast<int>(std::min<std::size_t>(S, static_cast<std::size_t>(max_iter)));
    std::vector<Eigen::VectorXd> basis;
    std::vector<double> alphas, betas;
    Eigen::VectorXd v = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(S)) / std::sqrt(static_cast<double>(S));
    Eigen::VectorXd w(static_cast<Eigen::Index>(S));
    GrowthRate out;
    Eigen::VectorXd best_vec;
    for (int k = 0; k < kmax; ++k) {
        basis.push_back(v);
        flow.apply(std::span<const double>(v.data(), S), std::span<double>(w.data(), S));
        const double a = v.dot(w);
        alphas.push_back(a);
        // Full reorthogonalization (twice) against the Krylov basis.
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : basis) w -= q.dot(w) * q;
        const double b = w.norm();

        const int m = k + 1;
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            T(i, i) = alphas[static_cast<std::size_t>(i)];
            if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = betas[static_cast<std::size_t>(i)];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        const double theta = es.eigenvalues()(m - 1);
        const double res = std::abs(b * es.eigenvectors()(m - 1, m - 1));
        out.gamma = theta;
        out.residual = res;
        out.iterations = m;
        const bool done = res <= tol * std::max(1.0, std::abs(theta)) || b < 1e-300 || m == kmax;
        if (done) {
            // Ritz vector and its true residual.
            Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(S));
            for (int i = 0; i < m; ++i) y += es.eigenvectors()(i, m - 1) * basis[static_cast<std::size_t>(i)];
            y.normalize();
            Eigen::VectorXd Ay(static_cast<Eigen::Index>(S));
            flow.apply(std::span<const double>(y.data(), S), std::span<double>(Ay.data(), S));
            out.gamma = y.dot(Ay);
            out.residual = (Ay - out.gamma * y).norm();
            break;
        }
        betas.push_back(b);
        v = w / b;
    }
    if (out.residual > 100.0 * tol * std::max(1.0, std::abs(out.gamma))) {
        std::ostringstream os;
        os << "growth-rate iteration did not converge: residual " << out.residual << " after " << out.iterations
           << " iterations";
        throw OracleError(os.str());
    }
    return out;
}

ScalarReference scalar_sde_reference(const ScalarSDE& sde, double dt, double t, std::uint64_t seed,
                                     std::uint64_t replica, int refine) {
    if (!(dt > 0.0 && t > 0.0)) throw DomainError("scalar reference needs positive dt and t");
    if (refine < 1) throw DomainError("refinement factor must be at least 1");
    const auto steps = static_cast<std::size_t>(std::llround(t / dt));
    const double h = dt / refine;
    std::mt19937_64 rng(mix_seed(mix_seed(seed, 0x5ca1a7ULL), replica));
    std::normal_distribution<double> normal;
    const double sd = std::sqrt(sde.r0 * h);
    ScalarReference ref;
    ref.increments.reserve(steps);
    double fine = sde.u0, coarse = sde.u0;
    for (std::size_t k = 0; k < steps; ++k) {
        double sum = 0;
        for (int j = 0; j < refine; ++j) {
            const double dB = sd * normal(rng);
            fine += sde.noise_scale * sde.sigma(fine) * dB;
            sum += dB;
        }
        coarse += sde.noise_scale * sde.sigma(coarse) * sum;
        ref.increments.push_back(sum);
    }
    ref.coarse_end = coarse;
    ref.fine_end = fine;
    return ref;
}

} // namespace stochheat
