#include "stochheat/riesz_noise.hpp"

#include "stochheat/fft.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

namespace stochheat {

std::string to_string(CorrelationKind k) {
    switch (k) {
    case CorrelationKind::Riesz: return "riesz";
    case CorrelationKind::Cauchy: return "cauchy";
    case CorrelationKind::OU: return "ou";
    case CorrelationKind::Poisson: return "poisson";
    case CorrelationKind::Delta: return "delta";
    }
    return "unknown";
}

CorrelationKind correlation_from_string(const std::string& s) {
    if (s == "riesz") return CorrelationKind::Riesz;
    if (s == "cauchy") return CorrelationKind::Cauchy;
    if (s == "ou") return CorrelationKind::OU;
    if (s == "poisson") return CorrelationKind::Poisson;
    if (s == "delta") return CorrelationKind::Delta;
    throw ConfigError("unknown correlation '" + s + "' (riesz|cauchy|ou|poisson|delta)");
}

double CorrelationSpec::value(std::span<const double> x) const {
    double r2 = 0;
    for (double v : x) r2 += v * v;
    switch (kind) {
    case CorrelationKind::Riesz: return std::pow(r2, -0.5 * beta);
    case CorrelationKind::Cauchy: {
        double p = 1;
        for (double v : x) p /= 1.0 + (v / length) * (v / length);
        return p;
    }
    case CorrelationKind::OU: return std::exp(-std::sqrt(r2) / length);
    case CorrelationKind::Poisson:
        return std::pow(1.0 + r2 / (length * length), -0.5 * (static_cast<double>(x.size()) + 1.0));
    case CorrelationKind::Delta: return 0.0;
    }
    return 0.0;
}

void CorrelationSpec::validate(int dim) const {
    if (kind == CorrelationKind::Riesz) {
        if (!(beta > 0.0 && beta < dim)) {
            std::ostringstream os;
            os << "Riesz exponent beta must lie in (0, d) = (0, " << dim << "), got " << beta;
            throw DomainError(os.str());
        }
    } else if (kind != CorrelationKind::Delta && !(length > 0.0)) {
        throw DomainError("correlation length must be positive");
    }
}

double cell_covariance_1d(long m, double epsilon, double beta) {
    if (!(beta > 0.0 && beta < 1.0)) throw DomainError("d = 1 Riesz cell covariance needs beta in (0, 1)");
    if (!(epsilon > 0.0)) throw DomainError("lattice spacing must be positive");
    const double norm = 1.0 / ((1.0 - beta) * (2.0 - beta));
    const long am = std::abs(m);
    auto G = [&](double r) { return std::pow(std::abs(r), 2.0 - beta) * norm; };
    if (am <= 64) {
        const double x = static_cast<double>(am);
        return std::pow(epsilon, 2.0 - beta) * (G(x + 1.0) - 2.0 * G(x) + G(x - 1.0));
    }
    // Second difference as the even Taylor series sum_k 2 G^{(2k)}(m) / (2k)!.
    const double x = static_cast<double>(am);
    double deriv = norm;  // running product prod_{i<2k} (2 - beta - i) / (2k)!
    double sum = 0;
    for (int k = 1; k < 40; ++k) {
        const double i0 = 2.0 * k - 2.0;
        deriv *= (2.0 - beta - i0) * (2.0 - beta - i0 - 1.0) / ((i0 + 1.0) * (i0 + 2.0));
        const double term = 2.0 * deriv * std::pow(x, 2.0 - beta - 2.0 * k);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return std::pow(epsilon, 2.0 - beta) * sum;
}

namespace {

// One orthant [lo_i, hi_i] of [-eps, eps]^d.
struct Box {
    std::vector<double> lo, hi;
};

// prod_i (eps - |s_i|) f(s + eps m) by tensor Gauss–Legendre over `box`,
// split uniformly into 2^level pieces per axis.
double tensor_gauss(const Box& box, int level, double epsilon, std::span<const double> shift,
                    const CorrelationSpec& corr) {
    const auto& g = gauss_legendre20();
    const std::size_t d = box.lo.size();
    const std::size_t pieces = std::size_t{1} << level;
    const std::size_t q = g.nodes.size();
    // Per-axis nodes and weights (tent factor folded into the weight).
    std::vector<std::vector<double>> nodes(d), weights(d);
    for (std::size_t a = 0; a < d; ++a) {
        const double width = (box.hi[a] - box.lo[a]) / static_cast<double>(pieces);
        for (std::size_t p = 0; p < pieces; ++p) {
            const double l = box.lo[a] + width * static_cast<double>(p);
            for (std::size_t i = 0; i < q; ++i) {
                const double s = l + 0.5 * width * (g.nodes[i] + 1.0);
                nodes[a].push_back(s + shift[a]);
                weights[a].push_back(0.5 * width * g.weights[i] * (epsilon - std::abs(s)));
            }
        }
    }
    const std::size_t per_axis = nodes[0].size();
    std::size_t total = 1;
    for (std::size_t a = 0; a < d; ++a) total *= per_axis;
    std::vector<double> w(d);
    KahanSum acc;
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rem = flat;
        double weight = 1.0;
        for (std::size_t a = d; a-- > 0;) {
            const std::size_t i = rem % per_axis;
            rem /= per_axis;
            w[a] = nodes[a][i];
            weight *= weights[a][i];
        }
        acc.add(weight * corr.value(w));
    }
    return acc.value();
}

// Orthant whose corner sits at the zero of s + eps m. With u_i = |w_i| and
// pyramid k given by u_k = lambda a_k, u_j = lambda a_j eta_j, the tent
// factor is a polynomial in lambda and the Riesz factor is lambda^{-beta}
// times a smooth function of eta, so the lambda integral is exact.
double pyramid_corner(const Box& box, double epsilon, std::span<const double> corner,
                      const CorrelationSpec& corr) {
    const std::size_t d = box.lo.size();
    const auto& g = gauss_legendre20();
    const std::size_t q = g.nodes.size();
    std::vector<double> a(d), A(d), dir(d), sgn(d);
    double jac = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
        a[i] = box.hi[i] - box.lo[i];
        jac *= a[i];
        dir[i] = corner[i] == box.lo[i] ? 1.0 : -1.0;  // s_i = corner_i + dir_i u_i
        sgn[i] = box.lo[i] >= 0.0 ? 1.0 : -1.0;        // sign of s_i inside the box
        A[i] = epsilon - sgn[i] * corner[i];
    }
    const bool riesz = corr.kind == CorrelationKind::Riesz;
    const double beta = corr.beta;
    KahanSum total;
    std::vector<double> eta(d), v(d), poly;
    const std::size_t faces = d - 1;
    std::size_t count = 1;
    for (std::size_t i = 0; i < faces; ++i) count *= q;
    for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t flat = 0; flat < count; ++flat) {
            std::size_t rem = flat;
            double weight = 1.0;
            for (std::size_t j = 0, f = 0; j < d; ++j) {
                if (j == k) {
                    eta[j] = 1.0;
                    continue;
                }
                const std::size_t i = rem % q;
                rem /= q;
                eta[j] = 0.5 * (g.nodes[i] + 1.0);
                weight *= 0.5 * g.weights[i];
                ++f;
            }
            // Tent factor prod_i (A_i + B_i lambda) as polynomial coefficients.
            poly.assign(1, 1.0);
            for (std::size_t i = 0; i < d; ++i) {
                const double B = -sgn[i] * dir[i] * a[i] * eta[i];
                std::vector<double> next(poly.size() + 1, 0.0);
                for (std::size_t p = 0; p < poly.size(); ++p) {
                    next[p] += poly[p] * A[i];
                    next[p + 1] += poly[p] * B;
                }
                poly.swap(next);
            }
            for (std::size_t i = 0; i < d; ++i) v[i] = a[i] * eta[i];
            double radial = 0;
            if (riesz) {
                for (std::size_t p = 0; p < poly.size(); ++p)
                    radial += poly[p] / (static_cast<double>(d) - beta + static_cast<double>(p));
                radial *= corr.value(v);
            } else {
                std::vector<double> w(d);
                for (std::size_t i = 0; i < q; ++i) {
                    const double lam = 0.5 * (g.nodes[i] + 1.0);
                    double tent = 0;
                    for (std::size_t p = poly.size(); p-- > 0;) tent = tent * lam + poly[p];
                    for (std::size_t j = 0; j < d; ++j) w[j] = lam * v[j];
                    radial += 0.5 * g.weights[i] * std::pow(lam, static_cast<double>(d) - 1.0) * tent *
                              corr.value(w);
                }
            }
            total.add(weight * radial);
        }
    }
    return jac * total.value();
}

} // namespace

double cell_covariance_nd(std::span<const long> offset, double epsilon, const CorrelationSpec& corr,
                          const CellQuadrature& quad) {
    const int dim = static_cast<int>(offset.size());
    if (dim < 1) throw DomainError("offset must have at least one coordinate");
    if (!(epsilon > 0.0)) throw DomainError("lattice spacing must be positive");
    corr.validate(dim);
    if (corr.kind == CorrelationKind::Delta) {
        for (long m : offset)
            if (m != 0) return 0.0;
        return std::pow(epsilon, dim);
    }
    const std::size_t d = offset.size();
    std::vector<double> shift(d), corner(d);
    long maxabs = 0;
    for (std::size_t i = 0; i < d; ++i) {
        shift[i] = epsilon * static_cast<double>(offset[i]);
        corner[i] = -shift[i];
        maxabs = std::max(maxabs, std::abs(offset[i]));
    }
    KahanSum total;
    for (std::size_t orth = 0; orth < (std::size_t{1} << d); ++orth) {
        Box box{std::vector<double>(d), std::vector<double>(d)};
        bool corner_hit = true;
        for (std::size_t i = 0; i < d; ++i) {
            const bool upper = (orth >> i) & 1u;
            box.lo[i] = upper ? 0.0 : -epsilon;
            box.hi[i] = upper ? epsilon : 0.0;
            if (corner[i] != box.lo[i] && corner[i] != box.hi[i]) corner_hit = false;
        }
        if (corner_hit) {
            total.add(pyramid_corner(box, epsilon, corner, corr));
            continue;
        }
        // Beyond |m|_inf = 1 the nearest kink or singularity is at least one box
        // width away, where a single 20-point tensor rule is at roundoff level.
        if (maxabs >= 2) {
            total.add(tensor_gauss(box, 0, epsilon, shift, corr));
            continue;
        }
        double prev = tensor_gauss(box, 0, epsilon, shift, corr);
        double cur = prev;
        bool ok = false;
        for (int level = 1; level <= quad.max_level; ++level) {
            cur = tensor_gauss(box, level, epsilon, shift, corr);
            if (std::abs(cur - prev) <= quad.rel_tol * std::abs(cur)) {
                ok = true;
                break;
            }
            prev = cur;
        }
        if (!ok) throw QuadratureError("cell covariance quadrature did not converge", prev, cur);
        total.add(cur);
    }
    return total.value();
}

double cell_covariance_nd(std::span<const long> offset, double epsilon, double beta,
                          const CellQuadrature& quad) {
    return cell_covariance_nd(offset, epsilon, CorrelationSpec{CorrelationKind::Riesz, beta, 1.0}, quad);
}

std::vector<double> CellCovariance::realized_table() const { return table_from_spectrum(torus, spectrum); }

CellCovariance build_covariance(const LatticeSpec& lattice, const CorrelationSpec& corr,
                                double max_clipped_mass) {
    if (lattice.dim < 1) throw DomainError("lattice dimension must be at least 1");
    if (lattice.torus_n < 1) throw DomainError("torus needs at least one site");
    corr.validate(lattice.dim);
    CellCovariance cov;
    cov.epsilon = lattice.epsilon;
    cov.correlation = corr;
    cov.torus = Torus{lattice.dim, lattice.torus_n};
    cov.table.resize(cov.torus.size());
    // All supported kernels are invariant under axis reflections and
    // permutations, so sorted absolute offsets identify the value.
    std::map<std::vector<long>, double> cache;
    for (std::size_t i = 0; i < cov.table.size(); ++i) {
        auto off = cov.torus.offset(i);
        for (auto& v : off) v = std::abs(v);
        std::sort(off.begin(), off.end());
        auto it = cache.find(off);
        if (it == cache.end()) {
            const double v = (lattice.dim == 1 && corr.kind == CorrelationKind::Riesz)
                                 ? cell_covariance_1d(off[0], lattice.epsilon, corr.beta)
                                 : cell_covariance_nd(off, lattice.epsilon, corr);
            it = cache.emplace(off, v).first;
        }
        cov.table[i] = it->second;
    }
    auto eig = circulant_spectrum(cov.torus, cov.table);
    cov.min_eigenvalue = *std::min_element(eig.begin(), eig.end());
    cov.max_eigenvalue = *std::max_element(eig.begin(), eig.end());
    double neg = 0, all = 0;
    for (auto& l : eig) {
        all += std::abs(l);
        if (l < 0.0) {
            neg += -l;
            ++cov.clipped_count;
            l = 0.0;
        }
    }
    cov.clipped_mass = all > 0.0 ? neg / all : 0.0;
    cov.spectrum = std::move(eig);
    if (cov.clipped_mass > max_clipped_mass) {
        std::ostringstream os;
        os << "covariance embedding lost a fraction " << cov.clipped_mass << " of its spectrum to clipping (limit "
           << max_clipped_mass << "); use a larger torus";
        throw EmbeddingError(os.str());
    }
    return cov;
}

double summability_integral(const CellCovariance& cov, const DislocationDistribution& walk, double T) {
    if (walk.dim() != cov.dim()) throw DomainError("walk and covariance dimensions differ");
    if (!(T > 0.0)) throw DomainError("time horizon must be positive");
    const auto charfn = walk.torus_charfn(cov.torus);
    const double rate = std::pow(cov.epsilon, -walk.alpha());
    KahanSum s;
    for (std::size_t m = 0; m < charfn.size(); ++m) {
        const double kappa = rate * (1.0 - charfn[m]);
        const double x = 2.0 * T * kappa;
        const double factor = x < 1e-12 ? T : -std::expm1(-x) / (2.0 * kappa);
        s.add(cov.spectrum[m] * factor);
    }
    return s.value() / static_cast<double>(charfn.size());
}

struct NoiseSampler::Dense {
    Eigen::MatrixXd lower;
};

struct NoiseSampler::Workspace::Impl {
    std::unique_ptr<TorusFFT> fft;
    std::vector<std::complex<double>> buf;
    Eigen::VectorXd white;
};

NoiseSampler::Workspace::Workspace(const NoiseSampler& sampler) : impl_(std::make_unique<Impl>()) {
    const std::size_t N = sampler.cov_.torus.size();
    if (sampler.mode_ == SamplerMode::Spectral) {
        impl_->fft = std::make_unique<TorusFFT>(sampler.cov_.torus);
        impl_->buf.resize(N);
    } else {
        impl_->white.resize(static_cast<Eigen::Index>(N));
    }
}
NoiseSampler::Workspace::~Workspace() = default;
NoiseSampler::Workspace::Workspace(Workspace&&) noexcept = default;

NoiseSampler::NoiseSampler(CellCovariance cov, SamplerMode mode, std::uint64_t seed_root)
    : cov_(std::move(cov)), mode_(mode), seed_(seed_root) {
    const std::size_t N = cov_.torus.size();
    if (mode_ == SamplerMode::Spectral) {
        if (cov_.clipped_mass >= 1e-6) throw EmbeddingError("spectral sampling needs clipped mass below 1e-6");
        root_spectrum_.resize(N);
        const double inv = 1.0 / static_cast<double>(N);
        for (std::size_t m = 0; m < N; ++m) root_spectrum_[m] = std::sqrt(cov_.spectrum[m] * inv);
    } else {
        if (N > 4096) throw DomainError("Cholesky sampling is limited to 4096 sites");
        const auto table = cov_.realized_table();
        Eigen::MatrixXd C(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j)
                C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = table[cov_.torus.sub(i, j)];
        Eigen::LLT<Eigen::MatrixXd> llt(C);
        if (llt.info() != Eigen::Success) throw EmbeddingError("Cholesky factorization of the cell covariance failed");
        dense_ = std::make_unique<Dense>();
        dense_->lower = llt.matrixL();
    }
}

NoiseSampler::~NoiseSampler() = default;
NoiseSampler::NoiseSampler(NoiseSampler&&) noexcept = default;
NoiseSampler& NoiseSampler::operator=(NoiseSampler&&) noexcept = default;

void NoiseSampler::sample(Workspace& ws, double dt, std::uint64_t step_index, std::uint64_t stream,
                          std::span<double> out) const {
    const std::size_t N = cov_.torus.size();
    if (out.size() != N) throw DomainError("increment buffer size does not match torus");
    if (!(dt >= 0.0)) throw DomainError("time step must be nonnegative");
    if (dt == 0.0) {
        std::fill(out.begin(), out.end(), 0.0);
        return;
    }
    std::mt19937_64 rng(mix_seed(mix_seed(seed_, stream), step_index));
    std::normal_distribution<double> normal;
    const double sdt = std::sqrt(dt);
    auto& w = *ws.impl_;
    if (mode_ == SamplerMode::Spectral) {
        // Real part of a circularly symmetric complex field coloured by sqrt(lambda).
        for (std::size_t m = 0; m < N; ++m) {
            const double re = normal(rng);
            const double im = normal(rng);
            w.buf[m] = root_spectrum_[m] * std::complex<double>(re, im);
        }
        w.fft->backward(w.buf);
        for (std::size_t k = 0; k < N; ++k) out[k] = sdt * w.buf[k].real();
    } else {
        for (std::size_t k = 0; k < N; ++k) w.white(static_cast<Eigen::Index>(k)) = normal(rng);
        const Eigen::VectorXd x = dense_->lower.triangularView<Eigen::Lower>() * w.white;
        for (std::size_t k = 0; k < N; ++k) out[k] = sdt * x(static_cast<Eigen::Index>(k));
    }
}

std::vector<double> NoiseSampler::sample_increments(double dt, std::uint64_t step_index, std::uint64_t stream) const {
    Workspace ws(*this);
    std::vector<double> out(cov_.torus.size());
    sample(ws, dt, step_index, stream, out);
    return out;
}

std::vector<double> aggregate_to_coarse(const Torus& fine, std::span<const double> field) {
    if (fine.n % 2 != 0) throw CouplingError("fine torus must have an even number of sites per axis");
    if (field.size() != fine.size()) throw DomainError("field size does not match torus");
    const Torus coarse{fine.dim, fine.n / 2};
    std::vector<double> out(coarse.size(), 0.0);
    std::vector<long> c(static_cast<std::size_t>(fine.dim));
    for (std::size_t i = 0; i < fine.size(); ++i) {
        const auto f = fine.coords(i);
        for (std::size_t a = 0; a < f.size(); ++a) c[a] = f[a] / 2;
        out[coarse.index(c)] += field[i];
    }
    return out;
}

} // namespace stochheat
