#include "stochheat/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

namespace stochheat {

namespace {
// FFTW planning is not thread safe; execution on plan-owned buffers is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
} // namespace

struct TorusFFT::Impl {
    fftw_complex* buffer = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
    std::size_t size = 0;

    explicit Impl(const Torus& t) : size(t.size()) {
        std::vector<int> dims(static_cast<std::size_t>(t.dim), static_cast<int>(t.n));
        std::lock_guard lock(planner_mutex());
        buffer = fftw_alloc_complex(size);
        fwd = fftw_plan_dft(t.dim, dims.data(), buffer, buffer, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd = fftw_plan_dft(t.dim, dims.data(), buffer, buffer, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~Impl() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
        fftw_free(buffer);
    }

    void run(fftw_plan plan, std::span<std::complex<double>> data) {
        if (data.size() != size) throw DomainError("FFT buffer size does not match torus");
        std::copy(data.begin(), data.end(), reinterpret_cast<std::complex<double>*>(buffer));
        fftw_execute(plan);
        const auto* out = reinterpret_cast<const std::complex<double>*>(buffer);
        std::copy(out, out + size, data.begin());
    }
};

TorusFFT::TorusFFT(const Torus& torus) : torus_(torus), impl_(std::make_unique<Impl>(torus)) {}
TorusFFT::~TorusFFT() = default;

void TorusFFT::forward(std::span<std::complex<double>> data) { impl_->run(impl_->fwd, data); }
void TorusFFT::backward(std::span<std::complex<double>> data) { impl_->run(impl_->bwd, data); }

std::vector<double> circulant_spectrum(const Torus& torus, std::span<const double> table) {
    std::vector<std::complex<double>> buf(table.begin(), table.end());
    TorusFFT fft(torus);
    fft.forward(buf);
    std::vector<double> out(buf.size());
    std::transform(buf.begin(), buf.end(), out.begin(), [](auto c) { return c.real(); });
    return out;
}

std::vector<double> table_from_spectrum(const Torus& torus, std::span<const double> spectrum) {
    std::vector<std::complex<double>> buf(spectrum.begin(), spectrum.end());
    TorusFFT fft(torus);
    fft.backward(buf);
    const double inv = 1.0 / static_cast<double>(buf.size());
    std::vector<double> out(buf.size());
    std::transform(buf.begin(), buf.end(), out.begin(), [inv](auto c) { return c.real() * inv; });
    return out;
}

CircularConvolver::CircularConvolver(const Torus& torus, std::span<const double> kernel)
    : fft_(std::make_unique<TorusFFT>(torus)), work_(torus.size()) {
    spectrum_.assign(kernel.begin(), kernel.end());
    fft_->forward(spectrum_);
}

CircularConvolver::CircularConvolver(const Torus& torus,
                                     std::vector<std::complex<double>> kernel_spectrum)
    : fft_(std::make_unique<TorusFFT>(torus)),
      spectrum_(std::move(kernel_spectrum)),
      work_(torus.size()) {
    if (spectrum_.size() != torus.size()) throw DomainError("kernel spectrum size mismatch");
}

void CircularConvolver::apply(std::span<const double> field, std::span<double> out) {
    std::copy(field.begin(), field.end(), work_.begin());
    fft_->forward(work_);
    for (std::size_t i = 0; i < work_.size(); ++i) work_[i] *= spectrum_[i];
    fft_->backward(work_);
    const double inv = 1.0 / static_cast<double>(work_.size());
    for (std::size_t i = 0; i < work_.size(); ++i) out[i] = work_[i].real() * inv;
}

std::vector<double> CircularConvolver::apply(std::span<const double> field) {
    std::vector<double> out(field.size());
    apply(field, out);
    return out;
}

std::vector<double> circular_convolve_direct(const Torus& torus, std::span<const double> kernel,
                                             std::span<const double> field) {
    const std::size_t N = torus.size();
    std::vector<double> out(N, 0.0);
    std::vector<std::size_t> support;
    for (std::size_t j = 0; j < N; ++j)
        if (kernel[j] != 0.0) support.push_back(j);
    for (std::size_t x = 0; x < N; ++x) {
        KahanSum s;
        for (std::size_t j : support) s.add(kernel[j] * field[torus.sub(x, j)]);
        out[x] = s.value();
    }
    return out;
}

} // namespace stochheat
