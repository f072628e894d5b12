#pragma once

#include "stochheat/common.hpp"

#include <complex>
#include <memory>
#include <span>
#include <vector>

namespace stochheat {

/// Unnormalized multidimensional DFT on a torus, backed by FFTW.
/// Each instance owns its plans and buffers; distinct instances may be used
/// from distinct threads concurrently.
class TorusFFT {
public:
    explicit TorusFFT(const Torus& torus);
    ~TorusFFT();
    TorusFFT(const TorusFFT&) = delete;
    TorusFFT& operator=(const TorusFFT&) = delete;

    const Torus& torus() const { return torus_; }

    /// X_m = sum_k x_k exp(-2πi k·m / n)
    void forward(std::span<std::complex<double>> data);
    /// x_k = sum_m X_m exp(+2πi k·m / n)   (no 1/N factor)
    void backward(std::span<std::complex<double>> data);

private:
    struct Impl;
    Torus torus_;
    std::unique_ptr<Impl> impl_;
};

/// Real parts of the forward DFT of a real table (the eigenvalues of the
/// circulant it generates when the table is symmetric).
std::vector<double> circulant_spectrum(const Torus& torus, std::span<const double> table);

/// Inverse of circulant_spectrum for a real symmetric spectrum.
std::vector<double> table_from_spectrum(const Torus& torus, std::span<const double> spectrum);

/// out[x] = sum_y kernel[x - y] field[y] on the torus, applied through a
/// cached kernel spectrum.
class CircularConvolver {
public:
    CircularConvolver(const Torus& torus, std::span<const double> kernel);
    /// Builds directly from the (complex) kernel spectrum.
    CircularConvolver(const Torus& torus, std::vector<std::complex<double>> kernel_spectrum);

    const Torus& torus() const { return fft_->torus(); }
    void apply(std::span<const double> field, std::span<double> out);
    std::vector<double> apply(std::span<const double> field);

private:
    std::unique_ptr<TorusFFT> fft_;
    std::vector<std::complex<double>> spectrum_;
    std::vector<std::complex<double>> work_;
};

/// Direct O(N·support) circular convolution; used for small stencils and as a
/// cross-check of the transform path.
std::vector<double> circular_convolve_direct(const Torus& torus, std::span<const double> kernel,
                                             std::span<const double> field);

} // namespace stochheat
