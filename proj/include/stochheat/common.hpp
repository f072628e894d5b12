#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace stochheat {

// ---------------------------------------------------------------------------
// Error taxonomy. The CLI maps these onto exit codes; everything else treats
// them as ordinary exceptions.
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid input: parameter outside the domain where the quantity is defined.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration (missing or inconsistent keys).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Base for failures of a numerical procedure on valid input.
class NumericalError : public Error {
public:
    using Error::Error;
};

class ResolutionError : public NumericalError {
public:
    ResolutionError(const std::string& what, std::size_t required_nodes)
        : NumericalError(what), required_nodes_(required_nodes) {}
    std::size_t required_nodes() const noexcept { return required_nodes_; }

private:
    std::size_t required_nodes_;
};

class MassLeakError : public NumericalError {
public:
    MassLeakError(const std::string& what, std::size_t suggested_n)
        : NumericalError(what), suggested_n_(suggested_n) {}
    std::size_t suggested_torus_n() const noexcept { return suggested_n_; }

private:
    std::size_t suggested_n_;
};

class QuadratureError : public NumericalError {
public:
    QuadratureError(const std::string& what, double previous, double last)
        : NumericalError(what), previous_(previous), last_(last) {}
    double previous_estimate() const noexcept { return previous_; }
    double last_estimate() const noexcept { return last_; }

private:
    double previous_;
    double last_;
};

class DiagnosticsError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class RegressionError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class EmbeddingError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class BlowUpError : public NumericalError {
public:
    BlowUpError(const std::string& what, double time)
        : NumericalError(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

class CouplingError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Moment oracle refused the request or failed to converge.
class OracleError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// A statistical or numerical assertion of a study did not hold.
class AssertionFailure : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Periodic lattice {0..n-1}^dim with row-major linear indexing.
// ---------------------------------------------------------------------------

struct Torus {
    int dim = 1;
    std::size_t n = 1;

    std::size_t size() const;
    /// Integer coordinates of a linear index.
    std::vector<long> coords(std::size_t index) const;
    std::size_t index(std::span<const long> coords) const;
    /// Minimum-image representative of a coordinate, in (-n/2, n/2].
    long min_image(long c) const;
    /// Minimum-image offset vector of a linear index.
    std::vector<long> offset(std::size_t index) const;
    /// Linear index of -k.
    std::size_t negate(std::size_t index) const;
    /// Linear index of a + b (mod n on each axis).
    std::size_t add(std::size_t a, std::size_t b) const;
    std::size_t sub(std::size_t a, std::size_t b) const;
};

// ---------------------------------------------------------------------------
// Small numerics shared across modules.
// ---------------------------------------------------------------------------

/// Ordinary least squares fit y ≈ slope·x + intercept.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Compensated summation; addition order is the caller's iteration order.
class KahanSum {
public:
    void add(double v);
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// 20-point Gauss–Legendre rule on [-1, 1] (full node set).
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussRule& gauss_legendre20();

/// Runs body(i) for i in [0, count) on up to `threads` workers. Which worker
/// handles which index is unspecified, so bodies must write to disjoint slots.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body);

/// Stateless 64-bit mixer used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

/// Smallest integer >= n whose prime factors are all in {2,3,5,7} and that is
/// odd when `odd` is set.
std::size_t next_fft_size(std::size_t n, bool odd);

} // namespace stochheat
