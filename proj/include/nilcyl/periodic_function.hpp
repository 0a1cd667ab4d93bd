#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nilcyl {

using cplx = std::complex<double>;

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class PeriodMismatch : public Error {
  public:
    PeriodMismatch(double p, double q);
};

class NonFiniteSample : public Error {
  public:
    explicit NonFiniteSample(std::size_t index);
    std::size_t index() const noexcept { return index_; }

  private:
    std::size_t index_;
};

/// Truncated Fourier series f(z) = sum_{|k|<=K} c_k exp(2 pi i k z / p).
///
/// Values are immutable after construction. Besides the coefficients the
/// object carries a truncation tail: the Wiener norm of every coefficient
/// that some lossy operation (product, reduction, denoising) dropped on the
/// way to this function. Evaluation at complex z is the holomorphic
/// extension into the strip where the series converges.
class PeriodicFunction {
  public:
    PeriodicFunction() = default;
    /// `coeffs` has length 2K+1, index 0 holds c_{-K}.
    PeriodicFunction(double period, std::vector<cplx> coeffs, double truncation_tail = 0.0);

    static PeriodicFunction constant(double period, cplx value, int order = 0);
    /// Single mode c * exp(2 pi i k z / p), padded to `order`.
    static PeriodicFunction mode(double period, int k, cplx c, int order);

    double period() const noexcept { return period_; }
    int order() const noexcept { return order_; }
    /// Largest |k| with a nonzero coefficient.
    int active_order() const noexcept { return active_; }
    cplx coeff(int k) const noexcept;
    std::span<const cplx> coeffs() const noexcept { return coeffs_; }

    cplx operator()(cplx z) const;
    cplx operator()(double t) const { return (*this)(cplx(t, 0.0)); }
    /// Values at M equispaced points j p / M, j = 0..M-1.
    std::vector<cplx> sample(std::size_t m) const;

    /// sum_{|k| > K-2} |c_k|: the modes closest to the sampling limit.
    double tail_norm() const;
    double truncation_tail() const noexcept { return truncation_tail_; }
    double wiener_norm() const;
    /// tail_norm() <= rel_tol * wiener_norm().
    bool resolved(double rel_tol = 1e-10) const;

    PeriodicFunction derivative() const;
    PeriodicFunction conj_reflect() const;
    cplx quadrature() const { return period_ * coeff(0); }
    /// Zero out coefficients below rel * wiener_norm(); order is unchanged.
    PeriodicFunction denoised(double rel = 1e-15) const;
    /// Same function viewed with period n*p (exact).
    PeriodicFunction with_period_multiple(int n) const;
    /// Inverse of with_period_multiple: keeps modes divisible by n. The
    /// discarded Wiener norm is added to the truncation tail.
    PeriodicFunction reduce_period(int n) const;
    /// Re-truncate to a different order; dropped modes go into the tail.
    PeriodicFunction resized(int order) const;
    /// Real part on the real axis: (f + f*) / 2.
    PeriodicFunction real_part() const;
    /// Imaginary part on the real axis: (f - f*) / (2i).
    PeriodicFunction imag_part() const;

    friend PeriodicFunction operator+(const PeriodicFunction& a, const PeriodicFunction& b);
    friend PeriodicFunction operator-(const PeriodicFunction& a, const PeriodicFunction& b);
    friend PeriodicFunction operator*(cplx s, const PeriodicFunction& a);
    friend PeriodicFunction operator-(const PeriodicFunction& a) { return cplx(-1.0) * a; }

  private:
    void refresh_active();

    double period_ = 1.0;
    int order_ = 0;
    int active_ = 0;
    std::vector<cplx> coeffs_{cplx{}};
    double truncation_tail_ = 0.0;
};

/// Discrete-Fourier interpolant of M >= 4 equispaced samples over one period.
/// Order is M/2 - 1 for even M (the Nyquist mode is dropped into the tail),
/// (M-1)/2 for odd M.
PeriodicFunction from_samples(std::span<const cplx> samples, double period);

/// Samples `fn` at M points of [0, p) and interpolates.
PeriodicFunction interpolate(const std::function<cplx(double)>& fn, double period,
                             std::size_t m = 256);

/// Convolution product truncated to the larger operand order.
PeriodicFunction product(const PeriodicFunction& f, const PeriodicFunction& g);

/// Cumulative integral split into its secular slope and a periodic part:
/// int_0^t f = mean * t + F(t), F(0) = 0.
struct Antiderivative {
    cplx mean;
    PeriodicFunction periodic;
};
Antiderivative antiderivative(const PeriodicFunction& f);

/// int_0^p f g dt = p sum_k f_k g_{-k}, exact for the series.
cplx integral_of_product(const PeriodicFunction& f, const PeriodicFunction& g);

/// int_0^{n p} t f(t) dt, exact for the series.
cplx first_moment(const PeriodicFunction& f, int n = 1);

/// Pointwise combination through samples on the real axis; the result has
/// the order implied by `m` samples.
PeriodicFunction pointwise(std::span<const PeriodicFunction> args,
                           const std::function<cplx(std::span<const cplx>)>& fn,
                           std::size_t m);

/// Modified Bessel function I_0 by its power series.
double bessel_i0(double x);

/// Forward transform sum_j x_j e^{-2 pi i jk/M} scaled by 1/M, and its inverse.
std::vector<cplx> dft(std::span<const cplx> x);
std::vector<cplx> idft(std::span<const cplx> x);

void check_same_period(double p, double q);

}  // namespace nilcyl
