#include "nilcyl/periodic_function.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <unsupported/Eigen/FFT>

namespace nilcyl {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double relative_period_gap(double p, double q) { return std::abs(p - q) / std::max(std::abs(p), std::abs(q)); }

}  // namespace

PeriodMismatch::PeriodMismatch(double p, double q)
    : Error([&] {
          std::ostringstream os;
          os.precision(17);
          os << "period mismatch: " << p << " vs " << q;
          return os.str();
      }()) {}

NonFiniteSample::NonFiniteSample(std::size_t index)
    : Error("non-finite sample at index " + std::to_string(index)), index_(index) {}

void check_same_period(double p, double q) {
    if (relative_period_gap(p, q) > 1e-12) throw PeriodMismatch(p, q);
}

PeriodicFunction::PeriodicFunction(double period, std::vector<cplx> coeffs, double truncation_tail)
    : period_(period), coeffs_(std::move(coeffs)), truncation_tail_(truncation_tail) {
    if (!(period_ > 0.0) || !std::isfinite(period_)) throw Error("period must be positive and finite");
    if (coeffs_.empty() || coeffs_.size() % 2 == 0)
        throw Error("coefficient list must have odd length 2K+1");
    order_ = static_cast<int>(coeffs_.size() / 2);
    refresh_active();
}

PeriodicFunction PeriodicFunction::constant(double period, cplx value, int order) {
    std::vector<cplx> c(2 * order + 1);
    c[order] = value;
    return {period, std::move(c)};
}

PeriodicFunction PeriodicFunction::mode(double period, int k, cplx c, int order) {
    order = std::max(order, std::abs(k));
    std::vector<cplx> coeffs(2 * order + 1);
    coeffs[k + order] = c;
    return {period, std::move(coeffs)};
}

void PeriodicFunction::refresh_active() {
    active_ = 0;
    for (int k = order_; k > 0; --k) {
        if (coeffs_[order_ + k] != cplx{} || coeffs_[order_ - k] != cplx{}) {
            active_ = k;
            break;
        }
    }
}

cplx PeriodicFunction::coeff(int k) const noexcept {
    if (k < -order_ || k > order_) return {};
    return coeffs_[k + order_];
}

cplx PeriodicFunction::operator()(cplx z) const {
    const cplx w = std::exp(cplx(0.0, two_pi / period_) * z);
    const cplx winv = 1.0 / w;
    cplx sum = coeffs_[order_];
    cplx wp = 1.0;
    cplx wm = 1.0;
    for (int k = 1; k <= active_; ++k) {
        wp *= w;
        wm *= winv;
        sum += coeffs_[order_ + k] * wp + coeffs_[order_ - k] * wm;
    }
    return sum;
}

std::vector<cplx> PeriodicFunction::sample(std::size_t m) const {
    std::vector<cplx> out(m);
    for (std::size_t j = 0; j < m; ++j) out[j] = (*this)(period_ * static_cast<double>(j) / static_cast<double>(m));
    return out;
}

double PeriodicFunction::tail_norm() const {
    double s = 0.0;
    for (int k = std::max(order_ - 1, 1); k <= order_; ++k) {
        s += std::abs(coeff(k)) + std::abs(coeff(-k));
    }
    return s;
}

double PeriodicFunction::wiener_norm() const {
    double s = 0.0;
    for (const auto& c : coeffs_) s += std::abs(c);
    return s;
}

bool PeriodicFunction::resolved(double rel_tol) const {
    return tail_norm() <= rel_tol * std::max(wiener_norm(), 1e-300);
}

PeriodicFunction PeriodicFunction::derivative() const {
    std::vector<cplx> c(coeffs_.size());
    const double w = two_pi / period_;
    for (int k = -order_; k <= order_; ++k) c[k + order_] = cplx(0.0, w * k) * coeffs_[k + order_];
    return {period_, std::move(c), truncation_tail_ * w * order_};
}

PeriodicFunction PeriodicFunction::conj_reflect() const {
    std::vector<cplx> c(coeffs_.size());
    for (int k = -order_; k <= order_; ++k) c[k + order_] = std::conj(coeffs_[order_ - k]);
    return {period_, std::move(c), truncation_tail_};
}

PeriodicFunction PeriodicFunction::denoised(double rel) const {
    const double floor = rel * wiener_norm();
    std::vector<cplx> c = coeffs_;
    double dropped = 0.0;
    for (auto& x : c) {
        if (std::abs(x) < floor) {
            dropped += std::abs(x);
            x = {};
        }
    }
    return {period_, std::move(c), truncation_tail_ + dropped};
}

PeriodicFunction PeriodicFunction::with_period_multiple(int n) const {
    if (n < 1) throw Error("period multiple must be positive");
    std::vector<cplx> c(2 * n * order_ + 1);
    for (int k = -order_; k <= order_; ++k) c[n * k + n * order_] = coeffs_[k + order_];
    return {period_ * n, std::move(c), truncation_tail_};
}

PeriodicFunction PeriodicFunction::reduce_period(int n) const {
    if (n < 1) throw Error("period divisor must be positive");
    const int out_order = order_ / n;
    std::vector<cplx> c(2 * out_order + 1);
    double dropped = 0.0;
    for (int k = -order_; k <= order_; ++k) {
        if (k % n == 0) {
            c[k / n + out_order] = coeffs_[k + order_];
        } else {
            dropped += std::abs(coeffs_[k + order_]);
        }
    }
    return {period_ / n, std::move(c), truncation_tail_ + dropped};
}

PeriodicFunction PeriodicFunction::resized(int order) const {
    std::vector<cplx> c(2 * order + 1);
    double dropped = 0.0;
    for (int k = -order_; k <= order_; ++k) {
        if (std::abs(k) <= order) {
            c[k + order] = coeffs_[k + order_];
        } else {
            dropped += std::abs(coeffs_[k + order_]);
        }
    }
    return {period_, std::move(c), truncation_tail_ + dropped};
}

PeriodicFunction PeriodicFunction::real_part() const { return cplx(0.5) * (*this + conj_reflect()); }

PeriodicFunction PeriodicFunction::imag_part() const {
    return cplx(0.0, -0.5) * (*this - conj_reflect());
}

namespace {

PeriodicFunction combine(const PeriodicFunction& a, const PeriodicFunction& b, double sign) {
    check_same_period(a.period(), b.period());
    const int order = std::max(a.order(), b.order());
    std::vector<cplx> c(2 * order + 1);
    for (int k = -order; k <= order; ++k) c[k + order] = a.coeff(k) + sign * b.coeff(k);
    return {a.period(), std::move(c), a.truncation_tail() + b.truncation_tail()};
}

}  // namespace

PeriodicFunction operator+(const PeriodicFunction& a, const PeriodicFunction& b) { return combine(a, b, 1.0); }

PeriodicFunction operator-(const PeriodicFunction& a, const PeriodicFunction& b) { return combine(a, b, -1.0); }

PeriodicFunction operator*(cplx s, const PeriodicFunction& a) {
    std::vector<cplx> c(a.coeffs().begin(), a.coeffs().end());
    for (auto& x : c) x *= s;
    return {a.period(), std::move(c), std::abs(s) * a.truncation_tail()};
}

std::vector<cplx> dft(std::span<const cplx> x) {
    Eigen::FFT<double> fft;
    std::vector<cplx> in(x.begin(), x.end());
    std::vector<cplx> out;
    fft.fwd(out, in);
    const double scale = 1.0 / static_cast<double>(x.size());
    for (auto& v : out) v *= scale;
    return out;
}

std::vector<cplx> idft(std::span<const cplx> x) {
    Eigen::FFT<double> fft;
    std::vector<cplx> in(x.begin(), x.end());
    std::vector<cplx> out;
    fft.inv(out, in);
    // Eigen's inverse already divides by M; undo it so idft(dft(x)) == x.
    const double scale = static_cast<double>(x.size());
    for (auto& v : out) v *= scale;
    return out;
}

PeriodicFunction from_samples(std::span<const cplx> samples, double period) {
    const std::size_t m = samples.size();
    if (m < 4) throw Error("from_samples needs at least 4 samples");
    for (std::size_t j = 0; j < m; ++j) {
        if (!std::isfinite(samples[j].real()) || !std::isfinite(samples[j].imag())) throw NonFiniteSample(j);
    }
    const auto hat = dft(samples);
    const int mm = static_cast<int>(m);
    const int order = (mm % 2 == 0) ? mm / 2 - 1 : (mm - 1) / 2;
    std::vector<cplx> c(2 * order + 1);
    for (int k = -order; k <= order; ++k) c[k + order] = hat[(k + mm) % mm];
    const double nyquist = (mm % 2 == 0) ? std::abs(hat[mm / 2]) : 0.0;
    return {period, std::move(c), nyquist};
}

PeriodicFunction interpolate(const std::function<cplx(double)>& fn, double period, std::size_t m) {
    std::vector<cplx> s(m);
    for (std::size_t j = 0; j < m; ++j) s[j] = fn(period * static_cast<double>(j) / static_cast<double>(m));
    return from_samples(s, period);
}

PeriodicFunction product(const PeriodicFunction& f, const PeriodicFunction& g) {
    check_same_period(f.period(), g.period());
    const int order = std::max(f.order(), g.order());
    const int fa = f.active_order();
    const int ga = g.active_order();
    std::vector<cplx> c(2 * order + 1);
    double dropped = 0.0;
    auto fc = f.coeffs();
    auto gc = g.coeffs();
    for (int i = -fa; i <= fa; ++i) {
        const cplx a = fc[i + f.order()];
        if (a == cplx{}) continue;
        for (int j = -ga; j <= ga; ++j) {
            const cplx v = a * gc[j + g.order()];
            const int k = i + j;
            if (k >= -order && k <= order) {
                c[k + order] += v;
            } else {
                dropped += std::abs(v);
            }
        }
    }
    const double tail = dropped + f.truncation_tail() * g.wiener_norm() + g.truncation_tail() * f.wiener_norm();
    return {f.period(), std::move(c), tail};
}

Antiderivative antiderivative(const PeriodicFunction& f) {
    const int order = f.order();
    const double w = two_pi / f.period();
    std::vector<cplx> c(2 * order + 1);
    cplx at_zero = 0.0;
    for (int k = -order; k <= order; ++k) {
        if (k == 0) continue;
        c[k + order] = f.coeff(k) / cplx(0.0, w * k);
        at_zero += c[k + order];
    }
    c[order] = -at_zero;
    return {f.coeff(0), PeriodicFunction(f.period(), std::move(c), f.truncation_tail() * f.period())};
}

cplx integral_of_product(const PeriodicFunction& f, const PeriodicFunction& g) {
    check_same_period(f.period(), g.period());
    const int k_max = std::min(f.active_order(), g.active_order());
    cplx s = f.coeff(0) * g.coeff(0);
    for (int k = 1; k <= k_max; ++k) s += f.coeff(k) * g.coeff(-k) + f.coeff(-k) * g.coeff(k);
    return f.period() * s;
}

cplx first_moment(const PeriodicFunction& f, int n) {
    const double length = n * f.period();
    const double w = two_pi / f.period();
    cplx sum = f.coeff(0) * (0.5 * length * length);
    for (int k = -f.active_order(); k <= f.active_order(); ++k) {
        if (k == 0) continue;
        sum += f.coeff(k) * length / cplx(0.0, w * k);
    }
    return sum;
}

PeriodicFunction pointwise(std::span<const PeriodicFunction> args,
                           const std::function<cplx(std::span<const cplx>)>& fn, std::size_t m) {
    if (args.empty()) throw Error("pointwise needs at least one argument");
    const double period = args.front().period();
    std::vector<std::vector<cplx>> values;
    values.reserve(args.size());
    for (const auto& a : args) {
        check_same_period(period, a.period());
        values.push_back(a.sample(m));
    }
    std::vector<cplx> out(m);
    std::vector<cplx> point(args.size());
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t i = 0; i < args.size(); ++i) point[i] = values[i][j];
        out[j] = fn(point);
    }
    return from_samples(out, period);
}

double bessel_i0(double x) {
    const double q = 0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 1000; ++k) {
        term *= q / (static_cast<double>(k) * static_cast<double>(k));
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum;
}

}  // namespace nilcyl
