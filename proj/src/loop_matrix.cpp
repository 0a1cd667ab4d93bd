#include "nilcyl/loop_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/LU>

namespace nilcyl {

double entry_norm(const Mat2& m) { return m.cwiseAbs().sum(); }

SingularLoop::SingularLoop(cplx lambda, double det)
    : Error([&] {
          std::ostringstream os;
          os.precision(17);
          os << "singular loop: |det| = " << det << " at lambda = " << lambda;
          return os.str();
      }()),
      lambda_(lambda) {}

LoopMatrix::LoopMatrix(int order) : order_(order), coeffs_(2 * order + 1, Mat2::Zero()) {
    if (order < 0) throw Error("loop order must be nonnegative");
}

LoopMatrix::LoopMatrix(int order, std::vector<Mat2> coeffs, double truncation_tail)
    : order_(order), coeffs_(std::move(coeffs)), truncation_tail_(truncation_tail) {
    if (order < 0 || coeffs_.size() != static_cast<std::size_t>(2 * order + 1))
        throw Error("loop coefficient count must be 2N+1");
}

LoopMatrix LoopMatrix::identity(int order) { return constant(Mat2::Identity(), order); }

LoopMatrix LoopMatrix::constant(const Mat2& m, int order) { return monomial(m, 0, order); }

LoopMatrix LoopMatrix::monomial(const Mat2& m, int k, int order) {
    LoopMatrix out(std::max(order, std::abs(k)));
    out[k] = m;
    return out;
}

Mat2 LoopMatrix::coeff(int k) const {
    if (k < -order_ || k > order_) return Mat2::Zero();
    return coeffs_[k + order_];
}

Mat2 LoopMatrix::eval_at(cplx lambda) const {
    if (std::abs(std::abs(lambda) - 1.0) > 1e-12) throw Error("eval_at requires |lambda| = 1");
    return eval_any(lambda);
}

Mat2 LoopMatrix::eval_any(cplx lambda) const {
    Mat2 sum = coeffs_[order_];
    cplx lp = 1.0;
    cplx lm = 1.0;
    const cplx inv = 1.0 / lambda;
    for (int k = 1; k <= order_; ++k) {
        lp *= lambda;
        lm *= inv;
        sum += coeffs_[order_ + k] * lp + coeffs_[order_ - k] * lm;
    }
    return sum;
}

double LoopMatrix::wiener_norm() const {
    double s = 0.0;
    for (const auto& c : coeffs_) s += entry_norm(c);
    return s;
}

double LoopMatrix::parity_defect() const {
    double s = 0.0;
    for (int k = -order_; k <= order_; ++k) {
        const Mat2& c = (*this)[k];
        if (k % 2 == 0) {
            s += std::abs(c(0, 1)) + std::abs(c(1, 0));
        } else {
            s += std::abs(c(0, 0)) + std::abs(c(1, 1));
        }
    }
    return s;
}

LoopMatrix LoopMatrix::lambda_d_lambda() const {
    LoopMatrix out(order_);
    for (int k = -order_; k <= order_; ++k) out[k] = static_cast<double>(k) * (*this)[k];
    out.truncation_tail_ = truncation_tail_ * order_;
    return out;
}

LoopMatrix LoopMatrix::star() const {
    LoopMatrix out(order_);
    for (int k = -order_; k <= order_; ++k) out[k] = (*this)[-k].adjoint();
    out.truncation_tail_ = truncation_tail_;
    return out;
}

LoopMatrix LoopMatrix::diagonal_part() const {
    LoopMatrix out(order_);
    for (int k = -order_; k <= order_; ++k) {
        out[k](0, 0) = (*this)[k](0, 0);
        out[k](1, 1) = (*this)[k](1, 1);
    }
    return out;
}

LoopMatrix LoopMatrix::off_diagonal_part() const {
    LoopMatrix out(order_);
    for (int k = -order_; k <= order_; ++k) {
        out[k](0, 1) = (*this)[k](0, 1);
        out[k](1, 0) = (*this)[k](1, 0);
    }
    return out;
}

LoopMatrix LoopMatrix::resized(int order) const {
    LoopMatrix out(order);
    double dropped = 0.0;
    for (int k = -order_; k <= order_; ++k) {
        if (std::abs(k) <= order) {
            out[k] = (*this)[k];
        } else {
            dropped += entry_norm((*this)[k]);
        }
    }
    out.truncation_tail_ = truncation_tail_ + dropped;
    return out;
}

LoopMatrix LoopMatrix::plus_part() const {
    LoopMatrix out(order_);
    double dropped = 0.0;
    for (int k = -order_; k < 0; ++k) dropped += entry_norm((*this)[k]);
    for (int k = 0; k <= order_; ++k) out[k] = (*this)[k];
    out.truncation_tail_ = truncation_tail_ + dropped;
    return out;
}

LoopMatrix operator+(const LoopMatrix& a, const LoopMatrix& b) {
    const int n = std::max(a.order(), b.order());
    LoopMatrix out(n);
    for (int k = -n; k <= n; ++k) out[k] = a.coeff(k) + b.coeff(k);
    out.truncation_tail_ = a.truncation_tail_ + b.truncation_tail_;
    return out;
}

LoopMatrix operator-(const LoopMatrix& a, const LoopMatrix& b) { return a + cplx(-1.0) * b; }

LoopMatrix operator*(cplx s, const LoopMatrix& a) {
    LoopMatrix out = a;
    for (auto& c : out.coeffs_) c *= s;
    out.truncation_tail_ *= std::abs(s);
    return out;
}

LoopMatrix operator*(const Mat2& m, const LoopMatrix& a) {
    LoopMatrix out = a;
    for (auto& c : out.coeffs_) c = m * c;
    out.truncation_tail_ *= entry_norm(m);
    return out;
}

LoopMatrix operator*(const LoopMatrix& a, const Mat2& m) {
    LoopMatrix out = a;
    for (auto& c : out.coeffs_) c = c * m;
    out.truncation_tail_ *= entry_norm(m);
    return out;
}

LoopMatrix mul(const LoopMatrix& a, const LoopMatrix& b) { return mul(a, b, std::max(a.order(), b.order())); }

LoopMatrix mul(const LoopMatrix& a, const LoopMatrix& b, int order) {
    LoopMatrix out(order);
    double dropped = 0.0;
    for (int i = -a.order(); i <= a.order(); ++i) {
        const Mat2& ai = a[i];
        if (ai.isZero(0.0)) continue;
        for (int j = -b.order(); j <= b.order(); ++j) {
            const int k = i + j;
            if (k < -order || k > order) {
                dropped += entry_norm(ai * b[j]);
                continue;
            }
            out[k].noalias() += ai * b[j];
        }
    }
    out.add_tail(dropped + a.truncation_tail() * b.wiener_norm() + b.truncation_tail() * a.wiener_norm());
    return out;
}

std::vector<Mat2> sample_circle(const LoopMatrix& a, int m) {
    std::vector<Mat2> out(m);
    for (int j = 0; j < m; ++j) {
        const double th = 2.0 * std::numbers::pi * j / m;
        out[j] = a.eval_any(std::polar(1.0, th));
    }
    return out;
}

LoopMatrix from_circle_samples(std::span<const Mat2> samples, int order) {
    const int m = static_cast<int>(samples.size());
    std::vector<std::vector<cplx>> hats(4);
    for (int e = 0; e < 4; ++e) {
        std::vector<cplx> v(m);
        for (int j = 0; j < m; ++j) v[j] = samples[j](e / 2, e % 2);
        hats[e] = dft(v);
    }
    LoopMatrix out(order);
    double dropped = 0.0;
    for (int q = 0; q < m; ++q) {
        const int k = (q <= m / 2) ? q : q - m;
        Mat2 c;
        c << hats[0][q], hats[1][q], hats[2][q], hats[3][q];
        if (std::abs(k) <= order && !(m % 2 == 0 && q == m / 2)) {
            out[k] = c;
        } else {
            dropped += entry_norm(c);
        }
    }
    out.add_tail(dropped);
    return out;
}

LoopMatrix inverse(const LoopMatrix& a) {
    const int m = 4 * a.order() + 4;
    auto s = sample_circle(a, m);
    for (int j = 0; j < m; ++j) {
        const cplx det = s[j].determinant();
        if (std::abs(det) < 1e-12) throw SingularLoop(std::polar(1.0, 2.0 * std::numbers::pi * j / m), std::abs(det));
        s[j] = s[j].inverse().eval();
    }
    auto out = from_circle_samples(s, a.order());
    out.add_tail(a.truncation_tail() * out.wiener_norm() * out.wiener_norm());
    return out;
}

LoopMatrix tau(const LoopMatrix& a) {
    const Mat2 s3 = sigma3();
    return s3 * inverse(a.star()) * s3;
}

LoopMatrix tau_lie(const LoopMatrix& a) {
    const Mat2 s3 = sigma3();
    return s3 * a.star() * s3;
}

double reality_residual(const LoopMatrix& a) { return (tau(a) - a).wiener_norm(); }

bool is_su11_on_circle(const LoopMatrix& a, double tol) { return reality_residual(a) <= tol; }

double hermitian_defect(const LoopMatrix& a) {
    const int n = 2 * a.order();
    const LoopMatrix s3 = LoopMatrix::constant(sigma3(), n);
    const LoopMatrix h = mul(mul(a.star(), s3, n), a, n);
    const double w = a.wiener_norm();
    return (h - s3).wiener_norm() / std::max(1.0, w * w);
}

}  // namespace nilcyl
