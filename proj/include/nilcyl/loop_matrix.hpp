#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

#include "nilcyl/periodic_function.hpp"

namespace nilcyl {

using Mat2 = Eigen::Matrix2cd;

inline Mat2 sigma3() {
    Mat2 s;
    s << 1.0, 0.0, 0.0, -1.0;
    return s;
}

/// Sum of |entry| over a 2x2 matrix.
double entry_norm(const Mat2& m);

class SingularLoop : public Error {
  public:
    SingularLoop(cplx lambda, double det);
    cplx lambda() const noexcept { return lambda_; }

  private:
    cplx lambda_;
};

/// Truncated Laurent series A(lambda) = sum_{|k|<=N} A_k lambda^k with 2x2
/// complex coefficients.
///
/// Twisting (diagonal entries even in lambda, off-diagonal entries odd) is a
/// property of the data, checked by parity_defect(); all operations below
/// preserve it. Lossy operations add the Wiener norm of what they dropped to
/// truncation_tail().
class LoopMatrix {
  public:
    LoopMatrix() : LoopMatrix(0) {}
    explicit LoopMatrix(int order);
    LoopMatrix(int order, std::vector<Mat2> coeffs, double truncation_tail = 0.0);

    static LoopMatrix identity(int order);
    static LoopMatrix constant(const Mat2& m, int order);
    /// Single term m * lambda^k.
    static LoopMatrix monomial(const Mat2& m, int k, int order);

    int order() const noexcept { return order_; }
    const Mat2& operator[](int k) const { return coeffs_[k + order_]; }
    Mat2& operator[](int k) { return coeffs_[k + order_]; }
    Mat2 coeff(int k) const;
    std::span<const Mat2> coeffs() const noexcept { return coeffs_; }
    double truncation_tail() const noexcept { return truncation_tail_; }
    void add_tail(double t) noexcept { truncation_tail_ += t; }

    /// Value at |lambda| = 1; rejects other moduli beyond 1e-12.
    Mat2 eval_at(cplx lambda) const;
    /// Unchecked evaluation, used for the holomorphic continuation.
    Mat2 eval_any(cplx lambda) const;

    double wiener_norm() const;
    /// Wiener norm of the entries that violate twisting.
    double parity_defect() const;
    bool is_twisted(double tol = 0.0) const { return parity_defect() <= tol; }

    LoopMatrix lambda_d_lambda() const;
    /// Conjugate transpose on the circle: coefficients (A_{-k})^H.
    LoopMatrix star() const;
    LoopMatrix diagonal_part() const;
    LoopMatrix off_diagonal_part() const;
    LoopMatrix resized(int order) const;
    /// Keep degrees >= 0; dropped norm goes to the tail.
    LoopMatrix plus_part() const;

    friend LoopMatrix operator+(const LoopMatrix& a, const LoopMatrix& b);
    friend LoopMatrix operator-(const LoopMatrix& a, const LoopMatrix& b);
    friend LoopMatrix operator*(cplx s, const LoopMatrix& a);
    /// Constant matrix from the left / right.
    friend LoopMatrix operator*(const Mat2& m, const LoopMatrix& a);
    friend LoopMatrix operator*(const LoopMatrix& a, const Mat2& m);

  private:
    int order_;
    std::vector<Mat2> coeffs_;
    double truncation_tail_ = 0.0;
};

/// Laurent product truncated to max(N_A, N_B).
LoopMatrix mul(const LoopMatrix& a, const LoopMatrix& b);
/// Laurent product truncated to `order`.
LoopMatrix mul(const LoopMatrix& a, const LoopMatrix& b, int order);

/// Pointwise inverse on 4N+4 circle points followed by interpolation.
LoopMatrix inverse(const LoopMatrix& a);

/// tau(g)(lambda) = s3 conj(g(1/conj(lambda)))^{-T} s3, the involution whose
/// fixed points are the twisted SU(1,1) loops.
LoopMatrix tau(const LoopMatrix& a);
/// The same involution on the Lie algebra without the inverse:
/// s3 conj(X(1/conj(lambda)))^T s3. su(1,1) loops satisfy tau_lie(X) = -X.
LoopMatrix tau_lie(const LoopMatrix& a);

bool is_su11_on_circle(const LoopMatrix& a, double tol);

/// ||tau(A) - A||_W.
double reality_residual(const LoopMatrix& a);

/// ||A^* s3 A - s3||_W / max(1, ||A||_W^2). The same condition as tau(A) = A
/// but without an inverse, so it stays at round-off for large loops.
double hermitian_defect(const LoopMatrix& a);

/// Samples on M equispaced circle points lambda_j = exp(2 pi i j / M).
std::vector<Mat2> sample_circle(const LoopMatrix& a, int m);
/// Interpolates circle samples back to a loop of the given order; modes
/// above the order are reported in the tail.
LoopMatrix from_circle_samples(std::span<const Mat2> samples, int order);

}  // namespace nilcyl
