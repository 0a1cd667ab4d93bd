#include "nilcyl/iwasawa.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include <Eigen/Dense>

namespace nilcyl {

namespace {

using MatX = Eigen::MatrixXcd;

MatX toeplitz(const LoopMatrix& H, int ny, bool reversed) {
    const int m = 2 * (ny + 1);
    MatX A(m, m);
    for (int k = 0; k <= ny; ++k) {
        for (int j = 0; j <= ny; ++j) {
            const int col = reversed ? ny - j : j;
            A.block<2, 2>(2 * k, 2 * col) = H.coeff(k - j);
        }
    }
    return A;
}

}  // namespace

IwasawaResult iwasawa_decompose(const LoopMatrix& C, const IwasawaOptions& options) {
    const int N = C.order();
    const int ny = options.plus_order > 0 ? options.plus_order : N;
    const Mat2 s3 = sigma3();
    IwasawaResult r;
    r.F = LoopMatrix(N);
    r.Vplus = LoopMatrix(N);

    const LoopMatrix H = mul(mul(C.star(), LoopMatrix::constant(s3, N), 2 * N), C, 2 * N);
    const bool reversed = options.solver == IwasawaSolver::qr_reversed;
    const MatX A = toeplitz(H, ny, reversed);
    MatX rhs = MatX::Zero(A.rows(), 2);
    rhs.topRows(2) = Mat2::Identity();

    MatX sol;
    if (reversed) {
        Eigen::ColPivHouseholderQR<MatX> qr(A);
        sol = qr.solve(rhs);
        // QR has no cheap rcond; use the ratio of the extreme R diagonal entries.
        const auto d = qr.matrixR().diagonal().cwiseAbs();
        r.condition_estimate = d.minCoeff() > 0.0 ? d.maxCoeff() / d.minCoeff() : INFINITY;
    } else {
        Eigen::PartialPivLU<MatX> lu(A);
        sol = lu.solve(rhs);
        const double rc = lu.rcond();
        r.condition_estimate = rc > 0.0 ? 1.0 / rc : INFINITY;
    }
    if (!sol.allFinite()) return r;

    LoopMatrix Y(ny);
    for (int j = 0; j <= ny; ++j) {
        const int row = reversed ? ny - j : j;
        Y[j] = sol.block<2, 2>(2 * row, 0);
    }
    const Mat2 d2 = s3 * Y[0].inverse();
    const double d0 = d2(0, 0).real();
    const double d1 = d2(1, 1).real();
    if (!(d0 > 0.0) || !(d1 > 0.0)) return r;
    r.v0 = {std::sqrt(d0), std::sqrt(d1)};
    Mat2 D = Mat2::Zero();
    D(0, 0) = r.v0[0];
    D(1, 1) = r.v0[1];

    LoopMatrix F = mul(C, Y, N + ny);
    F = F * Mat2(s3 * D);
    for (int k = N + 1; k <= N + ny; ++k) r.F_tail += entry_norm(F[k]);
    r.F = F.resized(N);
    // Vplus = D^{-1} s3 Y^{-1}; the plus series inverse is exact degree by degree.
    const Mat2 y0inv = Y[0].inverse();
    std::vector<Mat2> Z(N + 1, Mat2::Zero());
    Z[0] = y0inv;
    for (int k = 1; k <= N; ++k) {
        Mat2 acc = Mat2::Zero();
        for (int j = 1; j <= std::min(k, ny); ++j) acc.noalias() += Y[j] * Z[k - j];
        Z[k] = -y0inv * acc;
    }
    const Mat2 left = D.inverse() * s3;
    for (int k = 0; k <= N; ++k) r.Vplus[k] = left * Z[k];

    r.residual_reconstruction = (mul(r.F, r.Vplus, N) - C).wiener_norm();
    try {
        r.residual_reality = reality_residual(r.F);
    } catch (const Error&) {
        r.residual_reality = INFINITY;
    }
    r.reality_hermitian = hermitian_defect(r.F);

    const bool finite = std::isfinite(r.residual_reconstruction) && std::isfinite(r.residual_reality);
    r.in_big_cell = finite && r.condition_estimate <= options.max_condition &&
                    std::min(r.v0[0], r.v0[1]) >= options.min_v0;
    r.within_tol = r.in_big_cell && r.residual_reconstruction <= options.tol && r.residual_reality <= options.tol;
    return r;
}

std::size_t IwasawaGrid::valid_count() const {
    return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), 1));
}

IwasawaGrid frame_from(const FrameField& field, const IwasawaOptions& options, unsigned threads) {
    IwasawaGrid g;
    g.nx = field.nx();
    g.ny = field.ny();
    g.at.resize(field.C.size());
    g.valid.assign(field.C.size(), 0);

    auto point = [&](std::size_t i) {
        if (!field.valid[i]) return;
        g.at[i] = iwasawa_decompose(field.C[i], options);
        g.valid[i] = g.at[i].in_big_cell ? 1 : 0;
    };
    const unsigned workers = std::min<unsigned>(worker_count(threads), static_cast<unsigned>(g.at.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < g.at.size(); ++i) point(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < g.at.size(); i = next++) point(i);
            });
        }
        for (auto& t : pool) t.join();
    }

    const int axis = field.axis_row();
    for (int iy = 0; iy < g.ny; ++iy) {
        for (int ix = 0; ix < g.nx; ++ix) {
            if (!g.is_valid(ix, iy)) continue;
            const auto& r = g(ix, iy);
            g.max_reconstruction = std::max(g.max_reconstruction, r.residual_reconstruction);
            g.max_reality = std::max(g.max_reality, r.residual_reality);
            if (iy == axis)
                g.axis_vplus_deviation =
                    std::max(g.axis_vplus_deviation, (r.Vplus - LoopMatrix::identity(r.Vplus.order())).wiener_norm());
        }
    }
    return g;
}

}  // namespace nilcyl
