#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "nilcyl/frame_integration.hpp"
#include "nilcyl/loop_matrix.hpp"

namespace nilcyl {

enum class IwasawaSolver {
    /// Block-Toeplitz system by partial-pivot LU.
    lu,
    /// Same system with reversed unknown ordering, by column-pivot QR.
    qr_reversed,
};

struct IwasawaOptions {
    /// Degree of the plus-part solve; 0 uses the order of C.
    int plus_order = 0;
    double max_condition = 1e10;
    double min_v0 = 1e-8;
    /// Residual tolerance for `within_tol`.
    double tol = 1e-8;
    IwasawaSolver solver = IwasawaSolver::lu;
};

/// C = F Vplus with tau(F) = F and Vplus plus-holomorphic, V0 diagonal positive.
struct IwasawaResult {
    LoopMatrix F;
    LoopMatrix Vplus;
    double residual_reconstruction = 0.0;
    double residual_reality = 0.0;
    /// Inverse-free reality measure, see hermitian_defect.
    double reality_hermitian = 0.0;
    std::array<double, 2> v0{0.0, 0.0};
    double condition_estimate = 0.0;
    /// Wiener norm of the degree > N part of F that was cut.
    double F_tail = 0.0;
    bool in_big_cell = false;
    bool within_tol = false;
};

/// Solves sum_j H_{k-j} Y_j = delta_k0 for H = C^* s3 C and k, j in [0, Ny];
/// then V0^2 = diag(s3 Y_0^{-1}), F = C Y s3 V0 and Vplus = s3 F^* s3 C.
/// Points outside the big cell come back with in_big_cell = false and
/// whatever partial data the solve produced; nothing is thrown.
IwasawaResult iwasawa_decompose(const LoopMatrix& C, const IwasawaOptions& options = {});

struct IwasawaGrid {
    int nx = 0;
    int ny = 0;
    /// Row-major like FrameField.
    std::vector<IwasawaResult> at;
    /// Frame invalid or outside the big cell.
    std::vector<std::uint8_t> valid;
    /// max ||Vplus - id||_W over valid points of the row closest to y = 0.
    double axis_vplus_deviation = 0.0;
    double max_reconstruction = 0.0;
    double max_reality = 0.0;

    const IwasawaResult& operator()(int ix, int iy) const { return at[static_cast<std::size_t>(iy) * nx + ix]; }
    bool is_valid(int ix, int iy) const { return valid[static_cast<std::size_t>(iy) * nx + ix] != 0; }
    std::size_t valid_count() const;
};

IwasawaGrid frame_from(const FrameField& field, const IwasawaOptions& options = {}, unsigned threads = 0);

}  // namespace nilcyl
