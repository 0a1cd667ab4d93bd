#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nilcyl/curves.hpp"
#include "nilcyl/loop_matrix.hpp"
#include "nilcyl/potential.hpp"

namespace nilcyl {

struct IntegrationOptions {
    /// Laurent truncation order N of the frame.
    int order = 48;
    /// RK4 steps per period along the real axis.
    int steps_per_period = 2048;
    /// RK4 steps per unit length in the vertical direction.
    int steps_per_unit_y = 2048;
    /// Worker threads for the vertical pass; 0 reads NILCYL_THREADS, then
    /// falls back to the hardware count.
    unsigned threads = 0;
};

/// Worker count from NILCYL_THREADS (if set and positive) capped by `requested`.
unsigned worker_count(unsigned requested = 0);

struct GridSpec {
    int x_samples = 256;
    double y_min = -0.25;
    double y_max = 0.25;
    int y_samples = 33;
    /// Cover index: x runs over [0, n p] with both ends included.
    int n = 1;
};

/// Diagnostics of the coefficient truncation during integration.
struct TailStats {
    /// max over steps of |C_N| + |C_{-N}|.
    double boundary_mass = 0.0;
    /// int |C_N Zp| + |C_{-N} Zm|: the mass pushed past degree N.
    double dropped_flux = 0.0;

    void merge(const TailStats& o);
};

/// Loop-valued frame on a rectangular grid, stored row-major (iy * nx + ix).
struct FrameField {
    GridSpec grid;
    double period = 0.0;
    int order = 0;
    std::vector<double> xs;
    std::vector<double> ys;
    std::vector<LoopMatrix> C;
    std::vector<std::uint8_t> valid;
    double step_x = 0.0;
    double step_y = 0.0;
    TailStats tails;

    int nx() const { return static_cast<int>(xs.size()); }
    int ny() const { return static_cast<int>(ys.size()); }
    std::size_t index(int ix, int iy) const { return static_cast<std::size_t>(iy) * xs.size() + ix; }
    const LoopMatrix& at(int ix, int iy) const { return C[index(ix, iy)]; }
    bool is_valid(int ix, int iy) const { return valid[index(ix, iy)] != 0; }
    cplx z(int ix, int iy) const { return {xs[ix], ys[iy]}; }
    /// Row whose y is closest to 0.
    int axis_row() const;
    std::size_t valid_count() const;
};

/// RK4 solution of dC = C zeta, C(0) = id: first along the real axis, then
/// per column outward from y = 0. Non-finite coefficients mark the point
/// and the rest of its vertical ray invalid.
FrameField integrate_frame(const PotentialData& pot, const GridSpec& grid, const IntegrationOptions& options = {});

/// RK4 along [0, length] of the real axis with `steps` steps.
struct AxisRun {
    double step = 0.0;
    LoopMatrix end;
    /// C at every node (steps + 1 entries) when requested.
    std::vector<LoopMatrix> nodes;
    std::vector<ZetaTerms> zeta_nodes;
    TailStats tails;
};
AxisRun integrate_real_axis(const Zeta& zeta, double length, int steps, int order, bool keep_nodes = false);

/// Single RK4 step count helper shared with the grid: C advanced along the
/// straight segment z0 -> z1.
void integrate_segment(const Zeta& zeta, LoopMatrix& C, cplx z0, cplx z1, int steps, TailStats& tails);

/// M(lambda) = C(n p, lambda).
LoopMatrix monodromy(const PotentialData& pot, int n = 1, const IntegrationOptions& options = {});
/// M from a field whose grid contains the column x = p.
LoopMatrix monodromy(const FrameField& field);

/// X = -i (lambda dM) M^{-1}, kept to degree 2N.
LoopMatrix X_of(const LoopMatrix& M);
/// Y = -(1/2) lambda d((lambda dM) M^{-1}), kept to degree 2N.
LoopMatrix Y_of(const LoopMatrix& M);

/// ||C_S(np) - C_{2S}(np)||_W for S RK steps per period (step-halving).
double frame_error_estimate(const PotentialData& pot, int n, int steps_per_period, int order);

/// sup over lambdas and z-samples of |(d_lambda C) C^{-1} - int_0^z C (d_lambda zeta) C^{-1}|
/// along [0, p] of the real axis.
double kilian_identity_residual(const PotentialData& pot, std::span<const cplx> lambdas,
                                const IntegrationOptions& options = {}, int z_samples = 8);

struct KilianResidual {
    double absolute = 0.0;
    /// |difference| / max(1, |lhs|), sup over the same samples.
    double relative = 0.0;
    /// sup |lhs|.
    double scale = 0.0;
};
KilianResidual kilian_identity_check(const PotentialData& pot, std::span<const cplx> lambdas,
                                     const IntegrationOptions& options = {}, int z_samples = 8);

/// X(1), Y(1) from the integral formulas, built from C0 and zeta at lambda = 1
/// (no loop-level integration).
struct DualRoute {
    Mat2 X;
    Mat2 Y;
};
DualRoute dual_route(const FrameData& frame, const PotentialData& pot, int n = 1, std::size_t samples = 512);

enum class ClosingMode { nil_cylinder, cmc_L3 };
std::string to_string(ClosingMode mode);

struct ClosingTolerances {
    double closing = 1e-8;
    double third_direct = 1e-7;
    double monodromy = 1e-7;
    double derivative = 1e-6;
};

struct ClosingReport {
    ClosingMode mode = ClosingMode::nil_cylinder;
    int n = 1;
    int order = 0;
    int steps_per_period = 0;
    ClosingTolerances tol;

    double monodromy_residual_at_1 = 0.0;
    int monodromy_sign = 1;
    double monodromy_reality = 0.0;
    double monodromy_hermitian_defect = 0.0;
    double monodromy_tail = 0.0;
    double frame_error_estimate = 0.0;

    cplx second_residual{};
    bool ell_closed = false;
    double third_lhs = 0.0;
    double third_rhs = 0.0;
    double area_ell = 0.0;
    double area_m = 0.0;

    cplx cmc_alpha_residual{};
    double cmc_beta_residual = 0.0;
    /// int Re(a0 conj(b0)(2h - kappa)); X^d(1) = -2i times this.
    double cmc_beta_re_residual = 0.0;

    /// Monodromy route at lambda = 1.
    double X_offdiag_norm = 0.0;
    double X_diag_norm = 0.0;
    double Y_diag_norm = 0.0;
    /// |X12(1) - i int alpha| + |X21(1) - conj(...)|.
    double X_alpha_cross = 0.0;
    /// |Y11(1) + i (lhs - rhs)|.
    double Y_third_cross = 0.0;
    double dual_X_residual = 0.0;
    double dual_Y_residual = 0.0;

    bool pass_first = false;
    bool pass_second = false;
    bool pass_third = false;
    bool pass_cmc = false;
    bool pass_monodromy_derivatives = false;
    bool pass_dual = false;

    /// first && second && (third or cmc, by mode).
    bool passed() const;
};

ClosingReport closing_report(const FrameData& frame, const PotentialData& pot, int n = 1,
                             ClosingMode mode = ClosingMode::nil_cylinder, const IntegrationOptions& options = {},
                             const ClosingTolerances& tol = {});

}  // namespace nilcyl
