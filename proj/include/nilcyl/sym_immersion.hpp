#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "nilcyl/frame_integration.hpp"
#include "nilcyl/iwasawa.hpp"

namespace nilcyl {

using Vec3 = std::array<double, 3>;

struct SymL3 {
    /// f = -i (lambda dF) F^{-1} - (i/2) F s3 F^{-1}.
    Mat2 point;
    /// N = (i/2) F s3 F^{-1}.
    Mat2 gauss;
};

SymL3 sym_L3(const LoopMatrix& F, cplx lambda = 1.0);

/// |tr| + |Re X11| + |Re X22| + |X21 - conj(X12)|.
double su11_structure_residual(const Mat2& X);

/// f_hat = f^o - (i/2) (lambda d f)^d with f from sym_L3, in exponential
/// coordinates (2 Re f_hat12, 2 Im f_hat12, -2 Im f_hat11).
Vec3 sym_nil(const LoopMatrix& F, cplx lambda = 1.0);
Mat2 sym_nil_matrix(const LoopMatrix& F, cplx lambda = 1.0);

/// [[i a, b], [conj(b), -i a]] -> (Re b, Im b, a).
Vec3 minkowski_coords(const Mat2& X);
/// dx1^2 + dx2^2 - dx0^2.
double minkowski_inner(const Vec3& a, const Vec3& b);

enum class SurfaceTarget { nil, L3 };
std::string to_string(SurfaceTarget t);

struct SurfaceOptions {
    double theta = 0.0;
    SurfaceTarget target = SurfaceTarget::nil;
    /// Vertices with |h (kappa* - h*)| below this are masked.
    double degeneracy_tol = 1e-12;
};

struct SurfaceMesh {
    int rows = 0;
    int cols = 0;
    /// Row-major, rows along y.
    std::vector<Vec3> vertices;
    std::vector<std::uint8_t> valid;
    /// |h (kappa* - h*)| at the vertex.
    std::vector<double> degeneracy;
    /// Gauss map in Minkowski coordinates (L3 target only).
    std::vector<Vec3> gauss;
    /// 0-based indices of quads over fully valid 2x2 blocks.
    std::vector<std::array<std::size_t, 4>> faces;

    std::size_t index(int col, int row) const { return static_cast<std::size_t>(row) * cols + col; }
    std::size_t valid_count() const;
};

/// Rebuilds the quads from the validity mask.
void assign_faces(SurfaceMesh& mesh);

SurfaceMesh surface_grid(const FrameField& field, const IwasawaGrid& iw, const PotentialData& pot,
                         const SurfaceOptions& options = {});

/// Given a mesh over x in [0, n p] with both ends sampled: max over rows of
/// |f(n p + i y) - f(i y)|, over rows valid at both ends.
double closure_residual(const SurfaceMesh& mesh);

struct MeanCurvatureStats {
    std::vector<double> values;
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    /// (max - min) / |mean|.
    double relative_spread = 0.0;
    /// Vertices with a valid stencil where the discrete tangent plane was not spacelike.
    std::size_t skipped = 0;
};

/// Mean curvature of a spacelike mesh in L3 from fourth-order central
/// differences at vertices whose 5x5 neighbourhood is valid.
MeanCurvatureStats discrete_mean_curvature(const SurfaceMesh& mesh, double dx, double dy);

struct SurfaceDiagnostics {
    double max_det_gauss_error = 0.0;
    double max_structure_residual = 0.0;
    double max_gauss_structure_residual = 0.0;
};

/// det N - 1/4 and su(1,1) structure of f and N over the valid points.
SurfaceDiagnostics l3_diagnostics(const IwasawaGrid& iw, cplx lambda = 1.0);

}  // namespace nilcyl
