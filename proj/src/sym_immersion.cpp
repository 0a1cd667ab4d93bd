#include "nilcyl/sym_immersion.hpp"

#include <algorithm>
#include <cmath>

namespace nilcyl {

namespace {

const cplx I{0.0, 1.0};

struct SymParts {
    Mat2 A;
    Mat2 P;
    Mat2 dA;
};

SymParts parts(const LoopMatrix& F, cplx lambda) {
    const LoopMatrix dF = F.lambda_d_lambda();
    const Mat2 f = F.eval_at(lambda);
    const Mat2 fi = f.inverse();
    SymParts s;
    s.A = dF.eval_at(lambda) * fi;
    s.P = f * sigma3() * fi;
    s.dA = dF.lambda_d_lambda().eval_at(lambda) * fi - s.A * s.A;
    return s;
}

Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec3 add(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Vec3 scale(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }

// Lorentz cross product for dx1^2 + dx2^2 - dx0^2, orthogonal to a and b.
Vec3 cross_L(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], -(a[0] * b[1] - a[1] * b[0])};
}

}  // namespace

SymL3 sym_L3(const LoopMatrix& F, cplx lambda) {
    const auto s = parts(F, lambda);
    return {-I * s.A - 0.5 * I * s.P, 0.5 * I * s.P};
}

double su11_structure_residual(const Mat2& X) {
    return std::abs(X.trace()) + std::abs(X(0, 0).real()) + std::abs(X(1, 1).real()) +
           std::abs(X(1, 0) - std::conj(X(0, 1)));
}

Mat2 sym_nil_matrix(const LoopMatrix& F, cplx lambda) {
    const auto s = parts(F, lambda);
    const Mat2 f = -I * s.A - 0.5 * I * s.P;
    const Mat2 df = -I * s.dA - 0.5 * I * (s.A * s.P - s.P * s.A);
    Mat2 out = Mat2::Zero();
    out(0, 1) = f(0, 1);
    out(1, 0) = f(1, 0);
    out(0, 0) = -0.5 * I * df(0, 0);
    out(1, 1) = -0.5 * I * df(1, 1);
    return out;
}

Vec3 sym_nil(const LoopMatrix& F, cplx lambda) {
    const Mat2 m = sym_nil_matrix(F, lambda);
    return {2.0 * m(0, 1).real(), 2.0 * m(0, 1).imag(), -2.0 * m(0, 0).imag()};
}

Vec3 minkowski_coords(const Mat2& X) { return {X(0, 1).real(), X(0, 1).imag(), X(0, 0).imag()}; }

double minkowski_inner(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] - a[2] * b[2]; }

std::string to_string(SurfaceTarget t) { return t == SurfaceTarget::nil ? "nil" : "L3"; }

std::size_t SurfaceMesh::valid_count() const {
    return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), 1));
}

SurfaceMesh surface_grid(const FrameField& field, const IwasawaGrid& iw, const PotentialData& pot,
                         const SurfaceOptions& options) {
    const cplx lambda = std::polar(1.0, options.theta);
    const Zeta zeta(pot);
    SurfaceMesh m;
    m.rows = field.ny();
    m.cols = field.nx();
    const std::size_t n = static_cast<std::size_t>(m.rows) * m.cols;
    m.vertices.assign(n, Vec3{0.0, 0.0, 0.0});
    m.valid.assign(n, 0);
    m.degeneracy.assign(n, 0.0);
    if (options.target == SurfaceTarget::L3) m.gauss.assign(n, Vec3{0.0, 0.0, 0.0});

    for (int iy = 0; iy < m.rows; ++iy) {
        for (int ix = 0; ix < m.cols; ++ix) {
            const std::size_t i = m.index(ix, iy);
            const Mat2 zm = zeta.terms(field.z(ix, iy)).minus;
            m.degeneracy[i] = std::abs(zm(0, 1) * zm(1, 0));
            if (!iw.is_valid(ix, iy) || !std::isfinite(m.degeneracy[i])) continue;
            const auto& F = iw(ix, iy).F;
            Vec3 v;
            if (options.target == SurfaceTarget::nil) {
                v = sym_nil(F, lambda);
            } else {
                const auto s = sym_L3(F, lambda);
                v = minkowski_coords(s.point);
                m.gauss[i] = minkowski_coords(s.gauss);
            }
            if (!std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); })) continue;
            m.vertices[i] = v;
            m.valid[i] = m.degeneracy[i] >= options.degeneracy_tol ? 1 : 0;
        }
    }
    assign_faces(m);
    return m;
}

void assign_faces(SurfaceMesh& m) {
    m.faces.clear();
    for (int iy = 0; iy + 1 < m.rows; ++iy) {
        for (int ix = 0; ix + 1 < m.cols; ++ix) {
            const std::array<std::size_t, 4> q{m.index(ix, iy), m.index(ix + 1, iy), m.index(ix + 1, iy + 1),
                                               m.index(ix, iy + 1)};
            if (std::all_of(q.begin(), q.end(), [&](std::size_t k) { return m.valid[k] != 0; })) m.faces.push_back(q);
        }
    }
}

double closure_residual(const SurfaceMesh& mesh) {
    double worst = 0.0;
    const int last = mesh.cols - 1;
    for (int iy = 0; iy < mesh.rows; ++iy) {
        const std::size_t a = mesh.index(0, iy);
        const std::size_t b = mesh.index(last, iy);
        if (!mesh.valid[a] || !mesh.valid[b]) continue;
        const Vec3 d = sub(mesh.vertices[b], mesh.vertices[a]);
        worst = std::max(worst, std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]));
    }
    return worst;
}

MeanCurvatureStats discrete_mean_curvature(const SurfaceMesh& mesh, double dx, double dy) {
    MeanCurvatureStats st;
    auto ok = [&](int ix, int iy) { return mesh.valid[mesh.index(ix, iy)] != 0; };
    auto at = [&](int ix, int iy) { return mesh.vertices[mesh.index(ix, iy)]; };
    // Fourth-order central stencils along (di, dj).
    auto d1 = [&](int ix, int iy, int di, int dj, double h) {
        const Vec3 a = sub(at(ix + di, iy + dj), at(ix - di, iy - dj));
        const Vec3 b = sub(at(ix + 2 * di, iy + 2 * dj), at(ix - 2 * di, iy - 2 * dj));
        return scale(1.0 / (12.0 * h), sub(scale(8.0, a), b));
    };
    auto d2 = [&](int ix, int iy, int di, int dj, double h) {
        const Vec3 a = add(at(ix + di, iy + dj), at(ix - di, iy - dj));
        const Vec3 b = add(at(ix + 2 * di, iy + 2 * dj), at(ix - 2 * di, iy - 2 * dj));
        return scale(1.0 / (12.0 * h * h), sub(sub(scale(16.0, a), b), scale(30.0, at(ix, iy))));
    };
    for (int iy = 2; iy + 2 < mesh.rows; ++iy) {
        for (int ix = 2; ix + 2 < mesh.cols; ++ix) {
            bool all = true;
            for (int a = -2; a <= 2 && all; ++a)
                for (int b = -2; b <= 2 && all; ++b) all = ok(ix + a, iy + b);
            if (!all) continue;
            const Vec3 fu = d1(ix, iy, 1, 0, dx);
            const Vec3 fv = d1(ix, iy, 0, 1, dy);
            const Vec3 fuu = d2(ix, iy, 1, 0, dx);
            const Vec3 fvv = d2(ix, iy, 0, 1, dy);
            const Vec3 fuv = scale(1.0 / (12.0 * dy), sub(scale(8.0, sub(d1(ix, iy + 1, 1, 0, dx), d1(ix, iy - 1, 1, 0, dx))),
                                                          sub(d1(ix, iy + 2, 1, 0, dx), d1(ix, iy - 2, 1, 0, dx))));
            Vec3 nrm = cross_L(fu, fv);
            const double nn = minkowski_inner(nrm, nrm);
            if (!(nn < 0.0)) {
                ++st.skipped;
                continue;
            }
            nrm = scale(1.0 / std::sqrt(-nn), nrm);
            const double E = minkowski_inner(fu, fu), Fm = minkowski_inner(fu, fv), G = minkowski_inner(fv, fv);
            const double e = minkowski_inner(fuu, nrm), f = minkowski_inner(fuv, nrm), g = minkowski_inner(fvv, nrm);
            const double det = E * G - Fm * Fm;
            if (!(det > 0.0)) {
                ++st.skipped;
                continue;
            }
            st.values.push_back((e * G - 2.0 * f * Fm + g * E) / (2.0 * det));
        }
    }
    if (st.values.empty()) return st;
    const auto [lo, hi] = std::minmax_element(st.values.begin(), st.values.end());
    st.min = *lo;
    st.max = *hi;
    double s = 0.0;
    for (double v : st.values) s += v;
    st.mean = s / static_cast<double>(st.values.size());
    st.relative_spread = std::abs(st.mean) > 0.0 ? (st.max - st.min) / std::abs(st.mean) : INFINITY;
    return st;
}

SurfaceDiagnostics l3_diagnostics(const IwasawaGrid& iw, cplx lambda) {
    SurfaceDiagnostics d;
    for (std::size_t i = 0; i < iw.at.size(); ++i) {
        if (!iw.valid[i]) continue;
        const auto s = sym_L3(iw.at[i].F, lambda);
        d.max_det_gauss_error = std::max(d.max_det_gauss_error, std::abs(s.gauss.determinant() - 0.25));
        d.max_structure_residual = std::max(d.max_structure_residual, su11_structure_residual(s.point));
        d.max_gauss_structure_residual = std::max(d.max_gauss_structure_residual, su11_structure_residual(s.gauss));
    }
    return d;
}

}  // namespace nilcyl
