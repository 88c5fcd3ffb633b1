#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace vlt2 {

struct Vec2 {
    double x1 = 0.0;
    double x2 = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
    friend Vec2 operator-(Vec2 a) { return {-a.x1, -a.x2}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x1, s * a.x2}; }
    friend Vec2 operator*(Vec2 a, double s) { return s * a; }
};

inline double dot(Vec2 a, Vec2 b) { return a.x1 * b.x1 + a.x2 * b.x2; }
inline double norm(Vec2 a) { return std::sqrt(dot(a, a)); }

/// (x1,x2) -> (-x2,x1); perp(perp(w)) == -w.
inline Vec2 perp(Vec2 w) { return {-w.x2, w.x1}; }

inline Vec2 normalized(Vec2 a) {
    const double n = norm(a);
    if (n == 0.0) throw std::invalid_argument("normalized: zero vector");
    return {a.x1 / n, a.x2 / n};
}

/// Symmetric 2-tensor stored as the independent components of
/// [[f11, f12], [f12, f22]].
struct SymTensor2 {
    double f11 = 0.0;
    double f12 = 0.0;
    double f22 = 0.0;

    friend SymTensor2 operator+(SymTensor2 a, SymTensor2 b) {
        return {a.f11 + b.f11, a.f12 + b.f12, a.f22 + b.f22};
    }
    friend SymTensor2 operator*(double s, SymTensor2 a) {
        return {s * a.f11, s * a.f12, s * a.f22};
    }
};

/// Symmetrized outer product: component (i,j) = (a_i b_j + a_j b_i) / 2.
inline SymTensor2 sym_outer(Vec2 a, Vec2 b) {
    return {a.x1 * b.x1, 0.5 * (a.x1 * b.x2 + a.x2 * b.x1), a.x2 * b.x2};
}

/// Tensor scalar product; the off-diagonal term counts twice.
inline double inner(const SymTensor2& f, const SymTensor2& g) {
    return f.f11 * g.f11 + 2.0 * f.f12 * g.f12 + f.f22 * g.f22;
}

inline double trace(const SymTensor2& f) { return f.f11 + f.f22; }

// ---------------------------------------------------------------------------
// Grids
// ---------------------------------------------------------------------------

/// Uniform vertex-centered grid over a rectangle with square cells.
struct GridSpec {
    int nx = 0;
    int ny = 0;
    double x_min = 0.0, x_max = 0.0;
    double y_min = 0.0, y_max = 0.0;
    double h = 0.0;

    GridSpec() = default;

    GridSpec(int nx_, int ny_, double x_min_, double x_max_, double y_min_, double y_max_)
        : nx(nx_), ny(ny_), x_min(x_min_), x_max(x_max_), y_min(y_min_), y_max(y_max_) {
        if (nx < 3 || ny < 3) throw std::invalid_argument("GridSpec: nx, ny must be >= 3");
        if (!(x_max > x_min) || !(y_max > y_min))
            throw std::invalid_argument("GridSpec: empty box");
        const double hx = (x_max - x_min) / (nx - 1);
        const double hy = (y_max - y_min) / (ny - 1);
        if (std::abs(hx - hy) > 1e-9 * std::max(hx, hy))
            throw std::invalid_argument("GridSpec: cells must be square");
        h = hx;
    }

    /// n x n grid over [-halfwidth, halfwidth]^2.
    static GridSpec square(int n, double halfwidth) {
        return GridSpec(n, n, -halfwidth, halfwidth, -halfwidth, halfwidth);
    }

    double x(int i) const { return x_min + i * h; }
    double y(int j) const { return y_min + j * h; }
    Vec2 point(int i, int j) const { return {x(i), y(j)}; }
    std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }

    bool contains(Vec2 p) const {
        return p.x1 >= x_min && p.x1 <= x_max && p.x2 >= y_min && p.x2 <= y_max;
    }

    friend bool operator==(const GridSpec& a, const GridSpec& b) {
        auto close = [](double u, double v) { return std::abs(u - v) <= 1e-12 * (1.0 + std::abs(u) + std::abs(v)); };
        return a.nx == b.nx && a.ny == b.ny && close(a.x_min, b.x_min) && close(a.x_max, b.x_max) &&
               close(a.y_min, b.y_min) && close(a.y_max, b.y_max);
    }
};

struct ScalarField2 {
    GridSpec spec;
    std::vector<double> v;

    ScalarField2() = default;
    explicit ScalarField2(const GridSpec& s) : spec(s), v(s.size(), 0.0) {}

    double& at(int i, int j) { return v[spec.idx(i, j)]; }
    double at(int i, int j) const { return v[spec.idx(i, j)]; }

    /// Bilinear interpolation; points outside the box read as 0.
    double sample(Vec2 p) const {
        const double fx = (p.x1 - spec.x_min) / spec.h;
        const double fy = (p.x2 - spec.y_min) / spec.h;
        if (fx < 0.0 || fy < 0.0 || fx > spec.nx - 1 || fy > spec.ny - 1) return 0.0;
        int i = static_cast<int>(fx);
        int j = static_cast<int>(fy);
        if (i >= spec.nx - 1) i = spec.nx - 2;
        if (j >= spec.ny - 1) j = spec.ny - 2;
        const double ax = fx - i;
        const double ay = fy - j;
        const double* base = v.data() + spec.idx(i, j);
        const double v00 = base[0];
        const double v10 = base[1];
        const double v01 = base[spec.nx];
        const double v11 = base[spec.nx + 1];
        return (1.0 - ax) * (1.0 - ay) * v00 + ax * (1.0 - ay) * v10 +
               (1.0 - ax) * ay * v01 + ax * ay * v11;
    }

    void check_finite(const char* whence = "ScalarField2") const {
        for (double x : v)
            if (!std::isfinite(x)) throw std::invalid_argument(std::string(whence) + ": non-finite value");
    }

    double max_abs() const {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    }

    ScalarField2& operator+=(const ScalarField2& o) {
        for (std::size_t k = 0; k < v.size(); ++k) v[k] += o.v[k];
        return *this;
    }
    ScalarField2& operator-=(const ScalarField2& o) {
        for (std::size_t k = 0; k < v.size(); ++k) v[k] -= o.v[k];
        return *this;
    }
    ScalarField2& operator*=(double s) {
        for (double& x : v) x *= s;
        return *this;
    }
};

inline ScalarField2 operator+(ScalarField2 a, const ScalarField2& b) { return a += b; }
inline ScalarField2 operator-(ScalarField2 a, const ScalarField2& b) { return a -= b; }
inline ScalarField2 operator*(double s, ScalarField2 a) { return a *= s; }

struct VectorField2 {
    ScalarField2 g1;
    ScalarField2 g2;

    VectorField2() = default;
    explicit VectorField2(const GridSpec& s) : g1(s), g2(s) {}
    const GridSpec& spec() const { return g1.spec; }
};

struct SymTensorField2 {
    ScalarField2 f11;
    ScalarField2 f12;
    ScalarField2 f22;

    SymTensorField2() = default;
    explicit SymTensorField2(const GridSpec& s) : f11(s), f12(s), f22(s) {}
    const GridSpec& spec() const { return f11.spec; }

    SymTensor2 at(int i, int j) const { return {f11.at(i, j), f12.at(i, j), f22.at(i, j)}; }
};

// ---------------------------------------------------------------------------
// Finite differences (second order; one-sided at the boundary ring)
// ---------------------------------------------------------------------------

namespace detail {

inline double d1_row(const double* p, int i, int n, std::ptrdiff_t stride, double h) {
    if (i == 0) return (-3.0 * p[0] + 4.0 * p[stride] - p[2 * stride]) / (2.0 * h);
    if (i == n - 1) {
        const double* q = p + static_cast<std::ptrdiff_t>(i) * stride;
        return (3.0 * q[0] - 4.0 * q[-stride] + q[-2 * stride]) / (2.0 * h);
    }
    const double* q = p + static_cast<std::ptrdiff_t>(i) * stride;
    return (q[stride] - q[-stride]) / (2.0 * h);
}

inline double d2_row(const double* p, int i, int n, std::ptrdiff_t stride, double h) {
    const double h2 = h * h;
    if (i == 0) return (2.0 * p[0] - 5.0 * p[stride] + 4.0 * p[2 * stride] - p[3 * stride]) / h2;
    if (i == n - 1) {
        const double* q = p + static_cast<std::ptrdiff_t>(i) * stride;
        return (2.0 * q[0] - 5.0 * q[-stride] + 4.0 * q[-2 * stride] - q[-3 * stride]) / h2;
    }
    const double* q = p + static_cast<std::ptrdiff_t>(i) * stride;
    return (q[stride] - 2.0 * q[0] + q[-stride]) / h2;
}

} // namespace detail

inline ScalarField2 deriv_x(const ScalarField2& f) {
    ScalarField2 out(f.spec);
    const int nx = f.spec.nx, ny = f.spec.ny;
    for (int j = 0; j < ny; ++j) {
        const double* row = f.v.data() + f.spec.idx(0, j);
        for (int i = 0; i < nx; ++i) out.at(i, j) = detail::d1_row(row, i, nx, 1, f.spec.h);
    }
    return out;
}

inline ScalarField2 deriv_y(const ScalarField2& f) {
    ScalarField2 out(f.spec);
    const int nx = f.spec.nx, ny = f.spec.ny;
    for (int i = 0; i < nx; ++i) {
        const double* col = f.v.data() + f.spec.idx(i, 0);
        for (int j = 0; j < ny; ++j) out.at(i, j) = detail::d1_row(col, j, ny, nx, f.spec.h);
    }
    return out;
}

inline ScalarField2 second_x(const ScalarField2& f) {
    ScalarField2 out(f.spec);
    const int nx = f.spec.nx, ny = f.spec.ny;
    for (int j = 0; j < ny; ++j) {
        const double* row = f.v.data() + f.spec.idx(0, j);
        for (int i = 0; i < nx; ++i) out.at(i, j) = detail::d2_row(row, i, nx, 1, f.spec.h);
    }
    return out;
}

inline ScalarField2 second_y(const ScalarField2& f) {
    ScalarField2 out(f.spec);
    const int nx = f.spec.nx, ny = f.spec.ny;
    for (int i = 0; i < nx; ++i) {
        const double* col = f.v.data() + f.spec.idx(i, 0);
        for (int j = 0; j < ny; ++j) out.at(i, j) = detail::d2_row(col, j, ny, nx, f.spec.h);
    }
    return out;
}

namespace detail {

inline double d1_row_o4(const double* p, int i, int n, std::ptrdiff_t stride, double h) {
    if (i >= 2 && i <= n - 3) {
        const double* q = p + static_cast<std::ptrdiff_t>(i) * stride;
        return (-q[2 * stride] + 8.0 * q[stride] - 8.0 * q[-stride] + q[-2 * stride]) / (12.0 * h);
    }
    return d1_row(p, i, n, stride, h);
}

inline double d2_row_o4(const double* p, int i, int n, std::ptrdiff_t stride, double h) {
    if (i >= 2 && i <= n - 3) {
        const double* q = p + static_cast<std::ptrdiff_t>(i) * stride;
        return (-q[2 * stride] + 16.0 * q[stride] - 30.0 * q[0] + 16.0 * q[-stride] -
                q[-2 * stride]) /
               (12.0 * h * h);
    }
    return d2_row(p, i, n, stride, h);
}

} // namespace detail

/// Fourth-order first derivatives (second-order one-sided at the two-cell
/// boundary band). Used where a generator needs more accuracy than the
/// second-order pipeline stencils.
inline ScalarField2 deriv_x_o4(const ScalarField2& f) {
    ScalarField2 out(f.spec);
    for (int j = 0; j < f.spec.ny; ++j) {
        const double* row = f.v.data() + f.spec.idx(0, j);
        for (int i = 0; i < f.spec.nx; ++i)
            out.at(i, j) = detail::d1_row_o4(row, i, f.spec.nx, 1, f.spec.h);
    }
    return out;
}

inline ScalarField2 deriv_y_o4(const ScalarField2& f) {
    ScalarField2 out(f.spec);
    for (int i = 0; i < f.spec.nx; ++i) {
        const double* col = f.v.data() + f.spec.idx(i, 0);
        for (int j = 0; j < f.spec.ny; ++j)
            out.at(i, j) = detail::d1_row_o4(col, j, f.spec.ny, f.spec.nx, f.spec.h);
    }
    return out;
}

inline ScalarField2 second_x_o4(const ScalarField2& f) {
    ScalarField2 out(f.spec);
    for (int j = 0; j < f.spec.ny; ++j) {
        const double* row = f.v.data() + f.spec.idx(0, j);
        for (int i = 0; i < f.spec.nx; ++i)
            out.at(i, j) = detail::d2_row_o4(row, i, f.spec.nx, 1, f.spec.h);
    }
    return out;
}

inline ScalarField2 second_y_o4(const ScalarField2& f) {
    ScalarField2 out(f.spec);
    for (int i = 0; i < f.spec.nx; ++i) {
        const double* col = f.v.data() + f.spec.idx(i, 0);
        for (int j = 0; j < f.spec.ny; ++j)
            out.at(i, j) = detail::d2_row_o4(col, j, f.spec.ny, f.spec.nx, f.spec.h);
    }
    return out;
}

/// Directional derivative D_w h = w . grad h.
inline ScalarField2 directional_derivative(const ScalarField2& h, Vec2 w) {
    ScalarField2 dx = deriv_x(h);
    ScalarField2 dy = deriv_y(h);
    ScalarField2 out(h.spec);
    for (std::size_t k = 0; k < out.v.size(); ++k) out.v[k] = w.x1 * dx.v[k] + w.x2 * dy.v[k];
    return out;
}

inline VectorField2 gradient(const ScalarField2& h) {
    VectorField2 out(h.spec);
    out.g1 = deriv_x(h);
    out.g2 = deriv_y(h);
    return out;
}

/// d^perp of a scalar: (-d/dx2, d/dx1).
inline VectorField2 gradient_perp(const ScalarField2& h) {
    VectorField2 out(h.spec);
    out.g1 = -1.0 * deriv_y(h);
    out.g2 = deriv_x(h);
    return out;
}

/// Symmetrized derivative of a vector field: (d g)_ij = (d_j g_i + d_i g_j) / 2.
inline SymTensorField2 sym_derivative(const VectorField2& g) {
    SymTensorField2 out(g.spec());
    ScalarField2 d1g1 = deriv_x(g.g1), d2g1 = deriv_y(g.g1);
    ScalarField2 d1g2 = deriv_x(g.g2), d2g2 = deriv_y(g.g2);
    out.f11 = d1g1;
    out.f22 = d2g2;
    for (std::size_t k = 0; k < out.f12.v.size(); ++k)
        out.f12.v[k] = 0.5 * (d2g1.v[k] + d1g2.v[k]);
    return out;
}

/// (d^perp g)_ij = ((-1)^j d g_i / d x_{3-j} + (-1)^i d g_j / d x_{3-i}) / 2.
inline SymTensorField2 sym_derivative_perp(const VectorField2& g) {
    SymTensorField2 out(g.spec());
    ScalarField2 d1g1 = deriv_x(g.g1), d2g1 = deriv_y(g.g1);
    ScalarField2 d1g2 = deriv_x(g.g2), d2g2 = deriv_y(g.g2);
    for (std::size_t k = 0; k < out.f11.v.size(); ++k) {
        out.f11.v[k] = -d2g1.v[k];
        out.f12.v[k] = 0.5 * (d1g1.v[k] - d2g2.v[k]);
        out.f22.v[k] = d1g2.v[k];
    }
    return out;
}

/// Divergence of a symmetric tensor field, (delta f)_i = d_j f_ij.
inline VectorField2 divergence(const SymTensorField2& f) {
    VectorField2 out(f.spec());
    ScalarField2 d1f11 = deriv_x(f.f11), d2f12 = deriv_y(f.f12);
    ScalarField2 d1f12 = deriv_x(f.f12), d2f22 = deriv_y(f.f22);
    for (std::size_t k = 0; k < out.g1.v.size(); ++k) {
        out.g1.v[k] = d1f11.v[k] + d2f12.v[k];
        out.g2.v[k] = d1f12.v[k] + d2f22.v[k];
    }
    return out;
}

/// (delta^perp f)_i = -d f_i1 / d x2 + d f_i2 / d x1.
inline VectorField2 divergence_perp(const SymTensorField2& f) {
    VectorField2 out(f.spec());
    ScalarField2 d2f11 = deriv_y(f.f11), d1f12 = deriv_x(f.f12);
    ScalarField2 d2f12 = deriv_y(f.f12), d1f22 = deriv_x(f.f22);
    for (std::size_t k = 0; k < out.g1.v.size(); ++k) {
        out.g1.v[k] = -d2f11.v[k] + d1f12.v[k];
        out.g2.v[k] = -d2f12.v[k] + d1f22.v[k];
    }
    return out;
}

// ---------------------------------------------------------------------------
// V-line geometry
// ---------------------------------------------------------------------------

class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fixed ray-direction pair of the V-lines: u = (u1,u2) with u2 > 0 and
/// v = (-u1,u2), mirror-symmetric about the y-axis. The degenerate
/// (u = e2) and straight-line (u = e1) limits are excluded.
class VLineGeometry {
public:
    explicit VLineGeometry(Vec2 u) : u_(u) {
        if (std::abs(norm(u) - 1.0) > 1e-12)
            throw std::invalid_argument("VLineGeometry: u must be a unit vector");
        if (!(u.x2 > 0.0)) throw std::invalid_argument("VLineGeometry: u2 must be positive");
        const double d = u.x1 * u.x1 - u.x2 * u.x2;
        if (!(d > -1.0 + 1e-12) || !(d < 1.0 - 1e-12))
            throw std::invalid_argument("VLineGeometry: need -1 < u1^2 - u2^2 < 1");
    }

    /// Geometry from the first component of u; u2 = sqrt(1 - u1^2).
    static VLineGeometry from_u1(double u1) {
        const double s = 1.0 - u1 * u1;
        if (!(s > 0.0)) throw std::invalid_argument("VLineGeometry: |u1| must be < 1");
        return VLineGeometry(Vec2{u1, std::sqrt(s)});
    }

    Vec2 u() const { return u_; }
    Vec2 v() const { return {-u_.x1, u_.x2}; }
    double u1() const { return u_.x1; }
    double u2() const { return u_.x2; }

    bool orthogonal_branches(double tol = 1e-12) const { return std::abs(u_.x1 - u_.x2) <= tol; }

    /// Radius of the disk outside which at most one branch of any V-line
    /// meets the support disk of radius r1. For this geometry it equals
    /// r1 / sin(angle(u,v)/2) = r1 / |u1|.
    double data_disk_radius(double r1 = 1.0) const { return r1 / std::abs(u_.x1); }

    /// Half-width of a data box big enough that V-line data of a field
    /// supported in |x| < r1 vanishes at the vertical edges for all
    /// heights |x2| <= r1 (the semi-infinite strips point downward).
    double box_halfwidth_for_horizontal_tails(double r1 = 1.0) const {
        return r1 * (1.0 + 2.0 * std::abs(u_.x1) / u_.x2);
    }

private:
    Vec2 u_;
};

/// Fused second-order stencil for D_u D_v = u2^2 d2/dx2^2 - u1^2 d2/dx1^2.
inline ScalarField2 du_dv(const ScalarField2& f, const VLineGeometry& geom) {
    ScalarField2 sxx = second_x(f);
    ScalarField2 syy = second_y(f);
    const double a = geom.u2() * geom.u2();
    const double b = geom.u1() * geom.u1();
    ScalarField2 out(f.spec);
    for (std::size_t k = 0; k < out.v.size(); ++k) out.v[k] = a * syy.v[k] - b * sxx.v[k];
    return out;
}

/// Zeroes a field outside the disk |x| <= radius, with a raised-cosine
/// taper of the given width. Reconstruction pipelines use this on
/// intermediate expressions whose compact support is guaranteed by the
/// underlying identity, cutting off boundary-stencil artifacts before a
/// cumulative integration spreads them. The taper keeps the cutoff from
/// introducing lattice-phase jumps between adjacent rows.
inline ScalarField2 mask_outside_disk(ScalarField2 f, double radius, double taper = 0.0) {
    if (taper <= 0.0) taper = 8.0 * f.spec.h;
    for (int j = 0; j < f.spec.ny; ++j)
        for (int i = 0; i < f.spec.nx; ++i) {
            const Vec2 p = f.spec.point(i, j);
            const double r = norm(p);
            if (r <= radius) continue;
            if (r >= radius + taper) {
                f.at(i, j) = 0.0;
            } else {
                const double c = std::cos(0.5 * M_PI * (r - radius) / taper);
                f.at(i, j) *= c * c;
            }
        }
    return f;
}

/// One pass of the separable 3x3 binomial kernel [1 2 1]/4 per axis.
/// Damps grid-scale oscillation while adding only an O(h^2) bias; used on
/// recovered grids before they reenter a differentiating pipeline.
inline ScalarField2 smooth_binomial(const ScalarField2& f) {
    ScalarField2 tmp(f.spec), out(f.spec);
    const int nx = f.spec.nx, ny = f.spec.ny;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double l = f.at(std::max(i - 1, 0), j);
            const double r = f.at(std::min(i + 1, nx - 1), j);
            tmp.at(i, j) = 0.25 * (l + 2.0 * f.at(i, j) + r);
        }
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double d = tmp.at(i, std::max(j - 1, 0));
            const double u = tmp.at(i, std::min(j + 1, ny - 1));
            out.at(i, j) = 0.25 * (d + 2.0 * tmp.at(i, j) + u);
        }
    return out;
}

/// D_u D_v with fourth-order interior stencils. The reconstruction
/// pipelines apply D_u D_v to measured transform grids, where the plain
/// second-order truncation (~h^2 times a fourth derivative of the data)
/// is the dominant error at working resolutions.
inline ScalarField2 du_dv_hi(const ScalarField2& f, const VLineGeometry& geom) {
    ScalarField2 sxx = second_x_o4(f);
    ScalarField2 syy = second_y_o4(f);
    const double a = geom.u2() * geom.u2();
    const double b = geom.u1() * geom.u1();
    ScalarField2 out(f.spec);
    for (std::size_t k = 0; k < out.v.size(); ++k) out.v[k] = a * syy.v[k] - b * sxx.v[k];
    return out;
}

} // namespace vlt2
