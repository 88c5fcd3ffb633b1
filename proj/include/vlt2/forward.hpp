#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "vlt2/core.hpp"
#include "vlt2/numerics.hpp"
#include "vlt2/parallel.hpp"

namespace vlt2 {

/// Quadrature along rays: composite trapezoid on the segment where the ray
/// crosses the grid box, sample spacing ~ step. max_len truncates the
/// semi-infinite integral; with compactly supported integrands any value at
/// least the box diagonal is exact.
struct RayQuadratureConfig {
    double step = 0.0;
    double max_len = 0.0;

    static RayQuadratureConfig for_grid(const GridSpec& s) {
        RayQuadratureConfig cfg;
        cfg.step = 0.5 * s.h;
        const double dx = s.x_max - s.x_min;
        const double dy = s.y_max - s.y_min;
        cfg.max_len = std::sqrt(dx * dx + dy * dy);
        return cfg;
    }

    void validate() const {
        if (!(step > 0.0)) throw std::invalid_argument("RayQuadratureConfig: step must be > 0");
        if (!(max_len > 0.0)) throw std::invalid_argument("RayQuadratureConfig: max_len must be > 0");
    }
};

namespace detail {

struct RaySegment {
    double t0 = 0.0;
    double t1 = -1.0;
    bool empty() const { return !(t1 > t0); }
};

/// Clips {x + t w : 0 <= t <= max_len} against the grid box.
inline RaySegment clip_ray(const GridSpec& s, Vec2 x, Vec2 w, double max_len) {
    double lo = 0.0, hi = max_len;
    auto slab = [&](double p, double d, double mn, double mx) {
        if (std::abs(d) < 1e-300) {
            if (p < mn || p > mx) hi = -1.0;
            return;
        }
        double a = (mn - p) / d;
        double b = (mx - p) / d;
        if (a > b) std::swap(a, b);
        lo = std::max(lo, a);
        hi = std::min(hi, b);
    };
    slab(x.x1, w.x1, s.x_min, s.x_max);
    slab(x.x2, w.x2, s.y_min, s.y_max);
    RaySegment seg;
    seg.t0 = lo;
    seg.t1 = hi;
    return seg;
}

struct BilinearPos {
    bool inside = false;
    std::size_t base = 0;
    double w00 = 0.0, w10 = 0.0, w01 = 0.0, w11 = 0.0;
};

inline BilinearPos locate(const GridSpec& s, Vec2 p) {
    BilinearPos q;
    const double fx = (p.x1 - s.x_min) / s.h;
    const double fy = (p.x2 - s.y_min) / s.h;
    if (fx < 0.0 || fy < 0.0 || fx > s.nx - 1 || fy > s.ny - 1) return q;
    int i = static_cast<int>(fx);
    int j = static_cast<int>(fy);
    if (i >= s.nx - 1) i = s.nx - 2;
    if (j >= s.ny - 1) j = s.ny - 2;
    const double ax = fx - i;
    const double ay = fy - j;
    q.inside = true;
    q.base = s.idx(i, j);
    q.w00 = (1.0 - ax) * (1.0 - ay);
    q.w10 = ax * (1.0 - ay);
    q.w01 = (1.0 - ax) * ay;
    q.w11 = ax * ay;
    return q;
}

inline double gather(const ScalarField2& f, const BilinearPos& q) {
    const double* b = f.v.data() + q.base;
    return q.w00 * b[0] + q.w10 * b[1] + q.w01 * b[f.spec.nx] + q.w11 * b[f.spec.nx + 1];
}

/// Ray integration: the ray is split at every grid-line crossing, and each
/// cell segment is handled by Simpson panels no wider than cfg.step. Along
/// a line the bilinear interpolant is quadratic per cell, so the rule
/// integrates it exactly (and t-weighted moments up to the cubic k = 1);
/// the result carries no quadrature phase noise, only the smooth
/// interpolation bias.
template <class F>
double integrate_ray(const GridSpec& spec, Vec2 x, Vec2 w, const RayQuadratureConfig& cfg,
                     F&& value_at) {
    const RaySegment seg = clip_ray(spec, x, w, cfg.max_len);
    if (seg.empty()) return 0.0;

    // grid-line crossing parameters, merged in increasing order
    auto axis_crossings = [](double p0, double d, double lo, double hi_t, double t0, double mn,
                             double h, std::vector<double>& out) {
        if (std::abs(d) < 1e-12) return;
        const double a = p0 + t0 * d;
        const double b = p0 + hi_t * d;
        const double ia = (a - mn) / h;
        const double ib = (b - mn) / h;
        const int lo_i = static_cast<int>(std::ceil(std::min(ia, ib) + 1e-12));
        const int hi_i = static_cast<int>(std::floor(std::max(ia, ib) - 1e-12));
        for (int i = lo_i; i <= hi_i; ++i) {
            const double t = (mn + i * h - p0) / d;
            if (t > t0 && t < hi_t) out.push_back(t);
        }
        (void)lo;
    };
    std::vector<double> cuts;
    cuts.reserve(static_cast<std::size_t>((seg.t1 - seg.t0) / spec.h * 2.0) + 8);
    cuts.push_back(seg.t0);
    axis_crossings(x.x1, w.x1, spec.x_min, seg.t1, seg.t0, spec.x_min, spec.h, cuts);
    axis_crossings(x.x2, w.x2, spec.y_min, seg.t1, seg.t0, spec.y_min, spec.h, cuts);
    cuts.push_back(seg.t1);
    std::sort(cuts.begin(), cuts.end());

    double acc = 0.0;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const double ta = cuts[c];
        const double tb = cuts[c + 1];
        const double len = tb - ta;
        if (len <= 1e-14) continue;
        const int panels = std::max(1, static_cast<int>(std::ceil(len / cfg.step - 1e-9)));
        const double dt = len / panels;
        for (int p = 0; p < panels; ++p) {
            const double a = ta + p * dt;
            const double b = a + dt;
            const double mid = 0.5 * (a + b);
            acc += dt / 6.0 *
                   (value_at(a, Vec2{x.x1 + a * w.x1, x.x2 + a * w.x2}) +
                    4.0 * value_at(mid, Vec2{x.x1 + mid * w.x1, x.x2 + mid * w.x2}) +
                    value_at(b, Vec2{x.x1 + b * w.x1, x.x2 + b * w.x2}));
        }
    }
    return acc;
}

} // namespace detail

/// Divergent beam transform: integral of h from x in direction w (|w| = 1).
/// Out-of-grid points contribute zero, so a start outside the box returns
/// the integral of the in-grid tail.
inline double divergent_beam(const ScalarField2& h, Vec2 w, Vec2 x, const RayQuadratureConfig& cfg) {
    cfg.validate();
    return detail::integrate_ray(h.spec, x, w, cfg,
                                 [&h](double /*t*/, Vec2 p) { return h.sample(p); });
}

/// k-th moment divergent beam transform (integrand weighted by t^k).
inline double moment_divergent_beam(const ScalarField2& h, Vec2 w, Vec2 x, int k,
                                    const RayQuadratureConfig& cfg) {
    if (k < 0) throw std::invalid_argument("moment_divergent_beam: k must be >= 0");
    if (k == 0) return divergent_beam(h, w, x, cfg);
    cfg.validate();
    return detail::integrate_ray(
        h.spec, x, w, cfg, [&h, k](double t, Vec2 p) { return std::pow(t, k) * h.sample(p); });
}

/// Integral of <f(x + t w), P> t^k along the ray. Shared bilinear weights
/// gather all three tensor components per sample.
inline double beam_projected(const SymTensorField2& f, Vec2 w, Vec2 x, const SymTensor2& P, int k,
                             const RayQuadratureConfig& cfg) {
    if (k < 0) throw std::invalid_argument("beam_projected: k must be >= 0");
    cfg.validate();
    const GridSpec& spec = f.spec();
    return detail::integrate_ray(spec, x, w, cfg, [&](double t, Vec2 p) {
        const auto q = detail::locate(spec, p);
        if (!q.inside) return 0.0;
        const SymTensor2 ft{detail::gather(f.f11, q), detail::gather(f.f12, q),
                            detail::gather(f.f22, q)};
        double val = inner(ft, P);
        if (k > 0) val *= std::pow(t, k);
        return val;
    });
}

// ---------------------------------------------------------------------------
// Scalar V-line transforms
// ---------------------------------------------------------------------------

/// V phi = X_u phi + X_v phi.
inline double vline_scalar(const ScalarField2& h, const VLineGeometry& geom, Vec2 x,
                           const RayQuadratureConfig& cfg) {
    return divergent_beam(h, geom.u(), x, cfg) + divergent_beam(h, geom.v(), x, cfg);
}

/// V^- phi = X_u phi - X_v phi.
inline double vline_scalar_signed(const ScalarField2& h, const VLineGeometry& geom, Vec2 x,
                                  const RayQuadratureConfig& cfg) {
    return divergent_beam(h, geom.u(), x, cfg) - divergent_beam(h, geom.v(), x, cfg);
}

// ---------------------------------------------------------------------------
// Tensor V-line transforms
// ---------------------------------------------------------------------------

enum class VltKind { L, T, M };

/// Projection tensors of the two branches for a given transform. For
/// v = (-u1, u2) these expand to the componentwise forms
///   L f = u1^2 V(f11) + 2 u1 u2 V^-(f12) + u2^2 V(f22)
///   T f = u2^2 V(f11) - 2 u1 u2 V^-(f12) + u1^2 V(f22)
///   M f = -u1 u2 V^-(f11) + (u1^2 - u2^2) V(f12) + u1 u2 V^-(f22).
inline std::array<SymTensor2, 2> branch_projections(const VLineGeometry& geom, VltKind kind) {
    const Vec2 u = geom.u(), v = geom.v();
    switch (kind) {
        case VltKind::L: return {sym_outer(u, u), sym_outer(v, v)};
        case VltKind::T: return {sym_outer(perp(u), perp(u)), sym_outer(perp(v), perp(v))};
        case VltKind::M: return {sym_outer(u, perp(u)), sym_outer(v, perp(v))};
    }
    throw std::invalid_argument("branch_projections: bad kind");
}

inline double vlt_point(const SymTensorField2& f, const VLineGeometry& geom, VltKind kind, Vec2 x,
                        int k, const RayQuadratureConfig& cfg) {
    const auto proj = branch_projections(geom, kind);
    return beam_projected(f, geom.u(), x, proj[0], k, cfg) +
           beam_projected(f, geom.v(), x, proj[1], k, cfg);
}

inline double vlt_L(const SymTensorField2& f, const VLineGeometry& geom, Vec2 x,
                    const RayQuadratureConfig& cfg) {
    return vlt_point(f, geom, VltKind::L, x, 0, cfg);
}
inline double vlt_T(const SymTensorField2& f, const VLineGeometry& geom, Vec2 x,
                    const RayQuadratureConfig& cfg) {
    return vlt_point(f, geom, VltKind::T, x, 0, cfg);
}
inline double vlt_M(const SymTensorField2& f, const VLineGeometry& geom, Vec2 x,
                    const RayQuadratureConfig& cfg) {
    return vlt_point(f, geom, VltKind::M, x, 0, cfg);
}
inline double vlt_Lk(const SymTensorField2& f, const VLineGeometry& geom, Vec2 x, int k,
                     const RayQuadratureConfig& cfg) {
    return vlt_point(f, geom, VltKind::L, x, k, cfg);
}
inline double vlt_Tk(const SymTensorField2& f, const VLineGeometry& geom, Vec2 x, int k,
                     const RayQuadratureConfig& cfg) {
    return vlt_point(f, geom, VltKind::T, x, k, cfg);
}
inline double vlt_Mk(const SymTensorField2& f, const VLineGeometry& geom, Vec2 x, int k,
                     const RayQuadratureConfig& cfg) {
    return vlt_point(f, geom, VltKind::M, x, k, cfg);
}

/// Evaluates a V-line transform at every vertex of the field's grid.
inline ScalarField2 transform_field(const SymTensorField2& f, const VLineGeometry& geom,
                                    VltKind kind, int k, const RayQuadratureConfig& cfg) {
    if (k < 0) throw std::invalid_argument("transform_field: k must be >= 0");
    const GridSpec& spec = f.spec();
    ScalarField2 out(spec);
    const auto proj = branch_projections(geom, kind);
    const Vec2 u = geom.u(), v = geom.v();
    parallel_for(spec.ny, [&](int j0, int j1) {
        for (int j = j0; j < j1; ++j)
            for (int i = 0; i < spec.nx; ++i) {
                const Vec2 x = spec.point(i, j);
                out.at(i, j) = beam_projected(f, u, x, proj[0], k, cfg) +
                               beam_projected(f, v, x, proj[1], k, cfg);
            }
    });
    return out;
}

inline ScalarField2 transform_field(const SymTensorField2& f, const VLineGeometry& geom,
                                    VltKind kind, const RayQuadratureConfig& cfg) {
    return transform_field(f, geom, kind, 0, cfg);
}

/// V of a scalar field at every vertex.
inline ScalarField2 vline_field(const ScalarField2& h, const VLineGeometry& geom,
                                const RayQuadratureConfig& cfg) {
    ScalarField2 out(h.spec);
    parallel_for(h.spec.ny, [&](int j0, int j1) {
        for (int j = j0; j < j1; ++j)
            for (int i = 0; i < h.spec.nx; ++i)
                out.at(i, j) = vline_scalar(h, geom, h.spec.point(i, j), cfg);
    });
    return out;
}

/// V^- of a scalar field at every vertex.
inline ScalarField2 vline_signed_field(const ScalarField2& h, const VLineGeometry& geom,
                                       const RayQuadratureConfig& cfg) {
    ScalarField2 out(h.spec);
    parallel_for(h.spec.ny, [&](int j0, int j1) {
        for (int j = j0; j < j1; ++j)
            for (int i = 0; i < h.spec.nx; ++i)
                out.at(i, j) = vline_scalar_signed(h, geom, h.spec.point(i, j), cfg);
    });
    return out;
}

// ---------------------------------------------------------------------------
// Strip-constancy extension of V-line data beyond the grid box
// ---------------------------------------------------------------------------

namespace detail {

/// Samples V-line-type data (any combination of X_u and X_v integrals of
/// fields supported in |x| < support_radius) anywhere in the plane.
/// Outside the data disk at most one branch ray meets the support, and the
/// datum is constant along translations in that branch direction until the
/// box is reentered.
class VlineStripSampler {
public:
    VlineStripSampler(const ScalarField2& data, const VLineGeometry& geom, double support_radius)
        : data_(data), r1_(support_radius) {
        branches_[0] = geom.u();
        branches_[1] = geom.v();
    }

    double operator()(Vec2 p) const {
        if (data_.spec.contains(p)) return data_.sample(p);
        for (const Vec2& w : branches_) {
            const double t_star = -dot(p, w);
            if (t_star <= 0.0) continue;
            const double d2 = dot(p, p) - t_star * t_star;
            if (d2 >= r1_ * r1_) continue;
            const auto seg = clip_ray(data_.spec, p, w, 2.0 * t_star + 2.0 * r1_);
            if (seg.empty()) continue;
            const double t = seg.t0 + 0.25 * data_.spec.h;
            return data_.sample({p.x1 + t * w.x1, p.x2 + t * w.x2});
        }
        return 0.0;
    }

private:
    const ScalarField2& data_;
    std::array<Vec2, 2> branches_;
    double r1_;
};

} // namespace detail

/// Cumulative integral along +-e1 of V-line data whose slanted strips cross
/// the vertical box edges: the out-of-box tail is integrated through the
/// strip-constancy extension, so the box only needs to contain the data
/// disk rather than the full horizontal extent of the strips.
inline ScalarField2 integrate_along_axis_extended(const ScalarField2& data,
                                                  const VLineGeometry& geom, AxisDir dir,
                                                  double support_radius) {
    if (dir == AxisDir::PlusY) return integrate_along_axis(data, AxisDir::PlusY);
    const GridSpec& s = data.spec;
    const detail::VlineStripSampler sampler(data, geom, support_radius);
    const double slope = std::abs(geom.u1()) / geom.u2();

    ScalarField2 out = integrate_along_axis(data, dir);
    const double step = 0.5 * s.h;
    for (int j = 0; j < s.ny; ++j) {
        const double y = s.y(j);
        // horizontal reach of the strips at this height
        const double reach = support_radius + slope * (support_radius - y);
        double tail = 0.0;
        const double edge = dir == AxisDir::MinusX ? s.x_min : s.x_max;
        const double sign = dir == AxisDir::MinusX ? -1.0 : 1.0;
        const double len = reach - std::abs(edge);
        if (len > 0.0) {
            int n = std::max(2, static_cast<int>(std::ceil(len / step)));
            n += n & 1;
            const double dt = len / n;
            for (int k = 0; k <= n; ++k) {
                const double w = (k == 0 || k == n) ? 1.0 / 3.0 : ((k & 1) ? 4.0 / 3.0 : 2.0 / 3.0);
                tail += w * sampler({edge + sign * k * dt, y});
            }
            tail *= dt;
        }
        for (int i = 0; i < s.nx; ++i) out.at(i, j) += tail;
    }
    return out;
}

} // namespace vlt2
