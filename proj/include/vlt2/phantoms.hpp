#pragma once

#include <cmath>
#include <stdexcept>

#include "vlt2/core.hpp"

namespace vlt2 {

/// Scaled translate of the prototype bump exp(-1/(1-|x|^2)): amplitude at
/// the center is amplitude * e^{-1}, support is the open disk of the given
/// radius. The support disk must sit strictly inside the unit disk.
struct BumpSpec {
    Vec2 center{0.0, 0.0};
    double radius = 0.75;
    double amplitude = 1.0;

    void validate() const {
        if (!(radius > 0.0)) throw std::invalid_argument("BumpSpec: radius must be > 0");
        if (norm(center) + radius >= 1.0)
            throw std::invalid_argument("BumpSpec: support must lie strictly inside the unit disk");
    }
};

inline double bump_value(const BumpSpec& b, Vec2 p) {
    const Vec2 d = p - b.center;
    const double s2 = dot(d, d) / (b.radius * b.radius);
    if (s2 >= 1.0) return 0.0;
    return b.amplitude * std::exp(-1.0 / (1.0 - s2));
}

/// Closed-form gradient; smooth everywhere (all derivatives vanish at the
/// support boundary).
inline Vec2 bump_gradient(const BumpSpec& b, Vec2 p) {
    const Vec2 d = p - b.center;
    const double r2 = b.radius * b.radius;
    const double s2 = dot(d, d) / r2;
    if (s2 >= 1.0) return {0.0, 0.0};
    const double q = 1.0 - s2;
    const double val = b.amplitude * std::exp(-1.0 / q);
    const double factor = -2.0 / (q * q * r2);
    return {val * factor * d.x1, val * factor * d.x2};
}

inline ScalarField2 bump(const BumpSpec& b, const GridSpec& grid) {
    b.validate();
    ScalarField2 out(grid);
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) out.at(i, j) = bump_value(b, grid.point(i, j));
    return out;
}

/// Tensor phantom with three independent bump components.
inline SymTensorField2 bump_tensor(const BumpSpec& b11, const BumpSpec& b12, const BumpSpec& b22,
                                   const GridSpec& grid) {
    SymTensorField2 f(grid);
    f.f11 = bump(b11, grid);
    f.f12 = bump(b12, grid);
    f.f22 = bump(b22, grid);
    return f;
}

// ---------------------------------------------------------------------------
// Kernel fields: tensor fields annihilated by one of the V-line transforms.
// ---------------------------------------------------------------------------

/// L-kernel field from potential phi and free component f22:
/// d phi = (u1^2 f11 + u2^2 f22, 2 u1^2 f12).
inline SymTensorField2 kernel_field_L(const ScalarField2& phi, const ScalarField2& f22_choice,
                                      const VLineGeometry& geom) {
    if (!(phi.spec == f22_choice.spec))
        throw std::invalid_argument("kernel_field_L: grids must match");
    const double u1sq = geom.u1() * geom.u1();
    const double u2sq = geom.u2() * geom.u2();
    ScalarField2 px = deriv_x_o4(phi), py = deriv_y_o4(phi);
    SymTensorField2 f(phi.spec);
    for (std::size_t k = 0; k < f.f11.v.size(); ++k) {
        f.f22.v[k] = f22_choice.v[k];
        f.f11.v[k] = (px.v[k] - u2sq * f22_choice.v[k]) / u1sq;
        f.f12.v[k] = py.v[k] / (2.0 * u1sq);
    }
    return f;
}

/// T-kernel field: d phi = (u2^2 f11 + u1^2 f22, -2 u1^2 f12).
inline SymTensorField2 kernel_field_T(const ScalarField2& phi, const ScalarField2& f22_choice,
                                      const VLineGeometry& geom) {
    if (!(phi.spec == f22_choice.spec))
        throw std::invalid_argument("kernel_field_T: grids must match");
    const double u1sq = geom.u1() * geom.u1();
    const double u2sq = geom.u2() * geom.u2();
    ScalarField2 px = deriv_x_o4(phi), py = deriv_y_o4(phi);
    SymTensorField2 f(phi.spec);
    for (std::size_t k = 0; k < f.f11.v.size(); ++k) {
        f.f22.v[k] = f22_choice.v[k];
        f.f11.v[k] = (px.v[k] - u1sq * f22_choice.v[k]) / u2sq;
        f.f12.v[k] = -py.v[k] / (2.0 * u1sq);
    }
    return f;
}

/// M-kernel field: d phi = ((u1^2 - u2^2) f12, -u1^2 (f11 - f22)), with the
/// trace as the free component. For orthogonal branches the first relation
/// forces d phi / d x1 = 0; any phi violating that is rejected.
inline SymTensorField2 kernel_field_M(const ScalarField2& phi, const ScalarField2& trace_choice,
                                      const VLineGeometry& geom) {
    if (!(phi.spec == trace_choice.spec))
        throw std::invalid_argument("kernel_field_M: grids must match");
    const double u1sq = geom.u1() * geom.u1();
    const double u2sq = geom.u2() * geom.u2();
    const double denom = u1sq - u2sq;
    ScalarField2 px = deriv_x_o4(phi), py = deriv_y_o4(phi);
    SymTensorField2 f(phi.spec);
    const bool degenerate = std::abs(denom) <= 1e-12;
    if (degenerate) {
        const double scale = std::max(phi.max_abs(), 1e-30);
        if (px.max_abs() > 1e-8 * scale / phi.spec.h)
            throw std::invalid_argument(
                "kernel_field_M: with u1 = u2 the potential must not depend on x1");
    }
    for (std::size_t k = 0; k < f.f11.v.size(); ++k) {
        const double f12 = degenerate ? 0.0 : px.v[k] / denom;
        const double diff = -py.v[k] / u1sq; // f11 - f22
        const double tr = trace_choice.v[k];
        f.f12.v[k] = f12;
        f.f11.v[k] = 0.5 * (tr + diff);
        f.f22.v[k] = 0.5 * (tr - diff);
    }
    return f;
}

/// The nonzero field diag(u2^2, -u1^2) phi annihilated by both L and its
/// first moment transform.
inline SymTensorField2 counterexample_field(const ScalarField2& phi, const VLineGeometry& geom) {
    SymTensorField2 f(phi.spec);
    const double u1sq = geom.u1() * geom.u1();
    const double u2sq = geom.u2() * geom.u2();
    for (std::size_t k = 0; k < f.f11.v.size(); ++k) {
        f.f11.v[k] = u2sq * phi.v[k];
        f.f22.v[k] = -u1sq * phi.v[k];
    }
    return f;
}

// ---------------------------------------------------------------------------
// Structured fields
// ---------------------------------------------------------------------------

enum class StructuredKind { dg, dperp_g, d2, dperp2, ddperp };

inline SymTensorField2 structured_field(StructuredKind kind, const VectorField2& g) {
    switch (kind) {
        case StructuredKind::dg: return sym_derivative(g);
        case StructuredKind::dperp_g: return sym_derivative_perp(g);
        default: throw std::invalid_argument("structured_field: this kind takes a scalar potential");
    }
}

inline SymTensorField2 structured_field(StructuredKind kind, const ScalarField2& phi) {
    switch (kind) {
        case StructuredKind::d2: return sym_derivative(gradient(phi));
        case StructuredKind::dperp2: return sym_derivative_perp(gradient_perp(phi));
        case StructuredKind::ddperp: return sym_derivative(gradient_perp(phi));
        default: throw std::invalid_argument("structured_field: this kind takes a vector generator");
    }
}

} // namespace vlt2
