#pragma once

#include <cmath>
#include <stdexcept>

#include "vlt2/core.hpp"
#include "vlt2/forward.hpp"
#include "vlt2/numerics.hpp"

namespace vlt2 {

enum class PdeKind { Degenerate, Elliptic, Hyperbolic };

/// The second-order PDE met by the structured-field recoveries has leading
/// coefficients (2 u1^2, u1^2 - u2^2); its character is decided by the sign
/// of the second one.
struct PdeRegime {
    PdeKind kind = PdeKind::Degenerate;
    double a = 0.0;
    double c = 0.0; // magnitude of the x2 coefficient
};

inline PdeRegime classify_regime(const VLineGeometry& geom) {
    const double u1sq = geom.u1() * geom.u1();
    const double u2sq = geom.u2() * geom.u2();
    PdeRegime r;
    r.a = 2.0 * u1sq;
    const double d = u1sq - u2sq;
    if (std::abs(d) <= 1e-12) {
        r.kind = PdeKind::Degenerate;
        r.c = 0.0;
    } else if (d > 0.0) {
        r.kind = PdeKind::Elliptic;
        r.c = d;
    } else {
        r.kind = PdeKind::Hyperbolic;
        r.c = -d;
    }
    return r;
}

namespace detail {

/// Solves a w_x1x1 + b w_x2x2 = rhs, dispatching on the sign of b.
inline ScalarField2 solve_signed_pde(double a, double b, const ScalarField2& rhs, double tol) {
    if (std::abs(b) <= 1e-12) return solve_degenerate_double_integral(a, rhs);
    if (b > 0.0) return solve_elliptic(EllipticProblem(a, b, -1.0 * rhs), tol);
    return solve_hyperbolic(a, -b, rhs, rhs.spec.x_min);
}

} // namespace detail

/// Recovery of g for f = d g from L f and M f. The data give
/// g2 = -(1/(2 u2)) L f pointwise; g1 solves
///   2 u1^2 d2 g1/dx1^2 + (u1^2 - u2^2) d2 g1/dx2^2 = -(1/(2 u2)) D_u D_v h,
/// h = 2 M f + V(d g2/dx1), with regime-dependent solver.
inline VectorField2 recover_dg(const ScalarField2& dataL, const ScalarField2& dataM,
                               const VLineGeometry& geom, double support_radius = 1.0,
                               double tol = 1e-10) {
    if (!(dataL.spec == dataM.spec)) throw std::invalid_argument("recover_dg: grids must match");
    const double u2 = geom.u2();

    VectorField2 g(dataL.spec);
    g.g2 = (-1.0 / (2.0 * u2)) * dataL;

    const RayQuadratureConfig cfg = RayQuadratureConfig::for_grid(dataL.spec);
    ScalarField2 h = vline_field(deriv_x_o4(g.g2), geom, cfg);
    for (std::size_t k = 0; k < h.v.size(); ++k) h.v[k] += 2.0 * dataM.v[k];

    // the right side equals the PDE operator applied to the compactly
    // supported g1, so it may be restricted to the support disk
    ScalarField2 rhs = du_dv_hi(h, geom);
    rhs *= -1.0 / (2.0 * u2);
    rhs = mask_outside_disk(std::move(rhs), support_radius + 4.0 * rhs.spec.h);
    const double u1sq = geom.u1() * geom.u1();
    g.g1 = detail::solve_signed_pde(2.0 * u1sq, u1sq - u2 * u2, rhs, tol);
    return g;
}

/// Recovery of g for f = d^perp g from T f and M f; the mirror pipeline
/// with g1 = (1/(2 u2)) T f and h = -2 M f - V(d g1/dx1) feeding the same
/// PDE for g2.
inline VectorField2 recover_dperp_g(const ScalarField2& dataT, const ScalarField2& dataM,
                                    const VLineGeometry& geom, double support_radius = 1.0,
                                    double tol = 1e-10) {
    if (!(dataT.spec == dataM.spec)) throw std::invalid_argument("recover_dperp_g: grids must match");
    const double u2 = geom.u2();

    VectorField2 g(dataT.spec);
    g.g1 = (1.0 / (2.0 * u2)) * dataT;

    const RayQuadratureConfig cfg = RayQuadratureConfig::for_grid(dataT.spec);
    ScalarField2 h = vline_field(deriv_x_o4(g.g1), geom, cfg);
    for (std::size_t k = 0; k < h.v.size(); ++k) h.v[k] = -2.0 * dataM.v[k] - h.v[k];

    ScalarField2 rhs = du_dv_hi(h, geom);
    rhs *= -1.0 / (2.0 * u2);
    rhs = mask_outside_disk(std::move(rhs), support_radius + 4.0 * rhs.spec.h);
    const double u1sq = geom.u1() * geom.u1();
    g.g2 = detail::solve_signed_pde(2.0 * u1sq, u1sq - u2 * u2, rhs, tol);
    return g;
}

enum class PotentialSource { L, T, M };

/// phi for f = d^2 phi:
///   phi = (1/(2 u2)) int_0^inf L f(x + s e2) ds
///       = -(1/(2 u2)) int_0^inf M f(x + s e1) ds.
inline ScalarField2 recover_potential_d2(const ScalarField2& data, const VLineGeometry& geom,
                                         PotentialSource source, double support_radius = 1.0) {
    const double c = 1.0 / (2.0 * geom.u2());
    switch (source) {
        case PotentialSource::L: return c * integrate_along_axis(data, AxisDir::PlusY);
        case PotentialSource::M:
            return -c * integrate_along_axis_extended(data, geom, AxisDir::PlusX, support_radius);
        default: throw std::invalid_argument("recover_potential_d2: source must be L or M");
    }
}

/// phi for f = (d^perp)^2 phi:
///   phi = (1/(2 u2)) int_0^inf T f(x + s e2) ds
///       = (1/(2 u2)) int_0^inf M f(x + s e1) ds.
inline ScalarField2 recover_potential_dperp2(const ScalarField2& data, const VLineGeometry& geom,
                                             PotentialSource source, double support_radius = 1.0) {
    const double c = 1.0 / (2.0 * geom.u2());
    switch (source) {
        case PotentialSource::T: return c * integrate_along_axis(data, AxisDir::PlusY);
        case PotentialSource::M:
            return c * integrate_along_axis_extended(data, geom, AxisDir::PlusX, support_radius);
        default: throw std::invalid_argument("recover_potential_dperp2: source must be T or M");
    }
}

/// phi for f = d d^perp phi:
///   phi = (1/(2 u2)) int_0^inf L f(x + s e1) ds
///       = -(1/(2 u2)) int_0^inf T f(x + s e1) ds.
inline ScalarField2 recover_potential_ddperp(const ScalarField2& data, const VLineGeometry& geom,
                                             PotentialSource source, double support_radius = 1.0) {
    const double c = 1.0 / (2.0 * geom.u2());
    switch (source) {
        case PotentialSource::L:
            return c * integrate_along_axis_extended(data, geom, AxisDir::PlusX, support_radius);
        case PotentialSource::T:
            return -c * integrate_along_axis_extended(data, geom, AxisDir::PlusX, support_radius);
        default: throw std::invalid_argument("recover_potential_ddperp: source must be L or T");
    }
}

/// M route for f = d d^perp phi:
///   (1 + 2 u1^2) d2 phi/dx1^2 + (u1^2 - u2^2) d2 phi/dx2^2
///       = -(1/u2) X_{e2}(D_u D_v M f).
/// The x1 coefficient always exceeds 1, so the character follows the sign
/// of u1^2 - u2^2 alone.
inline ScalarField2 recover_potential_ddperp_from_M(const ScalarField2& dataM,
                                                    const VLineGeometry& geom,
                                                    double support_radius = 1.0, double tol = 1e-10) {
    const double u1sq = geom.u1() * geom.u1();
    const double u2sq = geom.u2() * geom.u2();
    ScalarField2 ddm = mask_outside_disk(du_dv_hi(dataM, geom), support_radius + 4.0 * dataM.spec.h);
    ScalarField2 rhs = integrate_along_axis(ddm, AxisDir::PlusY);
    rhs *= -1.0 / geom.u2();
    // the right side is the PDE operator applied to the compact phi
    rhs = mask_outside_disk(std::move(rhs), support_radius + 4.0 * dataM.spec.h);
    return detail::solve_signed_pde(1.0 + 2.0 * u1sq, u1sq - u2sq, rhs, tol);
}

} // namespace vlt2
