#pragma once

#include <array>
#include <map>
#include <stdexcept>
#include <string>

#include "vlt2/core.hpp"
#include "vlt2/forward.hpp"
#include "vlt2/numerics.hpp"

namespace vlt2 {

enum class DataTag { L, T, M, L1, T1, M1 };

inline const char* to_string(DataTag t) {
    switch (t) {
        case DataTag::L: return "L";
        case DataTag::T: return "T";
        case DataTag::M: return "M";
        case DataTag::L1: return "L1";
        case DataTag::T1: return "T1";
        case DataTag::M1: return "M1";
    }
    return "?";
}

/// Measured V-line transform grids, all sharing one GridSpec. The field f
/// is assumed supported in the disk |x| < support_radius; several
/// recoveries use this to restrict intermediate expressions whose compact
/// support the theorems guarantee.
struct VltData {
    VLineGeometry geom;
    std::map<DataTag, ScalarField2> grids;
    double support_radius = 1.0;

    explicit VltData(const VLineGeometry& g) : geom(g) {}

    void insert(DataTag tag, ScalarField2 field) {
        if (!grids.empty() && !(grids.begin()->second.spec == field.spec))
            throw std::invalid_argument("VltData: grids must share one GridSpec");
        grids.insert_or_assign(tag, std::move(field));
    }

    bool has(DataTag tag) const { return grids.count(tag) != 0; }

    const ScalarField2& require(DataTag tag) const {
        auto it = grids.find(tag);
        if (it == grids.end())
            throw std::invalid_argument(std::string("VltData: missing grid ") + to_string(tag));
        return it->second;
    }

    const GridSpec& spec() const {
        if (grids.empty()) throw std::invalid_argument("VltData: no grids");
        return grids.begin()->second.spec;
    }
};

inline std::pair<VltKind, int> tag_transform(DataTag tag) {
    switch (tag) {
        case DataTag::L: return {VltKind::L, 0};
        case DataTag::T: return {VltKind::T, 0};
        case DataTag::M: return {VltKind::M, 0};
        case DataTag::L1: return {VltKind::L, 1};
        case DataTag::T1: return {VltKind::T, 1};
        case DataTag::M1: return {VltKind::M, 1};
    }
    throw std::invalid_argument("tag_transform: bad tag");
}

/// Forward-simulates the requested transform grids of f.
inline VltData simulate_vlt_data(const SymTensorField2& f, const VLineGeometry& geom,
                                 std::initializer_list<DataTag> tags,
                                 const RayQuadratureConfig& cfg) {
    VltData data(geom);
    for (DataTag tag : tags) {
        const auto [kind, k] = tag_transform(tag);
        data.insert(tag, transform_field(f, geom, kind, k, cfg));
    }
    return data;
}

// ---------------------------------------------------------------------------
// Scalar V-line inversion building blocks
// ---------------------------------------------------------------------------

/// Inverse of V: since D_u D_v V(phi) = -2 u2 d phi / d x2,
/// phi = (1/(2 u2)) D_u D_v integral_0^inf (V phi)(x + t e2) dt.
inline ScalarField2 invert_vline(const ScalarField2& vphi, const VLineGeometry& geom) {
    ScalarField2 s = du_dv_hi(integrate_along_axis(vphi, AxisDir::PlusY), geom);
    s *= 1.0 / (2.0 * geom.u2());
    return s;
}

/// Inverse of the signed transform: D_u D_v V^-(phi) = 2 u1 d phi / d x1,
/// phi = (1/(2 u1)) D_u D_v integral_0^inf (V^- phi)(x - t e1) dt.
inline ScalarField2 invert_vline_signed(const ScalarField2& vmphi, const VLineGeometry& geom) {
    ScalarField2 s = du_dv_hi(integrate_along_axis(vmphi, AxisDir::MinusX), geom);
    s *= 1.0 / (2.0 * geom.u1());
    return s;
}

/// Signed inversion with the strip-constancy extension past the left edge.
inline ScalarField2 invert_vline_signed(const ScalarField2& vmphi, const VLineGeometry& geom,
                                        double support_radius) {
    ScalarField2 s = du_dv_hi(
        integrate_along_axis_extended(vmphi, geom, AxisDir::MinusX, support_radius), geom);
    s *= 1.0 / (2.0 * geom.u1());
    return s;
}

// ---------------------------------------------------------------------------
// Recoveries from {L, T} and {L, T, M}
// ---------------------------------------------------------------------------

/// f11 + f22 from L f and T f via L f + T f = V(f11 + f22).
inline ScalarField2 recover_trace(const VltData& data) {
    return invert_vline(data.require(DataTag::L) + data.require(DataTag::T), data.geom);
}

/// Full recovery for orthogonal branches (u1 = u2):
/// L - T = 4 u1^2 V^-(f12) and M = u1^2 V^-(f22 - f11).
inline SymTensorField2 recover_orthogonal_case(const VltData& data) {
    const VLineGeometry& geom = data.geom;
    if (!geom.orthogonal_branches())
        throw std::invalid_argument("recover_orthogonal_case: needs u1 = u2 (use recover_full_LTM)");
    const double u1sq = geom.u1() * geom.u1();

    ScalarField2 f12 = invert_vline_signed(
        (1.0 / (4.0 * u1sq)) * (data.require(DataTag::L) - data.require(DataTag::T)), geom,
        data.support_radius);
    ScalarField2 diff = invert_vline_signed((1.0 / u1sq) * data.require(DataTag::M), geom,
                                            data.support_radius); // f22 - f11
    ScalarField2 tr = recover_trace(data);

    SymTensorField2 out(data.spec());
    for (std::size_t k = 0; k < out.f11.v.size(); ++k) {
        out.f11.v[k] = 0.5 * (tr.v[k] - diff.v[k]);
        out.f22.v[k] = 0.5 * (tr.v[k] + diff.v[k]);
        out.f12.v[k] = f12.v[k];
    }
    return out;
}

/// Full recovery from L, T, M for u1 != u2. f12 solves the elliptic problem
///   a d2 f12/dx1^2 + b d2 f12/dx2^2 = -g,  f12 = 0 on the boundary,
/// with a = 2 u1^2 (1 + u1^2 - u2^2), b = (u1^2 - u2^2)^2 and
/// g = (1/(2 u2)) [u1^2 d/dx1 D_u D_v (T - L) + (u1^2 - u2^2) d/dx2 D_u D_v M].
/// Then d f11/dx2 follows from
///   u2^2 D_u D_v T - u1^2 D_u D_v L = -4 u1^2 u2 d f12/dx1 + 2 u2 (u1^2 - u2^2) d f11/dx2
/// and f22 from the trace.
inline SymTensorField2 recover_full_LTM(const VltData& data, double elliptic_tol = 1e-10,
                                        double* elliptic_residual_out = nullptr) {
    const VLineGeometry& geom = data.geom;
    if (geom.orthogonal_branches()) {
        if (elliptic_residual_out) *elliptic_residual_out = 0.0;
        return recover_orthogonal_case(data);
    }

    const double u1sq = geom.u1() * geom.u1();
    const double u2sq = geom.u2() * geom.u2();
    const double u2 = geom.u2();
    const double dsq = u1sq - u2sq;

    const ScalarField2 ddL = du_dv_hi(data.require(DataTag::L), geom);
    const ScalarField2 ddT = du_dv_hi(data.require(DataTag::T), geom);
    const ScalarField2 ddM = du_dv_hi(data.require(DataTag::M), geom);

    ScalarField2 g = deriv_x_o4(ddT - ddL);
    g *= u1sq;
    {
        ScalarField2 gm = deriv_y_o4(ddM);
        gm *= dsq;
        g += gm;
    }
    g *= 1.0 / (2.0 * u2);
    g = mask_outside_disk(std::move(g), data.support_radius + 4.0 * data.spec().h);

    const double a = 2.0 * u1sq * (1.0 + dsq);
    const double b = dsq * dsq;
    const EllipticProblem problem(a, b, std::move(g));
    ScalarField2 f12 = solve_elliptic(problem, elliptic_tol);
    if (elliptic_residual_out) *elliptic_residual_out = elliptic_residual(problem, f12);

    // d f11/dx2 and (by the mirrored elimination) d f22/dx2 follow from the
    // same data; both diagonal components are integrated independently and
    // then projected onto the recovered trace, which keeps the trace exact
    // and averages the two integration errors.
    const ScalarField2 df12_dx = deriv_x_o4(f12);
    ScalarField2 df11_dy(data.spec()), df22_dy(data.spec());
    for (std::size_t k = 0; k < df11_dy.v.size(); ++k) {
        df11_dy.v[k] = (u2sq * ddT.v[k] - u1sq * ddL.v[k] + 4.0 * u1sq * u2 * df12_dx.v[k]) /
                       (2.0 * u2 * dsq);
        df22_dy.v[k] = -(u1sq * ddT.v[k] - u2sq * ddL.v[k] + 4.0 * u1sq * u2 * df12_dx.v[k]) /
                       (2.0 * u2 * dsq);
    }
    df11_dy = mask_outside_disk(std::move(df11_dy), data.support_radius + 4.0 * data.spec().h);
    df22_dy = mask_outside_disk(std::move(df22_dy), data.support_radius + 4.0 * data.spec().h);
    ScalarField2 f11 = -1.0 * integrate_along_axis(df11_dy, AxisDir::PlusY);
    ScalarField2 f22 = -1.0 * integrate_along_axis(df22_dy, AxisDir::PlusY);

    const ScalarField2 tr = recover_trace(data);

    SymTensorField2 out(data.spec());
    out.f12 = std::move(f12);
    for (std::size_t k = 0; k < f11.v.size(); ++k) {
        const double shift = 0.5 * (tr.v[k] - f11.v[k] - f22.v[k]);
        f11.v[k] += shift;
        f22.v[k] += shift;
    }
    out.f11 = std::move(f11);
    out.f22 = std::move(f22);
    return out;
}

// ---------------------------------------------------------------------------
// Moment-based recoveries
// ---------------------------------------------------------------------------

namespace detail {

/// Each VLT splits as W = V(p_W) + V^-(q_W) with branch-independent p, q:
///   L: p = u1^2 f11 + u2^2 f22,  q = 2 u1 u2 f12
///   T: p = u2^2 f11 + u1^2 f22,  q = -2 u1 u2 f12
///   M: p = (u1^2 - u2^2) f12,    q = u1 u2 (f22 - f11).
/// The first-moment identity -D_u D_v W^1 = 2 p + (D_u + D_v) W gives p.
inline ScalarField2 p_from_moments(const ScalarField2& w0, const ScalarField2& w1,
                                   const VLineGeometry& geom, double support_radius) {
    ScalarField2 out = du_dv_hi(w1, geom);
    ScalarField2 dy = deriv_y_o4(w0);
    const double u2 = geom.u2();
    for (std::size_t k = 0; k < out.v.size(); ++k)
        out.v[k] = -0.5 * (out.v[k] + 2.0 * u2 * dy.v[k]);
    return mask_outside_disk(std::move(out), support_radius + 4.0 * w0.spec.h);
}

/// The operator chain of the moments theorem isolates q through
///   (D_u D_v X_{e2}/u2 + D_u + D_v) W + D_u D_v W^1 = (2 u1/u2) d/dx1 X_{e2} q.
/// Commuting the final d/dx2 inward (d/dx2 X_{e2} = -1) turns it into
///   q = (u2/(2 u1)) X_{e1}[ -(1/u2) D_u D_v W + 2 u2 d2/dx2^2 W
///                           + D_u D_v (d/dx2 W^1) ],
/// whose bracket is compactly supported, so the last step is a plain
/// cumulative integral instead of a derivative of integrated data.
inline ScalarField2 q_from_moments(const ScalarField2& w0, const ScalarField2& w1,
                                   const VLineGeometry& geom, double support_radius) {
    const double u2 = geom.u2();
    ScalarField2 bracket = du_dv_hi(w0, geom);
    bracket *= -1.0 / u2;
    {
        ScalarField2 syy = second_y_o4(w0);
        syy *= 2.0 * u2;
        bracket += syy;
    }
    bracket += du_dv_hi(deriv_y_o4(w1), geom);
    // the bracket equals -(2 u1/u2) d q/dx1, supported in the data disk
    bracket = mask_outside_disk(std::move(bracket), support_radius + 4.0 * w0.spec.h);
    ScalarField2 out = integrate_along_axis(bracket, AxisDir::PlusX);
    out *= u2 / (2.0 * geom.u1());
    return out;
}

inline void reject_orthogonal(const VLineGeometry& geom, const char* who) {
    const double dsq = geom.u1() * geom.u1() - geom.u2() * geom.u2();
    if (std::abs(dsq) < 1e-9)
        throw GeometryError(std::string(who) + ": degenerate for u1 = u2 (data are dependent there)");
}

/// X_{e2} of d/dx1 of a recovered grid; shows up when the V or V^- part of
/// one transform is eliminated using an already-recovered f12.
inline ScalarField2 shadow_term(const ScalarField2& f12, AxisDir dir) {
    return integrate_along_axis(deriv_x_o4(f12), dir);
}

} // namespace detail

/// f12 from L f and L^1 f alone (the explicit moments formula).
inline ScalarField2 recover_f12_from_L_L1(const VltData& data) {
    ScalarField2 q = detail::q_from_moments(data.require(DataTag::L), data.require(DataTag::L1), data.geom,
                           data.support_radius);
    q *= 1.0 / (2.0 * data.geom.u1() * data.geom.u2());
    return q;
}

/// u1^2 f11 + u2^2 f22 from L f and L^1 f.
inline ScalarField2 recover_weighted_trace_from_L_L1(const VltData& data) {
    return detail::p_from_moments(data.require(DataTag::L), data.require(DataTag::L1), data.geom,
                                  data.support_radius);
}

/// {L, L1, T}: f12 from the moments formula, then the 2x2 system
/// {u1^2 f11 + u2^2 f22, f11 + f22}. Needs u1 != u2.
inline SymTensorField2 recover_full_L_L1_T(const VltData& data) {
    detail::reject_orthogonal(data.geom, "recover_full_L_L1_T");
    const double u1sq = data.geom.u1() * data.geom.u1();
    const double u2sq = data.geom.u2() * data.geom.u2();

    ScalarField2 f12 = recover_f12_from_L_L1(data);
    ScalarField2 wtr = recover_weighted_trace_from_L_L1(data);
    ScalarField2 tr = recover_trace(data);

    SymTensorField2 out(data.spec());
    for (std::size_t k = 0; k < out.f11.v.size(); ++k) {
        const double f11 = (wtr.v[k] - u2sq * tr.v[k]) / (u1sq - u2sq);
        out.f11.v[k] = f11;
        out.f22.v[k] = tr.v[k] - f11;
    }
    out.f12 = std::move(f12);
    return out;
}

/// {T, T1, L}: mirror of the longitudinal case; the T split has
/// p = u2^2 f11 + u1^2 f22 and q = -2 u1 u2 f12. Needs u1 != u2.
inline SymTensorField2 recover_full_T_T1_L(const VltData& data) {
    detail::reject_orthogonal(data.geom, "recover_full_T_T1_L");
    const VLineGeometry& geom = data.geom;
    const double u1sq = geom.u1() * geom.u1();
    const double u2sq = geom.u2() * geom.u2();

    ScalarField2 f12 = detail::q_from_moments(data.require(DataTag::T), data.require(DataTag::T1), geom,
                                                      data.support_radius);
    f12 *= -1.0 / (2.0 * geom.u1() * geom.u2());
    ScalarField2 wtr = detail::p_from_moments(data.require(DataTag::T), data.require(DataTag::T1), geom,
                                                     data.support_radius);
    ScalarField2 tr = recover_trace(data);

    SymTensorField2 out(data.spec());
    for (std::size_t k = 0; k < out.f11.v.size(); ++k) {
        const double f11 = (wtr.v[k] - u1sq * tr.v[k]) / (u2sq - u1sq);
        out.f11.v[k] = f11;
        out.f22.v[k] = tr.v[k] - f11;
    }
    out.f12 = std::move(f12);
    return out;
}

/// {L, L1, M}: f12 and u1^2 f11 + u2^2 f22 come from the longitudinal pair;
/// u1 u2 V^-(f11 - f22) = (u1^2 - u2^2) V(f12) - M f closes the system. The
/// V(f12) part of the signed inversion reduces analytically to
/// -(u1^2 - u2^2)/u1^2 X_{-e1}(d f12/dx2), so only the raw M grid passes
/// through D_u D_v. Valid for every admissible geometry.
inline SymTensorField2 recover_full_L_L1_M(const VltData& data) {
    const VLineGeometry& geom = data.geom;
    const double u1 = geom.u1(), u2 = geom.u2();
    const double dsq = u1 * u1 - u2 * u2;

    ScalarField2 f12 = recover_f12_from_L_L1(data);
    ScalarField2 s = recover_weighted_trace_from_L_L1(data); // u1^2 f11 + u2^2 f22

    // u1 u2 V^-(f11 - f22) = (u1^2 - u2^2) V(f12) - M f: refold the
    // recovered f12 through the forward V transform (integration smooths
    // its noise) and invert the signed transform with strip extension
    ScalarField2 psi;
    {
        // mollify the recovered f12 before it reenters a differentiating
        // chain; the smoothing bias is O(h^2), the gain is the removal of
        // grid-scale noise that the inversion would amplify
        const ScalarField2 f12c = smooth_binomial(
            mask_outside_disk(f12, data.support_radius + 4.0 * f12.spec.h));
        const RayQuadratureConfig cfg = RayQuadratureConfig::for_grid(data.spec());
        psi = vline_field(f12c, geom, cfg);
        const ScalarField2& m = data.require(DataTag::M);
        for (std::size_t k = 0; k < psi.v.size(); ++k)
            psi.v[k] = (dsq * psi.v[k] - m.v[k]) / (u1 * u2);
    }
    ScalarField2 diff = invert_vline_signed(psi, geom, data.support_radius); // f11 - f22

    SymTensorField2 out(data.spec());
    for (std::size_t k = 0; k < out.f11.v.size(); ++k) {
        const double f11 = s.v[k] + u2 * u2 * diff.v[k];
        out.f11.v[k] = f11;
        out.f22.v[k] = f11 - diff.v[k];
    }
    out.f12 = std::move(f12);
    return out;
}

/// {T, T1, M}: as above with the transverse pair; valid for every
/// admissible geometry.
inline SymTensorField2 recover_full_T_T1_M(const VltData& data) {
    const VLineGeometry& geom = data.geom;
    const double u1 = geom.u1(), u2 = geom.u2();
    const double u1sq = u1 * u1;
    const double dsq = u1sq - u2 * u2;

    ScalarField2 f12 = detail::q_from_moments(data.require(DataTag::T), data.require(DataTag::T1), geom,
                                                      data.support_radius);
    f12 *= -1.0 / (2.0 * u1 * u2);
    ScalarField2 s = detail::p_from_moments(data.require(DataTag::T), data.require(DataTag::T1), geom,
                                                     data.support_radius);

    // u1 u2 V^-(f22 - f11) = M f - (u1^2 - u2^2) V(f12)
    ScalarField2 psi;
    {
        const ScalarField2 f12c = smooth_binomial(
            mask_outside_disk(f12, data.support_radius + 4.0 * f12.spec.h));
        const RayQuadratureConfig cfg = RayQuadratureConfig::for_grid(data.spec());
        psi = vline_field(f12c, geom, cfg);
        const ScalarField2& m = data.require(DataTag::M);
        for (std::size_t k = 0; k < psi.v.size(); ++k)
            psi.v[k] = (m.v[k] - dsq * psi.v[k]) / (u1 * u2);
    }
    ScalarField2 diff = invert_vline_signed(psi, geom, data.support_radius); // f22 - f11

    SymTensorField2 out(data.spec());
    for (std::size_t k = 0; k < out.f11.v.size(); ++k) {
        const double f11 = s.v[k] - u1sq * diff.v[k];
        out.f11.v[k] = f11;
        out.f22.v[k] = f11 + diff.v[k];
    }
    out.f12 = std::move(f12);
    return out;
}

/// {M, M1, L}: the mixed pair gives (u1^2 - u2^2) f12 directly and
/// u1 u2 (f22 - f11) through the operator chain; L supplies
/// V(u1^2 f11 + u2^2 f22) = L f - 2 u1 u2 V^-(f12), whose V^- part reduces
/// to -2 u1^2 X_{e2}(d f12/dx1) under the V-inverse. Rejects u1 = u2, where
/// the mixed data lose all f12 content.
inline SymTensorField2 recover_full_M_M1_L(const VltData& data) {
    detail::reject_orthogonal(data.geom, "recover_full_M_M1_L");
    const VLineGeometry& geom = data.geom;
    const double u1 = geom.u1(), u2 = geom.u2();
    const double dsq = u1 * u1 - u2 * u2;

    ScalarField2 f12 = detail::p_from_moments(data.require(DataTag::M), data.require(DataTag::M1), geom,
                                                      data.support_radius);
    f12 *= 1.0 / dsq;
    ScalarField2 diff = detail::q_from_moments(data.require(DataTag::M), data.require(DataTag::M1), geom,
                                                       data.support_radius);
    diff *= 1.0 / (u1 * u2); // f22 - f11

    // u1^2 f11 + u2^2 f22 = V^-1(L) - 2 u1^2 X_{e2}(d f12/dx1)
    ScalarField2 s = invert_vline(data.require(DataTag::L), geom);
    {
        ScalarField2 corr = detail::shadow_term(f12, AxisDir::PlusY);
        corr *= 2.0 * u1 * u1;
        s -= corr;
    }

    SymTensorField2 out(data.spec());
    for (std::size_t k = 0; k < out.f11.v.size(); ++k) {
        const double f11 = s.v[k] - u2 * u2 * diff.v[k];
        out.f11.v[k] = f11;
        out.f22.v[k] = f11 + diff.v[k];
    }
    out.f12 = std::move(f12);
    return out;
}

/// {M, M1, T}: as above with V(u2^2 f11 + u1^2 f22) = T f + 2 u1 u2 V^-(f12).
inline SymTensorField2 recover_full_M_M1_T(const VltData& data) {
    detail::reject_orthogonal(data.geom, "recover_full_M_M1_T");
    const VLineGeometry& geom = data.geom;
    const double u1 = geom.u1(), u2 = geom.u2();
    const double dsq = u1 * u1 - u2 * u2;

    ScalarField2 f12 = detail::p_from_moments(data.require(DataTag::M), data.require(DataTag::M1), geom,
                                                      data.support_radius);
    f12 *= 1.0 / dsq;
    ScalarField2 diff = detail::q_from_moments(data.require(DataTag::M), data.require(DataTag::M1), geom,
                                                       data.support_radius);
    diff *= 1.0 / (u1 * u2); // f22 - f11

    // u2^2 f11 + u1^2 f22 = V^-1(T) + 2 u1^2 X_{e2}(d f12/dx1)
    ScalarField2 s = invert_vline(data.require(DataTag::T), geom);
    {
        ScalarField2 corr = detail::shadow_term(f12, AxisDir::PlusY);
        corr *= 2.0 * u1 * u1;
        s += corr;
    }

    SymTensorField2 out(data.spec());
    for (std::size_t k = 0; k < out.f11.v.size(); ++k) {
        const double f11 = s.v[k] - u1 * u1 * diff.v[k];
        out.f11.v[k] = f11;
        out.f22.v[k] = f11 + diff.v[k];
    }
    out.f12 = std::move(f12);
    return out;
}

/// Residual of the k = 2 moment recurrence
///   -D_u D_v W^2 = 2 W^0 + 2 (D_u + D_v) W^1,
/// which should vanish to discretization accuracy for consistent data.
inline ScalarField2 moment_recurrence_residual(const ScalarField2& w0, const ScalarField2& w1,
                                               const ScalarField2& w2, const VLineGeometry& geom) {
    ScalarField2 out = du_dv(w2, geom);
    ScalarField2 dy = deriv_y(w1);
    const double u2 = geom.u2();
    for (std::size_t k = 0; k < out.v.size(); ++k)
        out.v[k] = -out.v[k] - 2.0 * w0.v[k] - 4.0 * u2 * dy.v[k];
    return out;
}

} // namespace vlt2
