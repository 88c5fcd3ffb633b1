#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <iostream>
#include <stdexcept>
#include <vector>

#include "vlt2/core.hpp"
#include "vlt2/forward.hpp"
#include "vlt2/parallel.hpp"
#include "vlt2/radon.hpp"

namespace vlt2 {

struct StarBranch {
    Vec2 gamma;
    double c = 1.0;
};

/// Star of m >= 2 distinct unit branch directions with nonzero weights.
class StarGeometry {
public:
    explicit StarGeometry(std::vector<StarBranch> branches) : branches_(std::move(branches)) {
        if (branches_.size() < 2) throw std::invalid_argument("StarGeometry: need at least 2 branches");
        for (const auto& b : branches_) {
            if (std::abs(norm(b.gamma) - 1.0) > 1e-12)
                throw std::invalid_argument("StarGeometry: branch directions must be unit vectors");
            if (b.c == 0.0) throw std::invalid_argument("StarGeometry: weights must be nonzero");
        }
        for (std::size_t i = 0; i < branches_.size(); ++i)
            for (std::size_t j = i + 1; j < branches_.size(); ++j)
                if (norm(branches_[i].gamma - branches_[j].gamma) <= 1e-12)
                    throw std::invalid_argument("StarGeometry: branch directions must be distinct");
    }

    /// Branches given as angles (degrees) with weights.
    static StarGeometry from_angles_deg(const std::vector<std::pair<double, double>>& angle_weight) {
        std::vector<StarBranch> b;
        b.reserve(angle_weight.size());
        for (auto [deg, c] : angle_weight) {
            const double rad = deg * M_PI / 180.0;
            b.push_back({Vec2{std::cos(rad), std::sin(rad)}, c});
        }
        return StarGeometry(std::move(b));
    }

    int m() const { return static_cast<int>(branches_.size()); }
    const std::vector<StarBranch>& branches() const { return branches_; }

    /// Radius outside which at most one branch ray from any vertex can meet
    /// the support disk of radius r1: r1 / min over pairs of sin(angle/2).
    double data_disk_radius(double r1 = 1.0) const {
        double min_half_sin = 1.0;
        for (std::size_t i = 0; i < branches_.size(); ++i)
            for (std::size_t j = i + 1; j < branches_.size(); ++j) {
                const double c = dot(branches_[i].gamma, branches_[j].gamma);
                min_half_sin = std::min(min_half_sin, std::sqrt(std::max(0.0, 0.5 * (1.0 - c))));
            }
        return r1 / std::max(min_half_sin, 1e-12);
    }

private:
    std::vector<StarBranch> branches_;
};

/// Star transform data: the longitudinal, mixed, and transverse scalar
/// grids, all on one GridSpec.
struct StarData {
    ScalarField2 lon;
    ScalarField2 mix;
    ScalarField2 trans;

    StarData() = default;
    explicit StarData(const GridSpec& s) : lon(s), mix(s), trans(s) {}
    const GridSpec& spec() const { return lon.spec; }
};

/// S f = sum_i c_i X_{gamma_i} (<f, gamma_i^2>, <f, gamma_i . gamma_i^perp>,
/// <f, (gamma_i^perp)^2>). With m = 2, branches (u, v) and unit weights the
/// components coincide with (L f, M f, T f).
inline StarData star_forward(const SymTensorField2& f, const StarGeometry& geom,
                             const RayQuadratureConfig& cfg) {
    const GridSpec& spec = f.spec();
    StarData out(spec);
    struct BranchProj {
        Vec2 gamma;
        double c;
        SymTensor2 lon, mix, trans;
    };
    std::vector<BranchProj> proj;
    for (const auto& b : geom.branches()) {
        const Vec2 gp = perp(b.gamma);
        proj.push_back({b.gamma, b.c, sym_outer(b.gamma, b.gamma), sym_outer(b.gamma, gp),
                        sym_outer(gp, gp)});
    }
    parallel_for(spec.ny, [&](int j0, int j1) {
        for (int j = j0; j < j1; ++j)
            for (int i = 0; i < spec.nx; ++i) {
                const Vec2 x = spec.point(i, j);
                double lon = 0.0, mix = 0.0, trans = 0.0;
                for (const auto& p : proj) {
                    lon += p.c * beam_projected(f, p.gamma, x, p.lon, 0, cfg);
                    mix += p.c * beam_projected(f, p.gamma, x, p.mix, 0, cfg);
                    trans += p.c * beam_projected(f, p.gamma, x, p.trans, 0, cfg);
                }
                out.lon.at(i, j) = lon;
                out.mix.at(i, j) = mix;
                out.trans.at(i, j) = trans;
            }
    });
    return out;
}

// ---------------------------------------------------------------------------
// The xi-dependent tensors gamma(xi), gamma^dag(xi), gamma^perp(xi)
// ---------------------------------------------------------------------------

struct GammaVectors {
    SymTensor2 g;      // gamma(xi)
    SymTensor2 g_dag;  // gamma^dag(xi)
    SymTensor2 g_perp; // gamma^perp(xi)
};

inline GammaVectors gamma_vectors(const StarGeometry& geom, Vec2 xi, double eps_z1 = 1e-9) {
    GammaVectors out;
    for (const auto& b : geom.branches()) {
        const double denom = dot(xi, b.gamma);
        if (std::abs(denom) <= eps_z1)
            throw GeometryError("gamma_vectors: xi is a type-1 singular direction");
        const Vec2 gp = perp(b.gamma);
        const double w = -b.c / denom;
        out.g = out.g + w * sym_outer(b.gamma, b.gamma);
        out.g_dag = out.g_dag + w * sym_outer(b.gamma, gp);
        out.g_perp = out.g_perp + w * sym_outer(gp, gp);
    }
    return out;
}

namespace detail {

/// Numerator polynomials of the gamma vectors over the common denominator
/// kappa(xi) = prod_j xi . gamma_j:
///   P_11 = sum_i kappa_i c_i g_i1^2, P_12 = sum_i kappa_i c_i g_i1 g_i2,
///   P_22 = sum_i kappa_i c_i g_i2^2, and P_11 + P_22 = sum_i kappa_i c_i.
struct PComponents {
    double p11 = 0.0, p12 = 0.0, p22 = 0.0;
    double kappa = 1.0;
};

inline PComponents p_components(const StarGeometry& geom, Vec2 xi) {
    const auto& br = geom.branches();
    const int m = geom.m();
    std::vector<double> d(m);
    for (int i = 0; i < m; ++i) d[i] = dot(xi, br[i].gamma);
    PComponents out;
    for (int i = 0; i < m; ++i) out.kappa *= d[i];
    for (int i = 0; i < m; ++i) {
        double ki = 1.0;
        for (int j = 0; j < m; ++j)
            if (j != i) ki *= d[j];
        const Vec2 g = br[i].gamma;
        out.p11 += ki * br[i].c * g.x1 * g.x1;
        out.p12 += ki * br[i].c * g.x1 * g.x2;
        out.p22 += ki * br[i].c * g.x2 * g.x2;
    }
    return out;
}

inline double det3(const std::array<std::array<double, 3>, 3>& m) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

} // namespace detail

/// Determinant of [gamma; gamma^dag; gamma^perp] via the closed P-polynomial
/// form: -(1/(2 kappa^3)) {4 P12^2 + (P11 - P22)^2} (P11 + P22).
inline double q_det_formula(const StarGeometry& geom, Vec2 xi) {
    const auto p = detail::p_components(geom, xi);
    const double diff = p.p11 - p.p22;
    return -(4.0 * p.p12 * p.p12 + diff * diff) * (p.p11 + p.p22) /
           (2.0 * p.kappa * p.kappa * p.kappa);
}

struct QMatrix {
    Vec2 xi;
    SymTensor2 gamma, gamma_dag, gamma_perp;
    double det = 0.0;
};

/// Q(xi) with rows gamma(xi), gamma^dag(xi), gamma^perp(xi). The determinant
/// is computed both by 3x3 cofactor expansion of the rows and by the closed
/// P-polynomial formula; disagreement flags an internal inconsistency.
inline QMatrix build_Q(const StarGeometry& geom, Vec2 xi) {
    const GammaVectors gv = gamma_vectors(geom, xi);
    QMatrix q;
    q.xi = xi;
    q.gamma = gv.g;
    q.gamma_dag = gv.g_dag;
    q.gamma_perp = gv.g_perp;
    q.det = detail::det3({{{gv.g.f11, gv.g.f12, gv.g.f22},
                           {gv.g_dag.f11, gv.g_dag.f12, gv.g_dag.f22},
                           {gv.g_perp.f11, gv.g_perp.f12, gv.g_perp.f22}}});
    const double ref = q_det_formula(geom, xi);
    const double scale = std::abs(gv.g.f11) + std::abs(gv.g.f12) + std::abs(gv.g.f22) +
                         std::abs(gv.g_dag.f12) + std::abs(gv.g_perp.f11) + 1.0;
    if (std::abs(q.det - ref) > 1e-9 * std::max({std::abs(q.det), std::abs(ref), scale * scale * scale}))
        throw std::logic_error("build_Q: cofactor and closed-form determinants disagree");
    return q;
}

// ---------------------------------------------------------------------------
// Singular directions
// ---------------------------------------------------------------------------

struct SingularSets {
    std::vector<double> z1; // angles in [0, pi)
    std::vector<double> z2;
    bool z2_is_full_circle = false;
};

/// Z1 = directions orthogonal to a branch (closed form). Z2 = zeros of
/// gamma^dag (the pair P12 = 0, P11 - P22 = 0) together with zeros of
/// sum_i c_i / (xi . gamma_i), located by sign-change scan and bisection and
/// classified as finite or all of S^1 minus Z1.
inline SingularSets singular_sets(const StarGeometry& geom, int angle_samples = 4096) {
    SingularSets out;
    auto wrap = [](double t) {
        t = std::fmod(t, M_PI);
        if (t < 0.0) t += M_PI;
        return t;
    };
    for (const auto& b : geom.branches())
        out.z1.push_back(wrap(std::atan2(b.gamma.x2, b.gamma.x1) + 0.5 * M_PI));
    std::sort(out.z1.begin(), out.z1.end());
    out.z1.erase(std::unique(out.z1.begin(), out.z1.end(),
                             [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                 out.z1.end());

    auto p12_fn = [&](double th) {
        return detail::p_components(geom, {std::cos(th), std::sin(th)}).p12;
    };
    auto pdiff_fn = [&](double th) {
        const auto p = detail::p_components(geom, {std::cos(th), std::sin(th)});
        return p.p11 - p.p22;
    };
    auto ptrace_fn = [&](double th) {
        const auto p = detail::p_components(geom, {std::cos(th), std::sin(th)});
        return p.p11 + p.p22;
    };

    const int n = std::max(angle_samples, 64);
    std::vector<double> th(n + 1), a(n + 1), b(n + 1), c(n + 1);
    double max_a = 0.0, max_b = 0.0, max_c = 0.0;
    for (int i = 0; i <= n; ++i) {
        th[i] = M_PI * i / n;
        a[i] = p12_fn(th[i]);
        b[i] = pdiff_fn(th[i]);
        c[i] = ptrace_fn(th[i]);
        max_a = std::max(max_a, std::abs(a[i]));
        max_b = std::max(max_b, std::abs(b[i]));
        max_c = std::max(max_c, std::abs(c[i]));
    }
    // natural magnitude of the P polynomials: weights times unit products
    double weight_scale = 0.0;
    for (const auto& b2 : geom.branches()) weight_scale += std::abs(b2.c);
    const double scale = std::max({max_a, max_b, max_c, weight_scale});
    const bool a_zero = max_a <= 1e-12 * scale;
    const bool b_zero = max_b <= 1e-12 * scale;
    const bool c_zero = max_c <= 1e-12 * scale;
    if ((a_zero && b_zero) || c_zero) {
        out.z2_is_full_circle = true;
        return out;
    }

    auto bisect = [&](auto&& fn, double lo, double hi) {
        double flo = fn(lo);
        for (int it = 0; it < 80 && hi - lo > 1e-13; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = fn(mid);
            if ((flo <= 0.0) == (fm <= 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    };
    auto roots_of = [&](auto&& fn, const std::vector<double>& samples) {
        std::vector<double> roots;
        for (int i = 0; i < n; ++i) {
            if (samples[i] == 0.0) roots.push_back(th[i]);
            else if ((samples[i] < 0.0) != (samples[i + 1] < 0.0))
                roots.push_back(bisect(fn, th[i], th[i + 1]));
        }
        return roots;
    };

    std::vector<double> dag_roots;
    if (a_zero) {
        dag_roots = roots_of(pdiff_fn, b);
    } else if (b_zero) {
        dag_roots = roots_of(p12_fn, a);
    } else {
        for (double r : roots_of(p12_fn, a))
            if (std::abs(pdiff_fn(r)) <= 1e-9 * scale) dag_roots.push_back(r);
        for (double r : roots_of(pdiff_fn, b))
            if (std::abs(p12_fn(r)) <= 1e-9 * scale) dag_roots.push_back(r);
    }
    std::vector<double> z2 = dag_roots;
    for (double r : roots_of(ptrace_fn, c)) {
        bool in_z1 = false;
        for (double z : out.z1)
            if (std::abs(wrap(r - z + 0.5 * M_PI) - 0.5 * M_PI) < 1e-9) in_z1 = true;
        if (!in_z1) z2.push_back(r);
    }
    for (double& r : z2) r = wrap(r);
    std::sort(z2.begin(), z2.end());
    z2.erase(std::unique(z2.begin(), z2.end(),
                         [](double x, double y) { return std::abs(x - y) < 1e-10; }),
             z2.end());
    out.z2 = std::move(z2);
    return out;
}

/// True iff m is even and the branches pair up as gamma_{i+k} = -gamma_i
/// with equal weights.
inline bool is_symmetric(const StarGeometry& geom) {
    const int m = geom.m();
    if (m % 2 != 0) return false;
    const auto& br = geom.branches();
    std::vector<bool> used(m, false);
    for (int i = 0; i < m; ++i) {
        if (used[i]) continue;
        bool matched = false;
        for (int j = i + 1; j < m; ++j) {
            if (used[j]) continue;
            if (norm(br[j].gamma + br[i].gamma) <= 1e-12 && std::abs(br[j].c - br[i].c) <= 1e-12) {
                used[i] = used[j] = true;
                matched = true;
                break;
            }
        }
        if (!matched) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Inversion
// ---------------------------------------------------------------------------

struct StarInvertOptions {
    double exclusion_margin_deg = 0.5; // drop angles this close to Z1 u Z2
    double truncation_radius = 0.0;    // 0 = 4 * data disk radius
    double support_radius = 1.0;       // radius of the disk containing supp f
    double condition_warn = 1e8;
};

namespace detail {

/// Samples the three star-data grids anywhere in the plane. Outside the
/// grid box the data are extended along the active branch: beyond the data
/// disk at most one branch ray meets the support, and the transform value
/// is constant along translations in that direction until the box is
/// reentered.
class StarDataSampler {
public:
    StarDataSampler(const StarData& data, const StarGeometry& geom, double support_radius)
        : data_(data), geom_(geom), r1_(support_radius) {}

    std::array<double, 3> operator()(Vec2 p) const {
        const GridSpec& s = data_.spec();
        if (s.contains(p)) return gather(p);
        for (const auto& b : geom_.branches()) {
            const double t_star = -dot(p, b.gamma);
            if (t_star <= 0.0) continue;
            const double d2 = dot(p, p) - t_star * t_star;
            if (d2 >= r1_ * r1_) continue;
            const auto seg = clip_ray(s, p, b.gamma, 2.0 * t_star + 2.0 * r1_);
            if (seg.empty()) continue;
            const double t = seg.t0 + 0.25 * s.h;
            return gather({p.x1 + t * b.gamma.x1, p.x2 + t * b.gamma.x2});
        }
        return {0.0, 0.0, 0.0};
    }

private:
    std::array<double, 3> gather(Vec2 p) const {
        const auto q = locate(data_.spec(), p);
        if (!q.inside) return {0.0, 0.0, 0.0};
        return {detail::gather(data_.lon, q), detail::gather(data_.mix, q),
                detail::gather(data_.trans, q)};
    }

    const StarData& data_;
    const StarGeometry& geom_;
    double r1_;
};

} // namespace detail

/// Inverts the star transform through component-wise Radon data:
/// (1) Radon transform of the data over angles clear of Z1 u Z2,
/// (2) offset derivative, (3) per-angle 3x3 solve with Q(xi) (the middle
/// column doubled, matching the tensor pairing of (f11, f12, f22)),
/// (4) component-wise filtered backprojection.
inline SymTensorField2 star_invert(const StarData& data, const StarGeometry& geom,
                                   const SinogramSpec& sino_spec, const GridSpec& grid,
                                   const StarInvertOptions& opts = {}) {
    if (is_symmetric(geom))
        throw GeometryError("star_invert: symmetric star transform is not invertible");
    const SingularSets sing = singular_sets(geom);
    if (sing.z2_is_full_circle)
        throw GeometryError("star_invert: singular directions cover the circle; not invertible");
    sino_spec.validate();

    const double r2 = geom.data_disk_radius(opts.support_radius);
    {
        const GridSpec& s = data.spec();
        const double half = std::min({-s.x_min, s.x_max, -s.y_min, s.y_max});
        if (half < r2 - 1e-9)
            std::cerr << "star_invert: warning: data box half-width " << half
                      << " is below the data disk radius " << r2
                      << "; strip extension may be inexact\n";
    }

    // Uniform angles over the complement of the exclusion windows.
    const double margin = opts.exclusion_margin_deg * M_PI / 180.0;
    std::vector<double> blocked = sing.z1;
    blocked.insert(blocked.end(), sing.z2.begin(), sing.z2.end());
    std::sort(blocked.begin(), blocked.end());
    std::vector<std::pair<double, double>> allowed;
    if (blocked.empty()) {
        allowed.emplace_back(0.0, M_PI);
    } else {
        for (std::size_t i = 0; i < blocked.size(); ++i) {
            const double a = blocked[i] + margin;
            const double b = (i + 1 < blocked.size() ? blocked[i + 1] : blocked[0] + M_PI) - margin;
            if (b > a) allowed.emplace_back(a, b);
        }
    }
    double total = 0.0;
    for (auto [a, b] : allowed) total += b - a;
    if (total < 0.9 * M_PI)
        std::cerr << "star_invert: warning: singular directions cover "
                  << 100.0 * (1.0 - total / M_PI) << "% of the angle range\n";
    std::vector<double> angles;
    angles.reserve(sino_spec.n_angles);
    for (auto [a, b] : allowed) {
        const int na = std::max(1, static_cast<int>(std::lround(sino_spec.n_angles * (b - a) / total)));
        for (int k = 0; k < na; ++k) angles.push_back(a + (k + 0.5) * (b - a) / na);
    }
    for (double& t : angles) {
        t = std::fmod(t, M_PI);
        if (t < 0.0) t += M_PI;
    }
    std::sort(angles.begin(), angles.end());

    const std::vector<double> offsets = uniform_offsets(sino_spec.n_offsets, sino_spec.s_max);
    const double base_len = opts.truncation_radius > 0.0 ? opts.truncation_radius : 4.0 * r2;
    const double step = 0.5 * data.spec().h;

    // Radon transforms of the three data components. The truncation radius
    // grows near type-1 directions so the slanted data strips stay inside
    // the integration window for every offset.
    Sinogram rs_lon, rs_mix, rs_trans;
    rs_lon.angles = rs_mix.angles = rs_trans.angles = angles;
    rs_lon.offsets = rs_mix.offsets = rs_trans.offsets = offsets;
    const std::size_t cells = angles.size() * offsets.size();
    rs_lon.v.assign(cells, 0.0);
    rs_mix.v.assign(cells, 0.0);
    rs_trans.v.assign(cells, 0.0);

    const detail::StarDataSampler sampler(data, geom, opts.support_radius);
    const int n_ang = static_cast<int>(angles.size());
    parallel_for(n_ang, [&](int a0, int a1) {
        for (int ia = a0; ia < a1; ++ia) {
            const double th = angles[ia];
            const Vec2 xi{std::cos(th), std::sin(th)};
            const Vec2 eta{-xi.x2, xi.x1};
            double amin = 1.0;
            for (const auto& b : geom.branches()) amin = std::min(amin, std::abs(dot(xi, b.gamma)));
            const double t_half =
                std::max(base_len, (sino_spec.s_max + opts.support_radius) / std::max(amin, 1e-6) + r2);
            int n = std::max(2, static_cast<int>(std::ceil(2.0 * t_half / step)));
            n += n & 1;
            const double dt = 2.0 * t_half / n;
            for (std::size_t is = 0; is < offsets.size(); ++is) {
                const Vec2 base = offsets[is] * xi;
                double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0;
                for (int k = 0; k <= n; ++k) {
                    const double t = -t_half + k * dt;
                    const auto val = sampler(Vec2{base.x1 + t * eta.x1, base.x2 + t * eta.x2});
                    const double w = (k == 0 || k == n) ? 1.0 / 3.0 : ((k & 1) ? 4.0 / 3.0 : 2.0 / 3.0);
                    acc0 += w * val[0];
                    acc1 += w * val[1];
                    acc2 += w * val[2];
                }
                rs_lon.at(ia, static_cast<int>(is)) = acc0 * dt;
                rs_mix.at(ia, static_cast<int>(is)) = acc1 * dt;
                rs_trans.at(ia, static_cast<int>(is)) = acc2 * dt;
            }
        }
    });

    rs_lon = radon_s_derivative(rs_lon);
    rs_mix = radon_s_derivative(rs_mix);
    rs_trans = radon_s_derivative(rs_trans);

    // Per-angle 3x3 solve: rows <. , gamma-row> act on (Rf11, Rf12, Rf22)
    // with the middle component weighted twice.
    Sinogram rf11 = rs_lon, rf12 = rs_lon, rf22 = rs_lon;
    bool cond_warned = false;
    for (int ia = 0; ia < n_ang; ++ia) {
        const double th = angles[ia];
        const QMatrix q = build_Q(geom, {std::cos(th), std::sin(th)});
        const std::array<std::array<double, 3>, 3> m{{
            {q.gamma.f11, 2.0 * q.gamma.f12, q.gamma.f22},
            {q.gamma_dag.f11, 2.0 * q.gamma_dag.f12, q.gamma_dag.f22},
            {q.gamma_perp.f11, 2.0 * q.gamma_perp.f12, q.gamma_perp.f22},
        }};
        const double det = detail::det3(m);
        std::array<std::array<double, 3>, 3> adj;
        adj[0] = {m[1][1] * m[2][2] - m[1][2] * m[2][1], m[0][2] * m[2][1] - m[0][1] * m[2][2],
                  m[0][1] * m[1][2] - m[0][2] * m[1][1]};
        adj[1] = {m[1][2] * m[2][0] - m[1][0] * m[2][2], m[0][0] * m[2][2] - m[0][2] * m[2][0],
                  m[0][2] * m[1][0] - m[0][0] * m[1][2]};
        adj[2] = {m[1][0] * m[2][1] - m[1][1] * m[2][0], m[0][1] * m[2][0] - m[0][0] * m[2][1],
                  m[0][0] * m[1][1] - m[0][1] * m[1][0]};
        double mmax = 0.0, amax = 0.0;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) {
                mmax = std::max(mmax, std::abs(m[r][c]));
                amax = std::max(amax, std::abs(adj[r][c]));
            }
        if (!cond_warned && mmax * amax > opts.condition_warn * std::abs(det)) {
            std::cerr << "star_invert: warning: Q(xi) condition estimate above "
                      << opts.condition_warn << " at angle " << th << "\n";
            cond_warned = true;
        }
        for (std::size_t is = 0; is < offsets.size(); ++is) {
            const double b0 = rs_lon.at(ia, static_cast<int>(is));
            const double b1 = rs_mix.at(ia, static_cast<int>(is));
            const double b2 = rs_trans.at(ia, static_cast<int>(is));
            rf11.at(ia, static_cast<int>(is)) = (adj[0][0] * b0 + adj[0][1] * b1 + adj[0][2] * b2) / det;
            rf12.at(ia, static_cast<int>(is)) = (adj[1][0] * b0 + adj[1][1] * b1 + adj[1][2] * b2) / det;
            rf22.at(ia, static_cast<int>(is)) = (adj[2][0] * b0 + adj[2][1] * b1 + adj[2][2] * b2) / det;
        }
    }

    SymTensorField2 out(grid);
    out.f11 = inverse_radon_fbp(rf11, grid);
    out.f12 = inverse_radon_fbp(rf12, grid);
    out.f22 = inverse_radon_fbp(rf22, grid);
    return out;
}

} // namespace vlt2
