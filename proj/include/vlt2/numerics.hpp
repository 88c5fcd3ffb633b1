#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "vlt2/core.hpp"

namespace vlt2 {

enum class AxisDir { PlusX, MinusX, PlusY };

/// Cumulative trapezoid integral from the far grid edge inward:
/// value(x) = integral of h(x + t dir) dt over t in [0, distance to edge].
/// Assumes h decays to zero at that edge.
inline ScalarField2 integrate_along_axis(const ScalarField2& h, AxisDir dir) {
    const GridSpec& s = h.spec;
    ScalarField2 out(s);
    const double hs = 0.5 * s.h;
    switch (dir) {
        case AxisDir::PlusY:
            for (int i = 0; i < s.nx; ++i) {
                out.at(i, s.ny - 1) = 0.0;
                for (int j = s.ny - 2; j >= 0; --j)
                    out.at(i, j) = out.at(i, j + 1) + hs * (h.at(i, j) + h.at(i, j + 1));
            }
            break;
        case AxisDir::PlusX:
            for (int j = 0; j < s.ny; ++j) {
                out.at(s.nx - 1, j) = 0.0;
                for (int i = s.nx - 2; i >= 0; --i)
                    out.at(i, j) = out.at(i + 1, j) + hs * (h.at(i, j) + h.at(i + 1, j));
            }
            break;
        case AxisDir::MinusX:
            for (int j = 0; j < s.ny; ++j) {
                out.at(0, j) = 0.0;
                for (int i = 1; i < s.nx; ++i)
                    out.at(i, j) = out.at(i - 1, j) + hs * (h.at(i, j) + h.at(i - 1, j));
            }
            break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Elliptic Dirichlet solver
// ---------------------------------------------------------------------------

/// a d2/dx1^2 w + b d2/dx2^2 w = -rhs on the grid interior, w = 0 on the
/// outermost ring. b = 0 flags the degenerate regime handled by
/// solve_degenerate_double_integral instead.
struct EllipticProblem {
    double a = 0.0;
    double b = 0.0;
    ScalarField2 rhs;

    EllipticProblem(double a_, double b_, ScalarField2 rhs_) : a(a_), b(b_), rhs(std::move(rhs_)) {
        if (!(a > 0.0) || b < 0.0) throw std::invalid_argument("EllipticProblem: need a > 0, b >= 0");
    }
};

/// Conjugate gradients on the 5-point discretization, matrix-free.
/// max_iter = 0 picks a bound from the grid size.
inline ScalarField2 solve_elliptic(const EllipticProblem& p, double tol = 1e-10, int max_iter = 0) {
    if (!(p.b > 0.0)) throw std::invalid_argument("solve_elliptic: b must be > 0 (use the degenerate solver)");
    const GridSpec& s = p.rhs.spec;
    const int nx = s.nx, ny = s.ny;
    const double ah = p.a / (s.h * s.h);
    const double bh = p.b / (s.h * s.h);

    // A w = -(a Dxx + b Dyy) w, SPD with homogeneous Dirichlet conditions.
    auto apply = [&](const std::vector<double>& w, std::vector<double>& out) {
        for (int j = 1; j < ny - 1; ++j)
            for (int i = 1; i < nx - 1; ++i) {
                const std::size_t k = s.idx(i, j);
                out[k] = (2.0 * ah + 2.0 * bh) * w[k] - ah * (w[k - 1] + w[k + 1]) -
                         bh * (w[k - nx] + w[k + nx]);
            }
    };
    auto dot_interior = [&](const std::vector<double>& x, const std::vector<double>& y) {
        double acc = 0.0;
        for (int j = 1; j < ny - 1; ++j)
            for (int i = 1; i < nx - 1; ++i) acc += x[s.idx(i, j)] * y[s.idx(i, j)];
        return acc;
    };

    std::vector<double> w(s.size(), 0.0), r(s.size(), 0.0), d(s.size(), 0.0), q(s.size(), 0.0);
    for (int j = 1; j < ny - 1; ++j)
        for (int i = 1; i < nx - 1; ++i) r[s.idx(i, j)] = p.rhs.at(i, j);
    d = r;
    const double rhs_norm = std::sqrt(dot_interior(r, r));
    if (rhs_norm == 0.0) return ScalarField2(s);

    double rr = rhs_norm * rhs_norm;
    if (max_iter <= 0) max_iter = 60 * std::max(nx, ny);
    for (int it = 0; it < max_iter; ++it) {
        apply(d, q);
        const double dq = dot_interior(d, q);
        if (dq <= 0.0) throw SolverError("solve_elliptic: operator lost positivity");
        const double alpha = rr / dq;
        for (int j = 1; j < ny - 1; ++j)
            for (int i = 1; i < nx - 1; ++i) {
                const std::size_t k = s.idx(i, j);
                w[k] += alpha * d[k];
                r[k] -= alpha * q[k];
            }
        const double rr_new = dot_interior(r, r);
        if (std::sqrt(rr_new) <= tol * rhs_norm) {
            ScalarField2 out(s);
            out.v = std::move(w);
            return out;
        }
        const double beta = rr_new / rr;
        rr = rr_new;
        for (int j = 1; j < ny - 1; ++j)
            for (int i = 1; i < nx - 1; ++i) {
                const std::size_t k = s.idx(i, j);
                d[k] = r[k] + beta * d[k];
            }
    }
    std::ostringstream msg;
    msg << "solve_elliptic: no convergence after " << max_iter
        << " iterations, relative residual " << std::sqrt(rr) / rhs_norm;
    throw SolverError(msg.str());
}

/// Relative residual of the 5-point discretization at a candidate solution.
inline double elliptic_residual(const EllipticProblem& p, const ScalarField2& w) {
    const GridSpec& s = p.rhs.spec;
    const double ah = p.a / (s.h * s.h);
    const double bh = p.b / (s.h * s.h);
    double num = 0.0, den = 0.0;
    for (int j = 1; j < s.ny - 1; ++j)
        for (int i = 1; i < s.nx - 1; ++i) {
            const std::size_t k = s.idx(i, j);
            const double aw = (2.0 * ah + 2.0 * bh) * w.v[k] - ah * (w.v[k - 1] + w.v[k + 1]) -
                              bh * (w.v[k - s.nx] + w.v[k + s.nx]);
            const double r = aw - p.rhs.v[k];
            num += r * r;
            den += p.rhs.v[k] * p.rhs.v[k];
        }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

// ---------------------------------------------------------------------------
// Hyperbolic marching solver
// ---------------------------------------------------------------------------

/// a d2/dx1^2 w - c d2/dx2^2 w = rhs with a, c > 0. x1 is the timelike
/// direction; Cauchy data w = dw/dx1 = 0 on the vertical line x1 =
/// line_anchor (at or left of the support of rhs). Explicit second-order
/// marching; with square cells stability requires c <= a.
inline ScalarField2 solve_hyperbolic(double a, double c, const ScalarField2& rhs, double line_anchor) {
    if (!(a > 0.0) || !(c > 0.0)) throw std::invalid_argument("solve_hyperbolic: need a > 0, c > 0");
    const GridSpec& s = rhs.spec;
    if (c > a * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "solve_hyperbolic: CFL violation (c/a = " << c / a
            << " > 1 with square cells); refine the grid in the x1 direction";
        throw SolverError(msg.str());
    }
    int i0 = static_cast<int>(std::floor((line_anchor - s.x_min) / s.h + 0.5));
    i0 = std::max(0, std::min(i0, s.nx - 3));

    ScalarField2 w(s);
    const double h2 = s.h * s.h;
    // Columns up to i0 + 1 carry the zero Cauchy data.
    for (int i = i0 + 1; i < s.nx - 1; ++i) {
        for (int j = 1; j < s.ny - 1; ++j) {
            const double lap2 = (w.at(i, j + 1) - 2.0 * w.at(i, j) + w.at(i, j - 1)) / h2;
            w.at(i + 1, j) = 2.0 * w.at(i, j) - w.at(i - 1, j) + (h2 / a) * (rhs.at(i, j) + c * lap2);
        }
    }
    return w;
}

/// a d2/dx1^2 w = rhs, solved by integrating twice along x1 with zero data
/// at the left edge.
inline ScalarField2 solve_degenerate_double_integral(double a, const ScalarField2& rhs) {
    if (!(a > 0.0)) throw std::invalid_argument("solve_degenerate_double_integral: need a > 0");
    const GridSpec& s = rhs.spec;
    ScalarField2 first(s), out(s);
    const double hs = 0.5 * s.h;
    for (int j = 0; j < s.ny; ++j) {
        first.at(0, j) = 0.0;
        for (int i = 1; i < s.nx; ++i)
            first.at(i, j) = first.at(i - 1, j) + hs * (rhs.at(i, j) + rhs.at(i - 1, j));
        out.at(0, j) = 0.0;
        for (int i = 1; i < s.nx; ++i)
            out.at(i, j) = out.at(i - 1, j) + hs * (first.at(i, j) + first.at(i - 1, j));
    }
    out *= 1.0 / a;
    return out;
}

} // namespace vlt2
