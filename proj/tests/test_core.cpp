#include <catch_amalgamated.hpp>

#include "vlt2/core.hpp"
#include "vlt2/phantoms.hpp"
#include "vlt2/rng.hpp"
#include "test_helpers.hpp"

using namespace vlt2;
using namespace vlt2::testing;

TEST_CASE("perp examples and involution") {
    auto close = [](Vec2 a, Vec2 b) { return norm(a - b) < 1e-15; };
    CHECK(close(perp({1, 0}), {0, 1}));
    CHECK(close(perp({0, 1}), {-1, 0}));
    CHECK(close(perp({0.6, 0.8}), {-0.8, 0.6}));

    Rng rng(7);
    for (int i = 0; i < 10000; ++i) {
        const Vec2 w{rng.uniform(-5, 5), rng.uniform(-5, 5)};
        const Vec2 pp = perp(perp(w));
        CHECK(pp.x1 == -w.x1);
        CHECK(pp.x2 == -w.x2);
    }
}

TEST_CASE("sym_outer examples") {
    SymTensor2 t = sym_outer({1, 0}, {0, 1});
    CHECK(t.f11 == 0.0);
    CHECK(t.f12 == 0.5);
    CHECK(t.f22 == 0.0);

    const Vec2 u{0.6, 0.8};
    t = sym_outer(u, u);
    CHECK(t.f11 == Catch::Approx(0.36));
    CHECK(t.f12 == Catch::Approx(0.48));
    CHECK(t.f22 == Catch::Approx(0.64));

    t = sym_outer({1, 2}, {3, 4});
    CHECK(t.f11 == Catch::Approx(3.0));
    CHECK(t.f12 == Catch::Approx(5.0));
    CHECK(t.f22 == Catch::Approx(8.0));
}

TEST_CASE("inner product identities") {
    const SymTensor2 id{1, 0, 1};
    const SymTensor2 g{2.5, -1.25, 0.75};
    CHECK(inner(id, g) == g.f11 + g.f22);
    CHECK(inner({1, 1, 1}, {1, 1, 1}) == 4.0);

    const Vec2 u{0.6, 0.8};
    const SymTensor2 usq = sym_outer(u, u);
    CHECK(inner(usq, g) ==
          Catch::Approx(u.x1 * u.x1 * g.f11 + 2 * u.x1 * u.x2 * g.f12 + u.x2 * u.x2 * g.f22));

    // trace pairing is exact
    CHECK(inner(g, id) == trace(g));
}

TEST_CASE("inner(a x a, b x b) = (a.b)^2") {
    Rng rng(11);
    for (int i = 0; i < 2000; ++i) {
        const double ta = rng.uniform(0, 2 * M_PI), tb = rng.uniform(0, 2 * M_PI);
        const Vec2 a{std::cos(ta), std::sin(ta)};
        const Vec2 b{std::cos(tb), std::sin(tb)};
        const double lhs = inner(sym_outer(a, a), sym_outer(b, b));
        const double rhs = dot(a, b) * dot(a, b);
        CHECK(std::abs(lhs - rhs) <= 1e-12);
    }
}

TEST_CASE("GridSpec validation") {
    CHECK_THROWS_AS(GridSpec(2, 5, 0, 1, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(GridSpec(5, 5, 0, 1, 0, 2), std::invalid_argument); // non-square cells
    const GridSpec s(5, 9, 0, 1, 0, 2);
    CHECK(s.h == Catch::Approx(0.25));
    CHECK(s.idx(4, 8) == s.size() - 1);
}

TEST_CASE("directional derivative on constant and linear fields") {
    const GridSpec s = GridSpec::square(33, 1.0);
    ScalarField2 c(s);
    for (double& x : c.v) x = 3.25;
    CHECK(directional_derivative(c, {0.6, 0.8}).max_abs() < 1e-12);

    ScalarField2 lin(s);
    for (int j = 0; j < s.ny; ++j)
        for (int i = 0; i < s.nx; ++i) lin.at(i, j) = s.x(i);
    const ScalarField2 d = directional_derivative(lin, {0.6, 0.8});
    for (int j = 1; j < s.ny - 1; ++j)
        for (int i = 1; i < s.nx - 1; ++i) CHECK(d.at(i, j) == Catch::Approx(0.6).margin(1e-12));
}

TEST_CASE("discrete differential operators converge at order 2") {
    const Gaussian2 g{{0.1, -0.05}, 0.22, 1.3};
    auto errs = [&](int n) {
        const GridSpec s = GridSpec::square(n, 1.0);
        const ScalarField2 phi = g.eval(s);
        ScalarField2 want_dx(s), want_dudv(s);
        const VLineGeometry geom = VLineGeometry::from_u1(0.6);
        const double u1sq = 0.36, u2sq = 0.64;
        for (int j = 0; j < s.ny; ++j)
            for (int i = 0; i < s.nx; ++i) {
                const Vec2 p = s.point(i, j);
                want_dx.at(i, j) = g.grad(p).x1;
                const SymTensor2 h = g.hess(p);
                want_dudv.at(i, j) = u2sq * h.f22 - u1sq * h.f11;
            }
        const double e_dx = max_interior_diff(deriv_x(phi), want_dx);
        const double e_dudv = max_interior_diff(du_dv(phi, geom), want_dudv);
        return std::pair{e_dx, e_dudv};
    };
    const auto [a1, b1] = errs(65);
    const auto [a2, b2] = errs(129);
    CHECK(a1 / a2 > 3.5);
    CHECK(a1 / a2 < 4.5);
    CHECK(b1 / b2 > 3.5);
    CHECK(b1 / b2 < 4.5);
}

TEST_CASE("directional derivative matches the analytic gradient") {
    const Gaussian2 g{{-0.08, 0.12}, 0.3, 2.0};
    const GridSpec s = GridSpec::square(129, 1.0);
    const ScalarField2 d = directional_derivative(g.eval(s), {1, 0});
    double m = 0.0;
    for (int j = 0; j < s.ny; ++j)
        for (int i = 0; i < s.nx; ++i) m = std::max(m, std::abs(d.at(i, j) - g.grad(s.point(i, j)).x1));
    CHECK(m < 5e-3 * g.amp);
}

TEST_CASE("sym_derivative on zero field and rotation-like field") {
    const GridSpec s = GridSpec::square(97, 1.0);
    const SymTensorField2 z = sym_derivative(VectorField2(s));
    CHECK(z.f11.max_abs() == 0.0);
    CHECK(z.f12.max_abs() == 0.0);
    CHECK(z.f22.max_abs() == 0.0);

    // g = (x2, x1) * window: at the window's critical point d(g) = (0, w, 0).
    const Gaussian2 w{{0, 0}, 0.35, 1.0};
    VectorField2 g(s);
    for (int j = 0; j < s.ny; ++j)
        for (int i = 0; i < s.nx; ++i) {
            const Vec2 p = s.point(i, j);
            const double wv = w.value(p);
            g.g1.at(i, j) = p.x2 * wv;
            g.g2.at(i, j) = p.x1 * wv;
        }
    const SymTensorField2 f = sym_derivative(g);
    const int ic = (s.nx - 1) / 2, jc = (s.ny - 1) / 2;
    CHECK(std::abs(f.f11.at(ic, jc)) < 2e-3);
    CHECK(std::abs(f.f22.at(ic, jc)) < 2e-3);
    CHECK(f.f12.at(ic, jc) == Catch::Approx(1.0).epsilon(3e-3));
}

TEST_CASE("sym_derivative of an analytic gradient equals the Hessian") {
    const Gaussian2 g{{-0.1, 0.15}, 0.27, 2.0};
    auto max_err = [&](int n) {
        const GridSpec s = GridSpec::square(n, 1.0);
        const SymTensorField2 f = sym_derivative(g.eval_grad(s));
        double m = 0.0;
        for (int j = 4; j < s.ny - 4; ++j)
            for (int i = 4; i < s.nx - 4; ++i) {
                const SymTensor2 h = g.hess(s.point(i, j));
                m = std::max({m, std::abs(f.f11.at(i, j) - h.f11), std::abs(f.f12.at(i, j) - h.f12),
                              std::abs(f.f22.at(i, j) - h.f22)});
            }
        return m;
    };
    const double e1 = max_err(65);
    const double e2 = max_err(129);
    CHECK(e1 / e2 > 3.5);
    CHECK(e1 / e2 < 4.5);
    CHECK(e2 < 0.1);
}

TEST_CASE("divergence identities for potential-type fields") {
    // delta^perp(d^2 phi) = 0 and delta((d^perp)^2 phi) = 0.
    const Gaussian2 gsrc{{0.05, 0.0}, 0.3, 1.5};
    auto resid = [&](int n) {
        const GridSpec s = GridSpec::square(n, 1.0);
        const VectorField2 grad = gsrc.eval_grad(s);
        VectorField2 grad_perp(s);
        grad_perp.g1 = -1.0 * grad.g2;
        grad_perp.g2 = grad.g1;
        const VectorField2 r1 = divergence_perp(sym_derivative(grad));
        const VectorField2 r2 = divergence(sym_derivative_perp(grad_perp));
        const double m1 = std::max(max_interior_abs(r1.g1), max_interior_abs(r1.g2));
        const double m2 = std::max(max_interior_abs(r2.g1), max_interior_abs(r2.g2));
        return std::max(m1, m2);
    };
    const double e1 = resid(65);
    const double e2 = resid(129);
    CHECK(e2 < 0.05);      // third-derivative scale here is ~60
    CHECK(e1 / e2 > 3.0);  // vanishes at second order
}

TEST_CASE("VLineGeometry invariants") {
    CHECK_THROWS_AS(VLineGeometry({0.6, 0.7}), std::invalid_argument);  // not unit
    CHECK_THROWS_AS(VLineGeometry({0.6, -0.8}), std::invalid_argument); // u2 < 0
    CHECK_THROWS_AS(VLineGeometry({0.0, 1.0}), std::invalid_argument);  // degenerate
    CHECK_THROWS_AS(VLineGeometry::from_u1(1.0), std::invalid_argument);

    const VLineGeometry g = VLineGeometry::from_u1(0.6);
    CHECK(g.u2() == Catch::Approx(0.8));
    CHECK(g.v().x1 == Catch::Approx(-0.6));
    CHECK(g.v().x2 == Catch::Approx(0.8));
    CHECK(!g.orthogonal_branches());
    CHECK(VLineGeometry::from_u1(1.0 / std::sqrt(2.0)).orthogonal_branches());
    CHECK(g.data_disk_radius(1.0) == Catch::Approx(1.0 / 0.6));
}

TEST_CASE("du_dv equals the composition of directional derivatives") {
    const VLineGeometry geom = VLineGeometry::from_u1(0.6);
    const Gaussian2 g{{0.0, 0.1}, 0.28, 1.0};
    const GridSpec s = GridSpec::square(129, 1.0);
    const ScalarField2 phi = g.eval(s);
    const ScalarField2 fused = du_dv(phi, geom);
    const ScalarField2 composed =
        directional_derivative(directional_derivative(phi, geom.u()), geom.v());
    CHECK(max_interior_diff(fused, composed) < 5e-3 * fused.max_abs());
}
