#include <catch_amalgamated.hpp>

#include "vlt2/core.hpp"
#include "vlt2/forward.hpp"
#include "vlt2/phantoms.hpp"
#include "vlt2/star.hpp"
#include "test_helpers.hpp"

using namespace vlt2;
using namespace vlt2::testing;

namespace {

StarGeometry three_star() {
    return StarGeometry::from_angles_deg({{90.0, 1.0}, {210.0, 1.0}, {330.0, 1.0}});
}

} // namespace

TEST_CASE("StarGeometry validation") {
    CHECK_THROWS_AS(StarGeometry({{Vec2{1, 0}, 1.0}}), std::invalid_argument); // m < 2
    CHECK_THROWS_AS(StarGeometry({{Vec2{1, 0}, 1.0}, {Vec2{1, 0}, 2.0}}), std::invalid_argument);
    CHECK_THROWS_AS(StarGeometry({{Vec2{1, 0}, 1.0}, {Vec2{0, 1}, 0.0}}), std::invalid_argument);
    CHECK_THROWS_AS(StarGeometry({{Vec2{1, 0}, 1.0}, {Vec2{0.5, 0.5}, 1.0}}), std::invalid_argument);
    CHECK(three_star().data_disk_radius(1.0) == Catch::Approx(1.0 / std::sin(M_PI / 3)));
}

TEST_CASE("star_forward: zero field and the m = 2 V-line correspondence") {
    const GridSpec s = GridSpec::square(97, 1.4);
    const RayQuadratureConfig cfg = RayQuadratureConfig::for_grid(s);

    const StarData zero = star_forward(SymTensorField2(s), three_star(), cfg);
    CHECK(zero.lon.max_abs() == 0.0);
    CHECK(zero.mix.max_abs() == 0.0);
    CHECK(zero.trans.max_abs() == 0.0);

    // with branches (u, v) and unit weights, S f = (L f, M f, T f)
    const VLineGeometry geom = VLineGeometry::from_u1(0.6);
    const StarGeometry vstar({{geom.u(), 1.0}, {geom.v(), 1.0}});
    const SymTensorField2 f = bump_tensor({{0.1, 0.0}, 0.55, 1.0}, {{-0.05, 0.1}, 0.6, 0.8},
                                          {{0.0, -0.1}, 0.5, -0.6}, s);
    const StarData sf = star_forward(f, vstar, cfg);
    const ScalarField2 lf = transform_field(f, geom, VltKind::L, cfg);
    const ScalarField2 mf = transform_field(f, geom, VltKind::M, cfg);
    const ScalarField2 tf = transform_field(f, geom, VltKind::T, cfg);
    CHECK(max_abs_diff(sf.lon, lf) < 1e-10);
    CHECK(max_abs_diff(sf.mix, mf) < 1e-10);
    CHECK(max_abs_diff(sf.trans, tf) < 1e-10);
}

TEST_CASE("star_forward against a brute-force quadrature oracle") {
    const GridSpec s = GridSpec::square(97, 1.4);
    const RayQuadratureConfig cfg = RayQuadratureConfig::for_grid(s);
    SymTensorField2 f(s);
    f.f11 = bump({{0.05, -0.05}, 0.6, 1.2}, s);
    const StarGeometry geom = three_star();
    const StarData sf = star_forward(f, geom, cfg);

    // dense trapezoid of the interpolant, step h/100
    auto oracle = [&](Vec2 x, auto&& proj_of) {
        double total = 0.0;
        for (const auto& b : geom.branches()) {
            const double coef = proj_of(b.gamma);
            const double step = s.h / 100.0;
            const int n = static_cast<int>(std::ceil(4.0 / step));
            const double dt = 4.0 / n;
            double acc = 0.0;
            for (int k = 0; k <= n; ++k) {
                const double t = k * dt;
                const double w = (k == 0 || k == n) ? 0.5 : 1.0;
                acc += w * f.f11.sample({x.x1 + t * b.gamma.x1, x.x2 + t * b.gamma.x2});
            }
            total += b.c * coef * acc * dt;
        }
        return total;
    };
    Rng rng(31);
    for (int trial = 0; trial < 8; ++trial) {
        const Vec2 x{rng.uniform(-0.9, 0.9), rng.uniform(-0.9, 0.9)};
        const int i = static_cast<int>((x.x1 - s.x_min) / s.h);
        const int j = static_cast<int>((x.x2 - s.y_min) / s.h);
        const Vec2 xv = s.point(i, j);
        // only f11 is nonzero: <f, g^2> = f11 g1^2, <f, g . g^perp> = -f11 g1 g2,
        // <f, (g^perp)^2> = f11 g2^2
        const double lon = oracle(xv, [](Vec2 g) { return g.x1 * g.x1; });
        const double mix = oracle(xv, [](Vec2 g) { return -g.x1 * g.x2; });
        const double trans = oracle(xv, [](Vec2 g) { return g.x2 * g.x2; });
        CHECK(sf.lon.at(i, j) == Catch::Approx(lon).margin(1e-6 * std::max(1.0, std::abs(lon))));
        CHECK(sf.mix.at(i, j) == Catch::Approx(mix).margin(1e-6 * std::max(1.0, std::abs(mix))));
        CHECK(sf.trans.at(i, j) == Catch::Approx(trans).margin(1e-6 * std::max(1.0, std::abs(trans))));
    }
}

TEST_CASE("gamma vectors: worked example, singular guard, direct sum oracle") {
    const StarGeometry g2 = StarGeometry::from_angles_deg({{0.0, 1.0}, {90.0, 1.0}});
    const double is2 = 1.0 / std::sqrt(2.0);
    const GammaVectors gv = gamma_vectors(g2, {is2, is2});
    CHECK(gv.g_dag.f11 == Catch::Approx(0.0).margin(1e-12));
    CHECK(gv.g_dag.f12 == Catch::Approx(0.0).margin(1e-12));
    CHECK(gv.g_dag.f22 == Catch::Approx(0.0).margin(1e-12));
    CHECK(gv.g.f11 == Catch::Approx(-std::sqrt(2.0)));
    CHECK(gv.g.f12 == Catch::Approx(0.0).margin(1e-12));
    CHECK(gv.g.f22 == Catch::Approx(-std::sqrt(2.0)));

    CHECK_THROWS_AS(gamma_vectors(g2, {0.0, 1.0}), GeometryError); // xi . gamma_1 = 0

    // direct summation oracle on a random geometry
    Rng rng(33);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<StarBranch> br;
        for (int i = 0; i < 4; ++i) {
            const double a = rng.uniform(0, 2 * M_PI);
            br.push_back({{std::cos(a), std::sin(a)}, rng.uniform(0.5, 2.0)});
        }
        StarGeometry geom(br);
        const double th = rng.uniform(0, M_PI);
        const Vec2 xi{std::cos(th), std::sin(th)};
        bool near_singular = false;
        for (const auto& b : br)
            if (std::abs(dot(xi, b.gamma)) < 1e-6) near_singular = true;
        if (near_singular) continue;
        const GammaVectors gv2 = gamma_vectors(geom, xi);
        SymTensor2 direct{};
        for (const auto& b : br)
            direct = direct + (-b.c / dot(xi, b.gamma)) * sym_outer(b.gamma, b.gamma);
        CHECK(std::abs(gv2.g.f11 - direct.f11) < 1e-12 * (1.0 + std::abs(direct.f11)));
        CHECK(std::abs(gv2.g.f12 - direct.f12) < 1e-12 * (1.0 + std::abs(direct.f12)));
        CHECK(std::abs(gv2.g.f22 - direct.f22) < 1e-12 * (1.0 + std::abs(direct.f22)));
    }
}

TEST_CASE("P-polynomial symmetries through the gamma vectors") {
    Rng rng(35);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<StarBranch> br;
        const int m = 2 + static_cast<int>(rng.uniform(0, 3));
        for (int i = 0; i < m; ++i) {
            const double a = rng.uniform(0, 2 * M_PI);
            br.push_back({{std::cos(a), std::sin(a)}, rng.uniform(-2.0, 2.0)});
        }
        bool bad = false;
        for (std::size_t i = 0; i < br.size(); ++i) {
            if (br[i].c == 0.0) bad = true;
            for (std::size_t j = i + 1; j < br.size(); ++j)
                if (norm(br[i].gamma - br[j].gamma) < 1e-6) bad = true;
        }
        if (bad) continue;
        StarGeometry geom(br);
        const double th = rng.uniform(0, M_PI);
        const Vec2 xi{std::cos(th), std::sin(th)};
        bool near_singular = false;
        for (const auto& b : br)
            if (std::abs(dot(xi, b.gamma)) < 1e-4) near_singular = true;
        if (near_singular) continue;
        const GammaVectors gv = gamma_vectors(geom, xi);
        const double scale = 1.0 + std::abs(gv.g.f11) + std::abs(gv.g.f12) + std::abs(gv.g.f22);
        CHECK(std::abs(gv.g.f11 - gv.g_perp.f22) < 1e-12 * scale);
        CHECK(std::abs(gv.g.f12 + gv.g_perp.f12) < 1e-12 * scale);
        CHECK(std::abs(gv.g.f22 - gv.g_perp.f11) < 1e-12 * scale);
        CHECK(std::abs(gv.g_dag.f11 + gv.g.f12) < 1e-12 * scale);
        CHECK(std::abs(gv.g_dag.f12 - 0.5 * (gv.g.f11 - gv.g.f22)) < 1e-12 * scale);
        CHECK(std::abs(gv.g_dag.f22 - gv.g.f12) < 1e-12 * scale);
    }
}

TEST_CASE("determinant: cofactor vs closed form on random stars") {
    Rng rng(37);
    int tested = 0;
    while (tested < 1000) {
        std::vector<StarBranch> br;
        const int m = 2 + static_cast<int>(rng.uniform(0, 3));
        for (int i = 0; i < m; ++i) {
            const double a = rng.uniform(0, 2 * M_PI);
            br.push_back({{std::cos(a), std::sin(a)}, rng.uniform(0.2, 2.0) * (rng.uniform01() < 0.5 ? -1 : 1)});
        }
        bool bad = false;
        for (std::size_t i = 0; i < br.size(); ++i)
            for (std::size_t j = i + 1; j < br.size(); ++j)
                if (norm(br[i].gamma - br[j].gamma) < 1e-6) bad = true;
        if (bad) continue;
        StarGeometry geom(br);
        const double th = rng.uniform(0, M_PI);
        const Vec2 xi{std::cos(th), std::sin(th)};
        bool near_singular = false;
        for (const auto& b : br)
            if (std::abs(dot(xi, b.gamma)) < 1e-4) near_singular = true;
        if (near_singular) continue;
        // build_Q itself asserts the cofactor and P-polynomial forms agree
        CHECK_NOTHROW(build_Q(geom, xi));
        ++tested;
    }
}

TEST_CASE("determinant vanishes for symmetric stars and the worked example") {
    const StarGeometry sym = StarGeometry::from_angles_deg({{30.0, 1.5}, {210.0, 1.5}});
    Rng rng(39);
    for (int trial = 0; trial < 25; ++trial) {
        const double th = rng.uniform(0, M_PI);
        const Vec2 xi{std::cos(th), std::sin(th)};
        if (std::abs(dot(xi, sym.branches()[0].gamma)) < 1e-3) continue;
        const QMatrix q = build_Q(sym, xi);
        CHECK(std::abs(q.det) < 1e-9);
    }

    const StarGeometry g2 = StarGeometry::from_angles_deg({{0.0, 1.0}, {90.0, 1.0}});
    const double is2 = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(build_Q(g2, {is2, is2}).det) < 1e-12);
}

TEST_CASE("singular sets: worked examples and root certification") {
    // orthogonal two-branch unit star: gamma-dag vanishes at 45 degrees,
    // the weight sum at 135 degrees
    const StarGeometry g2 = StarGeometry::from_angles_deg({{0.0, 1.0}, {90.0, 1.0}});
    const SingularSets ss = singular_sets(g2);
    CHECK_FALSE(ss.z2_is_full_circle);
    REQUIRE(ss.z1.size() == 2);
    CHECK(ss.z1[0] == Catch::Approx(0.0).margin(1e-10));
    CHECK(ss.z1[1] == Catch::Approx(M_PI / 2).margin(1e-10));
    bool has45 = false, has135 = false;
    for (double z : ss.z2) {
        if (std::abs(z - M_PI / 4) < 1e-9) has45 = true;
        if (std::abs(z - 3 * M_PI / 4) < 1e-9) has135 = true;
    }
    CHECK(has45);
    CHECK(has135);

    // symmetric star: type-2 singular directions cover the circle
    const StarGeometry sym = StarGeometry::from_angles_deg({{10.0, 2.0}, {190.0, 2.0}});
    CHECK(singular_sets(sym).z2_is_full_circle);

    // generic three-branch stars have finite (possibly empty) type-2 sets;
    // a mixed-sign weight makes the weight-sum part change sign, so roots
    // exist and every reported angle is certified against its defining
    // function
    for (const StarGeometry& g3 :
         {StarGeometry::from_angles_deg({{90.0, 1.0}, {200.0, 1.3}, {335.0, 0.7}}),
          StarGeometry::from_angles_deg({{90.0, 1.0}, {200.0, 1.3}, {335.0, -0.7}})}) {
        const SingularSets s3 = singular_sets(g3);
        CHECK_FALSE(s3.z2_is_full_circle);
        CHECK(s3.z2.size() < 16);
        for (double z : s3.z2) {
            const Vec2 xi{std::cos(z), std::sin(z)};
            const auto p = detail::p_components(g3, xi);
            const double dag = 4.0 * p.p12 * p.p12 + (p.p11 - p.p22) * (p.p11 - p.p22);
            const double tracefn = p.p11 + p.p22;
            CHECK(std::min(dag, std::abs(tracefn)) < 1e-9);
        }
    }
    CHECK(singular_sets(StarGeometry::from_angles_deg({{90.0, 1.0}, {200.0, 1.3}, {335.0, -0.7}}))
              .z2.size() >= 1);
}

TEST_CASE("zero-set containment of the gamma vectors") {
    // {gamma = 0} = {gamma_perp = 0} subset {gamma_dag = 0}; the reverse
    // containment fails for the orthogonal two-branch example.
    const StarGeometry g3 = StarGeometry::from_angles_deg({{80.0, 1.0}, {205.0, -1.2}, {340.0, 0.9}});
    const int n = 3000;
    const double eps = 1e-6;
    for (int k = 0; k < n; ++k) {
        const double th = M_PI * k / n;
        const Vec2 xi{std::cos(th), std::sin(th)};
        bool near_z1 = false;
        for (const auto& b : g3.branches())
            if (std::abs(dot(xi, b.gamma)) < 1e-3) near_z1 = true;
        if (near_z1) continue;
        const GammaVectors gv = gamma_vectors(g3, xi);
        const double ng = std::abs(gv.g.f11) + std::abs(gv.g.f12) + std::abs(gv.g.f22);
        const double np = std::abs(gv.g_perp.f11) + std::abs(gv.g_perp.f12) + std::abs(gv.g_perp.f22);
        const double nd = std::abs(gv.g_dag.f11) + std::abs(gv.g_dag.f12) + std::abs(gv.g_dag.f22);
        if (ng <= eps) {
            CHECK(np <= eps);
            CHECK(nd <= eps);
        }
        if (np <= eps) CHECK(ng <= eps);
    }

    // witness for the strictness of the containment
    const StarGeometry g2 = StarGeometry::from_angles_deg({{0.0, 1.0}, {90.0, 1.0}});
    const double is2 = 1.0 / std::sqrt(2.0);
    const GammaVectors gv = gamma_vectors(g2, {is2, is2});
    const double nd = std::abs(gv.g_dag.f11) + std::abs(gv.g_dag.f12) + std::abs(gv.g_dag.f22);
    const double ng = std::abs(gv.g.f11) + std::abs(gv.g.f12) + std::abs(gv.g.f22);
    CHECK(nd < 1e-12);
    CHECK(ng > 1.0);
}

TEST_CASE("is_symmetric") {
    CHECK(is_symmetric(StarGeometry::from_angles_deg({{25.0, 1.25}, {205.0, 1.25}})));
    CHECK(is_symmetric(StarGeometry::from_angles_deg(
        {{0.0, 1.0}, {90.0, 2.0}, {180.0, 1.0}, {270.0, 2.0}})));
    CHECK_FALSE(is_symmetric(StarGeometry::from_angles_deg({{25.0, 1.0}, {205.0, 2.0}})));
    CHECK_FALSE(is_symmetric(three_star())); // odd m
    CHECK_FALSE(is_symmetric(StarGeometry::from_angles_deg({{0.0, 1.0}, {120.0, 1.0}, {180.0, 1.0}, {300.0, 2.0}})));
}

TEST_CASE("Radon-domain identity d/ds R(S f) = Q R f") {
    const StarGeometry geom = three_star();
    const GridSpec s = GridSpec::square(129, 1.3);
    const RayQuadratureConfig cfg = RayQuadratureConfig::for_grid(s);
    Rng rng(41);
    const SymTensorField2 f = random_tensor_phantom(rng, s);
    const StarData sf = star_forward(f, geom, cfg);

    const double support = 0.8;
    const double r2 = geom.data_disk_radius(support);
    const detail::StarDataSampler sampler(sf, geom, support);
    const std::vector<double> offsets = uniform_offsets(2 * s.nx + 1, 1.1 * r2);

    const SinogramSpec pspec{64, 2 * s.nx + 1, 1.1 * r2};
    const Sinogram rf11 = radon(f.f11, pspec);
    const Sinogram rf12 = radon(f.f12, pspec);
    const Sinogram rf22 = radon(f.f22, pspec);

    for (double th : {0.3, 0.9, 1.6, 2.4}) {
        const Vec2 xi{std::cos(th), std::sin(th)};
        double amin = 1.0;
        for (const auto& b : geom.branches()) amin = std::min(amin, std::abs(dot(xi, b.gamma)));
        REQUIRE(amin > 0.05);
        const double t_half = (1.1 * r2 + support) / amin + r2;

        std::vector<double> one_angle{th};
        auto row = [&](int comp) {
            return radon_of(
                [&](Vec2 p) { return sampler(p)[comp]; }, one_angle, offsets, t_half, 0.5 * s.h);
        };
        Sinogram rs0 = radon_s_derivative(row(0));
        Sinogram rs1 = radon_s_derivative(row(1));
        Sinogram rs2 = radon_s_derivative(row(2));

        const QMatrix q = build_Q(geom, xi);
        // interpolate the component radon rows at the same angle
        const int ia = static_cast<int>(std::lround(th / (M_PI / pspec.n_angles)));
        const double th_near = rf11.angles[ia];
        REQUIRE(std::abs(th_near - th) < 0.03); // angles chosen on the sample lattice
        double num = 0.0, den = 0.0;
        for (int is = 0; is < rs0.n_offsets(); ++is) {
            const double want0 = q.gamma.f11 * rf11.at(ia, is) + 2.0 * q.gamma.f12 * rf12.at(ia, is) +
                                 q.gamma.f22 * rf22.at(ia, is);
            const double want1 = q.gamma_dag.f11 * rf11.at(ia, is) +
                                 2.0 * q.gamma_dag.f12 * rf12.at(ia, is) +
                                 q.gamma_dag.f22 * rf22.at(ia, is);
            const double want2 = q.gamma_perp.f11 * rf11.at(ia, is) +
                                 2.0 * q.gamma_perp.f12 * rf12.at(ia, is) +
                                 q.gamma_perp.f22 * rf22.at(ia, is);
            num += (rs0.at(0, is) - want0) * (rs0.at(0, is) - want0) +
                   (rs1.at(0, is) - want1) * (rs1.at(0, is) - want1) +
                   (rs2.at(0, is) - want2) * (rs2.at(0, is) - want2);
            den += want0 * want0 + want1 * want1 + want2 * want2;
        }
        INFO("angle " << th << " rel err " << std::sqrt(num / den));
        CHECK(std::sqrt(num / den) < 0.03);
    }
}

TEST_CASE("star inversion round trip and rejection rules") {
    const StarGeometry geom = three_star();
    const GridSpec s = GridSpec::square(129, 1.3);
    const RayQuadratureConfig cfg = RayQuadratureConfig::for_grid(s);
    Rng rng(43);
    const SymTensorField2 f = random_tensor_phantom(rng, s);
    const StarData sf = star_forward(f, geom, cfg);

    StarInvertOptions opts;
    opts.support_radius = 0.8;
    const double r2 = geom.data_disk_radius(opts.support_radius);
    const SinogramSpec spec{360, 2 * s.nx + 1, 1.1 * r2};
    const SymTensorField2 rec = star_invert(sf, geom, spec, s, opts);
    INFO("round trip err " << rel_l2_disk(rec, f, 1.0));
    CHECK(rel_l2_disk(rec, f, 1.0) < 0.06);

    // zero data
    const SymTensorField2 zero = star_invert(StarData(s), geom, spec, s, opts);
    CHECK(zero.f11.max_abs() < 1e-14);

    // symmetric stars are rejected
    const StarGeometry sym = StarGeometry::from_angles_deg({{30.0, 1.0}, {210.0, 1.0}});
    CHECK_THROWS_AS(star_invert(StarData(s), sym, spec, s, opts), GeometryError);
    CHECK_THROWS_MATCHES(star_invert(StarData(s), sym, spec, s, opts), GeometryError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("not invertible")));
}
