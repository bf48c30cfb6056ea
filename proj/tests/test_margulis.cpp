#include "hyp4/margulis.hpp"
#include "hyp4/rng.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <sstream>

using namespace hyp4;

namespace {

ElementaryGroup cyclic(const Isometry4& g, double nu_max = 2.0, double x4_max = 100.0) {
    return ElementaryGroup::from_ranges({g}, nu_max, x4_max);
}

}  // namespace

TEST(Orbit, DilationSpotValue) {
    auto G = cyclic(Isometry4::dilation(std::exp(1.0)));
    EXPECT_EQ(orbit_count(G, Point4(0, 0, 0, 1), 3.5), 7);
    EXPECT_NEAR(injectivity_radius(G, Point4(0, 0, 0, 1)), 0.5, 1e-15);
}

TEST(Orbit, TranslationInjectivityRadius) {
    auto G = cyclic(Isometry4::translation({2, 0, 0}));
    EXPECT_NEAR(injectivity_radius(G, Point4(0, 0, 0, 1)), std::asinh(1.0), 1e-15);
}

TEST(Orbit, LatticeMatchesBruteForce) {
    Rng r(1, hash_name("lattice"), 0);
    for (int i = 0; i < 30; ++i) {
        Vec3 a{r.uniform(-2, 2), r.uniform(-2, 2), r.uniform(-2, 2)}, b{r.uniform(-2, 2), r.uniform(-2, 2), r.uniform(-2, 2)};
        if (norm(cross(a, b)) < 0.3) continue;
        ElementaryGroup G({Isometry4::translation(a), Isometry4::translation(b)}, {1, 1});
        Point4 x(r.uniform(-1, 1), r.uniform(-1, 1), r.uniform(-1, 1), r.log_uniform(0.2, 2.0));
        double rad = r.uniform(0.2, 3.0);
        EXPECT_EQ(orbit_count(G, x, rad), oracle::lattice_orbit_count({a, b}, x, rad, 150));
    }
}

TEST(Orbit, CyclicMatchesIteration) {
    Rng r(2, hash_name("cyclic"), 0);
    for (int i = 0; i < 30; ++i) {
        Vec3 e1{r.normal(), r.normal(), r.normal()}, e2{r.normal(), r.normal(), r.normal()};
        auto g = i % 2 ? Isometry4::loxodromic(r.log_uniform(1.05, 3.0), r.uniform(0, 3), e1, e2)
                       : Isometry4::parabolic(r.uniform(0, 3), e1, e2 - (dot(e2, e1) / dot(e1, e1)) * e1 + (0.5 / norm(e1)) * e1);
        Point4 x(r.uniform(-2, 2), r.uniform(-2, 2), r.uniform(-2, 2), r.log_uniform(0.3, 3.0));
        double rad = r.uniform(0.5, 3.0);
        long long brute = 1;
        for (int n = -400; n <= 400; ++n)
            if (n != 0 && oracle::model_dist(x, oracle::iterate(g, n, x)) <= rad) ++brute;
        EXPECT_EQ(orbit_count(cyclic(g), x, rad), brute);
    }
}

TEST(Orbit, MinIndexExactAndTruncation) {
    ElementaryGroup tight({Isometry4::translation({1, 0, 0})}, {1});
    EXPECT_NEAR(min_index_exact(tight, Point4(0, 0, 0, 50.0)), 2 * std::asinh(1.0 / 100.0), 1e-15);
    // Screw motion: some power displaces less than the generator far from the screw axis.
    auto s = Isometry4::parabolic(2.0 * std::numbers::pi / 3 + 0.01, {0, 0, 1}, {0, 0, 0.01});
    ElementaryGroup S({s}, {1});
    Point4 far(5, 0, 0, 1);
    EXPECT_THROW(S.min_index(far), TruncationInsufficient);
    double m = min_index_exact(S, far);
    double brute = 1e300;
    for (int n = 1; n <= 50; ++n) brute = std::min(brute, index(s.power(n), far));
    EXPECT_NEAR(m, brute, 1e-12);
    EXPECT_LT(m, index(s, far));
}

TEST(Cone, PhiMatchesClosedFormForTranslation) {
    double tau = 2.0, nu = 0.3;
    MargulisCone K(cyclic(Isometry4::translation({tau, 0, 0}), 1.0, 1000.0), nu);
    Point4 b = project_phi(K, Point4(0.3, -1.0, 2.0, 1.0));
    double h = tau / (2.0 * std::sinh(nu / 2.0));
    EXPECT_NEAR(b.x4(), h, 1e-9 * h);
    EXPECT_NEAR(b.x1(), 0.3, 0.0);
    EXPECT_LE(std::abs(boundary_residual(K, b)), 1e-8);
}

TEST(Cone, PhiMatchesClosedFormForDilation) {
    double l = 0.2, nu = 0.5;
    MargulisCone K(cyclic(Isometry4::dilation(std::exp(l))), nu);
    Point4 a(1.0, 2.0, -0.5, 0.7);
    Point4 b = project_phi(K, a);
    double rho = std::acosh(std::sinh(nu / 2) / std::sinh(l / 2));
    EXPECT_NEAR(std::acosh(b.norm() / b.x4()), rho, 1e-9);
    EXPECT_NEAR(b.norm(), a.norm(), 1e-12);
    EXPECT_LE(std::abs(boundary_residual(K, b)), 1e-8);
}

TEST(Cone, EmptyConeIsReported) {
    MargulisCone K(cyclic(Isometry4::dilation(std::exp(1.0))), 0.5);
    EXPECT_THROW(project_phi(K, Point4(1, 0, 0, 1)), EmptyCone);
}

TEST(Cone, StarLikeAlongProjectionRays) {
    Rng r(3, hash_name("star"), 0);
    for (int i = 0; i < 40; ++i) {
        double nu = r.uniform(0.1, 1.0);
        auto g = Isometry4::loxodromic(std::exp(r.uniform(0.05, 0.9) * nu), r.uniform(0, 3.1),
                                       {r.normal(), r.normal(), r.normal()}, {r.normal(), r.normal(), r.normal()});
        MargulisCone K(cyclic(g, 1.25 * nu), nu);
        Vec3 u = normalized(Vec3{r.normal(), r.normal(), r.normal()});
        bool was_inside = true;
        int switches = 0;
        for (int k = 0; k <= 400; ++k) {
            double rho = 0.02 * k;
            bool in = cone_contains(K, Point4(std::tanh(rho) * u, 1.0 / std::cosh(rho)));
            if (in != was_inside) ++switches;
            was_inside = in;
        }
        EXPECT_LE(switches, 1);
    }
}

TEST(Cone, IndexIncreasesAwayFromTheAxis) {
    Rng r(4, hash_name("monotone"), 0);
    for (int i = 0; i < 40; ++i) {
        auto g = Isometry4::loxodromic(r.log_uniform(1.01, 3.0), r.uniform(0, 3.1), {r.normal(), r.normal(), r.normal()},
                                       {r.normal(), r.normal(), r.normal()});
        Vec3 u = normalized(Vec3{r.normal(), r.normal(), r.normal()});
        double radius = r.log_uniform(0.1, 10), prev = 0.0;
        for (int k = 0; k <= 200; ++k) {
            double d = index(g, detail::axis_orthogonal_point(radius, u, 0.03 * k));
            EXPECT_GE(d, prev - 1e-12);
            prev = d;
        }
    }
}

TEST(Cone, QFunction) {
    auto g = Isometry4::dilation(std::exp(0.1));
    auto q = q_function(g, Point4(0, 0, 0, 1), 0.35);
    ASSERT_TRUE(q.has_value());
    EXPECT_EQ(*q, 1);
    auto s = Isometry4::parabolic(2.0 * std::numbers::pi / 5, {0, 0, 1}, {0, 0, 0.05});
    Point4 far(3, 0, 0, 1);
    auto qs = q_function(s, far, 0.3);
    ASSERT_TRUE(qs.has_value());
    EXPECT_EQ(*qs, 5);
    EXPECT_FALSE(q_function(Isometry4::dilation(std::exp(1.0)), Point4(1, 0, 0, 0.1), 0.3).has_value());
}

TEST(Mesh, DilationMeshIsRotationallySymmetric) {
    double l = 0.2, nu = 0.5;
    MargulisCone K(cyclic(Isometry4::dilation(std::exp(l))), nu);
    Mesh m = cone_boundary_mesh(K, 12);
    ASSERT_EQ(m.vertices.size(), 144u);
    EXPECT_EQ(m.quads.size(), 11u * 12u);
    for (const auto& v : m.vertices) EXPECT_NEAR(v.x4(), m.vertices[0].x4(), 1e-9);
}

TEST(Mesh, ScrewMeshIsAnisotropic) {
    MargulisCone K(cyclic(Isometry4::loxodromic(std::exp(0.1), 1.5, {1, 0, 0}, {0, 1, 0}), 0.6), 0.5);
    Mesh m = cone_boundary_mesh(K, 12);
    double lo = 1e300, hi = 0;
    for (const auto& v : m.vertices) {
        lo = std::min(lo, v.x4());
        hi = std::max(hi, v.x4());
        EXPECT_LE(std::abs(boundary_residual(K, v)), 1e-8);
    }
    EXPECT_GT(hi - lo, 1e-3);
}

TEST(Mesh, ObjAndCsvOutput) {
    MargulisCone K(cyclic(Isometry4::translation({1, 0, 0}), 1.0, 1000.0), 0.4);
    Mesh m = cone_boundary_mesh(K, 4);
    std::ostringstream obj, csv;
    write_obj(obj, m);
    write_csv(csv, m);
    std::string o = obj.str(), c = csv.str();
    EXPECT_EQ(std::count(o.begin(), o.end(), 'v'), 16);
    EXPECT_EQ(std::count(o.begin(), o.end(), 'f'), 9);
    EXPECT_EQ(c.rfind("x1,x2,x3,x4\n", 0), 0u);
    EXPECT_EQ(std::count(c.begin(), c.end(), '\n'), 17);
}

TEST(Group, RejectsNonCommutingOrRotatingLattices) {
    EXPECT_THROW(ElementaryGroup({Isometry4::translation({1, 0, 0}), Isometry4::dilation(2.0)}, {1, 1}),
                 std::invalid_argument);
    EXPECT_THROW(ElementaryGroup({Isometry4::translation({1, 0, 0})}, {0}), std::invalid_argument);
}
