#include "hyp4/core.hpp"
#include "hyp4/isometry.hpp"
#include "hyp4/rng.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace hyp4;

namespace {

Point4 random_point(Rng& r) {
    return Point4(r.uniform(-5, 5), r.uniform(-5, 5), r.uniform(-5, 5), r.log_uniform(0.1, 10));
}

}  // namespace

TEST(Distance, SpotValues) {
    Point4 o(0, 0, 0, 1);
    EXPECT_EQ(dist(o, o), 0.0);
    EXPECT_NEAR(dist(o, Point4(0, 0, 0, std::exp(1.0))), 1.0, 1e-15);
    EXPECT_NEAR(dist(o, Point4(1, 0, 0, 1)), std::acosh(1.5), 1e-15);
    EXPECT_NEAR(dist(o, Point4(1, 0, 0, 1)), 0.9624236501192069, 1e-15);
}

TEST(Distance, MatchesPathLengthOfGeodesic) {
    Point4 a(0, 0, 0, 1), b(1, 0, 0, 1);
    double len = oracle::path_length([&](double s) { return geodesic_point(a, b, s); });
    EXPECT_NEAR(len, dist(a, b), 1e-8);
}

TEST(Distance, AgreesWithArccoshFormAndLongDoubleOracle) {
    Rng r(1, hash_name("dist"), 0);
    for (int i = 0; i < 2000; ++i) {
        Point4 p = random_point(r), q = random_point(r);
        double d = dist(p, q);
        EXPECT_NEAR(d, oracle::model_dist(p, q), 1e-12 * std::max(1.0, d));
        EXPECT_NEAR(d, dist_arccosh(p, q), 1e-9 * std::max(1.0, d));
    }
}

TEST(Distance, NearbyPointsKeepRelativePrecision) {
    Point4 p(0.3, -0.2, 0.1, 2.0), q(0.3 + 1e-10, -0.2, 0.1, 2.0);
    double dx = q.x1() - p.x1();
    EXPECT_NEAR(dist(p, q), 2.0 * std::asinh(dx / 4.0), 1e-15 * dx);
    EXPECT_GE(dist_arccosh(p, q), 0.0);
}

TEST(Distance, MetricProperties) {
    Rng r(2, hash_name("metric"), 0);
    for (int i = 0; i < 5000; ++i) {
        Point4 a = random_point(r), b = random_point(r), c = random_point(r);
        EXPECT_EQ(dist(a, b), dist(b, a));
        EXPECT_LE(dist(a, c), dist(a, b) + dist(b, c) + 1e-12 * (1 + dist(a, c)));
    }
}

TEST(Distance, InvariantUnderIsometries) {
    Rng r(3, hash_name("invariance"), 0);
    for (int i = 0; i < 500; ++i) {
        Vec3 e1{r.normal(), r.normal(), r.normal()}, e2{r.normal(), r.normal(), r.normal()};
        auto g = i % 2 ? Isometry4::loxodromic(r.log_uniform(1.01, 7.0), r.uniform(0, 3.14), e1, e2)
                       : Isometry4::parabolic(r.uniform(0, 3.0), e1, e2 - (dot(e2, e1) / dot(e1, e1)) * e1 + (0.3 / norm(e1)) * e1);
        Point4 p = random_point(r), q = random_point(r);
        double d = dist(p, q);
        EXPECT_NEAR(dist(g.apply(p), g.apply(q)), d, 1e-10 * std::max(1.0, d));
    }
}

TEST(Points, RejectInvalid) {
    EXPECT_THROW(Point4(0, 0, 0, 0), std::invalid_argument);
    EXPECT_THROW(Point4(0, 0, 0, -1), std::invalid_argument);
    EXPECT_THROW(Point4(std::nan(""), 0, 0, 1), std::invalid_argument);
    EXPECT_THROW(GeodesicSegment(Point4(0, 0, 0, 1), Point4(0, 0, 0, 1)), std::invalid_argument);
}

TEST(Hyperboloid, RoundTripAndInnerProduct) {
    Rng r(4, hash_name("hyperboloid"), 0);
    for (int i = 0; i < 1000; ++i) {
        Point4 p = random_point(r), q = random_point(r);
        Vec5 X = to_hyperboloid(p), Y = to_hyperboloid(q);
        EXPECT_NEAR(minkowski(X, X), -1.0, 1e-9 * X[0] * X[0]);
        Point4 back = from_hyperboloid(X);
        for (int k = 0; k < 4; ++k) EXPECT_NEAR(back[k], p[k], 1e-10 * (1 + std::abs(p[k])));
        double d = dist(p, q);
        EXPECT_NEAR(-minkowski(X, Y), std::cosh(d), 1e-9 * std::cosh(d));
    }
}

TEST(Geodesic, ArclengthParametrization) {
    Rng r(5, hash_name("geodesic"), 0);
    for (int i = 0; i < 200; ++i) {
        Point4 a = random_point(r), b = random_point(r);
        double D = dist(a, b);
        double s = r.unit();
        Point4 m = geodesic_point(a, b, s);
        EXPECT_NEAR(dist(a, m), s * D, 1e-9 * std::max(1.0, D));
        EXPECT_NEAR(dist(m, b), (1 - s) * D, 1e-9 * std::max(1.0, D));
    }
    Point4 a(0.1, 0.2, 0.3, 0.5), b(-1, 2, 0.5, 3);
    double len = oracle::path_length([&](double s) { return geodesic_point(a, b, s); });
    EXPECT_NEAR(len, dist(a, b), 1e-8);
}

TEST(Geodesic, ExpPointTravelsRequestedDistance) {
    Rng r(6, hash_name("exp"), 0);
    for (int i = 0; i < 500; ++i) {
        Point4 x = random_point(r);
        std::array<double, 4> v{r.normal(), r.normal(), r.normal(), r.normal()};
        double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]);
        for (auto& c : v) c /= n;
        double t = r.uniform(0, 8);
        EXPECT_NEAR(dist(x, exp_point(x, v, t)), t, 1e-8 * std::max(1.0, t));
    }
    Point4 x(0, 0, 0, 1);
    EXPECT_NEAR(exp_point(x, {0, 0, 0, 1}, 1.0).x4(), std::exp(1.0), 1e-14);
}

TEST(PointSegment, SpotValues) {
    GeodesicSegment s(Point4(0, 0, 0, 1), Point4(0, 0, 0, 4));
    EXPECT_NEAR(dist_point_segment(Point4(0, 0, 0, 2), s), 0.0, 1e-12);
    EXPECT_NEAR(dist_point_segment(geodesic_point(s, 0.3), s), 0.0, 1e-12);
}

TEST(PointSegment, DenseSamplingOracle) {
    GeodesicSegment s(Point4(0, 0, 0, 1), Point4(0, 0, 0, std::exp(1.0)));
    Point4 z(1, 0, 0, 1);
    double ref = oracle::dense_min([&](double t) { return dist(z, geodesic_point(s, t)); }, 0.0, 1.0, 1000000);
    EXPECT_NEAR(dist_point_segment(z, s), ref, 1e-9);

    Rng r(7, hash_name("segment"), 0);
    for (int i = 0; i < 20; ++i) {
        GeodesicSegment g(random_point(r), random_point(r));
        Point4 q = random_point(r);
        double o = oracle::dense_min([&](double t) { return dist(q, geodesic_point(g, t)); }, 0.0, 1.0, 200000);
        double v = dist_point_segment(q, g);
        EXPECT_LE(v, o + 1e-12);
        EXPECT_NEAR(v, o, 1e-9);
    }
}

TEST(PointRay, SpotValuesAndOracle) {
    GeodesicRay up(Point4(0, 0, 0, 1), BoundaryPoint::infinity());
    EXPECT_NEAR(dist_point_ray(Point4(0, 0, 0, 0.5), up), std::log(2.0), 1e-12);
    EXPECT_NEAR(dist_point_ray(ray_point(up, 2.5), up), 0.0, 1e-12);

    Rng r(8, hash_name("ray"), 0);
    for (int i = 0; i < 20; ++i) {
        Point4 base = random_point(r), z = random_point(r);
        BoundaryPoint end = i % 2 ? BoundaryPoint::infinity()
                                  : BoundaryPoint::finite({r.uniform(-5, 5), r.uniform(-5, 5), r.uniform(-5, 5)});
        GeodesicRay ray(base, end);
        double hi = 2.0 * dist(z, base) + 1.0;
        double o = oracle::dense_min([&](double t) { return dist(z, ray_point(ray, t)); }, 0.0, hi, 200000);
        double v = dist_point_ray(z, ray);
        EXPECT_LE(v, o + 1e-12);
        EXPECT_NEAR(v, o, 1e-9);
    }
}

TEST(PointRay, RayPointIsUnitSpeedTowardTheEndpoint) {
    Point4 a(0.5, -0.3, 1.0, 0.7);
    GeodesicRay ray(a, BoundaryPoint::finite({2.0, 1.0, -1.0}));
    for (double t : {0.1, 1.0, 4.0, 15.0}) EXPECT_NEAR(dist(a, ray_point(ray, t)), t, 1e-9 * t);
    Point4 far = ray_point(ray, 30.0);
    EXPECT_NEAR(far.x1(), 2.0, 1e-9);
    EXPECT_NEAR(far.x3(), -1.0, 1e-9);
}

TEST(Plane, ThroughThreePoints) {
    Rng r(9, hash_name("plane"), 0);
    for (int i = 0; i < 200; ++i) {
        Point4 p = random_point(r), q = random_point(r), w = random_point(r);
        auto P = GeodesicPlane2::through_points(p, q, w);
        for (const Point4& x : {p, q, w, geodesic_point(p, q, 0.37), geodesic_point(q, w, 0.81)}) {
            auto [f, g] = plane_constraints(P, x);
            double scale = 1.0 + x.norm_sq();
            EXPECT_NEAR(f, 0.0, 1e-8 * scale);
            EXPECT_NEAR(g, 0.0, 1e-8 * scale);
        }
    }
}

TEST(Plane, ConstraintGradientsMatchFiniteDifferences) {
    Point4 p(0.2, 0.1, -0.4, 1.1), q(1.0, -0.5, 0.3, 0.6), w(-0.7, 0.8, 0.2, 2.0);
    auto P = GeodesicPlane2::through_points(p, q, w);
    Point4 x(0.3, 0.3, 0.3, 0.9);
    const double h = 1e-6;
    for (const SphereConstraint* c : {&P.first(), &P.second()}) {
        auto grad = c->gradient(x);
        for (int k = 0; k < 4; ++k) {
            auto shift = [&](double d) {
                auto a = x.coords();
                a[k] += d;
                return Point4(a[0], a[1], a[2], a[3]);
            };
            double fd = ((*c)(shift(h)) - (*c)(shift(-h))) / (2 * h);
            EXPECT_NEAR(grad[k], fd, 1e-6 * (1 + std::abs(fd)));
        }
    }
    // Off-plane perturbation of size eps gives constraint values of order eps.
    double eps = 1e-5;
    Point4 y(p.x1() + eps, p.x2(), p.x3(), p.x4());
    auto [f, g] = plane_constraints(P, y);
    EXPECT_LT(std::hypot(f, g), 100 * eps);
}

TEST(Plane, VerticalPlaneContainsItsGenerators) {
    Point4 p(1, 2, 3, 0.5);
    auto P = GeodesicPlane2::vertical(p, {1, 0, 0});
    for (const Point4& x : {p, Point4(4, 2, 3, 7)}) {
        auto [f, g] = plane_constraints(P, x);
        EXPECT_NEAR(f, 0.0, 1e-12);
        EXPECT_NEAR(g, 0.0, 1e-12);
    }
    auto [f, g] = plane_constraints(P, Point4(1, 2.5, 3, 1));
    EXPECT_GT(std::hypot(f, g), 1e-3);
}

TEST(GoldenMin, FindsInteriorMinimum) {
    auto r = golden_min([](double t) { return (t - 0.3) * (t - 0.3); }, 0.0, 1.0);
    EXPECT_NEAR(r.arg, 0.3, 1e-6);
    EXPECT_LT(r.value, 1e-12);
}
