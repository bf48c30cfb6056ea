#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace hyp4 {

using Vec3 = std::array<double, 3>;
using Vec5 = std::array<double, 5>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline Vec3 normalized(const Vec3& a) {
    double n = norm(a);
    if (!(n > 0.0)) throw std::invalid_argument("cannot normalize zero vector");
    return (1.0 / n) * a;
}

inline constexpr double kMinHeight = 1e-300;

class Point4 {
public:
    Point4(double x1, double x2, double x3, double x4) : c_{x1, x2, x3, x4} {
        for (double v : c_)
            if (!std::isfinite(v)) throw std::invalid_argument("Point4: non-finite coordinate");
        if (!(x4 >= kMinHeight)) throw std::invalid_argument("Point4: x4 must be positive");
    }
    Point4(const Vec3& h, double x4) : Point4(h[0], h[1], h[2], x4) {}

    double x1() const { return c_[0]; }
    double x2() const { return c_[1]; }
    double x3() const { return c_[2]; }
    double x4() const { return c_[3]; }
    double operator[](int i) const { return c_[i]; }
    Vec3 horizontal() const { return {c_[0], c_[1], c_[2]}; }
    double norm_sq() const { return c_[0] * c_[0] + c_[1] * c_[1] + c_[2] * c_[2] + c_[3] * c_[3]; }
    double norm() const { return std::sqrt(norm_sq()); }
    const std::array<double, 4>& coords() const { return c_; }

private:
    std::array<double, 4> c_;
};

inline double euclid_dist_sq(const Point4& p, const Point4& q) {
    double s = 0.0;
    for (int i = 0; i < 4; ++i) s += (p[i] - q[i]) * (p[i] - q[i]);
    return s;
}
inline double euclid_dist(const Point4& p, const Point4& q) { return std::sqrt(euclid_dist_sq(p, q)); }

class BoundaryPoint {
public:
    static BoundaryPoint infinity() { return BoundaryPoint(true, {0, 0, 0}); }
    static BoundaryPoint finite(const Vec3& v) {
        for (double c : v)
            if (!std::isfinite(c)) throw std::invalid_argument("BoundaryPoint: non-finite coordinate");
        return BoundaryPoint(false, v);
    }
    bool is_infinity() const { return inf_; }
    const Vec3& point() const { return v_; }

private:
    BoundaryPoint(bool inf, Vec3 v) : inf_(inf), v_(v) {}
    bool inf_;
    Vec3 v_;
};

// Model distance in the numerically stable half-angle form:
// sinh(d/2) = |p - q| / (2 sqrt(p4 q4)), equivalent to arccosh(1 + |p-q|^2/(2 p4 q4)).
inline double dist(const Point4& p, const Point4& q) {
    double e = euclid_dist(p, q);
    return 2.0 * std::asinh(e / (2.0 * std::sqrt(p.x4() * q.x4())));
}

inline double dist_arccosh(const Point4& p, const Point4& q) {
    double arg = 1.0 + euclid_dist_sq(p, q) / (2.0 * p.x4() * q.x4());
    return std::acosh(std::max(1.0, arg));
}

// Hyperboloid model, signature (-,+,+,+,+).
inline Vec5 to_hyperboloid(const Point4& p) {
    double n2 = p.norm_sq(), h = p.x4();
    return {(1.0 + n2) / (2.0 * h), p.x1() / h, p.x2() / h, p.x3() / h, (n2 - 1.0) / (2.0 * h)};
}

inline double minkowski(const Vec5& a, const Vec5& b) {
    return -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3] + a[4] * b[4];
}

inline Point4 from_hyperboloid(const Vec5& X) {
    double h = 1.0 / (X[0] - X[4]);
    return Point4(X[1] * h, X[2] * h, X[3] * h, h);
}

class GeodesicSegment {
public:
    GeodesicSegment(const Point4& a, const Point4& b) : a_(a), b_(b) {
        if (euclid_dist_sq(a, b) == 0.0) throw std::invalid_argument("GeodesicSegment: endpoints coincide");
    }
    const Point4& a() const { return a_; }
    const Point4& b() const { return b_; }
    double length() const { return dist(a_, b_); }

private:
    Point4 a_, b_;
};

class GeodesicRay {
public:
    GeodesicRay(const Point4& base, const BoundaryPoint& end) : base_(base), end_(end) {}
    const Point4& base() const { return base_; }
    const BoundaryPoint& end() const { return end_; }

private:
    Point4 base_;
    BoundaryPoint end_;
};

// Point at fraction s of the arclength from a to b. The point is written as
// alpha A + beta B in the hyperboloid model; the height is recovered from
// X0 - X4 = alpha/a4 + beta/b4, which avoids cancellation.
inline Point4 geodesic_point(const Point4& a, const Point4& b, double s) {
    double D = dist(a, b);
    double alpha, beta;
    if (D < 1e-8) {
        alpha = 1.0 - s;
        beta = s;
    } else {
        double sd = std::sinh(D);
        alpha = std::sinh((1.0 - s) * D) / sd;
        beta = std::sinh(s * D) / sd;
    }
    double inv = alpha / a.x4() + beta / b.x4();
    double h = 1.0 / inv;
    return Point4((alpha * a.x1() / a.x4() + beta * b.x1() / b.x4()) * h,
                  (alpha * a.x2() / a.x4() + beta * b.x2() / b.x4()) * h,
                  (alpha * a.x3() / a.x4() + beta * b.x3() / b.x4()) * h, h);
}

inline Point4 geodesic_point(const GeodesicSegment& s, double t) { return geodesic_point(s.a(), s.b(), t); }

// Point at hyperbolic arclength t from the base along the ray.
inline Point4 ray_point(const GeodesicRay& r, double t) {
    const Point4& a = r.base();
    if (r.end().is_infinity()) return Point4(a.x1(), a.x2(), a.x3(), a.x4() * std::exp(t));
    const Vec3& xi = r.end().point();
    Vec3 d = a.horizontal() - xi;
    double c = (dot(d, d) + a.x4() * a.x4()) / (2.0 * a.x4());
    double em = std::exp(-t), sh = std::sinh(t);
    double h = 1.0 / (em / a.x4() + sh / c);
    return Point4((em * a.x1() / a.x4() + sh / c * xi[0]) * h, (em * a.x2() / a.x4() + sh / c * xi[1]) * h,
                  (em * a.x3() / a.x4() + sh / c * xi[2]) * h, h);
}

// Point at distance t from x along the geodesic leaving x in the Euclidean direction v.
inline Point4 exp_point(const Point4& x, const std::array<double, 4>& v, double t) {
    Vec3 vh{v[0], v[1], v[2]};
    double vn = norm(vh);
    if (vn < 1e-12 * std::abs(v[3])) {
        double s = v[3] > 0 ? t : -t;
        return Point4(x.x1(), x.x2(), x.x3(), x.x4() * std::exp(s));
    }
    // The geodesic is the half circle centred on the boundary, in the vertical plane spanned by vh.
    Vec3 u = (1.0 / vn) * vh;
    double s0 = x.x4() * v[3] / vn;
    double rad = std::hypot(s0, x.x4());
    return ray_point(GeodesicRay(x, BoundaryPoint::finite(x.horizontal() + (s0 + rad) * u)), t);
}

struct MinResult {
    double arg;
    double value;
    int iterations;
};

// Golden-section search for a unimodal f on [lo, hi]; endpoints are included in the comparison.
template <class F>
MinResult golden_min(F&& f, double lo, double hi, double rel_tol = 1e-12, int max_iter = 200) {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - invphi * (b - a), d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    int it = 0;
    while (it < max_iter && (b - a) > rel_tol * std::max(1.0, std::abs(a) + std::abs(b))) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
        ++it;
    }
    MinResult best{c, fc, it};
    if (fd < best.value) best = {d, fd, it};
    double flo = f(lo), fhi = f(hi);
    if (flo < best.value) best = {lo, flo, it};
    if (fhi < best.value) best = {hi, fhi, it};
    return best;
}

inline double dist_point_segment(const Point4& z, const GeodesicSegment& s) {
    return golden_min([&](double t) { return dist(z, geodesic_point(s, t)); }, 0.0, 1.0).value;
}

inline double dist_point_ray(const Point4& z, const GeodesicRay& r) {
    // d(z, r(t)) >= t - d(z, base), so the minimizer lies in [0, 2 d(z, base)].
    double d0 = dist(z, r.base());
    double hi = std::min(2.0 * d0 + 1e-9, 700.0);
    if (d0 == 0.0) return 0.0;
    return golden_min([&](double t) { return dist(z, ray_point(r, t)); }, 0.0, hi).value;
}

// One sphere/plane constraint alpha |p|^2 + 2 b.p' + c with p' the horizontal part.
struct SphereConstraint {
    double alpha;
    Vec3 b;
    double c;
    double operator()(const Point4& p) const { return alpha * p.norm_sq() + 2.0 * dot(b, p.horizontal()) + c; }
    std::array<double, 4> gradient(const Point4& p) const {
        return {2.0 * alpha * p.x1() + 2.0 * b[0], 2.0 * alpha * p.x2() + 2.0 * b[1], 2.0 * alpha * p.x3() + 2.0 * b[2],
                2.0 * alpha * p.x4()};
    }
};

// A constraint <N, X(p)> = 0 in the hyperboloid model, scaled by 2 p4.
inline SphereConstraint constraint_from_normal(const Vec5& N) {
    SphereConstraint s{N[4] - N[0], {N[1], N[2], N[3]}, -(N[0] + N[4])};
    double scale = std::sqrt(s.alpha * s.alpha + dot(s.b, s.b) + s.c * s.c);
    s.alpha /= scale;
    s.b = (1.0 / scale) * s.b;
    s.c /= scale;
    return s;
}

class GeodesicPlane2 {
public:
    // Totally geodesic 2-plane through three points not on a common geodesic.
    static GeodesicPlane2 through_points(const Point4& p, const Point4& q, const Point4& r) {
        Eigen::Matrix<double, 3, 5> M;
        const Vec5 P[3] = {to_hyperboloid(p), to_hyperboloid(q), to_hyperboloid(r)};
        for (int i = 0; i < 3; ++i) {
            double s = std::sqrt(minkowski(P[i], P[i]) * -1.0);
            M(i, 0) = -P[i][0] / s;
            for (int j = 1; j < 5; ++j) M(i, j) = P[i][j] / s;
        }
        Eigen::JacobiSVD<Eigen::Matrix<double, 3, 5>> svd(M, Eigen::ComputeFullV);
        auto sv = svd.singularValues();
        if (sv(2) < 1e-12 * sv(0)) throw std::invalid_argument("GeodesicPlane2: points are geodesically collinear");
        Vec5 n1, n2;
        for (int j = 0; j < 5; ++j) {
            n1[j] = svd.matrixV()(j, 3);
            n2[j] = svd.matrixV()(j, 4);
        }
        return GeodesicPlane2(constraint_from_normal(n1), constraint_from_normal(n2));
    }

    // Vertical plane through p spanned by the horizontal direction dir and the x4 direction.
    static GeodesicPlane2 vertical(const Point4& p, const Vec3& dir) {
        Vec3 u = normalized(dir);
        Point4 q(p.horizontal() + u, p.x4());
        Point4 r(p.horizontal(), 2.0 * p.x4());
        return through_points(p, q, r);
    }

    GeodesicPlane2(const SphereConstraint& f, const SphereConstraint& g) : f_(f), g_(g) {
        double dotfg = f.alpha * g.alpha + dot(f.b, g.b) + f.c * g.c;
        double nf = f.alpha * f.alpha + dot(f.b, f.b) + f.c * f.c;
        double ng = g.alpha * g.alpha + dot(g.b, g.b) + g.c * g.c;
        if (std::abs(dotfg) > (1.0 - 1e-12) * std::sqrt(nf * ng))
            throw std::invalid_argument("GeodesicPlane2: proportional constraints");
    }

    const SphereConstraint& first() const { return f_; }
    const SphereConstraint& second() const { return g_; }

private:
    SphereConstraint f_, g_;
};

inline std::pair<double, double> plane_constraints(const GeodesicPlane2& P, const Point4& p) {
    return {P.first()(p), P.second()(p)};
}

}  // namespace hyp4
