#pragma once

// Brute-force reference computations used by the unit and acceptance tests. None of these call
// into the code paths they are used to check.

#include "hyp4/films.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

using namespace hyp4;

// Hyperbolic length of a parametrized path s in [0,1] by composite Simpson on |gamma'| / gamma_4.
inline double path_length(const std::function<Point4(double)>& path, int n = 2000) {
    auto speed = [&](double s) {
        const double h = 1e-6;
        double a = std::max(0.0, s - h), b = std::min(1.0, s + h);
        Point4 p = path(a), q = path(b), m = path(s);
        double e = 0.0;
        for (int i = 0; i < 4; ++i) e += (q[i] - p[i]) * (q[i] - p[i]);
        return std::sqrt(e) / (b - a) / m.x4();
    };
    double sum = speed(0.0) + speed(1.0);
    for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * speed(static_cast<double>(i) / n);
    return sum / (3.0 * n);
}

// Model distance from the defining arccosh formula, evaluated in long double.
inline double model_dist(const Point4& p, const Point4& q) {
    long double e = 0;
    for (int i = 0; i < 4; ++i) e += (static_cast<long double>(p[i]) - q[i]) * (static_cast<long double>(p[i]) - q[i]);
    long double arg = 1.0L + e / (2.0L * p.x4() * q.x4());
    return static_cast<double>(std::acosh(arg));
}

inline double dense_min(const std::function<double(double)>& f, double lo, double hi, long n) {
    double best = f(lo);
    for (long i = 1; i <= n; ++i) best = std::min(best, f(lo + (hi - lo) * static_cast<double>(i) / n));
    return best;
}

// g applied n times (n >= 0) or its inverse applied -n times, with the inverse taken as a similarity.
inline Point4 iterate(const hyp4::Isometry4& g, int n, Point4 p) {
    hyp4::Similarity s = g.as_similarity();
    if (n >= 0) {
        for (int i = 0; i < n; ++i) p = s(p);
        return p;
    }
    // Inverse similarity: x -> Q^T (x - t) / scale.
    for (int i = 0; i < -n; ++i) {
        hyp4::Vec3 d = p.horizontal() - s.t;
        hyp4::Vec3 r{0, 0, 0};
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) r[a] += s.Q[b][a] * d[b];
        p = Point4((1.0 / s.scale) * r, p.x4() / s.scale);
    }
    return p;
}

// Orbit count of x in the closed ball of radius r under a translation lattice, by direct enumeration
// of a generous box and explicit application of each translation.
inline long long lattice_orbit_count(const std::vector<hyp4::Vec3>& basis, const Point4& x, double r, int box) {
    long long count = 0;
    std::vector<int> e(basis.size(), -box);
    for (;;) {
        hyp4::Vec3 t{0, 0, 0};
        for (size_t i = 0; i < basis.size(); ++i) t = t + static_cast<double>(e[i]) * basis[i];
        Point4 y(x.horizontal() + t, x.x4());
        if (model_dist(x, y) <= r) ++count;
        size_t k = 0;
        while (k < e.size() && ++e[k] > box) e[k++] = -box;
        if (k == e.size()) break;
    }
    return count;
}

// Signed crossings of a film sheet with a vertical half-plane {x' in span(u)} restricted to the
// angular sector (phi_lo, phi_hi) measured from the horizontal direction u. The two normal
// coordinates G = (c1.x', c2.x') are sampled on an n x n grid, each cell is split into two
// triangles, and every zero of the piecewise-linear interpolant counts with the sign of its
// Jacobian. Each crossing is weighted by the orientation of the sector's sweep
// (sector_orientation) and by the sign of the frame (c1, c2, u, e4).
struct SectorCrossings {
    int signed_count = 0;
    int cells = 0;
};

inline SectorCrossings sign_scan(const std::function<Point4(double, double)>& sheet, const Vec3& u, const Vec3& c1,
                                 const Vec3& c2, double phi_lo, double phi_hi, int sector_orientation, int n = 2048) {
    std::vector<double> g1((n + 1) * (n + 1)), g2((n + 1) * (n + 1)), ang((n + 1) * (n + 1));
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) {
            Point4 p = sheet(static_cast<double>(i) / n, static_cast<double>(j) / n);
            int k = j * (n + 1) + i;
            g1[k] = dot(c1, p.horizontal());
            g2[k] = dot(c2, p.horizontal());
            ang[k] = std::atan2(p.x4(), dot(u, p.horizontal()));
        }
    // det(c1, c2, u, e4) as a 4x4 determinant with e4 last.
    int frame = dot(cross(c1, c2), u) > 0 ? 1 : -1;
    SectorCrossings out;
    // Triangle (k0, k1, k2) listed counterclockwise in the (s, t) parameter square.
    auto triangle = [&](int k0, int k1, int k2) {
        double ax = g1[k1] - g1[k0], ay = g2[k1] - g2[k0];
        double bx = g1[k2] - g1[k0], by = g2[k2] - g2[k0];
        double det = ax * by - ay * bx;
        if (det == 0.0) return;
        // Solve g(k0) + a (g(k1) - g(k0)) + b (g(k2) - g(k0)) = 0.
        double a = (-g1[k0] * by + g2[k0] * bx) / det;
        double b = (-ax * g2[k0] + ay * g1[k0]) / det;
        // Half-open containment so a zero on a shared edge is counted once.
        if (!(a >= 0.0 && b > 0.0 && a + b < 1.0)) return;
        double phi = ang[k0] + a * (ang[k1] - ang[k0]) + b * (ang[k2] - ang[k0]);
        if (phi <= phi_lo || phi >= phi_hi) return;
        out.signed_count += (det > 0 ? 1 : -1) * sector_orientation * frame;
        ++out.cells;
    };
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            int k00 = j * (n + 1) + i, k10 = k00 + 1, k01 = k00 + n + 1, k11 = k01 + 1;
            triangle(k00, k10, k11);
            triangle(k00, k11, k01);
        }
    return out;
}

}  // namespace oracle
