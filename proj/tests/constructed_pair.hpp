#pragma once

// Film pair with a single transversal crossing: a screw film F1 against a dilation film lying in
// the vertical half-plane through a chosen point of F1.

#include "hyp4/films.hpp"
#include "oracles.hpp"

namespace constructed {

using namespace hyp4;

inline RuledFilm screw_film() {
    auto T = Isometry4::loxodromic(1.3, 0.8, {1, 0, 0}, {0, 1, 0});
    return RuledFilm(T, Point4(1.0, 0.2, 0.5, 1.0), Point4(0.3, 1.1, -0.4, 0.8));
}

// Point of F1 the second film is built through; off the oracle's grid vertices.
inline Point4 crossing_point(const RuledFilm& F1) { return F1.point(Sheet::theta, 0.4637, 0.5219); }

// A dilation film lying in the vertical half-plane over span(u), spanning the angular sector
// [phi - delta, phi + delta] around the point P, plus the data the sector oracle needs.
struct SectorFilm {
    RuledFilm film;
    Vec3 u, c1, c2;
    double phi_lo, phi_hi;
    int orientation;
};

inline SectorFilm sector_film(const Point4& P, double delta, bool reverse) {
    Vec3 u = normalized(P.horizontal());
    Vec3 seed = std::abs(u[0]) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    Vec3 c1 = normalized(seed - dot(seed, u) * u);
    Vec3 c2 = cross(u, c1);
    double phi = std::atan2(P.x4(), dot(u, P.horizontal()));
    double rad = P.norm();
    auto at = [&](double a, double r) { return Point4(r * std::cos(a) * u, r * std::sin(a)); };
    Point4 y = at(phi - delta, 0.9 * rad), w = at(phi + delta, 1.1 * rad);
    RuledFilm F(Isometry4::dilation(1.5), reverse ? w : y, reverse ? y : w);
    // Along the arc from the film's x to its z the angle increases unless reversed.
    return {F, u, c1, c2, phi - delta, phi + delta, reverse ? 1 : -1};
}

// Signed crossing count of F1 with the union of translates of the sector film, from the dense
// sign scan, together with the number of crossing cells.
inline std::pair<int, int> oracle_count(const RuledFilm& F1, const SectorFilm& S, int n = 2048) {
    int expected = 0, cells = 0;
    for (Sheet sh : F1.sheets()) {
        auto o = oracle::sign_scan([&](double s, double t) { return F1.point(sh, s, t); }, S.u, S.c1, S.c2, S.phi_lo,
                                   S.phi_hi, S.orientation, n);
        expected += o.signed_count;
        cells += o.cells;
    }
    return {expected, cells};
}

}  // namespace constructed
