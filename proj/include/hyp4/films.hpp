#pragma once

#include "hyp4/margulis.hpp"

#include <ostream>
#include <vector>

namespace hyp4 {

enum class Sheet { lambda, theta };

inline const char* sheet_name(Sheet s) { return s == Sheet::lambda ? "lambda" : "theta"; }

class RuledFilm {
public:
    RuledFilm(Isometry4 T, Point4 x, Point4 z) : T_(std::move(T)), x_(x), z_(z) {
        if (euclid_dist_sq(x, z) == 0.0) throw std::invalid_argument("RuledFilm: x == z");
    }
    const Isometry4& T() const { return T_; }
    const Point4& x() const { return x_; }
    const Point4& z() const { return z_; }

    // The rotational sheet collapses to a curve when T has no rotation.
    std::vector<Sheet> sheets() const {
        if (T_.theta() == 0.0) return {Sheet::lambda};
        return {Sheet::lambda, Sheet::theta};
    }

    Point4 point(Sheet sheet, double s, double t) const {
        Point4 p = geodesic_point(x_, z_, s);
        if (sheet == Sheet::lambda) return T_.translational_part(t)(p);
        return T_.rotational_part(t)(T_.translational_part(1.0)(p));
    }

    RuledFilm reversed() const { return RuledFilm(T_, z_, x_); }

private:
    Isometry4 T_;
    Point4 x_, z_;
};

inline Point4 film_point(const RuledFilm& F, Sheet sheet, double s, double t) { return F.point(sheet, s, t); }

// Definition-style capping: each region D is the geodesic cone from the start of its boundary arc,
// each triangle is the geodesic cone from x (or z) over the opposite side.
class ExtendedRuledFilm {
public:
    explicit ExtendedRuledFilm(RuledFilm base) : base_(std::move(base)) {}
    const RuledFilm& base() const { return base_; }

    enum class Piece { D_x_lambda, D_x_theta, D_z_lambda, D_z_theta, tri_x, tri_z };

    Point4 point(Piece piece, double r, double t) const {
        const Isometry4& T = base_.T();
        bool at_x = piece == Piece::D_x_lambda || piece == Piece::D_x_theta || piece == Piece::tri_x;
        const Point4& p = at_x ? base_.x() : base_.z();
        Point4 pl = T.translational_part(1.0)(p);
        switch (piece) {
            case Piece::D_x_lambda:
            case Piece::D_z_lambda:
                return geodesic_or_point(p, T.translational_part(t)(p), r);
            case Piece::D_x_theta:
            case Piece::D_z_theta:
                return geodesic_or_point(pl, T.rotational_part(t)(pl), r);
            default:
                return geodesic_or_point(p, geodesic_or_point(pl, T.apply(p), t), r);
        }
    }

    // Largest Euclidean disagreement along the arcs and segments where pieces are glued.
    double gluing_defect(int samples = 64) const {
        const RuledFilm& F = base_;
        double worst = 0.0;
        auto upd = [&](const Point4& a, const Point4& b) { worst = std::max(worst, euclid_dist(a, b)); };
        for (int i = 0; i <= samples; ++i) {
            double t = static_cast<double>(i) / samples;
            upd(point(Piece::D_x_lambda, 1.0, t), F.point(Sheet::lambda, 0.0, t));
            upd(point(Piece::D_z_lambda, 1.0, t), F.point(Sheet::lambda, 1.0, t));
            upd(point(Piece::D_x_theta, 1.0, t), F.point(Sheet::theta, 0.0, t));
            upd(point(Piece::D_z_theta, 1.0, t), F.point(Sheet::theta, 1.0, t));
            upd(point(Piece::D_x_lambda, t, 1.0), point(Piece::tri_x, t, 0.0));
            upd(point(Piece::D_z_lambda, t, 1.0), point(Piece::tri_z, t, 0.0));
            upd(point(Piece::D_x_theta, t, 1.0), point(Piece::tri_x, 1.0, t));
            upd(point(Piece::D_z_theta, t, 1.0), point(Piece::tri_z, 1.0, t));
        }
        return worst;
    }

private:
    static Point4 geodesic_or_point(const Point4& a, const Point4& b, double s) {
        if (euclid_dist_sq(a, b) == 0.0) return a;
        return geodesic_point(a, b, s);
    }
    RuledFilm base_;
};

struct GeneralPositionCertificate {
    bool cond_i = false;
    double margin_lq = 0.0;    // min Euclidean distance of [x,z] to L_q (inf if L_q is empty)
    double margin_axis = 0.0;  // min Euclidean distance of [x,z] to the axis (inf if parabolic)
    bool cond_ii = false;
    double margin_ii = 0.0;    // angle of the spanning hyperplane away from orthogonality with L_q
    bool certified = false;
};

inline GeneralPositionCertificate check_general_position(const RuledFilm& F, double threshold = 1e-3) {
    const Isometry4& T = F.T();
    const double inf = std::numeric_limits<double>::infinity();
    GeneralPositionCertificate c;
    auto seg_min = [&](auto&& f) {
        const int n = 256;
        int best = 0;
        double bv = inf;
        for (int i = 0; i <= n; ++i) {
            double v = f(geodesic_point(F.x(), F.z(), static_cast<double>(i) / n));
            if (v < bv) bv = v, best = i;
        }
        double lo = std::max(0, best - 1) / static_cast<double>(n), hi = std::min(n, best + 1) / static_cast<double>(n);
        auto r = golden_min([&](double s) { return f(geodesic_point(F.x(), F.z(), s)); }, lo, hi);
        return std::min(bv, r.value);
    };
    c.margin_lq = T.theta() == 0.0 ? inf : seg_min([&](const Point4& p) { return T.rotation_radius(p); });
    c.margin_axis = T.is_loxodromic() ? seg_min([](const Point4& p) { return norm(p.horizontal()); }) : inf;
    c.cond_i = std::min(c.margin_lq, c.margin_axis) > threshold;
    if (T.is_loxodromic() && T.theta() != 0.0) {
        Vec3 n = cross(F.x().horizontal(), F.z().horizontal());
        double scale = norm(F.x().horizontal()) * norm(F.z().horizontal());
        if (norm(n) <= 1e-12 * scale) {
            c.margin_ii = std::numbers::pi / 2;
        } else {
            double cosang = std::min(1.0, std::abs(dot(normalized(n), T.rotation_axis())));
            c.margin_ii = std::acos(cosang);
        }
    } else {
        c.margin_ii = inf;
    }
    c.cond_ii = c.margin_ii > threshold;
    c.certified = c.cond_i && c.cond_ii;
    return c;
}

struct NewtonConfig {
    int seeds = 32;
    int max_iter = 50;
    double residual_tol = 1e-11;
    double singular_tol = 1e-7;
    double dedup_radius = 1e-6;
    double fd_step = 1e-7;
};

struct PlaneRoot {
    Sheet sheet;
    double s, t;
    Point4 point;
    double sigma_min;
};

struct FilmPlaneResult {
    int count = 0;
    std::vector<PlaneRoot> roots;
    int degeneracies = 0;
    bool reliable = true;
};

namespace detail {

inline bool in_unit_square(double s, double t, double slack) {
    return s >= -slack && s <= 1.0 + slack && t >= -slack && t <= 1.0 + slack;
}

inline std::array<double, 4> coords_diff(const Point4& a, const Point4& b, double h) {
    return {(a[0] - b[0]) / h, (a[1] - b[1]) / h, (a[2] - b[2]) / h, (a[3] - b[3]) / h};
}

}  // namespace detail

inline FilmPlaneResult count_film_plane_intersections(const RuledFilm& F, const GeodesicPlane2& P,
                                                      const NewtonConfig& cfg = {}) {
    FilmPlaneResult res;
    const int n = cfg.seeds;
    const double h = cfg.fd_step;
    for (Sheet sh : F.sheets()) {
        auto eval = [&](double s, double t) {
            auto [a, b] = plane_constraints(P, F.point(sh, s, t));
            return Eigen::Vector2d(a, b);
        };
        std::vector<Eigen::Vector2d> grid((n + 1) * (n + 1));
        for (int j = 0; j <= n; ++j)
            for (int i = 0; i <= n; ++i) grid[j * (n + 1) + i] = eval(static_cast<double>(i) / n, static_cast<double>(j) / n);
        std::vector<PlaneRoot> sheet_roots;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                // Seed only cells whose corner ranges, widened by their own spread, bracket zero in both constraints.
                bool keep = true;
                for (int k = 0; k < 2 && keep; ++k) {
                    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
                    for (int dj = 0; dj < 2; ++dj)
                        for (int di = 0; di < 2; ++di) {
                            double v = grid[(j + dj) * (n + 1) + i + di](k);
                            lo = std::min(lo, v);
                            hi = std::max(hi, v);
                        }
                    double w = hi - lo;
                    keep = lo - w <= 0.0 && hi + w >= 0.0;
                }
                if (!keep) continue;
                double s = (i + 0.5) / n, t = (j + 0.5) / n;
                bool converged = false;
                Eigen::Matrix2d J;
                for (int it = 0; it < cfg.max_iter; ++it) {
                    Eigen::Vector2d f = eval(s, t);
                    J.col(0) = (eval(s + h, t) - eval(s - h, t)) / (2 * h);
                    J.col(1) = (eval(s, t + h) - eval(s, t - h)) / (2 * h);
                    if (f.norm() <= cfg.residual_tol) {
                        converged = true;
                        break;
                    }
                    Eigen::Vector2d step = J.fullPivLu().solve(-f);
                    if (!step.allFinite()) break;
                    s += step(0);
                    t += step(1);
                    if (!detail::in_unit_square(s, t, 0.25)) break;
                }
                if (!converged || !detail::in_unit_square(s, t, 1e-9)) continue;
                s = std::clamp(s, 0.0, 1.0);
                t = std::clamp(t, 0.0, 1.0);
                bool dup = false;
                for (const auto& r : sheet_roots)
                    if (std::hypot(r.s - s, r.t - t) < cfg.dedup_radius) dup = true;
                if (dup) continue;
                Eigen::JacobiSVD<Eigen::Matrix2d> svd(J);
                sheet_roots.push_back({sh, s, t, F.point(sh, s, t), svd.singularValues()(1)});
            }
        for (auto& r : sheet_roots) {
            bool dup = false;
            for (const auto& q : res.roots)
                if (euclid_dist(q.point, r.point) < cfg.dedup_radius * std::max(1.0, r.point.norm())) dup = true;
            if (dup) continue;
            if (r.sigma_min < cfg.singular_tol) {
                ++res.degeneracies;
                res.reliable = false;
            }
            res.roots.push_back(r);
        }
    }
    std::sort(res.roots.begin(), res.roots.end(), [](const PlaneRoot& a, const PlaneRoot& b) {
        return std::tie(a.sheet, a.s, a.t) < std::tie(b.sheet, b.s, b.t);
    });
    res.count = static_cast<int>(res.roots.size());
    return res;
}

struct FilmRoot {
    Sheet sheet1;
    double s, t;
    Sheet sheet2;
    double u, v;
    std::vector<int> word;
    Point4 point;
    int sign;
    double sigma_min;
};

struct FilmFilmResult {
    int signed_count = 0;
    std::vector<FilmRoot> roots;
    int translates_tested = 0;
    int degeneracies = 0;
    bool reliable = true;
};

namespace detail {

struct SheetSamples {
    int n;
    std::vector<Point4> pts;
    double spacing;  // largest Euclidean distance between grid neighbours
    const Point4& at(int i, int j) const { return pts[j * (n + 1) + i]; }
};

template <class Map>
SheetSamples sample_sheet(Map&& map, int n) {
    SheetSamples S{n, {}, 0.0};
    S.pts.reserve((n + 1) * (n + 1));
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) S.pts.push_back(map(static_cast<double>(i) / n, static_cast<double>(j) / n));
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) {
            if (i < n) S.spacing = std::max(S.spacing, euclid_dist(S.at(i, j), S.at(i + 1, j)));
            if (j < n) S.spacing = std::max(S.spacing, euclid_dist(S.at(i, j), S.at(i, j + 1)));
        }
    return S;
}

struct Ball {
    Point4 center;
    double radius;
};

inline Ball bounding_ball(const RuledFilm& F, int n = 16) {
    Point4 c = F.point(Sheet::lambda, 0.5, 0.5);
    double r = 0.0, step = 0.0;
    for (Sheet sh : F.sheets())
        for (int j = 0; j <= n; ++j)
            for (int i = 0; i <= n; ++i) {
                Point4 p = F.point(sh, static_cast<double>(i) / n, static_cast<double>(j) / n);
                r = std::max(r, dist(c, p));
                if (i < n) step = std::max(step, dist(p, F.point(sh, (i + 1.0) / n, static_cast<double>(j) / n)));
                if (j < n) step = std::max(step, dist(p, F.point(sh, static_cast<double>(i) / n, (j + 1.0) / n)));
            }
    return {c, r + step};
}

}  // namespace detail

// Signed count of transversal intersections of F1 with the translates w F2, w in G.
inline FilmFilmResult count_film_film_intersections(const RuledFilm& F1, const RuledFilm& F2, const ElementaryGroup& G,
                                                    const NewtonConfig& cfg = {}) {
    FilmFilmResult res;
    auto b1 = detail::bounding_ball(F1);
    auto b2 = detail::bounding_ball(F2);
    double reach = b1.radius + b2.radius + dist(b1.center, b2.center);
    auto window = G.window_for(reach, b2.center.x4());

    std::vector<std::vector<int>> words{std::vector<int>(G.rank(), 0)};
    G.for_each_word(window, [&](const std::vector<int>& e) { words.push_back(e); }, true);

    const int n = cfg.seeds;
    const double h = cfg.fd_step;
    for (const auto& e : words) {
        Similarity W = G.word(e);
        if (dist(b1.center, W(b2.center)) > b1.radius + b2.radius) continue;
        ++res.translates_tested;
        for (Sheet sh1 : F1.sheets())
            for (Sheet sh2 : F2.sheets()) {
                auto f1 = [&](double s, double t) { return F1.point(sh1, s, t); };
                auto f2 = [&](double u, double v) { return W(F2.point(sh2, u, v)); };
                auto S1 = detail::sample_sheet(f1, n);
                auto S2 = detail::sample_sheet(f2, n);
                double gate = 2.0 * (S1.spacing + S2.spacing);
                std::vector<FilmRoot> local;
                for (int j = 0; j < n; ++j)
                    for (int i = 0; i < n; ++i) {
                        double s = (i + 0.5) / n, t = (j + 0.5) / n;
                        Point4 p = f1(s, t);
                        int bi = -1, bj = -1;
                        double bd = std::numeric_limits<double>::infinity();
                        for (int jj = 0; jj <= n; ++jj)
                            for (int ii = 0; ii <= n; ++ii) {
                                double d = euclid_dist_sq(p, S2.at(ii, jj));
                                if (d < bd) bd = d, bi = ii, bj = jj;
                            }
                        if (std::sqrt(bd) > gate) continue;
                        double u = static_cast<double>(bi) / n, v = static_cast<double>(bj) / n;
                        bool converged = false;
                        Eigen::Matrix4d J;
                        for (int it = 0; it < cfg.max_iter; ++it) {
                            Point4 a = f1(s, t), b = f2(u, v);
                            Eigen::Vector4d r(a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]);
                            auto ds = detail::coords_diff(f1(s + h, t), f1(s - h, t), 2 * h);
                            auto dt = detail::coords_diff(f1(s, t + h), f1(s, t - h), 2 * h);
                            auto du = detail::coords_diff(f2(u + h, v), f2(u - h, v), 2 * h);
                            auto dv = detail::coords_diff(f2(u, v + h), f2(u, v - h), 2 * h);
                            for (int k = 0; k < 4; ++k) {
                                J(k, 0) = ds[k];
                                J(k, 1) = dt[k];
                                J(k, 2) = -du[k];
                                J(k, 3) = -dv[k];
                            }
                            if (r.norm() <= cfg.residual_tol) {
                                converged = true;
                                break;
                            }
                            Eigen::Vector4d step = J.fullPivLu().solve(-r);
                            if (!step.allFinite()) break;
                            s += step(0);
                            t += step(1);
                            u += step(2);
                            v += step(3);
                            if (!detail::in_unit_square(s, t, 0.25) || !detail::in_unit_square(u, v, 0.25)) break;
                        }
                        if (!converged || !detail::in_unit_square(s, t, 1e-9) || !detail::in_unit_square(u, v, 1e-9))
                            continue;
                        bool dup = false;
                        for (const auto& q : local)
                            if (std::hypot(q.s - s, q.t - t) < cfg.dedup_radius) dup = true;
                        if (dup) continue;
                        Eigen::JacobiSVD<Eigen::Matrix4d> svd(J);
                        double det = J.determinant();
                        local.push_back({sh1, std::clamp(s, 0.0, 1.0), std::clamp(t, 0.0, 1.0), sh2,
                                         std::clamp(u, 0.0, 1.0), std::clamp(v, 0.0, 1.0), e, f1(s, t),
                                         det > 0 ? 1 : -1, svd.singularValues()(3)});
                    }
                for (auto& r : local) {
                    bool dup = false;
                    for (const auto& q : res.roots)
                        if (euclid_dist(q.point, r.point) < cfg.dedup_radius * std::max(1.0, r.point.norm())) dup = true;
                    if (dup) continue;
                    if (r.sigma_min < cfg.singular_tol) {
                        ++res.degeneracies;
                        res.reliable = false;
                    }
                    res.roots.push_back(r);
                }
            }
    }
    std::sort(res.roots.begin(), res.roots.end(), [](const FilmRoot& a, const FilmRoot& b) {
        return std::tie(a.word, a.sheet1, a.s, a.t) < std::tie(b.word, b.sheet1, b.s, b.t);
    });
    for (const auto& r : res.roots) res.signed_count += r.sign;
    return res;
}

inline void write_roots_csv(std::ostream& os, const std::vector<FilmRoot>& roots) {
    os.precision(17);
    os << "sheet1,s,t,sheet2,u,v,x1,x2,x3,x4,sign\n";
    for (const auto& r : roots)
        os << sheet_name(r.sheet1) << ',' << r.s << ',' << r.t << ',' << sheet_name(r.sheet2) << ',' << r.u << ','
           << r.v << ',' << r.point.x1() << ',' << r.point.x2() << ',' << r.point.x3() << ',' << r.point.x4() << ','
           << r.sign << '\n';
}

}  // namespace hyp4
