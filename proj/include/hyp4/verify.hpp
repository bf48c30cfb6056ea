#pragma once

#include "hyp4/bounds.hpp"
#include "hyp4/films.hpp"
#include "hyp4/report.hpp"
#include "hyp4/rng.hpp"
#include "hyp4/surface2d.hpp"

#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hyp4 {

struct Ranges {
    double x4_min = 0.1, x4_max = 10.0;
    double offset = 5.0;
    double log_lambda_max = 2.0;
    double theta_max = std::numbers::pi;
    double nu_min = 0.05, nu_max = 1.0;
};

struct SuiteConfig {
    std::string suite_id;
    long long trials = 1000;
    std::uint64_t seed = 42;
    double mu = 0.1;
    std::optional<double> nu;
    std::map<std::string, double> tolerances = {
        {"residual", 1e-8}, {"audit", 1e-9}, {"seam", 1e-12}, {"index_convexity", 1e-9}, {"hypercycle", 1e-12}};
    bounds::Exp3Reading exp3 = bounds::Exp3Reading::triple_arg;
    Ranges ranges;
    int max_pq = 12;

    double tol(const std::string& k) const { return tolerances.at(k); }

    void validate() const {
        if (trials < 1) throw std::invalid_argument("trials must be >= 1");
        for (const auto& [k, v] : tolerances)
            if (!(v > 0.0)) throw std::invalid_argument("tolerance " + k + " must be positive");
        if (!(mu > 0.0)) throw std::invalid_argument("mu must be positive");
        if (nu && !(*nu > 0.0)) throw std::invalid_argument("nu must be positive");
        if (max_pq < 1) throw std::invalid_argument("max_pq must be >= 1");
        const Ranges& r = ranges;
        if (!(r.x4_min > 0.0 && r.x4_max >= r.x4_min && r.offset >= 0.0 && r.log_lambda_max > 0.0 &&
              r.theta_max >= 0.0 && r.nu_min > 0.0 && r.nu_max >= r.nu_min))
            throw std::invalid_argument("invalid sampling ranges");
    }

    json to_json() const {
        json j;
        j["suite_id"] = suite_id;
        j["trials"] = trials;
        j["seed"] = seed;
        j["mu"] = mu;
        j["nu"] = nu ? json(*nu) : json(nullptr);
        j["tolerances"] = tolerances;
        j["exp3_reading"] = bounds::exp3_reading_name(exp3);
        j["ranges"] = {{"x4", {ranges.x4_min, ranges.x4_max}},
                       {"offset", ranges.offset},
                       {"log_lambda_max", ranges.log_lambda_max},
                       {"theta_max", ranges.theta_max},
                       {"nu", {ranges.nu_min, ranges.nu_max}}};
        j["max_pq"] = max_pq;
        return j;
    }
};

namespace sample {

inline Vec3 unit_vector(Rng& r) {
    for (;;) {
        Vec3 v{r.normal(), r.normal(), r.normal()};
        double n = norm(v);
        if (n > 1e-6) return (1.0 / n) * v;
    }
}

inline std::array<double, 4> unit_vector4(Rng& r) {
    for (;;) {
        std::array<double, 4> v{r.normal(), r.normal(), r.normal(), r.normal()};
        double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]);
        if (n > 1e-6) return {v[0] / n, v[1] / n, v[2] / n, v[3] / n};
    }
}

inline Point4 point(Rng& r, const Ranges& R) {
    Vec3 h{r.uniform(-R.offset, R.offset), r.uniform(-R.offset, R.offset), r.uniform(-R.offset, R.offset)};
    return Point4(h, r.log_uniform(R.x4_min, R.x4_max));
}

// A point at distance < rmax from x in a uniformly random direction.
inline Point4 near(Rng& r, const Point4& x, double rmax) { return exp_point(x, unit_vector4(r), rmax * r.unit()); }

inline int sign(Rng& r) { return r.unit() < 0.5 ? 1 : -1; }

inline Isometry4 loxodromic(Rng& r, double log_lambda, double theta) {
    for (;;) {
        Vec3 e1 = unit_vector(r), e2 = unit_vector(r);
        if (norm(cross(e1, e2)) < 0.1) continue;
        return Isometry4::loxodromic(std::exp(log_lambda), theta, e1, e2, sign(r));
    }
}

inline Isometry4 loxodromic(Rng& r, const Ranges& R, double l_min = 1e-2) {
    double l = r.log_uniform(l_min, R.log_lambda_max);
    return loxodromic(r, l, r.uniform(0.0, R.theta_max));
}

// Pure translation or screw motion with equal probability.
inline Isometry4 parabolic(Rng& r, const Ranges& R) {
    Vec3 ax = unit_vector(r);
    Vec3 perp{r.uniform(-2, 2), r.uniform(-2, 2), r.uniform(-2, 2)};
    perp = perp - dot(perp, ax) * ax;
    double along = sign(r) * r.uniform(0.2, 3.0);
    double theta = r.unit() < 0.5 ? 0.0 : r.uniform(0.05, std::max(0.05, R.theta_max));
    return Isometry4::parabolic(theta, ax, along * ax + perp, sign(r));
}

inline std::vector<Isometry4> lattice2(Rng& r) {
    for (;;) {
        Vec3 a = r.uniform(0.5, 3.0) * unit_vector(r), b = r.uniform(0.5, 3.0) * unit_vector(r);
        if (norm(cross(a, b)) >= 0.5 * norm(a) * norm(b)) return {Isometry4::translation(a), Isometry4::translation(b)};
    }
}

// family 0: cyclic loxodromic, 1: cyclic parabolic, 2: rank-2 translation lattice.
inline std::vector<Isometry4> group(Rng& r, const Ranges& R, int family) {
    if (family == 0) return {loxodromic(r, R)};
    if (family == 1) return {parabolic(r, R)};
    return lattice2(r);
}

inline const char* family_name(int family) {
    static const char* names[] = {"loxodromic", "parabolic", "lattice2"};
    return names[family];
}

inline double nu(Rng& r, const Ranges& R) { return r.uniform(R.nu_min, R.nu_max); }

}  // namespace sample

inline json to_json(const Point4& p) { return json::array({p.x1(), p.x2(), p.x3(), p.x4()}); }
inline json to_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

inline json to_json(const Isometry4& g) {
    json j;
    j["kind"] = g.is_loxodromic() ? "loxodromic" : "parabolic";
    if (g.is_loxodromic()) {
        j["lambda"] = g.lambda();
        auto [e1, e2] = g.rotation_plane();
        j["rotation_plane"] = {to_json(e1), to_json(e2)};
    } else {
        j["rotation_axis"] = to_json(g.rotation_axis());
        j["translation"] = to_json(g.translation());
    }
    j["theta"] = g.theta();
    j["orientation"] = g.orientation();
    return j;
}

inline json to_json(const std::vector<Isometry4>& gens) {
    json a = json::array();
    for (const auto& g : gens) a.push_back(to_json(g));
    return a;
}

namespace suites {

enum class Outcome { scored, rejected, degenerate };

inline constexpr int kMaxAttempts = 2000;

// Draws configurations until one satisfies the hypotheses; a trial that never does is starved.
template <class Attempt>
void run_trials(const SuiteConfig& cfg, VerificationReport& rep, Attempt&& attempt) {
    long long starved = 0;
    const std::uint64_t stream = hash_name(cfg.suite_id);
    for (long long i = 0; i < cfg.trials; ++i) {
        Rng rng(cfg.seed, stream, static_cast<std::uint64_t>(i));
        bool done = false;
        for (int a = 0; a < kMaxAttempts && !done; ++a) {
            Outcome o;
            try {
                o = attempt(rng, i);
            } catch (const TruncationInsufficient&) {
                o = Outcome::degenerate;
            } catch (const EmptyCone&) {
                o = Outcome::rejected;
            }
            if (o == Outcome::rejected)
                ++rep.rejected;
            else if (o == Outcome::degenerate)
                ++rep.degeneracies;
            else
                done = true;
        }
        if (done)
            ++rep.trials;
        else
            ++starved;
    }
    rep.details["starved_trials"] = starved;
    if (starved > 0)
        rep.violations.push_back({json{{"starved_trials", starved}}, static_cast<double>(starved), 0.0,
                                  -static_cast<double>(starved)});
}

inline ElementaryGroup plain_group(std::vector<Isometry4> gens) {
    std::vector<int> w(gens.size(), 1);
    return ElementaryGroup(std::move(gens), w);
}

inline double log_count_margin(const bounds::BoundValue& b, long long count) {
    return b.log_value - std::log(static_cast<double>(std::max<long long>(count, 1)));
}

inline VerificationReport orbit_suite(const SuiteConfig& cfg, bool overlap) {
    VerificationReport rep;
    double worst_ratio = -std::numeric_limits<double>::infinity();
    long long max_count = 0;
    run_trials(cfg, rep, [&](Rng& rng, long long i) {
        int family = static_cast<int>(i % 3);
        auto G = plain_group(sample::group(rng, cfg.ranges, family));
        Point4 x = sample::point(rng, cfg.ranges);
        double ir = min_index_exact(G, x) / 2.0;
        double nu;
        if (cfg.nu) {
            nu = *cfg.nu;
            if (ir < nu) return Outcome::rejected;
        } else {
            if (ir < cfg.ranges.nu_min) return Outcome::rejected;
            nu = rng.uniform(cfg.ranges.nu_min, std::min(cfg.ranges.nu_max, ir));
        }
        double r = rng.uniform(0.1, 3.0);
        long long count = overlap ? overlap_count(G, x, r) : orbit_count(G, x, r);
        auto b = overlap ? bounds::lemma2_count_bound(r, nu) : bounds::lemma1_count_bound(r, nu);
        double m = log_count_margin(b, count);
        max_count = std::max(max_count, count);
        worst_ratio = std::max(worst_ratio, -m);
        rep.record({{"family", sample::family_name(family)}, {"group", to_json(G.generators())}, {"x", to_json(x)},
                    {"nu", nu}, {"r", r}},
                   static_cast<double>(count), b.value, m);
        return Outcome::scored;
    });
    rep.details["margin_kind"] = "log(bound) - log(count)";
    rep.details["max_count"] = max_count;
    rep.details["max_log_count_over_bound"] = worst_ratio;
    return rep;
}

inline VerificationReport lemma3(const SuiteConfig& cfg) {
    VerificationReport rep;
    run_trials(cfg, rep, [&](Rng& rng, long long i) {
        int family = static_cast<int>(i % 3);
        auto G = plain_group(sample::group(rng, cfg.ranges, family));
        Point4 x = sample::point(rng, cfg.ranges);
        double nu = min_index_exact(G, x);
        double r = rng.uniform(0.1, 3.0);
        Point4 y = sample::near(rng, x, r);
        if (!(dist(x, y) < r)) return Outcome::rejected;
        double ir_y = min_index_exact(G, y) / 2.0;
        auto c1 = bounds::C1(r, nu);
        double m = std::log(ir_y) - (c1.log_value - std::log(2.0));
        rep.record({{"family", sample::family_name(family)}, {"group", to_json(G.generators())}, {"x", to_json(x)},
                    {"y", to_json(y)}, {"r", r}, {"nu", nu}},
                   ir_y, c1.value / 2.0, m);
        return Outcome::scored;
    });
    rep.details["margin_kind"] = "log(Ir(y)) - log(C1/2)";
    return rep;
}

// Point on the geodesic orthogonal to the vertical axis over 0, at distance rho from it.
inline Point4 off_axis_point(double radius, const Vec3& u, double rho) {
    return detail::axis_orthogonal_point(radius, u, rho);
}

inline VerificationReport lemma4(const SuiteConfig& cfg) {
    VerificationReport rep;
    run_trials(cfg, rep, [&](Rng& rng, long long) {
        Isometry4 g = sample::loxodromic(rng, cfg.ranges, 1e-3);
        double R = rng.uniform(0.5, 8.0);
        double nu = cfg.nu ? *cfg.nu : sample::nu(rng, cfg.ranges);
        double rho = 2.0 + rng.uniform(1e-9, 4.0);
        Point4 z = off_axis_point(rng.log_uniform(0.1, 10.0), sample::unit_vector(rng), rho);
        Point4 w(z.horizontal(), z.x4() * rng.log_uniform(1e-6, 1.0));
        double iz = index(g, z), iw = index(g, w);
        double dza = std::acosh(z.norm() / z.x4());
        if (!(dza > 2.0 && nu <= iz && iz <= R && iw <= R)) return Outcome::rejected;
        double d = dist(z, w), bound = R + 1.0 / nu;
        rep.record({{"g", to_json(g)}, {"z", to_json(z)}, {"w", to_json(w)}, {"R", R}, {"nu", nu}}, d, bound,
                   bound - d);
        return Outcome::scored;
    });
    rep.details["margin_kind"] = "R + 1/nu - d(z, w)";
    return rep;
}

inline VerificationReport prop4(const SuiteConfig& cfg) {
    VerificationReport rep;
    run_trials(cfg, rep, [&](Rng& rng, long long) {
        Point4 a = sample::point(rng, cfg.ranges), b = sample::point(rng, cfg.ranges);
        if (euclid_dist_sq(a, b) == 0.0) return Outcome::rejected;
        double R = rng.uniform(0.1, 6.0);
        Point4 c = geodesic_point(a, b, rng.unit());
        Point4 z = sample::near(rng, c, R);
        if (!(dist_point_segment(z, GeodesicSegment(a, b)) <= R)) return Outcome::rejected;
        double da = dist_point_ray(z, GeodesicRay(a, BoundaryPoint::infinity()));
        double db = dist_point_ray(z, GeodesicRay(b, BoundaryPoint::infinity()));
        double m = std::min(da, db);
        rep.record({{"a", to_json(a)}, {"b", to_json(b)}, {"z", to_json(z)}, {"R", R}}, m, 2.0 + R, 2.0 + R - m);
        return Outcome::scored;
    });
    rep.details["margin_kind"] = "2 + R - min(d(z, L_a), d(z, L_b))";
    return rep;
}

// Feasible region for points at distance >= rho0 from the axis with index < R: the translation part
// forces sinh(l/2) cosh(rho0) < sinh(R/2).
inline double max_log_lambda(double R, double rho0) {
    return 2.0 * std::asinh(std::sinh(R / 2.0) / std::cosh(rho0));
}

// z at distance rho from the axis whose direction makes angle beta with the rotation axis of g.
inline Point4 oriented_off_axis_point(Rng& rng, const Isometry4& g, double radius, double rho, double beta) {
    auto [e1, e2] = g.rotation_plane();
    double psi = rng.uniform(0.0, 2.0 * std::numbers::pi);
    Vec3 u = std::sin(beta) * (std::cos(psi) * e1 + std::sin(psi) * e2) + std::cos(beta) * g.rotation_axis();
    return off_axis_point(radius, u, rho);
}

// Loxodromic g, point z with d(z, A) >= rho_min and nu < ind(z) < R, drawn from the feasible region.
inline std::optional<std::pair<Isometry4, Point4>> far_bounded_index_point(Rng& rng, const Ranges& ranges, double R,
                                                                           double rho_min, double rho_span) {
    double lmax = std::min(ranges.log_lambda_max, max_log_lambda(R, rho_min));
    if (!(lmax > 0.0)) return std::nullopt;
    double l = rng.log_uniform(lmax * 1e-3, lmax);
    double theta = rng.uniform(0.0, ranges.theta_max);
    Isometry4 g = sample::loxodromic(rng, l, theta);
    double rho = rho_min + rng.uniform(0.0, rho_span);
    // The rotation term sinh(rho) sin(beta) sin(theta/2) must stay below sinh(R/2).
    double s = std::sin(g.theta() / 2.0) * std::sinh(rho);
    double bmax = s > std::sinh(R / 2.0) ? std::asin(std::sinh(R / 2.0) / s) : std::numbers::pi / 2;
    double beta = rng.uniform(0.0, bmax);
    if (rng.unit() < 0.5) beta = std::numbers::pi - beta;
    return std::make_pair(g, oriented_off_axis_point(rng, g, rng.log_uniform(0.1, 10.0), rho, beta));
}

inline VerificationReport lemma5(const SuiteConfig& cfg) {
    VerificationReport rep;
    run_trials(cfg, rep, [&](Rng& rng, long long) {
        double R = rng.uniform(1.0, 6.0);
        double nu = cfg.nu ? *cfg.nu : rng.uniform(cfg.ranges.nu_min, std::min(cfg.ranges.nu_max, R));
        auto gz = far_bounded_index_point(rng, cfg.ranges, R, 2.0 + R, 3.0);
        if (!gz) return Outcome::rejected;
        auto& [g, z] = *gz;
        Point4 c = sample::near(rng, z, R);
        auto dir = sample::unit_vector4(rng);
        Point4 a = exp_point(c, dir, rng.uniform(0.0, 2.0 * R));
        Point4 b = exp_point(c, {-dir[0], -dir[1], -dir[2], -dir[3]}, rng.uniform(0.0, 2.0 * R));
        if (euclid_dist_sq(a, b) == 0.0) return Outcome::rejected;
        double iz = index(g, z);
        bool hyp = dist_point_segment(z, GeodesicSegment(a, b)) <= R && std::acosh(z.norm() / z.x4()) >= 2.0 + R &&
                   nu < iz && iz < R && index(g, a) < R && index(g, b) < R;
        if (!hyp) return Outcome::rejected;
        double m = std::min(dist(z, a), dist(z, b));
        auto cp = bounds::C_plus(R, nu);
        rep.record({{"g", to_json(g)}, {"a", to_json(a)}, {"b", to_json(b)}, {"z", to_json(z)}, {"R", R}, {"nu", nu}}, m,
                   cp.value, cp.log_value - std::log(m));
        return Outcome::scored;
    });
    rep.details["margin_kind"] = "log(4R + 6 + 1/k) - log(min(d(z,a), d(z,b)))";
    return rep;
}

inline VerificationReport cor5(const SuiteConfig& cfg) {
    VerificationReport rep;
    long long parabolic_alt = 0, hyperbolic_alt = 0, both = 0;
    const double mu = cfg.mu;
    run_trials(cfg, rep, [&](Rng& rng, long long i) {
        bool lox = i % 2 == 1;
        Isometry4 h = lox ? sample::loxodromic(rng, cfg.ranges) : sample::parabolic(rng, cfg.ranges);
        auto G = plain_group({h});
        double R = rng.uniform(0.5, 6.0);
        Point4 x = sample::point(rng, cfg.ranges);
        if (!(min_index_exact(G, x) / 2.0 > mu && index(h, x) < R)) return Outcome::rejected;
        Point4 c = sample::near(rng, x, R);
        auto dir = sample::unit_vector4(rng);
        Point4 a = exp_point(c, dir, rng.uniform(0.0, R));
        Point4 b = exp_point(c, {-dir[0], -dir[1], -dir[2], -dir[3]}, rng.uniform(0.0, R));
        if (euclid_dist_sq(a, b) == 0.0) return Outcome::rejected;
        if (!(dist_point_segment(x, GeodesicSegment(a, b)) < R && index(h, a) < R && index(h, b) < R))
            return Outcome::rejected;
        double m = std::min(dist(x, a), dist(x, b));
        auto cp = bounds::C_plus(R, mu);
        auto cm = bounds::C_minus(R, mu);
        double l = h.translation_length();
        double m_par = cp.log_value - std::log(m);
        double m_hyp = l > 0.0 ? std::log(l) - cm.log_value : -std::numeric_limits<double>::infinity();
        bool pa = m_par > 0.0, ha = m_hyp > 0.0;
        parabolic_alt += pa;
        hyperbolic_alt += ha;
        both += pa && ha;
        rep.record({{"h", to_json(h)}, {"x", to_json(x)}, {"a", to_json(a)}, {"b", to_json(b)}, {"R", R}, {"mu", mu}},
                   m, cp.value, std::max(m_par, m_hyp));
        return Outcome::scored;
    });
    rep.details["margin_kind"] = "max(log C+ - log min d, log l(h) - log C-)";
    rep.details["parabolic_alternative"] = parabolic_alt;
    rep.details["hyperbolic_alternative"] = hyperbolic_alt;
    rep.details["both_alternatives"] = both;
    if (rep.trials >= 2) {
        if (parabolic_alt == 0) rep.violations.push_back({json{{"unobserved", "parabolic_alternative"}}, 0, 1, -1});
        if (hyperbolic_alt == 0) rep.violations.push_back({json{{"unobserved", "hyperbolic_alternative"}}, 0, 1, -1});
    }
    return rep;
}

inline VerificationReport prop6(const SuiteConfig& cfg) {
    VerificationReport rep;
    const int n = 100;
    const double tol = cfg.tol("hypercycle");
    double max_gap_at_one = 0.0, worst_rel = std::numeric_limits<double>::infinity();
    for (int it = 0; it < n; ++it)
        for (int ir = 0; ir < n; ++ir) {
            double t = 5.0 * it / (n - 1), r = 1.0 + 99.0 * ir / (n - 1);
            auto [z1, z] = h2::hypercycle_points(t, r);
            double arc = h2::hypercycle_arc_length(t, r);
            double chord = 2.0 * std::sinh(h2::dist_h2(z1, z) / 2.0);
            double scale = std::max(1.0, chord);
            ++rep.trials;
            rep.record({{"t", t}, {"r", r}}, arc, chord, chord - arc + tol * scale);
            if (r > 1.0) worst_rel = std::min(worst_rel, (chord - arc) / chord);
            if (ir == 0) max_gap_at_one = std::max(max_gap_at_one, std::abs(chord - arc));
            double closed = h2::hypercycle_chord(t, r);
            if (std::abs(closed - chord) > 1e-9 * scale)
                rep.record({{"t", t}, {"r", r}, {"check", "closed_form_chord"}}, closed, chord,
                           -std::abs(closed - chord));
        }
    // Margin approaches 0 as r -> 1; equality is checked on that boundary.
    double eq_tol = 1e-6;
    double near_one = 0.0;
    for (int it = 0; it < n; ++it) {
        double t = 5.0 * it / (n - 1), r = 1.0 + 1e-9;
        auto [z1, z] = h2::hypercycle_points(t, r);
        near_one = std::max(near_one, std::abs(2.0 * std::sinh(h2::dist_h2(z1, z) / 2.0) - h2::hypercycle_arc_length(t, r)));
    }
    if (max_gap_at_one > eq_tol || near_one > eq_tol)
        rep.record({{"check", "equality_at_r_1"}}, std::max(max_gap_at_one, near_one), eq_tol,
                   eq_tol - std::max(max_gap_at_one, near_one));
    rep.details["grid"] = {n, n};
    rep.details["margin_kind"] = "2 sinh(d/2) - arc (+ roundoff slack)";
    rep.details["max_gap_at_r_1"] = max_gap_at_one;
    rep.details["max_gap_near_r_1"] = near_one;
    rep.details["min_relative_gap_r_gt_1"] = worst_rel;
    return rep;
}

// Windows large enough for every point the projection can visit below x4_cap.
inline MargulisCone make_cone(std::vector<Isometry4> gens, double nu, double x4_cap) {
    return MargulisCone(ElementaryGroup::from_ranges(std::move(gens), 1.25 * nu, x4_cap), nu);
}

// Height cap covering the cone boundary above the given points and the projection's search steps.
inline double height_cap(const ElementaryGroup& G, const std::vector<Point4>& pts, double nu) {
    double cap = 1.0;
    for (const auto& p : pts) {
        double d = std::numeric_limits<double>::infinity();
        for (const auto& g : G.generators()) d = std::min(d, euclid_dist(p, g.apply(p)));
        cap = std::max({cap, p.x4(), d / (2.0 * std::sinh(nu / 2.0))});
    }
    return 8.0 * cap;
}

inline MargulisCone cone_covering(std::vector<Isometry4> gens, double nu, const std::vector<Point4>& pts) {
    auto probe = plain_group(gens);
    if (probe.is_loxodromic()) return make_cone(std::move(gens), nu, 1.0);
    return make_cone(std::move(gens), nu, height_cap(probe, pts, nu));
}

// Parameter along the projection ray: distance from the axis (loxodromic) or log-height.
inline std::function<Point4(double)> phi_ray(const MargulisCone& K, const Point4& a) {
    if (K.group().is_loxodromic()) {
        double r = a.norm();
        Vec3 u = normalized(a.horizontal());
        return [=](double rho) { return detail::axis_orthogonal_point(r, u, rho); };
    }
    Vec3 h = a.horizontal();
    return [=](double s) { return Point4(h, std::exp(s)); };
}

inline double phi_param(const MargulisCone& K, const Point4& p) {
    if (K.group().is_loxodromic()) return std::acosh(std::max(1.0, p.norm() / p.x4()));
    return std::log(p.x4());
}

inline VerificationReport lemma6(const SuiteConfig& cfg) {
    VerificationReport rep;
    const double tol = cfg.tol("residual");
    double worst_res = 0.0;
    long long star_checks = 0;
    run_trials(cfg, rep, [&](Rng& rng, long long i) {
        int family = static_cast<int>(i % 3);
        double nu = cfg.nu ? *cfg.nu : sample::nu(rng, cfg.ranges);
        std::vector<Isometry4> gens;
        if (family == 0) {
            double l = rng.log_uniform(0.05 * nu, std::min(nu, cfg.ranges.log_lambda_max));
            gens = {sample::loxodromic(rng, l, rng.uniform(0.0, cfg.ranges.theta_max))};
        } else {
            gens = sample::group(rng, cfg.ranges, family);
        }
        Point4 a = sample::point(rng, cfg.ranges);
        auto K = cone_covering(gens, nu, {a});
        Point4 b = project_phi(K, a);
        double res = boundary_residual(K, b);
        worst_res = std::max(worst_res, std::abs(res));
        json in = {{"family", sample::family_name(family)}, {"group", to_json(gens)}, {"nu", nu}, {"a", to_json(a)}};
        rep.record(in, std::abs(res), tol, tol - std::abs(res));
        // Star-likeness: along the projection ray membership switches once, at b.
        auto at = phi_ray(K, a);
        double p0 = phi_param(K, b);
        bool lox = K.group().is_loxodromic();
        int bad = 0;
        for (int k = 1; k <= 32; ++k) {
            double off = 1e-6 + 3.0 * k / 32.0;
            for (double sgn : {-1.0, 1.0}) {
                double p = p0 + sgn * off;
                if (lox && p < 0.0) continue;
                bool expect_inside = lox ? sgn < 0 : sgn > 0;
                ++star_checks;
                if (cone_contains(K, at(p)) != expect_inside) ++bad;
            }
        }
        if (bad > 0) rep.record(in, bad, 0, -bad);
        return Outcome::scored;
    });
    rep.details["margin_kind"] = "tol - |boundary residual|";
    rep.details["max_abs_residual"] = worst_res;
    rep.details["star_checks"] = star_checks;
    return rep;
}

inline VerificationReport prop7(const SuiteConfig& cfg) {
    VerificationReport rep;
    const double tol = cfg.tol("residual");
    long long par_trials = 0, par_viol = 0, par_intermediate_viol = 0, lox_trials = 0;
    double min_nu_violating = std::numeric_limits<double>::infinity(), max_nu_violating = 0.0;
    double worst_res = 0.0;
    run_trials(cfg, rep, [&](Rng& rng, long long i) {
        bool parabolic = i % 2 == 0;
        double nu = cfg.nu ? *cfg.nu : sample::nu(rng, cfg.ranges);
        double R = rng.uniform(nu, 6.0);
        Isometry4 g = parabolic ? sample::parabolic(rng, cfg.ranges)
                                : sample::loxodromic(rng, rng.log_uniform(0.05 * nu, std::min(nu, cfg.ranges.log_lambda_max)),
                                                     rng.uniform(0.0, cfg.ranges.theta_max));
        Point4 a = sample::point(rng, cfg.ranges);
        // The projection moves a outward onto the boundary: a lies outside the open cone.
        if (!(index(g, a) <= R && min_index_exact(plain_group({g}), a) >= nu)) return Outcome::rejected;
        auto K = cone_covering({g}, nu, {a});
        Point4 b = project_phi(K, a);
        double res = boundary_residual(K, b);
        worst_res = std::max(worst_res, std::abs(res));
        json in = {{"g", to_json(g)}, {"a", to_json(a)}, {"R", R}, {"nu", nu}};
        rep.record(json{{"check", "residual"}, {"case", in}}, std::abs(res), tol, tol - std::abs(res));
        double d = dist(a, b);
        if (parabolic) {
            ++par_trials;
            double bound = 1.0 + R / 2.0 - nu / 2.0;
            rep.record(json{{"check", "parabolic_bound"}, {"case", in}}, d, bound, bound - d);
            if (d > bound) {
                ++par_viol;
                min_nu_violating = std::min(min_nu_violating, nu);
                max_nu_violating = std::max(max_nu_violating, nu);
            }
            double lhs = std::sinh(R / 2) / std::sinh(nu / 2), ratio = b.x4() / a.x4();
            if (index(g, b) >= nu && ratio > lhs * (1 + 1e-9)) ++par_intermediate_viol;
        } else {
            ++lox_trials;
            auto cp = bounds::C_plus(R, nu);
            auto cm = bounds::C_minus(R, nu);
            double l = g.translation_length();
            double dA = std::acosh(std::max(1.0, a.norm() / a.x4()));
            double m_first = cp.log_value - std::log(std::max(d, 1e-300));
            double m_second = std::min(std::log(l) - cm.log_value,
                                       std::log(2.0 * std::sinh(R / 2.0)) - cm.log_value - std::log(std::cosh(dA)));
            rep.record(json{{"check", "loxodromic_alternative"}, {"case", in}}, d, cp.value, std::max(m_first, m_second));
        }
        return Outcome::scored;
    });
    rep.details["margin_kind"] = "per check: tol - |residual|; 1 + R/2 - nu/2 - d(a, phi(a)); log-space alternative";
    rep.details["max_abs_residual"] = worst_res;
    rep.details["parabolic_trials"] = par_trials;
    rep.details["parabolic_bound_violations"] = par_viol;
    rep.details["parabolic_intermediate_violations"] = par_intermediate_viol;
    rep.details["violating_nu_range"] =
        par_viol ? json::array({min_nu_violating, max_nu_violating}) : json(nullptr);
    rep.details["loxodromic_trials"] = lox_trials;
    // log(sinh(R/2)/sinh(nu/2)) <= 1 + R/2 - nu/2 for every R >= nu exactly when nu >= nu_star.
    rep.details["nu_star"] = 0.45867;
    return rep;
}

// Boundary point of K in the fiber through a (loxodromic: |x| = const, parabolic: the foliation hyperplane).
inline Point4 fiber_boundary_point(const MargulisCone& K, const Point4& seed) { return project_phi(K, seed); }

inline std::pair<Vec3, Vec3> fiber_basis(const Vec3& dir) {
    Vec3 s = std::abs(dir[0]) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    Vec3 w1 = normalized(s - dot(s, dir) * dir);
    return {w1, cross(dir, w1)};
}

inline VerificationReport thm4(const SuiteConfig& cfg) {
    VerificationReport rep;
    long long max_roots = 0, nonzero = 0, translates = 0;
    run_trials(cfg, rep, [&](Rng& rng, long long i) {
        bool lox = i % 2 == 0;
        double nu = cfg.nu ? *cfg.nu : rng.uniform(std::max(0.3, cfg.ranges.nu_min), std::max(0.3, cfg.ranges.nu_max));
        Isometry4 q = lox ? sample::loxodromic(rng, rng.uniform(0.1, 0.9) * nu, rng.uniform(0.0, cfg.ranges.theta_max))
                          : sample::parabolic(rng, cfg.ranges);
        std::vector<Point4> seeds;
        if (lox) {
            double rad = rng.log_uniform(0.5, 2.0);
            for (int k = 0; k < 4; ++k) seeds.push_back(off_axis_point(rad, sample::unit_vector(rng), 0.5));
        } else {
            Vec3 dir = q.theta() != 0.0 ? q.rotation_axis() : normalized(q.axial_translation());
            auto [w1, w2] = fiber_basis(dir);
            double t0 = rng.uniform(-1.0, 1.0);
            for (int k = 0; k < 4; ++k)
                seeds.push_back(Point4(t0 * dir + rng.uniform(-1.5, 1.5) * w1 + rng.uniform(-1.5, 1.5) * w2, 1.0));
        }
        auto K = cone_covering({q}, nu, seeds);
        std::vector<Point4> p;
        for (const auto& s : seeds) p.push_back(fiber_boundary_point(K, s));
        int m = rng.integer(1, 2);
        Isometry4 g = q, h = q.power(m);
        double C = 0.0;
        for (const auto& v : p) C = std::max(C, index(g, v));
        RuledFilm F1(g, p[0], p[2]), F2(h, p[1], p[3]);
        if (!check_general_position(F1).certified || !check_general_position(F2).certified) return Outcome::degenerate;
        auto res = count_film_film_intersections(F1, F2, plain_group({q}));
        if (!res.reliable) return Outcome::degenerate;
        long long roots = static_cast<long long>(res.roots.size());
        max_roots = std::max(max_roots, roots);
        nonzero += res.signed_count != 0;
        translates += res.translates_tested;
        auto N = bounds::N_theorem4(C, nu);
        rep.record({{"q", to_json(q)}, {"h_power", m}, {"nu", nu}, {"C", C},
                    {"x", to_json(p[0])}, {"y", to_json(p[1])}, {"z", to_json(p[2])}, {"w", to_json(p[3])}},
                   static_cast<double>(roots), N.value, log_count_margin(N, roots));
        return Outcome::scored;
    });
    rep.details["margin_kind"] = "log N(C, nu) - log(transversal crossings)";
    rep.details["max_crossings"] = max_roots;
    rep.details["nonzero_signed_counts"] = nonzero;
    rep.details["translates_tested"] = translates;
    return rep;
}

inline VerificationReport thm5(const SuiteConfig& cfg) {
    VerificationReport rep;
    long long max_roots = 0, nonzero = 0;
    run_trials(cfg, rep, [&](Rng& rng, long long) {
        double nu = cfg.nu ? *cfg.nu : sample::nu(rng, cfg.ranges);
        auto gens = sample::lattice2(rng);
        std::vector<Point4> seeds;
        for (int k = 0; k < 4; ++k)
            seeds.push_back(Point4(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), 1.0));
        auto K = cone_covering(gens, nu, seeds);
        std::vector<Point4> p;
        for (const auto& s : seeds) p.push_back(project_phi(K, s));
        Vec3 b1 = gens[0].axial_translation(), b2 = gens[1].axial_translation();
        auto pick = [&]() {
            int c1 = rng.integer(-1, 1), c2 = rng.integer(-1, 1);
            if (c1 == 0 && c2 == 0) c1 = 1;
            return Isometry4::translation(static_cast<double>(c1) * b1 + static_cast<double>(c2) * b2);
        };
        Isometry4 g = pick(), h = pick();
        double C = 0.0;
        for (const auto& v : p) C = std::max(C, index(g, v));
        RuledFilm F1(g, p[0], p[2]), F2(h, p[1], p[3]);
        auto res = count_film_film_intersections(F1, F2, plain_group(gens));
        if (!res.reliable) return Outcome::degenerate;
        long long roots = static_cast<long long>(res.roots.size());
        max_roots = std::max(max_roots, roots);
        nonzero += res.signed_count != 0;
        auto N = bounds::Nprime_theorem5(C, nu);
        rep.record({{"lattice", to_json(gens)}, {"g", to_json(g)}, {"h", to_json(h)}, {"nu", nu}, {"C", C}},
                   static_cast<double>(roots), N.value, log_count_margin(N, roots));
        return Outcome::scored;
    });
    rep.details["margin_kind"] = "log N'(C, nu) - log(transversal crossings)";
    rep.details["max_crossings"] = max_roots;
    rep.details["nonzero_signed_counts"] = nonzero;
    return rep;
}

inline VerificationReport lemma9(const SuiteConfig& cfg) {
    VerificationReport rep;
    const double mu = cfg.mu;
    double worst_axis_ratio = 0.0;
    run_trials(cfg, rep, [&](Rng& rng, long long) {
        double R = rng.uniform(0.5, 6.0);
        double l = rng.log_uniform(0.05 * mu, std::min(mu, cfg.ranges.log_lambda_max));
        Isometry4 g = sample::loxodromic(rng, l, rng.uniform(0.0, cfg.ranges.theta_max));
        auto c1 = bounds::C1(3.0 * R + 2.0, mu);
        if (!(std::log(l) >= c1.log_value)) return Outcome::rejected;
        auto K = make_cone({g}, mu, 1.0);
        double lam = g.lambda() > 1 ? g.lambda() : 1.0 / g.lambda();
        std::vector<Point4> z;
        std::vector<double> rho;
        for (int k = 0; k < 3; ++k) {
            double rad = std::exp(rng.uniform(0.0, std::log(lam)));
            Point4 seed = off_axis_point(rad, sample::unit_vector(rng), 0.5);
            double rb = phi_param(K, project_phi(K, seed));
            double r = rb * rng.unit();
            z.push_back(off_axis_point(rad, normalized(seed.horizontal()), r));
            rho.push_back(std::acosh(std::max(1.0, z.back().norm() / z.back().x4())));
        }
        json in = {{"g", to_json(g)}, {"R", R}, {"mu", mu}, {"z", {to_json(z[0]), to_json(z[1]), to_json(z[2])}}};
        double sh = 2.0 * std::sinh(mu / 2.0);
        for (double r : rho) {
            worst_axis_ratio = std::max(worst_axis_ratio, r * l / sh);
            rep.record(json{{"check", "axis_distance_vs_length"}, {"case", in}}, r, sh / l, std::log(sh / l) - std::log(std::max(r, 1e-300)));
            rep.record(json{{"check", "axis_distance"}, {"case", in}}, r, sh / c1.value,
                       std::log(sh) - c1.log_value - std::log(std::max(r, 1e-300)));
        }
        // Quotient distance bounded above by the minimum over nearby translates.
        double diam = 0.0;
        for (int s = 0; s < 3; ++s)
            for (int t = s + 1; t < 3; ++t) {
                double best = dist(z[s], z[t]);
                for (int n = -3; n <= 3; ++n)
                    if (n != 0) best = std::min(best, dist(z[s], g.power(n).apply(z[t])));
                diam = std::max(diam, best);
            }
        rep.record(json{{"check", "triangle_diameter"}, {"case", in}}, diam, 2.0 * sh / c1.value,
                   std::log(2.0 * sh) - c1.log_value - std::log(std::max(diam, 1e-300)));
        return Outcome::scored;
    });
    rep.details["margin_kind"] = "log-space: bound - measured";
    rep.details["max_axis_distance_times_length_over_2sinh"] = worst_axis_ratio;
    return rep;
}

inline VerificationReport lemma11(const SuiteConfig& cfg) {
    return h2::verify_lemma11(h2::Moebius2(1, 1, 1, 2), h2::Moebius2(1, -1, -1, 2), cfg.max_pq);
}

inline VerificationReport displacement(const SuiteConfig& cfg) {
    VerificationReport rep;
    const double tol = cfg.tol("audit");
    double ratio_min = std::numeric_limits<double>::infinity(), ratio_max = -ratio_min;
    double lox_eu_min = ratio_min, lox_eu_max = -ratio_min, lox_sh_min = ratio_min, lox_sh_max = -ratio_min;
    double worst_struct = 0.0;
    long long par = 0, lox = 0, xl_nan = 0;
    run_trials(cfg, rep, [&](Rng& rng, long long i) {
        bool parabolic = i % 2 == 0;
        Isometry4 g = parabolic ? sample::parabolic(rng, cfg.ranges) : sample::loxodromic(rng, cfg.ranges);
        Point4 x = sample::point(rng, cfg.ranges);
        auto a = paper_displacement(g, x);
        if (!(a.direct_euclidean_sq > 0.0)) return Outcome::degenerate;
        if (parabolic) {
            ++par;
            double rel = std::abs(a.euclidean_sq - a.direct_euclidean_sq) / std::max(1.0, a.direct_euclidean_sq);
            worst_struct = std::max(worst_struct, rel);
            double ratio = a.two_sinh_sq / a.direct_two_sinh_sq;
            ratio_min = std::min(ratio_min, ratio);
            ratio_max = std::max(ratio_max, ratio);
            rep.record({{"g", to_json(g)}, {"x", to_json(x)}}, a.euclidean_sq, a.direct_euclidean_sq, tol - rel);
        } else {
            ++lox;
            double re = a.euclidean_sq / a.direct_euclidean_sq, rs = a.two_sinh_sq / a.direct_two_sinh_sq;
            lox_eu_min = std::min(lox_eu_min, re);
            lox_eu_max = std::max(lox_eu_max, re);
            lox_sh_min = std::min(lox_sh_min, rs);
            lox_sh_max = std::max(lox_sh_max, rs);
            xl_nan += std::isnan(a.x_lambda);
        }
        return Outcome::scored;
    });
    double spread = ratio_max > 0 ? (ratio_max - ratio_min) / ratio_max : 0.0;
    if (par > 0) rep.record({{"check", "factor_ratio_constant"}}, spread, tol, tol - spread);
    rep.details["margin_kind"] = "tol - relative error of the parabolic closed form";
    rep.details["parabolic_trials"] = par;
    rep.details["parabolic_max_relative_error"] = worst_struct;
    rep.details["parabolic_two_sinh_sq_ratio"] = {ratio_min, ratio_max};
    rep.details["loxodromic_trials"] = lox;
    rep.details["loxodromic_euclidean_ratio_range"] = {lox_eu_min, lox_eu_max};
    rep.details["loxodromic_two_sinh_sq_ratio_range"] = {lox_sh_min, lox_sh_max};
    rep.details["loxodromic_x_lambda_undefined"] = xl_nan;
    return rep;
}

inline VerificationReport films(const SuiteConfig& cfg) {
    VerificationReport rep;
    const double seam_tol = cfg.tol("seam"), conv_tol = cfg.tol("index_convexity");
    long long plane_trials = 0, max_plane = 0, uncertified = 0;
    std::map<int, long long> histogram;
    double worst_seam = 0.0;
    Ranges local = cfg.ranges;
    local.offset = std::min(local.offset, 2.0);
    local.x4_min = std::max(local.x4_min, 0.3);
    local.x4_max = std::min(local.x4_max, 3.0);
    run_trials(cfg, rep, [&](Rng& rng, long long i) {
        Isometry4 T = i % 2 == 0 ? sample::loxodromic(rng, local, 0.1) : sample::parabolic(rng, local);
        Point4 x = sample::point(rng, local), z = sample::point(rng, local);
        RuledFilm F(T, x, z);
        if (!check_general_position(F).certified) {
            ++uncertified;
            return Outcome::degenerate;
        }
        json in = {{"T", to_json(T)}, {"x", to_json(x)}, {"z", to_json(z)}};
        auto rel = [](const Point4& p, const Point4& q) { return euclid_dist(p, q) / std::max(1.0, p.norm()); };
        double seam = 0.0;
        seam = std::max({seam, rel(F.point(Sheet::lambda, 0, 0), x), rel(F.point(Sheet::lambda, 1, 0), z)});
        Sheet last = F.sheets().back();
        seam = std::max({seam, rel(F.point(last, 0, 1), T.apply(x)), rel(F.point(last, 1, 1), T.apply(z))});
        if (F.sheets().size() == 2)
            for (int k = 0; k <= 16; ++k)
                seam = std::max(seam, rel(F.point(Sheet::lambda, k / 16.0, 1), F.point(Sheet::theta, k / 16.0, 0)));
        worst_seam = std::max(worst_seam, seam);
        rep.record(json{{"check", "seam_corner"}, {"case", in}}, seam, seam_tol, seam_tol - seam);
        // Every film point has index under T at most the larger corner index.
        double top = std::max(index(T, x), index(T, z));
        double worst = -std::numeric_limits<double>::infinity();
        for (Sheet sh : F.sheets())
            for (int a = 0; a <= 8; ++a)
                for (int b = 0; b <= 8; ++b) worst = std::max(worst, index(T, F.point(sh, a / 8.0, b / 8.0)) - top);
        double ctol = conv_tol * std::max(1.0, top);
        rep.record(json{{"check", "index_below_corners"}, {"case", in}}, worst + top, top, ctol - worst);
        // Plane through a film point and two nearby points.
        Sheet sh = F.sheets()[rng.integer(0, static_cast<int>(F.sheets().size()) - 1)];
        Point4 p1 = F.point(sh, rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95));
        Point4 p2 = sample::near(rng, p1, 1.0), p3 = sample::near(rng, p1, 1.0);
        GeodesicPlane2 P = GeodesicPlane2::through_points(p1, p2, p3);
        auto res = count_film_plane_intersections(F, P);
        if (!res.reliable) return Outcome::degenerate;
        ++plane_trials;
        ++histogram[res.count];
        max_plane = std::max<long long>(max_plane, res.count);
        rep.record(json{{"check", "film_plane_count"}, {"case", in}, {"plane", {to_json(p1), to_json(p2), to_json(p3)}}},
                   res.count, 8, 8.0 - res.count);
        return Outcome::scored;
    });
    rep.details["margin_kind"] = "per check: tolerance or 8 minus measured";
    rep.details["max_seam_error"] = worst_seam;
    rep.details["film_plane_trials"] = plane_trials;
    rep.details["max_film_plane_count"] = max_plane;
    json h = json::object();
    for (auto [k, v] : histogram) h[std::to_string(k)] = v;
    rep.details["film_plane_histogram"] = h;
    rep.details["uncertified_redraws"] = uncertified;
    return rep;
}

}  // namespace suites

inline const std::vector<std::string>& suite_ids() {
    static const std::vector<std::string> ids = {"lemma1", "lemma2", "lemma3", "lemma4", "prop4", "lemma5",
                                                 "cor5",   "prop6",  "lemma6", "prop7",  "thm4",  "thm5",
                                                 "lemma9", "lemma11", "displacement", "films"};
    return ids;
}

inline VerificationReport run_suite(const SuiteConfig& cfg) {
    using namespace suites;
    static const std::map<std::string, std::function<VerificationReport(const SuiteConfig&)>> table = {
        {"lemma1", [](const SuiteConfig& c) { return orbit_suite(c, false); }},
        {"lemma2", [](const SuiteConfig& c) { return orbit_suite(c, true); }},
        {"lemma3", lemma3},
        {"lemma4", lemma4},
        {"prop4", prop4},
        {"lemma5", lemma5},
        {"cor5", cor5},
        {"prop6", prop6},
        {"lemma6", lemma6},
        {"prop7", prop7},
        {"thm4", thm4},
        {"thm5", thm5},
        {"lemma9", lemma9},
        {"lemma11", lemma11},
        {"displacement", displacement},
        {"films", films},
    };
    auto it = table.find(cfg.suite_id);
    if (it == table.end()) throw std::invalid_argument("unknown suite: " + cfg.suite_id);
    cfg.validate();
    auto saved = bounds::exp3_reading();
    bounds::exp3_reading() = cfg.exp3;
    auto t0 = std::chrono::steady_clock::now();
    VerificationReport rep;
    try {
        rep = it->second(cfg);
    } catch (...) {
        bounds::exp3_reading() = saved;
        throw;
    }
    bounds::exp3_reading() = saved;
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.suite_id = cfg.suite_id;
    json c = cfg.to_json();
    for (auto& [k, v] : rep.config.items()) c[k] = v;
    rep.config = c;
    return rep;
}

}  // namespace hyp4
