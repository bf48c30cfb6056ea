#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hyp4::bounds {

// How exp^3(a) is read in the counting bounds.
enum class Exp3Reading { triple_arg, triple_compose };

inline Exp3Reading& exp3_reading() {
    static Exp3Reading r = Exp3Reading::triple_arg;
    return r;
}

inline const char* exp3_reading_name(Exp3Reading r) {
    return r == Exp3Reading::triple_arg ? "triple_arg" : "triple_compose";
}

// log of exp^3(a).
inline double log_exp3(double a) {
    if (exp3_reading() == Exp3Reading::triple_arg) return 3.0 * a;
    return std::exp(std::exp(a));
}

struct BoundValue {
    std::string formula_id;
    std::map<std::string, double> inputs;
    double log_value;
    double value;  // exp(log_value); +inf when that overflows
};

inline BoundValue make(std::string id, std::map<std::string, double> in, double log_value) {
    return {std::move(id), std::move(in), log_value, std::exp(log_value)};
}

// log(e^a + e^b)
inline double log_add(double a, double b) {
    double m = std::max(a, b);
    if (m == -std::numeric_limits<double>::infinity()) return m;
    return m + std::log1p(std::exp(std::min(a, b) - m));
}

inline void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::domain_error(std::string(name) + " must be positive");
}
inline void require_genus(int g) {
    if (g < 2) throw std::domain_error("genus must be >= 2");
}

inline BoundValue curve_bound_K(double l1, double l2) {
    require_positive(l1, "l1");
    require_positive(l2, "l2");
    double a = std::numbers::pi / 2 + l1;
    double denom = l2 / 2 - std::log(std::expm1(l2 / 2));
    double first = std::log(2.0 * a) + l2;
    double second = std::log(a) - std::log(denom);
    return make("curve_bound_K", {{"l1", l1}, {"l2", l2}}, log_add(first, second));
}

inline bool sinh_product_test(double l1, double l2) { return std::sinh(l1 / 2) * std::sinh(l2 / 2) >= 1.0; }

inline BoundValue lemma1_count_bound(double r, double nu) {
    require_positive(r, "r");
    require_positive(nu, "nu");
    return make("lemma1_count_bound", {{"r", r}, {"nu", nu}}, log_exp3(r + nu) - 3.0 * std::log(nu));
}

inline BoundValue lemma2_count_bound(double r, double nu) {
    require_positive(r, "r");
    require_positive(nu, "nu");
    return make("lemma2_count_bound", {{"r", r}, {"nu", nu}}, log_exp3(2.0 * r + nu) - 3.0 * std::log(nu));
}

// log n(r, nu) with n = floor(exp(18r + 2nu)/nu^3) + 1.
inline double log_n_lemma3(double r, double nu) {
    double L = 18.0 * r + 2.0 * nu - 3.0 * std::log(nu);
    if (L < 36.0) return std::log(std::floor(std::exp(18.0 * r + 2.0 * nu) / (nu * nu * nu)) + 1.0);
    // Beyond 2^52 the floor and the +1 are below double resolution relative to the value.
    return L;
}

inline BoundValue C1(double r, double nu) {
    require_positive(r, "r");
    require_positive(nu, "nu");
    return make("C1", {{"r", r}, {"nu", nu}}, std::log(2.0 * r) - log_n_lemma3(r, nu));
}

inline BoundValue k_lemma5(double R, double nu) {
    require_positive(R, "R");
    require_positive(nu, "nu");
    double lk = std::log(2.0 * (2.0 + R)) + 3.0 * std::log(nu) - (18.0 * (2.0 + R) + 2.0 * nu);
    return make("k_lemma5", {{"R", R}, {"nu", nu}}, lk);
}

inline BoundValue C_plus(double R, double mu) {
    double lk = k_lemma5(R, mu).log_value;
    return make("C_plus", {{"R", R}, {"mu", mu}}, log_add(std::log(4.0 * R + 6.0), -lk));
}

inline BoundValue C_minus(double R, double mu) {
    auto v = C1(R + 2.0, mu);
    return make("C_minus", {{"R", R}, {"mu", mu}}, v.log_value);
}

inline BoundValue N_theorem4(double C, double nu) {
    require_positive(C, "C");
    require_positive(nu, "nu");
    return make("N_theorem4", {{"C", C}, {"nu", nu}}, log_exp3(4.0 * C + 4.0) - 3.0 * std::log(nu));
}

inline BoundValue Nprime_theorem5(double C, double nu) {
    require_positive(C, "C");
    require_positive(nu, "nu");
    double l3 = 3.0 * std::log(nu);
    double a = 9.0 * nu + 6.0 - l3;
    double b = std::log(96.0 * C / nu);
    double c = std::log(120000.0) + 72.0 * C - l3;
    return make("Nprime_theorem5", {{"C", C}, {"nu", nu}}, log_add(log_add(a, b), c));
}

inline BoundValue C2(double mu, int g) {
    require_positive(mu, "mu");
    require_genus(g);
    double v = (2.0 * g - 2.0) / mu + 6.0 * (g - 1) * std::sinh(mu);
    return make("C2", {{"mu", mu}, {"g", static_cast<double>(g)}}, std::log(v));
}

inline BoundValue C3(double mu, int g) {
    auto v = C1(C2(mu, g).value, mu);
    return make("C3", {{"mu", mu}, {"g", static_cast<double>(g)}}, v.log_value);
}

inline BoundValue C4(double mu, int g, double nu) {
    require_positive(nu, "nu");
    double R = 2.0 * C2(mu, g).value;
    double a = std::log(4.0 * R + 6.0);
    double b = -k_lemma5(R, nu).log_value;
    double c = std::log(4.0 * std::sinh(mu / 2)) - C1(3.0 * R + 2.0, mu).log_value;
    return make("C4", {{"mu", mu}, {"g", static_cast<double>(g)}, {"nu", nu}}, log_add(log_add(a, b), c));
}

inline BoundValue C5(double mu, int g, double nu) {
    double R = 2.0 * C2(mu, g).value;
    double first = log_add(std::log(4.0 * R + 6.0), -C1(R + 2.0, nu).log_value);
    double second = C4(mu, g, nu).log_value;
    return make("C5", {{"mu", mu}, {"g", static_cast<double>(g)}, {"nu", nu}}, std::max(first, second));
}

// Edge-length bound for the triangulation; the two coefficients appear in consecutive steps.
inline BoundValue triangulation_edge_6(double mu, int g) {
    return make("triangulation_edge_6", {{"mu", mu}, {"g", static_cast<double>(g)}},
                2.0 * std::log(6.0 * g - 6.0) + C2(mu, g).log_value);
}
inline BoundValue triangulation_edge_16(double mu, int g) {
    return make("triangulation_edge_16", {{"mu", mu}, {"g", static_cast<double>(g)}},
                2.0 * std::log(16.0 * g - 16.0) + C2(mu, g).log_value);
}

// Per-case intersection counts feeding the final bound.
inline BoundValue count_short_short(double R, double mu) {
    require_positive(R, "R");
    require_positive(mu, "mu");
    return make("count_short_short", {{"R", R}, {"mu", mu}},
                std::log(8.0) + log_exp3(2.0 * R + mu / 2) - 3.0 * std::log(mu));
}
inline BoundValue count_short_long(double C5v, double nu) {
    require_positive(C5v, "C5");
    require_positive(nu, "nu");
    return make("count_short_long", {{"C5", C5v}, {"nu", nu}},
                std::log(3.0) + log_exp3(2.0 * C5v + nu / 2) - 3.0 * std::log(nu));
}
inline BoundValue count_long_long(int g, double C5v, double nu) {
    require_genus(g);
    require_positive(C5v, "C5");
    require_positive(nu, "nu");
    return make("count_long_long", {{"g", static_cast<double>(g)}, {"C5", C5v}, {"nu", nu}},
                std::log(6.0) + 2.0 * std::log(12.0 * (g - 1)) + log_exp3(2.0 * C5v + nu / 2) - 3.0 * std::log(nu));
}
inline BoundValue count_film_triangle(double C5v, double nu) {
    require_positive(C5v, "C5");
    require_positive(nu, "nu");
    return make("count_film_triangle", {{"C5", C5v}, {"nu", nu}},
                std::log(24.0) + log_exp3(2.0 * C5v + nu / 2) - 3.0 * std::log(nu));
}
inline BoundValue count_tube_annuli(double R, double nu) {
    double v = std::max({N_theorem4(R, nu).log_value, Nprime_theorem5(R, nu).log_value, std::log(R / nu)});
    return make("count_tube_annuli", {{"R", R}, {"nu", nu}}, v);
}

inline BoundValue final_intersection_bound(int g, double mu) {
    require_genus(g);
    require_positive(mu, "mu");
    double lv = std::log(300.0) + 2.0 * std::log(g - 1.0) + 4000.0 * (g - 1) / mu - 2.0 * std::log(mu);
    return make("final_intersection_bound", {{"g", static_cast<double>(g)}, {"mu", mu}}, lv);
}

inline BoundValue link_count_bound(int g1, int g2, double mu) {
    require_genus(g1);
    require_genus(g2);
    require_positive(mu, "mu");
    return make("link_count_bound", {{"g1", static_cast<double>(g1)}, {"g2", static_cast<double>(g2)}, {"mu", mu}},
                8000.0 * (g1 + g2) / mu);
}

inline BoundValue appendix_bound(double l1, double l2) {
    require_positive(l1, "l1");
    require_positive(l2, "l2");
    return make("appendix_bound", {{"l1", l1}, {"l2", l2}}, l1 + l2 + 1.0);
}

inline bool milnor_wood_test(int e, int g) { return std::abs(e) <= 2 * g - 2; }
inline bool theorem2_range_test(int e, int g) { return e > 0 && 3 * e <= 2 * g - 2; }

}  // namespace hyp4::bounds
