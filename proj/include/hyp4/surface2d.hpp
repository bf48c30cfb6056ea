#pragma once

#include "hyp4/bounds.hpp"
#include "hyp4/report.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace hyp4::h2 {

struct PointH2 {
    double u, v;
    PointH2(double u_, double v_) : u(u_), v(v_) {
        if (!(v_ > 0.0) || !std::isfinite(u_) || !std::isfinite(v_)) throw std::invalid_argument("PointH2: need v > 0");
    }
};

inline double dist_h2(const PointH2& p, const PointH2& q) {
    return 2.0 * std::asinh(std::hypot(p.u - q.u, p.v - q.v) / (2.0 * std::sqrt(p.v * q.v)));
}

// Length along the equidistant curve at distance t from a geodesic, between points whose
// projections to the geodesic are log(r) apart.
inline double hypercycle_arc_length(double t, double r) {
    if (t < 0.0 || r < 1.0) throw std::domain_error("hypercycle_arc_length: need t >= 0, r >= 1");
    return std::log(r) * std::cosh(t);
}

// 2 sinh(d/2) for the same pair of points, in closed form: (r - 1) / (sin(theta) sqrt(r)), cosh(t) sin(theta) = 1.
inline double hypercycle_chord(double t, double r) {
    if (t < 0.0 || r < 1.0) throw std::domain_error("hypercycle_chord: need t >= 0, r >= 1");
    return (r - 1.0) * std::cosh(t) / std::sqrt(r);
}

// The two points z1 = e^{i a}, z = r e^{i a} on C(t, imaginary axis), sin(a) = 1/cosh(t).
inline std::pair<PointH2, PointH2> hypercycle_points(double t, double r) {
    double s = 1.0 / std::cosh(t), c = std::tanh(t);
    return {PointH2(c, s), PointH2(r * c, r * s)};
}

struct Moebius2 {
    double a, b, c, d;
    Moebius2(double a_, double b_, double c_, double d_) : a(a_), b(b_), c(c_), d(d_) {
        double det = a * d - b * c;
        double scale = std::max({1.0, std::abs(a * d), std::abs(b * c)});
        if (std::abs(det - 1.0) > 1e-12 * scale) throw std::invalid_argument("Moebius2: determinant must be 1");
    }
    double trace() const { return a + d; }
    Moebius2 inverse() const { return {d, -b, -c, a}; }
    friend Moebius2 operator*(const Moebius2& x, const Moebius2& y) {
        return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
    }
};

inline double trace_length(const Moebius2& M) {
    double tr = std::abs(M.trace());
    if (!(tr > 2.0)) throw std::domain_error("trace_length: element is not hyperbolic");
    return 2.0 * std::acosh(tr / 2.0);
}

inline Moebius2 commutator(const Moebius2& A, const Moebius2& B) { return A * B * A.inverse() * B.inverse(); }

struct PQCurve {
    int p, q;
    std::string word;  // letters A, B and inverses a, b
};

// Christoffel word of slope q/p; negative components use the inverse letter.
inline PQCurve pq_word(int p, int q) {
    if (std::gcd(p, q) != 1) throw std::invalid_argument("pq_word: p and q must be coprime");
    int P = std::abs(p), Q = std::abs(q), n = P + Q;
    char la = p >= 0 ? 'A' : 'a', lb = q >= 0 ? 'B' : 'b';
    std::string w;
    for (int i = 1; i <= n; ++i) {
        long long hi = static_cast<long long>(i) * Q / n, lo = static_cast<long long>(i - 1) * Q / n;
        w.push_back(hi > lo ? lb : la);
    }
    return {p, q, w};
}

inline Moebius2 word_matrix(const std::string& w, const Moebius2& A, const Moebius2& B) {
    Moebius2 M(1, 0, 0, 1);
    for (char ch : w) {
        switch (ch) {
            case 'A': M = M * A; break;
            case 'a': M = M * A.inverse(); break;
            case 'B': M = M * B; break;
            case 'b': M = M * B.inverse(); break;
            default: throw std::invalid_argument("word_matrix: bad letter");
        }
    }
    return M;
}

inline int pq_intersection(const PQCurve& c1, const PQCurve& c2) { return std::abs(c1.p * c2.q - c1.q * c2.p); }

// Primitive classes up to sign with |p|, |q| <= max_pq, ordered lexicographically.
inline std::vector<PQCurve> primitive_classes(int max_pq) {
    std::vector<PQCurve> out;
    for (int p = 0; p <= max_pq; ++p)
        for (int q = -max_pq; q <= max_pq; ++q) {
            if (std::gcd(p, q) != 1) continue;
            if (p == 0 && q != 1) continue;
            out.push_back(pq_word(p, q));
        }
    return out;
}

inline VerificationReport verify_lemma11(const Moebius2& A, const Moebius2& B, int max_pq) {
    VerificationReport rep;
    rep.suite_id = "lemma11";
    rep.config = {{"max_pq", max_pq}};
    double comm = commutator(A, B).trace();
    rep.details["commutator_trace"] = comm;
    if (std::abs(comm + 2.0) > 1e-9) throw std::invalid_argument("verify_lemma11: tr[A,B] != -2");
    auto classes = primitive_classes(max_pq);
    std::vector<double> len;
    for (const auto& c : classes) len.push_back(trace_length(word_matrix(c.word, A, B)));
    long long k_checks = 0, sinh_checks = 0;
    double worst_k = std::numeric_limits<double>::infinity(), worst_sinh = worst_k;
    for (std::size_t i = 0; i < classes.size(); ++i)
        for (std::size_t j = i + 1; j < classes.size(); ++j) {
            int n = pq_intersection(classes[i], classes[j]);
            ++rep.trials;
            auto bound = bounds::appendix_bound(len[i], len[j]);
            double margin = bound.log_value - std::log(std::max(n, 1));
            json in = {{"c1", {classes[i].p, classes[i].q}}, {"c2", {classes[j].p, classes[j].q}}};
            rep.record(in, n, bound.value, margin);
            if (n >= 1) {
                ++sinh_checks;
                double prod = std::sinh(len[i] / 2) * std::sinh(len[j] / 2);
                worst_sinh = std::min(worst_sinh, prod - 1.0);
                if (prod < 1.0) rep.record(in, prod, 1.0, prod - 1.0);
                ++k_checks;
                auto K = bounds::curve_bound_K(len[i], len[j]);
                worst_k = std::min(worst_k, K.log_value - std::log(n));
                if (n > K.value) rep.record(in, n, K.value, K.log_value - std::log(n));
            }
        }
    rep.details["classes"] = classes.size();
    rep.details["sinh_product_checks"] = sinh_checks;
    rep.details["sinh_product_worst_margin"] = worst_sinh;
    rep.details["curve_bound_checks"] = k_checks;
    rep.details["curve_bound_worst_log_margin"] = worst_k;
    double la = trace_length(A), lb = trace_length(B);
    rep.details["generator_sinh_product"] = std::sinh(la / 2) * std::sinh(lb / 2);
    return rep;
}

}  // namespace hyp4::h2
