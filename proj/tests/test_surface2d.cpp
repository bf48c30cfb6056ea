#include "hyp4/surface2d.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace hyp4::h2;

namespace {

const Moebius2 A(1, 1, 1, 2);
const Moebius2 B(1, -1, -1, 2);

}  // namespace

TEST(H2, TraceLength) {
    EXPECT_NEAR(trace_length(A), 2.0 * std::acosh(1.5), 1e-15);
    EXPECT_NEAR(trace_length(A), 1.92485, 1e-5);
    EXPECT_NEAR(trace_length(Moebius2(-1, -1, -1, -2)), trace_length(A), 1e-15);
    EXPECT_THROW(trace_length(Moebius2(1, 1, 0, 1)), std::domain_error);
    EXPECT_THROW(Moebius2(1, 1, 1, 1), std::invalid_argument);
}

TEST(H2, OncePuncturedTorusGenerators) {
    EXPECT_NEAR(commutator(A, B).trace(), -2.0, 1e-12);
    double s = std::sinh(trace_length(A) / 2) * std::sinh(trace_length(B) / 2);
    EXPECT_NEAR(s, 1.25, 1e-12);
    EXPECT_NEAR(hyp4::bounds::appendix_bound(trace_length(A), trace_length(B)).value, 127.7, 0.05);
}

TEST(H2, ChristoffelWords) {
    EXPECT_EQ(pq_word(1, 0).word, "A");
    EXPECT_EQ(pq_word(0, 1).word, "B");
    EXPECT_EQ(pq_word(1, 1).word, "AB");
    EXPECT_EQ(pq_word(2, 1).word, "AAB");
    EXPECT_EQ(pq_word(1, -2).word, "Abb");
    EXPECT_EQ(pq_word(-1, 2).word, "aBB");
    EXPECT_THROW(pq_word(2, 4), std::invalid_argument);
    for (int p = 0; p <= 6; ++p)
        for (int q = -6; q <= 6; ++q) {
            if (std::gcd(p, q) != 1) continue;
            auto w = pq_word(p, q).word;
            EXPECT_EQ(static_cast<int>(std::count_if(w.begin(), w.end(), [](char c) { return c == 'A' || c == 'a'; })), p);
            EXPECT_EQ(static_cast<int>(std::count_if(w.begin(), w.end(), [](char c) { return c == 'B' || c == 'b'; })), std::abs(q));
        }
}

TEST(H2, IntersectionNumbers) {
    EXPECT_EQ(pq_intersection(pq_word(1, 0), pq_word(0, 1)), 1);
    EXPECT_EQ(pq_intersection(pq_word(2, 1), pq_word(1, 2)), 3);
    EXPECT_EQ(pq_intersection(pq_word(3, 2), pq_word(3, 2)), 0);
    EXPECT_EQ(pq_intersection(pq_word(1, 1), pq_word(1, -1)), 2);
}

TEST(H2, PrimitiveClasses) {
    auto c = primitive_classes(2);
    // (0,1), (1,-2), (1,-1), (1,0), (1,1), (1,2), (2,-1), (2,1)
    ASSERT_EQ(c.size(), 8u);
    EXPECT_EQ(c.front().p, 0);
    EXPECT_EQ(c.back().p, 2);
    EXPECT_EQ(c.back().q, 1);
}

// The trace of a (p,q) word depends only on the class: conjugate words give equal traces.
TEST(H2, WordTracesAreConjugationInvariant) {
    for (auto [p, q] : std::vector<std::pair<int, int>>{{2, 1}, {3, 2}, {3, -1}, {5, 3}}) {
        std::string w = pq_word(p, q).word;
        double t = word_matrix(w, A, B).trace();
        for (size_t k = 1; k < w.size(); ++k) {
            std::string r = w.substr(k) + w.substr(0, k);
            EXPECT_NEAR(word_matrix(r, A, B).trace(), t, 1e-9 * std::abs(t));
        }
    }
}

TEST(H2, HypercycleChordMatchesDistance) {
    for (double t : {0.0, 0.1, 0.7, 2.0, 5.0})
        for (double r : {1.0, 1.001, 1.5, 4.0, 100.0}) {
            auto [z1, z] = hypercycle_points(t, r);
            double d = dist_h2(z1, z);
            double chord = hypercycle_chord(t, r);
            EXPECT_NEAR(2.0 * std::sinh(d / 2), chord, 1e-12 * std::max(1.0, chord));
            EXPECT_LE(d, hypercycle_arc_length(t, r) + 1e-12);
        }
}

TEST(H2, HypercycleArcLengthMatchesQuadrature) {
    for (double t : {0.0, 0.4, 1.3})
        for (double r : {1.5, 3.0, 20.0}) {
            auto [z1, z] = hypercycle_points(t, r);
            // Simpson on |dz| / v along the Euclidean ray from z1 to z.
            const int n = 20000;
            auto f = [&](double s) {
                double rho = 1.0 + (r - 1.0) * s;
                double v = rho * z1.v;
                return (r - 1.0) * std::hypot(z1.u, z1.v) / v;
            };
            double sum = f(0) + f(1);
            for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(static_cast<double>(i) / n);
            EXPECT_NEAR(hypercycle_arc_length(t, r), sum / (3.0 * n), 1e-10 * std::max(1.0, sum / (3.0 * n)));
        }
}

TEST(H2, IntersectionBoundsOnTheStandardPair) {
    auto rep = verify_lemma11(A, B, 12);
    EXPECT_TRUE(rep.pass());
    EXPECT_GT(rep.trials, 1000);
    EXPECT_NEAR(rep.details["generator_sinh_product"].get<double>(), 1.25, 1e-12);
    EXPECT_GT(rep.details["curve_bound_worst_log_margin"].get<double>(), 0.0);
    EXPECT_GE(rep.details["sinh_product_worst_margin"].get<double>(), 0.25 - 1e-12);
    EXPECT_THROW(verify_lemma11(A, A, 2), std::invalid_argument);
}
