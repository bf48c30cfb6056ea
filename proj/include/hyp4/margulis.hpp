#pragma once

#include "hyp4/isometry.hpp"

#include <functional>
#include <ostream>
#include <vector>

namespace hyp4 {

struct TruncationInsufficient : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyCone : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class ElementaryGroup {
public:
    // Explicit per-generator windows; words range over the box [-N_i, N_i].
    ElementaryGroup(std::vector<Isometry4> gens, std::vector<int> windows)
        : gens_(std::move(gens)), windows_(std::move(windows)) {
        if (gens_.empty() || gens_.size() > 3) throw std::invalid_argument("ElementaryGroup: rank must be 1..3");
        if (windows_.size() != gens_.size()) throw std::invalid_argument("ElementaryGroup: one window per generator");
        for (int n : windows_)
            if (n < 1) throw std::invalid_argument("ElementaryGroup: windows must be positive");
        if (gens_.size() > 1) {
            for (const auto& g : gens_)
                if (!g.is_parabolic() || g.theta() != 0.0)
                    throw std::invalid_argument("ElementaryGroup: rank >= 2 requires translation generators");
            setup_lattice();
        }
        check_commuting();
    }

    // Windows sized so that every word outside them has index > nu_max at heights <= x4_max.
    static ElementaryGroup from_ranges(std::vector<Isometry4> gens, double nu_max, double x4_max) {
        ElementaryGroup probe(gens, std::vector<int>(gens.size(), 1));
        return ElementaryGroup(std::move(gens), probe.window_for(nu_max, x4_max));
    }

    int rank() const { return static_cast<int>(gens_.size()); }
    const std::vector<Isometry4>& generators() const { return gens_; }
    const std::vector<int>& windows() const { return windows_; }
    bool is_loxodromic() const { return gens_[0].is_loxodromic(); }

    Similarity word(const std::vector<int>& e) const {
        Similarity s;
        for (size_t i = 0; i < gens_.size(); ++i)
            if (e[i] != 0) s = s * gens_[i].power(e[i]).as_similarity();
        return s;
    }

    // Lower bound on the index, at height x4, of any word with some |e_i| > window[i].
    double lower_bound_outside(const std::vector<int>& window, double x4) const {
        if (gens_.size() == 1) {
            const Isometry4& g = gens_[0];
            double n1 = window[0] + 1.0;
            if (g.is_loxodromic()) return n1 * g.translation_length();
            return 2.0 * std::asinh(n1 * norm(g.axial_translation()) / (2.0 * x4));
        }
        double best = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < gens_.size(); ++i) best = std::min(best, (window[i] + 1.0) / pinv_norm_[i]);
        return 2.0 * std::asinh(best / (2.0 * x4));
    }

    // Smallest windows with lower_bound_outside > bound at every height <= x4.
    std::vector<int> window_for(double bound, double x4) const {
        std::vector<int> w(gens_.size());
        if (gens_.size() == 1) {
            const Isometry4& g = gens_[0];
            double v = g.is_loxodromic() ? bound / g.translation_length()
                                         : 2.0 * x4 * std::sinh(bound / 2.0) / norm(g.axial_translation());
            w[0] = static_cast<int>(std::ceil(v)) + 1;
            return w;
        }
        double D = 2.0 * x4 * std::sinh(bound / 2.0);
        for (size_t i = 0; i < gens_.size(); ++i) w[i] = static_cast<int>(std::ceil(D * pinv_norm_[i])) + 1;
        return w;
    }

    // Visits every nontrivial word in the window. Rank 1 visits positive powers only:
    // d(x, g^-n x) = d(g^n x, x).
    void for_each_word(const std::vector<int>& window, const std::function<void(const std::vector<int>&)>& f,
                       bool include_inverses = false) const {
        std::vector<int> e(gens_.size(), 0);
        if (gens_.size() == 1) {
            for (int n = include_inverses ? -window[0] : 1; n <= window[0]; ++n) {
                if (n == 0) continue;
                e[0] = n;
                f(e);
            }
            return;
        }
        std::function<void(size_t)> rec = [&](size_t i) {
            if (i == gens_.size()) {
                bool zero = true;
                for (int v : e) zero = zero && v == 0;
                if (!zero) f(e);
                return;
            }
            for (int n = -window[i]; n <= window[i]; ++n) {
                e[i] = n;
                rec(i + 1);
            }
        };
        rec(0);
    }

    // Displacement of x under the word e; translation lattices are handled without composing maps.
    double word_index(const std::vector<int>& e, const Point4& x) const {
        if (gens_.size() == 1) return index(gens_[0].power(e[0]), x);
        Vec3 t{0, 0, 0};
        for (size_t i = 0; i < gens_.size(); ++i) t = t + static_cast<double>(e[i]) * gens_[i].axial_translation();
        return 2.0 * std::asinh(norm(t) / (2.0 * x.x4()));
    }

    struct MinIndex {
        double value;
        std::vector<int> word;
    };

    MinIndex min_index(const Point4& x) const {
        MinIndex best{std::numeric_limits<double>::infinity(), {}};
        for_each_word(windows_, [&](const std::vector<int>& e) {
            double v = word_index(e, x);
            if (v < best.value) best = {v, e};
        });
        if (lower_bound_outside(windows_, x.x4()) < best.value)
            throw TruncationInsufficient("min_index: window too small for this point");
        return best;
    }

private:
    void setup_lattice() {
        Eigen::Matrix<double, 3, Eigen::Dynamic> B(3, gens_.size());
        for (size_t i = 0; i < gens_.size(); ++i)
            for (int r = 0; r < 3; ++r) B(r, i) = gens_[i].axial_translation()[r];
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
        auto s = svd.singularValues();
        if (s(s.size() - 1) < 1e-9 * s(0))
            throw std::invalid_argument("ElementaryGroup: translation generators are linearly dependent");
        Eigen::MatrixXd Sinv = s.cwiseInverse().asDiagonal();
        Eigen::MatrixXd pinv = svd.matrixV() * Sinv * svd.matrixU().transpose();
        pinv_norm_.resize(gens_.size());
        for (size_t i = 0; i < gens_.size(); ++i) pinv_norm_[i] = pinv.row(i).norm();
    }

    void check_commuting() const {
        const Point4 probes[3] = {Point4(0.3, -0.7, 1.1, 0.9), Point4(-1.2, 0.4, 0.2, 2.3), Point4(2.0, 1.0, -0.5, 0.4)};
        for (size_t i = 0; i < gens_.size(); ++i)
            for (size_t j = i + 1; j < gens_.size(); ++j) {
                Similarity a = gens_[i].as_similarity(), b = gens_[j].as_similarity();
                for (const auto& p : probes)
                    if (euclid_dist((a * b)(p), (b * a)(p)) > 1e-10 * std::max(1.0, p.norm()))
                        throw std::invalid_argument("ElementaryGroup: generators do not commute");
            }
    }

    std::vector<Isometry4> gens_;
    std::vector<int> windows_;
    std::vector<double> pinv_norm_;
};

// Membership uses min-index <= nu; the injectivity radius is half the min-index.
class MargulisCone {
public:
    MargulisCone(ElementaryGroup G, double nu) : G_(std::move(G)), nu_(nu) {
        if (!(nu > 0.0)) throw std::invalid_argument("MargulisCone: nu must be positive");
    }
    const ElementaryGroup& group() const { return G_; }
    double nu() const { return nu_; }

private:
    ElementaryGroup G_;
    double nu_;
};

inline double injectivity_radius(const ElementaryGroup& G, const Point4& x) { return G.min_index(x).value / 2.0; }

// Min-index with the window sized from the generators' own indices at x, so no truncation can occur.
inline double min_index_exact(const ElementaryGroup& G, const Point4& x) {
    double bound = std::numeric_limits<double>::infinity();
    for (int i = 0; i < G.rank(); ++i) {
        std::vector<int> e(G.rank(), 0);
        e[i] = 1;
        bound = std::min(bound, G.word_index(e, x));
    }
    double best = bound;
    G.for_each_word(G.window_for(bound, x.x4()), [&](const std::vector<int>& e) {
        best = std::min(best, G.word_index(e, x));
    });
    return best;
}

inline bool cone_contains(const MargulisCone& K, const Point4& x) {
    const ElementaryGroup& G = K.group();
    bool found = false;
    G.for_each_word(G.windows(), [&](const std::vector<int>& e) {
        if (!found && G.word_index(e, x) <= K.nu()) found = true;
    });
    if (found) return true;
    if (G.lower_bound_outside(G.windows(), x.x4()) <= K.nu())
        throw TruncationInsufficient("cone_contains: window too small for this point");
    return false;
}

// sqrt(2) sinh(min-index / 2) - sqrt(2) sinh(nu / 2); zero on the cone boundary.
inline double boundary_residual(const MargulisCone& K, const Point4& x) {
    double m = K.group().min_index(x).value;
    return std::sqrt(2.0) * (std::sinh(m / 2.0) - std::sinh(K.nu() / 2.0));
}

// Minimal k >= 1 with index(g^k, x) <= mu; the scan stops where k * (per-step lower bound) exceeds mu.
inline std::optional<int> q_function(const Isometry4& g, const Point4& x, double mu, int cap = 1000000) {
    double kmax;
    if (g.is_loxodromic())
        kmax = mu / g.translation_length();
    else
        kmax = 2.0 * x.x4() * std::sinh(mu / 2.0) / norm(g.axial_translation());
    if (kmax > cap) throw TruncationInsufficient("q_function: scan window exceeds cap");
    int K = static_cast<int>(std::floor(kmax));
    for (int k = 1; k <= K; ++k)
        if (index(g.power(k), x) <= mu) return k;
    return std::nullopt;
}

inline double foliation_coordinate(const Isometry4& g, const Point4& x) {
    if (g.is_loxodromic()) return std::log(x.norm());
    Vec3 dir = g.theta() != 0.0 ? g.rotation_axis() : normalized(g.axial_translation());
    return dot(dir, x.horizontal());
}

namespace detail {

// Geodesic ray from the axis point (0,0,0,|a|) through a, orthogonal to the axis: points at
// constant Euclidean norm with cosh(rho) = |x| / x4.
inline Point4 axis_orthogonal_point(double radius, const Vec3& u, double rho) {
    return Point4(radius * std::tanh(rho) * u, radius / std::cosh(rho));
}

template <class Inside, class Pt>
double bisect_boundary(Inside&& inside, Pt&& at, double lo, double hi, double tol = 1e-10, int max_iter = 200) {
    for (int it = 0; it < max_iter && hi - lo > tol * std::max(1.0, std::abs(lo)); ++it) {
        double mid = 0.5 * (lo + hi);
        if (inside(at(mid)))
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

inline Point4 project_phi(const MargulisCone& K, const Point4& a) {
    const ElementaryGroup& G = K.group();
    auto inside = [&](const Point4& p) { return cone_contains(K, p); };
    if (G.is_loxodromic()) {
        Vec3 h = a.horizontal();
        double r = a.norm();
        if (norm(h) <= 1e-12 * r) throw std::invalid_argument("project_phi: point on the axis");
        Vec3 u = normalized(h);
        auto at = [&](double rho) { return detail::axis_orthogonal_point(r, u, rho); };
        if (!inside(at(0.0))) throw EmptyCone("project_phi: cone is empty");
        double hi = 1.0;
        while (inside(at(hi))) {
            hi *= 2.0;
            if (hi > 60.0) throw EmptyCone("project_phi: ray stays inside the cone");
        }
        // Inside region is [0, rho*]; bisect with "lo" the inside end.
        double rho = detail::bisect_boundary(inside, at, 0.0, hi);
        return at(rho);
    }
    // Parabolic: inside region along the vertical line is {x4 >= h*}; bisect in log-height.
    Vec3 h = a.horizontal();
    auto at = [&](double s) { return Point4(h, std::exp(s)); };
    double s0 = std::log(a.x4());
    double up = s0, down = s0;
    if (inside(at(s0))) {
        while (inside(at(down))) {
            down -= 1.0;
            if (down < std::log(kMinHeight) + 50.0) throw EmptyCone("project_phi: no exit below");
        }
        up = down + 1.0;
    } else {
        while (!inside(at(up))) {
            up += 1.0;
            if (up > 600.0) throw EmptyCone("project_phi: ray never meets the cone");
        }
        down = up - 1.0;
    }
    // bisect_boundary keeps "lo" inside, so run it on the reversed parameter.
    double t = detail::bisect_boundary(inside, [&](double v) { return at(-v); }, -up, -down);
    return at(-t);
}

struct Mesh {
    std::vector<Point4> vertices;
    std::vector<Vec3> chart;
    std::vector<std::array<int, 4>> quads;
};

// Boundary sample on one fiber: loxodromic uses the unit hemisphere |x| = 1 and a grid of
// directions around the axis; parabolic uses a square of side 2*extent in the fiber through 0.
inline Mesh cone_boundary_mesh(const MargulisCone& K, int resolution, double extent = 2.0) {
    if (resolution < 2) throw std::invalid_argument("cone_boundary_mesh: resolution must be >= 2");
    const ElementaryGroup& G = K.group();
    const Isometry4& g = G.generators()[0];
    Mesh m;
    int n = resolution;
    if (G.is_loxodromic()) {
        auto [e1, e2] = g.rotation_plane();
        Vec3 ax = g.rotation_axis();
        for (int j = 0; j < n; ++j) {
            double beta = std::numbers::pi * (j + 0.5) / n;
            for (int i = 0; i < n; ++i) {
                double psi = 2.0 * std::numbers::pi * i / n;
                Vec3 u = std::sin(beta) * (std::cos(psi) * e1 + std::sin(psi) * e2) + std::cos(beta) * ax;
                Point4 v = project_phi(K, Point4(0.5 * u, std::sqrt(0.75)));
                m.vertices.push_back(v);
                m.chart.push_back({g.rotation_radius(v), psi, v.x4()});
            }
        }
        for (int j = 0; j + 1 < n; ++j)
            for (int i = 0; i < n; ++i) {
                int i2 = (i + 1) % n;
                m.quads.push_back({j * n + i, j * n + i2, (j + 1) * n + i2, (j + 1) * n + i});
            }
        return m;
    }
    Vec3 dir = g.theta() != 0.0 ? g.rotation_axis() : normalized(g.axial_translation());
    Vec3 seed = std::abs(dir[0]) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    Vec3 w1 = normalized(seed - dot(seed, dir) * dir);
    Vec3 w2 = cross(dir, w1);
    for (int j = 0; j < n; ++j) {
        double b = -extent + 2.0 * extent * j / (n - 1);
        for (int i = 0; i < n; ++i) {
            double a = -extent + 2.0 * extent * i / (n - 1);
            Point4 v = project_phi(K, Point4(a * w1 + b * w2, 1.0));
            m.vertices.push_back(v);
            m.chart.push_back({a, b, v.x4()});
        }
    }
    for (int j = 0; j + 1 < n; ++j)
        for (int i = 0; i + 1 < n; ++i) m.quads.push_back({j * n + i, j * n + i + 1, (j + 1) * n + i + 1, (j + 1) * n + i});
    return m;
}

inline void write_obj(std::ostream& os, const Mesh& m) {
    os.precision(17);
    for (const auto& c : m.chart) os << "v " << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
    for (const auto& q : m.quads) os << "f " << q[0] + 1 << ' ' << q[1] + 1 << ' ' << q[2] + 1 << ' ' << q[3] + 1 << '\n';
}

inline void write_csv(std::ostream& os, const Mesh& m) {
    os.precision(17);
    os << "x1,x2,x3,x4\n";
    for (const auto& v : m.vertices) os << v.x1() << ',' << v.x2() << ',' << v.x3() << ',' << v.x4() << '\n';
}

// Orbit points of x in the closed ball B(x, r), x itself included.
inline long long orbit_count(const ElementaryGroup& G, const Point4& x, double r) {
    long long count = 1;
    auto w = G.window_for(r, x.x4());
    G.for_each_word(w, [&](const std::vector<int>& e) {
        if (G.word_index(e, x) <= r) ++count;
    }, true);
    return count;
}

// Elements h (identity included) with h B(x, r) meeting B(x, r), i.e. d(x, hx) <= 2r.
inline long long overlap_count(const ElementaryGroup& G, const Point4& x, double r) { return orbit_count(G, x, 2.0 * r); }

}  // namespace hyp4
