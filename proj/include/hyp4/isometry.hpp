#pragma once

#include "hyp4/core.hpp"

#include <numbers>
#include <optional>

namespace hyp4 {

using Mat3 = std::array<Vec3, 3>;

inline Mat3 identity3() { return {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}; }

inline Vec3 mul(const Mat3& m, const Vec3& v) { return {dot(m[0], v), dot(m[1], v), dot(m[2], v)}; }

inline Mat3 mul(const Mat3& a, const Mat3& b) {
    Mat3 r{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
    return r;
}

// Right-handed rotation by angle phi about the unit vector a.
inline Mat3 rotation_about(const Vec3& a, double phi) {
    double c = std::cos(phi), s = std::sin(phi), C = 1.0 - c;
    double x = a[0], y = a[1], z = a[2];
    return {{{c + x * x * C, x * y * C - z * s, x * z * C + y * s},
             {y * x * C + z * s, c + y * y * C, y * z * C - x * s},
             {z * x * C - y * s, z * y * C + x * s, c + z * z * C}}};
}

// x' -> scale * Q x' + t, x4 -> scale * x4. Every map handled here has this form.
struct Similarity {
    double scale = 1.0;
    Mat3 Q = identity3();
    Vec3 t{0, 0, 0};

    Point4 operator()(const Point4& p) const {
        Vec3 h = scale * mul(Q, p.horizontal()) + t;
        return Point4(h, scale * p.x4());
    }
    Vec3 on_boundary(const Vec3& v) const { return scale * mul(Q, v) + t; }

    friend Similarity operator*(const Similarity& f, const Similarity& g) {
        return {f.scale * g.scale, mul(f.Q, g.Q), f.scale * mul(f.Q, g.t) + f.t};
    }
};

// Reduce an angle to (-pi, pi].
inline double wrap_angle(double phi) {
    double r = std::remainder(phi, 2.0 * std::numbers::pi);
    if (r <= -std::numbers::pi) r += 2.0 * std::numbers::pi;
    return r;
}

enum class IsometryKind { loxodromic, parabolic };

inline constexpr double kAngleZero = 1e-14;

class Isometry4 {
public:
    // x -> lambda * Theta x with Theta the rotation by orientation*theta in span(e1, e2).
    static Isometry4 loxodromic(double lambda, double theta, const Vec3& e1, const Vec3& e2, int orientation = 1) {
        if (!(lambda > 0.0) || !std::isfinite(lambda) || lambda == 1.0)
            throw std::invalid_argument("loxodromic: lambda must be positive and != 1");
        Vec3 u = normalized(e1);
        Vec3 v = e2 - dot(e2, u) * u;
        if (norm(v) < 1e-12) throw std::invalid_argument("loxodromic: degenerate rotation plane");
        v = normalized(v);
        Isometry4 g;
        g.kind_ = IsometryKind::loxodromic;
        g.lambda_ = lambda;
        g.e1_ = u;
        g.e2_ = v;
        g.axis_ = cross(u, v);
        g.set_angle(orientation >= 0 ? theta : -theta);
        return g;
    }

    static Isometry4 dilation(double lambda) { return loxodromic(lambda, 0.0, {1, 0, 0}, {0, 1, 0}); }

    // x' -> Theta x' + translation with Theta the rotation by orientation*theta about the line through 0
    // spanned by axis. For theta != 0 the component of translation along the axis must be nonzero.
    static Isometry4 parabolic(double theta, const Vec3& axis, const Vec3& translation, int orientation = 1) {
        Isometry4 g;
        g.kind_ = IsometryKind::parabolic;
        g.axis_ = normalized(axis);
        g.set_angle(orientation >= 0 ? theta : -theta);
        double along = dot(translation, g.axis_);
        Vec3 par = along * g.axis_;
        Vec3 perp = translation - par;
        if (g.theta_ == 0.0) {
            if (norm(translation) == 0.0) throw std::invalid_argument("parabolic: identity");
            g.tpar_ = translation;
            g.center_ = {0, 0, 0};
        } else {
            if (std::abs(along) <= 1e-12 * std::max(1.0, norm(translation)))
                throw std::invalid_argument("parabolic: rotation without axial translation is elliptic");
            g.tpar_ = par;
            // Screw axis: the line through c parallel to the axis with (I - Theta) c = perp.
            double phi = g.signed_angle();
            Vec3 w = cross(g.axis_, perp);
            double cot = std::cos(phi / 2) / std::sin(phi / 2);
            g.center_ = 0.5 * (perp + cot * w);
        }
        return g;
    }

    static Isometry4 translation(const Vec3& b) { return parabolic(0.0, {0, 0, 1}, b); }

    IsometryKind kind() const { return kind_; }
    bool is_loxodromic() const { return kind_ == IsometryKind::loxodromic; }
    bool is_parabolic() const { return kind_ == IsometryKind::parabolic; }
    double lambda() const { return lambda_; }
    double theta() const { return theta_; }
    int orientation() const { return orientation_; }
    double signed_angle() const { return orientation_ * theta_; }
    const Vec3& rotation_axis() const { return axis_; }
    std::pair<Vec3, Vec3> rotation_plane() const { return {e1_, e2_}; }
    // Parabolic only: a point of the screw axis, and the translation along it (full translation if theta = 0).
    const Vec3& axis_point() const { return center_; }
    const Vec3& axial_translation() const { return tpar_; }
    Vec3 translation() const { return kind_ == IsometryKind::parabolic ? as_similarity().t : Vec3{0, 0, 0}; }

    Similarity rotational_part(double t = 1.0) const {
        Similarity r;
        r.Q = rotation_about(axis_, t * signed_angle());
        if (kind_ == IsometryKind::parabolic) r.t = center_ - mul(r.Q, center_);
        return r;
    }
    Similarity translational_part(double t = 1.0) const {
        Similarity r;
        if (kind_ == IsometryKind::loxodromic)
            r.scale = std::pow(lambda_, t);
        else
            r.t = t * tpar_;
        return r;
    }
    Similarity as_similarity() const { return rotational_part(1.0) * translational_part(1.0); }

    Point4 apply(const Point4& p) const { return as_similarity()(p); }

    Isometry4 power(int n) const {
        if (n == 0) throw std::invalid_argument("power: n must be nonzero");
        Isometry4 g = *this;
        g.set_angle(n * signed_angle());
        if (kind_ == IsometryKind::loxodromic) {
            g.lambda_ = std::pow(lambda_, n);
        } else {
            g.tpar_ = static_cast<double>(n) * tpar_;
            if (g.theta_ == 0.0 && theta_ != 0.0) g.center_ = {0, 0, 0};
        }
        return g;
    }
    Isometry4 inverse() const { return power(-1); }

    double translation_length() const {
        return kind_ == IsometryKind::loxodromic ? std::abs(std::log(lambda_)) : 0.0;
    }

    // Euclidean distance from x to the fixed plane L of the rotational part (0 if there is no rotation).
    double rotation_radius(const Point4& x) const {
        if (theta_ == 0.0) return 0.0;
        Vec3 d = x.horizontal() - center_;
        Vec3 perp = d - dot(d, axis_) * axis_;
        return norm(perp);
    }

private:
    Isometry4() = default;

    void set_angle(double phi) {
        double w = wrap_angle(phi);
        if (std::abs(w) < kAngleZero) w = 0.0;
        theta_ = std::abs(w);
        orientation_ = (w < 0.0 && theta_ != std::numbers::pi) ? -1 : 1;
        if (kind_ == IsometryKind::loxodromic && theta_ == 0.0) orientation_ = 1;
    }

    IsometryKind kind_ = IsometryKind::loxodromic;
    double lambda_ = 1.0;
    double theta_ = 0.0;
    int orientation_ = 1;
    Vec3 e1_{1, 0, 0}, e2_{0, 1, 0};
    Vec3 axis_{0, 0, 1};
    Vec3 center_{0, 0, 0};
    Vec3 tpar_{0, 0, 0};
};

inline Point4 apply(const Isometry4& g, const Point4& p) { return g.apply(p); }
inline Isometry4 power(const Isometry4& g, int n) { return g.power(n); }
inline Similarity flow_rotational(const Isometry4& g, double t) { return g.rotational_part(t); }
inline Similarity flow_translational(const Isometry4& g, double t) { return g.translational_part(t); }
inline double translation_length(const Isometry4& g) { return g.translation_length(); }
inline double index(const Isometry4& g, const Point4& x) { return dist(x, g.apply(x)); }
inline double index(const Similarity& g, const Point4& x) { return dist(x, g(x)); }

struct AxisData {
    bool has_axis;                  // loxodromic: the vertical geodesic over 0
    std::optional<Vec3> lq_point;   // a point of L_q (horizontal part)
    std::optional<Vec3> lq_direction;
};

inline AxisData axis_data(const Isometry4& g) {
    AxisData d{g.is_loxodromic(), std::nullopt, std::nullopt};
    if (g.theta() != 0.0) {
        d.lq_point = g.is_parabolic() ? g.axis_point() : Vec3{0, 0, 0};
        d.lq_direction = g.rotation_axis();
    }
    return d;
}

struct DisplacementAudit {
    double euclidean_sq;         // displayed closed form for |Tx - x|^2
    double two_sinh_sq;          // displayed closed form for 2 sinh^2(d/2)
    double x_theta;              // |x| R_x sqrt(2(1 - cos theta)) / x4
    double x_lambda;             // sqrt(x_T^2 - x_theta^2), NaN when the radicand is negative
    double direct_euclidean_sq;  // |Tx - x|^2
    double direct_two_sinh_sq;   // 2 sinh^2(d(x, Tx)/2)
    double x_T;                  // sqrt(2) sinh(d(x, Tx)/2)
    double R_x;
    double lambda_T;
};

inline DisplacementAudit paper_displacement(const Isometry4& g, const Point4& x) {
    DisplacementAudit a{};
    Point4 gx = g.apply(x);
    double R = g.rotation_radius(x);
    double rot = 2.0 * R * R * (1.0 - std::cos(g.theta()));
    double x4sq = x.x4() * x.x4();
    a.R_x = R;
    if (g.is_parabolic()) {
        a.lambda_T = norm(g.axial_translation());
        a.euclidean_sq = rot + a.lambda_T * a.lambda_T;
        a.two_sinh_sq = a.euclidean_sq / x4sq;
    } else {
        double l = g.lambda();
        a.lambda_T = l;
        a.euclidean_sq = (rot + l * l) * x.norm_sq();
        a.two_sinh_sq = (rot + (l - 1.0) * (l - 1.0) / l) * x.norm_sq() / x4sq;
    }
    a.direct_euclidean_sq = euclid_dist_sq(x, gx);
    double d = dist(x, gx);
    double sh = std::sinh(d / 2.0);
    a.direct_two_sinh_sq = 2.0 * sh * sh;
    a.x_T = std::sqrt(2.0) * sh;
    a.x_theta = x.norm() * R * std::sqrt(2.0 * (1.0 - std::cos(g.theta()))) / x.x4();
    double rad = a.x_T * a.x_T - a.x_theta * a.x_theta;
    a.x_lambda = rad >= 0.0 ? std::sqrt(rad) : std::numeric_limits<double>::quiet_NaN();
    return a;
}

}  // namespace hyp4
