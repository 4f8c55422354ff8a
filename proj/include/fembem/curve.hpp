#pragma once

// Smooth closed curves used as the artificial BEM interface.  A curve is a
// 2pi-periodic parameterization t -> x(t) with two derivatives, oriented
// counterclockwise (positive enclosed area).

#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fembem/errors.hpp"

namespace fembem {

using Vec2 = Eigen::Vector2d;
using Complex = std::complex<double>;

struct CurvePoint {
    Vec2 x;        // position
    Vec2 dx;       // tangent x'(t)
    Vec2 ddx;      // x''(t)
    Vec2 mu;       // (x2'(t), -x1'(t)) = |x'| * outward normal for ccw curves
    double speed;  // |x'(t)|
};

class SmoothCurve {
  public:
    using Fn = std::function<Vec2(double)>;

    SmoothCurve(std::string name, Fn position, Fn derivative, Fn second_derivative)
        : name_(std::move(name)),
          pos_(std::move(position)),
          d1_(std::move(derivative)),
          d2_(std::move(second_derivative)) {}

    static SmoothCurve circle(const Vec2& center, double radius) {
        if (!(radius > 0.0)) throw geometry_error("circle: radius must be positive");
        return SmoothCurve(
            "circle",
            [center, radius](double t) { return Vec2(center.x() + radius * std::cos(t), center.y() + radius * std::sin(t)); },
            [radius](double t) { return Vec2(-radius * std::sin(t), radius * std::cos(t)); },
            [radius](double t) { return Vec2(-radius * std::cos(t), -radius * std::sin(t)); });
    }

    // Rounded square with corners on the diagonals; the default scale puts the
    // corners at distance 7 from the origin.
    static SmoothCurve rounded_square(double scale = 7.0 * M_SQRT2 / 4.0) {
        if (!(scale > 0.0)) throw geometry_error("rounded_square: scale must be positive");
        auto pos = [scale](double t) {
            const double c = std::cos(t), s = std::sin(t);
            const double u = (1.0 + c * c) * c, v = (1.0 + s * s) * s;
            return Vec2(scale * (u + v), scale * (v - u));
        };
        auto d1 = [scale](double t) {
            const double c = std::cos(t), s = std::sin(t);
            const double du = -3.0 * c * c * s - s;  // d/dt[(1+c^2)c]
            const double dv = 3.0 * s * s * c + c;   // d/dt[(1+s^2)s]
            return Vec2(scale * (du + dv), scale * (dv - du));
        };
        auto d2 = [scale](double t) {
            const double c = std::cos(t), s = std::sin(t);
            const double ddu = 6.0 * c * s * s - 3.0 * c * c * c - c;
            const double ddv = 6.0 * s * c * c - 3.0 * s * s * s - s;
            return Vec2(scale * (ddu + ddv), scale * (ddv - ddu));
        };
        return SmoothCurve("rounded_square", pos, d1, d2);
    }

    const std::string& name() const { return name_; }

    CurvePoint at(double t) const {
        CurvePoint p;
        p.x = pos_(t);
        p.dx = d1_(t);
        p.ddx = d2_(t);
        p.mu = Vec2(p.dx.y(), -p.dx.x());
        p.speed = p.dx.norm();
        if (!p.x.allFinite() || !p.dx.allFinite() || !p.ddx.allFinite())
            throw geometry_error("curve '" + name_ + "': non-finite evaluation at t = " + std::to_string(t));
        return p;
    }

    Vec2 position(double t) const { return pos_(t); }

    // Signed enclosed area, 1/2 * integral of (x1 x2' - x2 x1'), trapezoid rule.
    double signed_area(int n = 4096) const {
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            const double t = 2.0 * M_PI * i / n;
            const Vec2 x = pos_(t), dx = d1_(t);
            s += x.x() * dx.y() - x.y() * dx.x();
        }
        return 0.5 * s * (2.0 * M_PI / n);
    }

    double max_speed(int n = 2048) const {
        double m = 0.0;
        for (int i = 0; i < n; ++i) m = std::max(m, d1_(2.0 * M_PI * i / n).norm());
        return m;
    }

    std::vector<Vec2> sample_points(int n) const {
        std::vector<Vec2> pts(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) pts[static_cast<std::size_t>(i)] = pos_(2.0 * M_PI * i / n);
        return pts;
    }

    // Winding-number test against a dense polygonal sampling of the curve.
    // Reliable away from the curve itself; points within ~|x'|(2pi/n)^2 of the
    // curve may classify either way.
    bool contains(const Vec2& p, int n = 4096) const {
        const auto pts = sample_points(n);
        double angle = 0.0;
        for (int i = 0; i < n; ++i) {
            const Vec2 a = pts[static_cast<std::size_t>(i)] - p;
            const Vec2 b = pts[static_cast<std::size_t>((i + 1) % n)] - p;
            angle += std::atan2(a.x() * b.y() - a.y() * b.x(), a.dot(b));
        }
        return std::abs(angle) > M_PI;  // |winding| >= 1
    }

    double distance_to(const Vec2& p, int n = 4096) const {
        double d = std::numeric_limits<double>::max();
        for (int i = 0; i < n; ++i) d = std::min(d, (pos_(2.0 * M_PI * i / n) - p).norm());
        return d;
    }

  private:
    std::string name_;
    Fn pos_, d1_, d2_;
};

/// Position, tangent and mu = (x2', -x1') at parameter t.
inline CurvePoint eval_curve(const SmoothCurve& curve, double t) { return curve.at(t); }

}  // namespace fembem
