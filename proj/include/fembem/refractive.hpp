#pragma once

// Refractive index fields n^2(x, y).  Each field declares the support of the
// heterogeneity (where n differs from 1): either a polygon, a disk, or a
// polar level set r <= rho(theta).  Outside the support n^2 is identically 1.

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fembem/errors.hpp"

namespace fembem {

using Vec2 = Eigen::Vector2d;

// Smooth cutoff: 1 for x <= 0, 0 for x >= 1.
inline double cutoff_chi_tilde(double x) {
    if (x <= 0.0) return 1.0;
    if (x >= 1.0) return 0.0;
    return std::exp(1.0 / (M_E - std::exp(1.0 / x)));
}

// Symmetrized cutoff with chi(x) + chi(1 - x) = 1.
inline double cutoff_chi(double x) {
    return 0.5 * (cutoff_chi_tilde(x) + 1.0 - cutoff_chi_tilde(1.0 - x));
}

struct Polygon {
    std::vector<Vec2> vertices;  // ccw

    double signed_area() const {
        double s = 0.0;
        const std::size_t n = vertices.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2& a = vertices[i];
            const Vec2& b = vertices[(i + 1) % n];
            s += a.x() * b.y() - a.y() * b.x();
        }
        return 0.5 * s;
    }

    bool contains(const Vec2& p, double tol = 1e-12) const {
        // winding number; points within tol of an edge count as inside
        const std::size_t n = vertices.size();
        double angle = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 a = vertices[i] - p;
            const Vec2 b = vertices[(i + 1) % n] - p;
            const double cross = a.x() * b.y() - a.y() * b.x();
            const double seg2 = (vertices[(i + 1) % n] - vertices[i]).squaredNorm();
            // on-edge check: |cross| small relative to edge and p between endpoints
            if (std::abs(cross) <= tol * std::sqrt(seg2) && a.dot(b) <= tol) return true;
            angle += std::atan2(cross, a.dot(b));
        }
        return std::abs(angle) > M_PI;
    }

    std::vector<Vec2> boundary_samples(int per_edge) const {
        std::vector<Vec2> out;
        const std::size_t n = vertices.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2& a = vertices[i];
            const Vec2& b = vertices[(i + 1) % n];
            for (int s = 0; s < per_edge; ++s) out.push_back(a + (b - a) * (static_cast<double>(s) / per_edge));
        }
        return out;
    }
};

class RefractiveField {
  public:
    enum class Support { none, disk, polar, polygon };

    static RefractiveField uniform() {
        RefractiveField f;
        f.name_ = "uniform";
        f.support_ = Support::none;
        f.value_ = [](const Vec2&) { return 1.0; };
        return f;
    }

    // Five-pointed smooth star profile, n^2 in [1, 17], support
    // r <= 2 + 0.75 sin(5 theta) around the origin.
    static RefractiveField star_index() {
        RefractiveField f;
        f.name_ = "star";
        f.support_ = Support::polar;
        f.rho_ = [](double theta) { return 2.0 + 0.75 * std::sin(5.0 * theta); };
        f.value_ = [](const Vec2& p) {
            const double r = p.norm();
            const double theta = std::atan2(p.y(), p.x());
            const double rho = 2.0 + 0.75 * std::sin(5.0 * theta);
            return 1.0 + 16.0 * cutoff_chi((r / rho - 0.025) / 0.975);
        };
        return f;
    }

    // Piecewise-smooth index on a polygonal silhouette.  The polygon is a
    // rectilinear stand-in (the published experiment does not list the
    // original vertices); the index profile inside it matches the published
    // formula.  Vertices sit on the 0.5-grid so structured meshes align once
    // the cell size divides 0.5.
    static RefractiveField pikachu_index() {
        RefractiveField f;
        f.name_ = "pikachu";
        f.support_ = Support::polygon;
        f.polygon_.vertices = {
            {-2.0, -3.0}, {2.0, -3.0}, {2.0, 3.0},  {1.5, 3.0},
            {1.5, 1.5},   {-1.5, 1.5}, {-1.5, 3.0}, {-2.0, 3.0},
        };
        Polygon poly = f.polygon_;
        f.value_ = [poly](const Vec2& p) {
            if (!poly.contains(p)) return 1.0;
            const double x = p.x() + 0.18, y = p.y() + 0.6;
            const double r = std::sqrt(x * x + y * y);
            const double theta = std::atan2(y, x);
            const double rho = 2.0 - 0.75 * std::cos(4.0 * theta);
            return 5.0 + 4.0 * cutoff_chi((r / rho - 0.025) / 0.9);
        };
        return f;
    }

    // Sharp-contrast disk: n^2 = n0^2 inside, 1 outside.
    static RefractiveField constant_disk(const Vec2& center, double radius, double n0) {
        if (!(radius > 0.0) || !(n0 > 0.0)) throw geometry_error("constant_disk: radius and n0 must be positive");
        RefractiveField f;
        f.name_ = "constant_disk";
        f.support_ = Support::disk;
        f.center_ = center;
        f.radius_ = radius;
        const double n2 = n0 * n0;
        f.value_ = [center, radius, n2](const Vec2& p) { return (p - center).norm() <= radius ? n2 : 1.0; };
        return f;
    }

    // Radially smooth contrast: n^2 = n0^2 for r <= r_inner, 1 for r >= r_outer,
    // smooth cutoff blend in between.
    static RefractiveField smooth_disk(const Vec2& center, double r_inner, double r_outer, double n0) {
        if (!(0.0 < r_inner && r_inner < r_outer)) throw geometry_error("smooth_disk: need 0 < r_inner < r_outer");
        if (!(n0 > 0.0)) throw geometry_error("smooth_disk: n0 must be positive");
        RefractiveField f;
        f.name_ = "smooth_disk";
        f.support_ = Support::disk;
        f.center_ = center;
        f.radius_ = r_outer;
        const double n2 = n0 * n0;
        f.value_ = [center, r_inner, r_outer, n2](const Vec2& p) {
            const double r = (p - center).norm();
            return 1.0 + (n2 - 1.0) * cutoff_chi((r - r_inner) / (r_outer - r_inner));
        };
        f.radial_profile_ = [r_inner, r_outer, n2](double r) {
            return 1.0 + (n2 - 1.0) * cutoff_chi((r - r_inner) / (r_outer - r_inner));
        };
        f.r_inner_ = r_inner;
        return f;
    }

    const std::string& name() const { return name_; }
    Support support_kind() const { return support_; }
    bool has_support() const { return support_ != Support::none; }
    const Polygon& polygon() const { return polygon_; }
    Vec2 disk_center() const { return center_; }
    double disk_radius() const { return radius_; }
    double disk_inner_radius() const { return r_inner_; }
    bool has_radial_profile() const { return static_cast<bool>(radial_profile_); }
    double radial_profile(double r) const { return radial_profile_(r); }

    double value(const Vec2& p) const { return value_(p); }

    bool in_support(const Vec2& p, double tol = 1e-12) const {
        switch (support_) {
            case Support::none: return false;
            case Support::disk: return (p - center_).norm() <= radius_ + tol;
            case Support::polygon: return polygon_.contains(p, tol);
            case Support::polar: {
                const Vec2 q = p - center_;
                const double r = q.norm();
                return r <= rho_(std::atan2(q.y(), q.x())) + tol;
            }
        }
        return false;
    }

    std::vector<Vec2> support_boundary(int n = 1024) const {
        std::vector<Vec2> out;
        switch (support_) {
            case Support::none: break;
            case Support::disk:
                for (int i = 0; i < n; ++i) {
                    const double t = 2.0 * M_PI * i / n;
                    out.emplace_back(center_.x() + radius_ * std::cos(t), center_.y() + radius_ * std::sin(t));
                }
                break;
            case Support::polar:
                for (int i = 0; i < n; ++i) {
                    const double t = 2.0 * M_PI * i / n;
                    const double r = rho_(t);
                    out.emplace_back(center_.x() + r * std::cos(t), center_.y() + r * std::sin(t));
                }
                break;
            case Support::polygon: {
                const int per_edge = std::max(1, n / static_cast<int>(polygon_.vertices.size()));
                out = polygon_.boundary_samples(per_edge);
                break;
            }
        }
        return out;
    }

  private:
    std::string name_;
    Support support_ = Support::none;
    std::function<double(const Vec2&)> value_;
    std::function<double(double)> rho_;             // polar support radius
    std::function<double(double)> radial_profile_;  // n^2(r) when radially symmetric
    Polygon polygon_;
    Vec2 center_ = Vec2::Zero();
    double radius_ = 0.0;
    double r_inner_ = 0.0;
};

inline double eval_refractive(const RefractiveField& field, const Vec2& point) { return field.value(point); }

}  // namespace fembem
