#pragma once

// Quadrature on the reference triangle {xi, eta >= 0, xi + eta <= 1}.
// Symmetric Dunavant rules up to degree 6; higher degrees fall back to a
// collapsed-coordinate tensor Gauss rule (more points, guaranteed exactness).
// Weights sum to 1 and are applied as  integral ~ area * sum w_q f(x_q).

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace fembem {

struct TriQuadRule {
    int exact_degree = 0;
    std::vector<Eigen::Vector2d> points;  // (xi, eta) on the reference triangle
    std::vector<double> weights;          // sum to 1
};

namespace detail {

// Gauss-Legendre nodes/weights on [0, 1] by Newton iteration on P_n.
inline void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(static_cast<std::size_t>(n));
    w.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        x[static_cast<std::size_t>(n - 1 - i)] = 0.5 * (1.0 + z);
        w[static_cast<std::size_t>(n - 1 - i)] = 1.0 / ((1.0 - z * z) * pp * pp);
    }
}

inline void push_perm3(TriQuadRule& r, double a, double w) {
    // three permutations of barycentric (1-2a, a, a); point = (l2, l3)
    const double b = 1.0 - 2.0 * a;
    r.points.emplace_back(a, a);
    r.points.emplace_back(b, a);
    r.points.emplace_back(a, b);
    for (int i = 0; i < 3; ++i) r.weights.push_back(w);
}

inline void push_perm6(TriQuadRule& r, double a, double b, double w) {
    const double c = 1.0 - a - b;
    const double xs[6][2] = {{b, c}, {c, b}, {a, c}, {c, a}, {a, b}, {b, a}};
    for (auto& p : xs) {
        r.points.emplace_back(p[0], p[1]);
        r.weights.push_back(w);
    }
}

inline TriQuadRule duffy_rule(int degree) {
    // f(xi, eta) of degree p becomes degree <= p+1 in each collapsed variable
    TriQuadRule r;
    r.exact_degree = degree;
    const int n = degree / 2 + 2;
    std::vector<double> gx, gw;
    gauss_legendre_01(n, gx, gw);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double u = gx[static_cast<std::size_t>(i)], v = gx[static_cast<std::size_t>(j)];
            r.points.emplace_back(u, v * (1.0 - u));
            r.weights.push_back(2.0 * gw[static_cast<std::size_t>(i)] * gw[static_cast<std::size_t>(j)] * (1.0 - u));
        }
    return r;
}

}  // namespace detail

inline const TriQuadRule& triangle_rule(int degree) {
    if (degree < 0 || degree > 12) throw std::invalid_argument("triangle_rule: degree out of range");
    static const std::vector<TriQuadRule> rules = [] {
        std::vector<TriQuadRule> v;

        TriQuadRule d1;
        d1.exact_degree = 1;
        d1.points.emplace_back(1.0 / 3.0, 1.0 / 3.0);
        d1.weights.push_back(1.0);
        v.push_back(d1);

        TriQuadRule d2;
        d2.exact_degree = 2;
        detail::push_perm3(d2, 1.0 / 6.0, 1.0 / 3.0);
        v.push_back(d2);

        TriQuadRule d4;
        d4.exact_degree = 4;
        detail::push_perm3(d4, 0.445948490915965, 0.223381589678011);
        detail::push_perm3(d4, 0.091576213509771, 0.109951743655322);
        v.push_back(d4);

        TriQuadRule d6;
        d6.exact_degree = 6;
        detail::push_perm3(d6, 0.063089014491502, 0.050844906370207);
        detail::push_perm3(d6, 0.249286745170910, 0.116786275726379);
        detail::push_perm6(d6, 0.053145049844816, 0.310352451033785, 0.082851075618374);
        v.push_back(d6);

        v.push_back(detail::duffy_rule(8));
        v.push_back(detail::duffy_rule(10));
        v.push_back(detail::duffy_rule(12));
        return v;
    }();
    for (const auto& r : rules)
        if (r.exact_degree >= degree) return r;
    return rules.back();
}

}  // namespace fembem
