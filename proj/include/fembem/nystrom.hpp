#pragma once

// Spectral Nystrom discretization of the exterior homogeneous Helmholtz
// problem on a smooth curve Gamma: Kress kernel splitting against the
// log sin^2 weight, exact log-quadrature on trigonometric polynomials,
// combined-field system (1/2 I + K - ik V), layer-potential evaluation and
// the far field.
//
// Convention: the system, the potentials and the far-field formula act on
// parameterized densities (the curve Jacobian |x'| is folded into the
// density for the single layer and into mu = (x2', -x1') for the double
// layer).  kernel_split returns the arc-length (sigma = 1) kernels; the
// single-layer assembly divides its column by |x'(t_j)| accordingly.

#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/LU>

#include "fembem/bessel.hpp"
#include "fembem/curve.hpp"
#include "fembem/errors.hpp"

namespace fembem {

using Density = Eigen::VectorXcd;

struct NystromGrid {
    int N = 0;
    SmoothCurve curve{"", nullptr, nullptr, nullptr};  // owned copy
    std::vector<double> t;        // t_j = pi j / N, j = -N+1 .. N
    std::vector<CurvePoint> cp;   // cached curve data at the nodes

    static NystromGrid build(const SmoothCurve& curve, int N) {
        if (N < 1) throw std::invalid_argument("NystromGrid: N must be >= 1");
        NystromGrid g;
        g.N = N;
        g.curve = curve;
        g.t.reserve(static_cast<std::size_t>(2 * N));
        g.cp.reserve(static_cast<std::size_t>(2 * N));
        for (int j = -N + 1; j <= N; ++j) {
            const double tj = M_PI * j / N;
            g.t.push_back(tj);
            g.cp.push_back(curve.at(tj));
        }
        return g;
    }

    int size() const { return 2 * N; }
};

// Quadrature weights w_j with  sum_j w_j g(t_j) = int_0^{2pi} (Q_N g)(t) log sin^2((s - t)/2) dt
// for the collocation point s = t_{s_index}; exact for g in T_N.
inline std::vector<double> log_weight_row(int N, int s_index) {
    if (N < 1) throw std::invalid_argument("log_weight_row: N must be >= 1");
    const int n = 2 * N;
    std::vector<double> w(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double dt = M_PI * (s_index - j) / N;
        double s = std::log(4.0);
        for (int m = 1; m < N; ++m) s += 2.0 * std::cos(m * dt) / m;
        s += std::cos(N * dt) / N;
        w[static_cast<std::size_t>(j)] = -(M_PI / N) * s;
    }
    return w;
}

struct KernelSplit {
    Complex A, B;  // single layer: A log sin^2((s-t)/2) + B = Phi_k(x(s)-x(t)) |x'(t)|
    Complex C, D;  // double layer: C log sin^2((s-t)/2) + D = grad_y Phi_k . mu(t)
};

inline KernelSplit split_kernels(const SmoothCurve& curve, double k, double s, double t) {
    const CurvePoint ps = curve.at(s), pt = curve.at(t);
    KernelSplit ks;
    const double half_sin = std::sin(0.5 * (s - t));
    if (std::abs(half_sin) < 1e-12) {
        // Kress diagonal limits
        ks.A = Complex(-pt.speed / (4.0 * M_PI), 0.0);
        ks.B = pt.speed * Complex(-(euler_gamma + std::log(k * pt.speed)) / (2.0 * M_PI), 0.25);
        ks.C = 0.0;
        ks.D = Complex(pt.ddx.dot(pt.mu) / (4.0 * M_PI * pt.speed * pt.speed), 0.0);
        return ks;
    }
    const Vec2 r = ps.x - pt.x;
    const double rho = r.norm();
    const double logsin2 = std::log(half_sin * half_sin);
    const Complex i_unit(0.0, 1.0);

    ks.A = -bessel_j0(k * rho) / (4.0 * M_PI) * pt.speed;
    ks.B = 0.25 * i_unit * hankel1_0(k * rho) * pt.speed - ks.A * logsin2;

    const double w = r.dot(pt.mu) / rho;
    ks.C = -k / (4.0 * M_PI) * bessel_j1(k * rho) * w;
    ks.D = 0.25 * i_unit * k * hankel1_1(k * rho) * w - ks.C * logsin2;
    return ks;
}

struct BemSystem {
    NystromGrid grid;
    double k = 0.0;
    Eigen::MatrixXcd B;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu;
    double cond1_estimate = 0.0;
};

namespace detail {

// Hager-style lower bound for ||B^{-1}||_1 using a few solves.
inline double inverse_norm1_estimate(const Eigen::PartialPivLU<Eigen::MatrixXcd>& lu, int n) {
    Eigen::VectorXcd x = Eigen::VectorXcd::Constant(n, Complex(1.0 / n, 0.0));
    double est = 0.0;
    for (int it = 0; it < 4; ++it) {
        const Eigen::VectorXcd y = lu.solve(x);
        const double norm1 = y.cwiseAbs().sum();
        if (norm1 <= est) break;
        est = norm1;
        Eigen::VectorXcd xi(n);
        for (int i = 0; i < n; ++i) {
            const double a = std::abs(y(i));
            xi(i) = a > 0.0 ? y(i) / a : Complex(1.0, 0.0);
        }
        const Eigen::VectorXcd z = lu.adjoint().solve(xi);
        int jmax = 0;
        z.cwiseAbs().maxCoeff(&jmax);
        x.setZero();
        x(jmax) = 1.0;
    }
    return est;
}

}  // namespace detail

inline BemSystem assemble_bem(const NystromGrid& grid, double k) {
    if (!(k > 0.0)) throw std::invalid_argument("assemble_bem: wavenumber must be positive");
    BemSystem sys;
    sys.grid = grid;
    sys.k = k;
    const int n = grid.size(), N = grid.N;

    // log weights depend only on the index offset (i - j) mod 2N, evenly
    const std::vector<double> R = log_weight_row(N, 0);

    sys.B.resize(n, n);
    const Complex ik(0.0, k);
    const double trap = M_PI / N;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const auto ks = split_kernels(grid.curve, k, grid.t[static_cast<std::size_t>(i)], grid.t[static_cast<std::size_t>(j)]);
            const double w = R[static_cast<std::size_t>(((i - j) % n + n) % n)];
            const double inv_speed = 1.0 / grid.cp[static_cast<std::size_t>(j)].speed;
            const Complex V = (w * ks.A + trap * ks.B) * inv_speed;  // parameterized single layer
            const Complex K = w * ks.C + trap * ks.D;
            sys.B(i, j) = K - ik * V + (i == j ? Complex(0.5, 0.0) : Complex(0.0, 0.0));
        }
    }
    sys.lu.compute(sys.B);
    const double bnorm1 = sys.B.cwiseAbs().colwise().sum().maxCoeff();
    sys.cond1_estimate = bnorm1 * detail::inverse_norm1_estimate(sys.lu, n);
    if (!std::isfinite(sys.cond1_estimate) || sys.cond1_estimate > 1e14)
        throw solver_error("assemble_bem: combined-field matrix is numerically singular");
    return sys;
}

inline Density solve_density(const BemSystem& sys, const Density& g) {
    if (g.size() != sys.grid.size()) throw std::invalid_argument("solve_density: right-hand side has wrong length");
    Density phi = sys.lu.solve(g);
    phi += sys.lu.solve(g - sys.B * phi);  // one refinement step
    return phi;
}

namespace detail {

inline Complex combined_kernel(const CurvePoint& cp, double k, const Vec2& z) {
    const Vec2 r = z - cp.x;
    const double rho = r.norm();
    const Complex i_unit(0.0, 1.0);
    // grad_y Phi_k(z - y) . mu  - ik Phi_k(z - y)
    const Complex dl = 0.25 * i_unit * k * hankel1_1(k * rho) * (r.dot(cp.mu) / rho);
    const Complex sl = 0.25 * i_unit * hankel1_0(k * rho);
    return dl - i_unit * k * sl;
}

}  // namespace detail

/// Combined double-minus-ik-single layer potential at exterior points.
/// Throws for points inside Gamma; near_count (optional) reports how many
/// points were closer to Gamma than one grid spacing, where the plain
/// trapezoidal evaluation loses accuracy.
inline std::vector<Complex> eval_potentials(const NystromGrid& grid, double k, const Density& phi,
                                            const std::vector<Vec2>& points, std::size_t* near_count = nullptr) {
    if (phi.size() != grid.size()) throw std::invalid_argument("eval_potentials: density has wrong length");
    std::vector<Complex> out(points.size());
    const double trap = M_PI / grid.N;
    double max_speed = 0.0;
    for (const auto& c : grid.cp) max_speed = std::max(max_speed, c.speed);
    const double near_dist = 2.0 * M_PI / grid.N * max_speed;
    std::size_t near = 0;
    for (std::size_t p = 0; p < points.size(); ++p) {
        if (grid.curve.contains(points[p]))
            throw std::domain_error("eval_potentials: point (" + std::to_string(points[p].x()) + ", " +
                                    std::to_string(points[p].y()) + ") lies inside Gamma");
        double dist = std::numeric_limits<double>::max();
        for (const auto& c : grid.cp) dist = std::min(dist, (points[p] - c.x).norm());
        if (dist < near_dist) ++near;
        Complex acc = 0.0;
        for (int j = 0; j < grid.size(); ++j)
            acc += detail::combined_kernel(grid.cp[static_cast<std::size_t>(j)], k, points[p]) * phi(j);
        out[p] = trap * acc;
    }
    if (near_count) *near_count = near;
    return out;
}

/// Plain single-layer potential (pi/N) sum Phi_k(z - x_j) phi_j (parameterized density).
inline std::vector<Complex> eval_single_layer(const NystromGrid& grid, double k, const Density& phi,
                                              const std::vector<Vec2>& points) {
    std::vector<Complex> out(points.size());
    const double trap = M_PI / grid.N;
    const Complex i_unit(0.0, 1.0);
    for (std::size_t p = 0; p < points.size(); ++p) {
        Complex acc = 0.0;
        for (int j = 0; j < grid.size(); ++j) {
            const double rho = (points[p] - grid.cp[static_cast<std::size_t>(j)].x).norm();
            acc += 0.25 * i_unit * hankel1_0(k * rho) * phi(j);
        }
        out[p] = trap * acc;
    }
    return out;
}

/// Far field of the combined potential, F_N(z), at unit directions z.
inline std::vector<Complex> far_field(const NystromGrid& grid, double k, const Density& phi,
                                      const std::vector<Vec2>& directions) {
    if (phi.size() != grid.size()) throw std::invalid_argument("far_field: density has wrong length");
    const Complex phase = std::sqrt(k / (8.0 * M_PI)) * std::exp(Complex(0.0, -M_PI / 4.0));
    const double trap = M_PI / grid.N;
    std::vector<Complex> out(directions.size());
    for (std::size_t d = 0; d < directions.size(); ++d) {
        const Vec2& z = directions[d];
        if (std::abs(z.norm() - 1.0) > 1e-12)
            throw std::invalid_argument("far_field: directions must be unit vectors");
        Complex acc = 0.0;
        for (int j = 0; j < grid.size(); ++j) {
            const auto& c = grid.cp[static_cast<std::size_t>(j)];
            acc += std::exp(Complex(0.0, -k * z.dot(c.x))) * (z.dot(c.mu) + 1.0) * phi(j);
        }
        out[d] = phase * trap * acc;
    }
    return out;
}

inline std::vector<Vec2> uniform_directions(int n) {
    std::vector<Vec2> dirs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double th = 2.0 * M_PI * i / n;
        dirs[static_cast<std::size_t>(i)] = Vec2(std::cos(th), std::sin(th));
    }
    return dirs;
}

// Trigonometric interpolant through 2N uniform samples (coefficients in
// Z_N = {-N+1, ..., N}); used for interpolation checks and diagnostics.
struct TrigInterp {
    int N = 0;
    Eigen::VectorXcd coeff;  // index 0 .. 2N-1 maps to ell = -N+1 .. N

    Complex operator()(double t) const {
        Complex acc = 0.0;
        for (int idx = 0; idx < coeff.size(); ++idx) {
            const int ell = idx - (N - 1);
            acc += coeff(idx) * std::exp(Complex(0.0, ell * t));
        }
        return acc;
    }
};

inline TrigInterp trig_interpolant(const NystromGrid& grid, const Density& values) {
    if (values.size() != grid.size()) throw std::invalid_argument("trig_interpolant: wrong sample count");
    TrigInterp ti;
    ti.N = grid.N;
    const int n = grid.size();
    ti.coeff.resize(n);
    for (int idx = 0; idx < n; ++idx) {
        const int ell = idx - (grid.N - 1);
        Complex acc = 0.0;
        for (int j = 0; j < n; ++j) acc += values(j) * std::exp(Complex(0.0, -ell * grid.t[static_cast<std::size_t>(j)]));
        ti.coeff(idx) = acc / static_cast<double>(n);
    }
    return ti;
}

}  // namespace fembem
