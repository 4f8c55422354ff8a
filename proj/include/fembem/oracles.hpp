#pragma once

// Independent reference solutions for validation: modal series for circular
// scatterers (sound-soft and penetrable, constant or radially smooth index),
// a brute-force periodic quadrature, and a convergence-study driver.
//
// The series evaluators share nothing with the fem/bem/coupling modules
// except the Bessel routines, which are themselves pinned against frozen
// multiprecision reference values in the tests.

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "fembem/bessel.hpp"
#include "fembem/coupling.hpp"
#include "fembem/errors.hpp"
#include "fembem/incident.hpp"

namespace fembem {

class SeriesSolution {
  public:
    enum class Kind { sound_soft, penetrable };

    static SeriesSolution sound_soft_circle(double k, double a, const Vec2& dir, double amplitude = 1.0) {
        SeriesSolution s(Kind::sound_soft, k, a, dir, amplitude);
        const double p = k * a;
        const auto J = bessel_j_all(cap_ + 2, p);
        double y_prev = bessel_y0(p), y_cur = bessel_y1(p);
        double maxb = 0.0;
        int quiet = 0;
        for (int m = 0; m <= cap_; ++m) {
            const double Ym = (m == 0) ? y_prev : y_cur;
            const Complex H(J[static_cast<std::size_t>(m)], Ym);
            const Complex bm = -ipow_i(m) * J[static_cast<std::size_t>(m)] / H;
            s.b_.push_back(bm);
            maxb = std::max(maxb, std::abs(bm));
            const bool tiny = std::abs(bm) < 1e-16 * maxb && std::abs(J[static_cast<std::size_t>(m)]) < 1e-15;
            quiet = tiny ? quiet + 1 : 0;
            if (quiet >= 3 && m > p + 4) break;
            if (m >= 1) step_y(m, p, y_prev, y_cur);
            if (!std::isfinite(y_cur)) break;  // remaining modes are negligible
        }
        s.check_converged(maxb);
        return s;
    }

    static SeriesSolution penetrable_disk(double k, double a, double n0, const Vec2& dir, double amplitude = 1.0) {
        SeriesSolution s(Kind::penetrable, k, a, dir, amplitude);
        s.n0_ = n0;
        s.r_inner_ = a;
        const double p = k * a, q = k * n0 * a;
        const auto Jp = bessel_j_all(cap_ + 2, p);
        const auto Jq = bessel_j_all(cap_ + 2, q);
        double yp_prev = bessel_y0(p), yp_cur = bessel_y1(p);
        double maxb = 0.0;
        int quiet = 0;
        for (int m = 0; m <= cap_; ++m) {
            const double Ym = (m == 0) ? yp_prev : yp_cur;
            const double Ym1 = (m == 0) ? yp_cur : (2.0 * m / p * yp_cur - yp_prev);  // Y_{m+1}
            const Complex Hm(Jp[static_cast<std::size_t>(m)], Ym);
            const Complex Hm1(Jp[static_cast<std::size_t>(m) + 1], Ym1);
            const Complex dH = (m == 0) ? -Hm1 : Hm_minus1(Jp, yp_prev, m) - static_cast<double>(m) / p * Hm;
            const double Jm = Jp[static_cast<std::size_t>(m)];
            const double dJ = (m == 0) ? -Jp[1] : Jp[static_cast<std::size_t>(m) - 1] - m / p * Jm;
            const double Jmq = Jq[static_cast<std::size_t>(m)];
            const double dJq = (m == 0) ? -Jq[1] : Jq[static_cast<std::size_t>(m) - 1] - m / q * Jmq;

            // interior a_m J_m(n0 k r); match value and radial flux at r = a
            Eigen::Matrix2cd Msys;
            Eigen::Vector2cd rhs;
            Msys << Jmq, -Hm, n0 * dJq, -dH;
            rhs << ipow_i(m) * Jm, ipow_i(m) * dJ;
            const Eigen::Vector2cd ab = Msys.fullPivLu().solve(rhs);
            s.aint_.push_back(ab(0));
            s.b_.push_back(ab(1));
            maxb = std::max(maxb, std::abs(ab(1)));
            const bool tiny = std::abs(ab(1)) < 1e-16 * std::max(maxb, 1e-300) && std::abs(Jm) < 1e-15;
            quiet = tiny ? quiet + 1 : 0;
            if (quiet >= 3 && m > std::max(p, q) + 4) break;
            if (m >= 1) step_y(m, p, yp_prev, yp_cur);
            if (!std::isfinite(yp_cur)) break;
        }
        s.check_converged(maxb);
        return s;
    }

    // Radially symmetric smooth profile n^2(r): constant n0^2 for r <= r_inner,
    // 1 for r >= r_outer.  Per mode the radial factor solves
    //   w'' + w'/r + (k^2 n^2(r) - m^2/r^2) w = 0,
    // integrated with fixed-step RK4 across the transition annulus and matched
    // to J/H waves at r_outer.
    static SeriesSolution penetrable_profile(double k, double r_inner, double r_outer,
                                             const std::function<double(double)>& n2_of_r, const Vec2& dir,
                                             double amplitude = 1.0, int ode_steps = 16384) {
        if (!(0.0 < r_inner && r_inner < r_outer)) throw std::invalid_argument("penetrable_profile: need 0 < r_inner < r_outer");
        SeriesSolution s(Kind::penetrable, k, r_outer, dir, amplitude);
        const double n0 = std::sqrt(n2_of_r(r_inner));
        s.n0_ = n0;
        s.r_inner_ = r_inner;
        const double R = r_outer, p = k * R, q = k * n0 * r_inner;
        const auto Jp = bessel_j_all(cap_ + 2, p);
        const auto Jq = bessel_j_all(cap_ + 2, q);
        double yp_prev = bessel_y0(p), yp_cur = bessel_y1(p);
        double maxb = 0.0;
        int quiet = 0;
        for (int m = 0; m <= cap_; ++m) {
            double w = Jq[static_cast<std::size_t>(m)];
            double v = k * n0 * ((m == 0) ? -Jq[1] : Jq[static_cast<std::size_t>(m) - 1] - m / q * Jq[static_cast<std::size_t>(m)]);
            if (std::abs(w) < 1e-280 && std::abs(v) < 1e-280) {
                s.b_.push_back(0.0);
                s.aint_.push_back(0.0);
                break;  // modes beyond machine range
            }
            integrate_mode(k, m, r_inner, r_outer, n2_of_r, ode_steps, w, v);

            const double Ym = (m == 0) ? yp_prev : yp_cur;
            const double Jm = Jp[static_cast<std::size_t>(m)];
            const double dJ = (m == 0) ? -Jp[1] : Jp[static_cast<std::size_t>(m) - 1] - m / p * Jm;
            const Complex Hm(Jm, Ym);
            const Complex dH = (m == 0) ? Complex(-Jp[1], -yp_cur) : Hm_minus1(Jp, yp_prev, m) - static_cast<double>(m) / p * Hm;

            Eigen::Matrix2cd Msys;
            Eigen::Vector2cd rhs;
            Msys << Complex(w, 0.0), -Hm, Complex(v, 0.0), -k * dH;
            rhs << ipow_i(m) * Jm, ipow_i(m) * k * dJ;
            const Eigen::Vector2cd cb = Msys.fullPivLu().solve(rhs);
            s.aint_.push_back(cb(0));
            s.b_.push_back(cb(1));
            maxb = std::max(maxb, std::abs(cb(1)));
            const bool tiny = std::abs(cb(1)) < 1e-16 * std::max(maxb, 1e-300) && std::abs(Jm) < 1e-15;
            quiet = tiny ? quiet + 1 : 0;
            if (quiet >= 3 && m > p + 4) break;
            if (m >= 1) step_y(m, p, yp_prev, yp_cur);
            if (!std::isfinite(yp_cur)) break;
        }
        s.check_converged(maxb);
        return s;
    }

    Kind kind() const { return kind_; }
    double wavenumber() const { return k_; }
    double radius() const { return a_; }
    int modes() const { return static_cast<int>(b_.size()); }
    const std::vector<Complex>& scattered_coefficients() const { return b_; }

    Complex far_field(const Vec2& z) const {
        const double dtheta = std::atan2(z.y(), z.x()) - alpha_;
        Complex acc = b_[0];
        Complex im(1.0, 0.0);
        for (std::size_t m = 1; m < b_.size(); ++m) {
            im *= Complex(0.0, -1.0);  // (-i)^m
            acc += 2.0 * b_[m] * im * std::cos(static_cast<double>(m) * dtheta);
        }
        return amplitude_ * std::sqrt(2.0 / (M_PI * k_)) * std::exp(Complex(0.0, -M_PI / 4.0)) * acc;
    }

    // Total field.  Sound-soft: 0 inside the circle.  Penetrable with a
    // radial profile: supported outside r_outer and inside r_inner only.
    // The incident part is evaluated in closed form; only the scattered sum
    // is truncated.
    Complex near_field(const Vec2& p) const {
        const double r = p.norm();
        const double dtheta = std::atan2(p.y(), p.x()) - alpha_;
        const int mm = static_cast<int>(b_.size());
        if (r >= a_) {
            const Complex incident = amplitude_ * std::exp(Complex(0.0, k_ * r * std::cos(dtheta)));
            const auto J = bessel_j_all(mm + 1, k_ * r);
            double y_prev = bessel_y0(k_ * r), y_cur = bessel_y1(k_ * r);
            Complex acc = 0.0;
            for (int m = 0; m < mm; ++m) {
                const double Ym = (m == 0) ? y_prev : y_cur;
                const Complex Hm(J[static_cast<std::size_t>(m)], Ym);
                acc += (m == 0 ? 1.0 : 2.0) * b_[static_cast<std::size_t>(m)] * Hm * std::cos(m * dtheta);
                if (m >= 1) step_y(m, k_ * r, y_prev, y_cur);
                if (!std::isfinite(y_cur)) break;
            }
            return incident + amplitude_ * acc;
        }
        if (kind_ == Kind::sound_soft) return 0.0;
        if (r > r_inner_ + 1e-12 && r_inner_ < a_ - 1e-12)
            throw std::invalid_argument("SeriesSolution::near_field: transition annulus not supported for profile solutions");
        const int ma = static_cast<int>(aint_.size());
        const double q = k_ * n0_ * r;
        const auto J = bessel_j_all(ma + 1, q);
        Complex acc = 0.0;
        for (int m = 0; m < ma; ++m)
            acc += (m == 0 ? 1.0 : 2.0) * aint_[static_cast<std::size_t>(m)] * J[static_cast<std::size_t>(m)] * std::cos(m * dtheta);
        return amplitude_ * acc;
    }

  private:
    SeriesSolution(Kind kind, double k, double a, const Vec2& dir, double amplitude)
        : kind_(kind), k_(k), a_(a), amplitude_(amplitude) {
        if (!(k > 0.0) || !(a > 0.0)) throw std::invalid_argument("SeriesSolution: k and radius must be positive");
        const double n = dir.norm();
        if (!(n > 0.0)) throw std::invalid_argument("SeriesSolution: direction must be nonzero");
        alpha_ = std::atan2(dir.y() / n, dir.x() / n);
    }

    static Complex ipow_i(int m) {
        switch (m & 3) {
            case 0: return {1.0, 0.0};
            case 1: return {0.0, 1.0};
            case 2: return {-1.0, 0.0};
            default: return {0.0, -1.0};
        }
    }

    static void step_y(int m, double x, double& y_prev, double& y_cur) {
        const double y_next = 2.0 * m / x * y_cur - y_prev;
        y_prev = y_cur;
        y_cur = y_next;
    }

    static Complex Hm_minus1(const std::vector<double>& J, double y_prev, int m) {
        return {J[static_cast<std::size_t>(m) - 1], y_prev};
    }

    static void integrate_mode(double k, int m, double r0, double r1, const std::function<double(double)>& n2,
                               int steps, double& w, double& v) {
        const double h = (r1 - r0) / steps;
        auto rhs = [&](double r, double wi, double vi, double& dw, double& dv) {
            dw = vi;
            dv = -vi / r - (k * k * n2(r) - static_cast<double>(m) * m / (r * r)) * wi;
        };
        double r = r0;
        for (int s = 0; s < steps; ++s) {
            double k1w, k1v, k2w, k2v, k3w, k3v, k4w, k4v;
            rhs(r, w, v, k1w, k1v);
            rhs(r + 0.5 * h, w + 0.5 * h * k1w, v + 0.5 * h * k1v, k2w, k2v);
            rhs(r + 0.5 * h, w + 0.5 * h * k2w, v + 0.5 * h * k2v, k3w, k3v);
            rhs(r + h, w + h * k3w, v + h * k3v, k4w, k4v);
            w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
            v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            r = r0 + (s + 1) * h;
        }
    }

    void check_converged(double maxb) {
        if (b_.size() >= static_cast<std::size_t>(cap_) && maxb > 0.0 && std::abs(b_.back()) > 1e-14 * maxb)
            throw solver_error("SeriesSolution: modal series did not converge within the mode cap (ka too large)");
        if (maxb < 1e-14) {
            // no scattering beyond roundoff (e.g. unit contrast); keep an exact
            // zero so near-field sums cannot amplify coefficient dust through
            // the exponentially large H_m near the boundary
            b_.assign(1, Complex(0.0, 0.0));
            return;
        }
        // drop trailing coefficients at roundoff level for the same reason
        // (interior coefficients stay; the interior sum needs them all)
        while (b_.size() > 1 && std::abs(b_.back()) < 1e-25) b_.pop_back();
    }

    static constexpr int cap_ = 200;

    Kind kind_;
    double k_, a_;
    double n0_ = 1.0, r_inner_ = 0.0;
    double amplitude_;
    double alpha_ = 0.0;
    std::vector<Complex> b_, aint_;
};

inline std::vector<Complex> mie_far_field(const SeriesSolution& sol, const std::vector<Vec2>& directions) {
    std::vector<Complex> out(directions.size());
    for (std::size_t i = 0; i < directions.size(); ++i) out[i] = sol.far_field(directions[i]);
    return out;
}

inline std::vector<Complex> mie_near_field(const SeriesSolution& sol, const std::vector<Vec2>& points) {
    std::vector<Complex> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) out[i] = sol.near_field(points[i]);
    return out;
}

/// Composite midpoint rule on [0, 2pi]; the caller subtracts any integrable
/// singularity analytically first.
inline Complex brute_quadrature(const std::function<Complex(double)>& integrand, int n_points) {
    if (n_points < 1) throw std::invalid_argument("brute_quadrature: need at least one point");
    const double h = 2.0 * M_PI / n_points;
    Complex acc = 0.0;
    for (int j = 0; j < n_points; ++j) acc += integrand((j + 0.5) * h);
    return acc * h;
}

// ---------------------------------------------------------------------------
// Convergence-study driver: far-field errors and iteration counts on a grid
// of (mesh level, N), against a series oracle or a finer self-reference run.

struct StudyConfig {
    Rect rect{-6.0, 6.0, -8.0, 8.0};
    int degree = 3;
    const RefractiveField* field = nullptr;
    const SmoothCurve* curve = nullptr;
    IncidentWave wave{M_PI, Vec2(1.0, 0.0)};
    double tol = 1e-8;
    int far_angles = 1000;
    const SeriesSolution* oracle = nullptr;  // nullptr: self-reference truth
};

struct ConvergenceTable {
    std::vector<int> levels, Ns, free_nodes;
    Eigen::MatrixXd error;   // levels x Ns, max-relative far-field error
    Eigen::MatrixXi iters;   // GMRES iteration counts
    std::vector<double> observed_order;  // between consecutive levels at the largest N
    std::string truth;
};

namespace detail {

struct StudyRun {
    std::vector<Complex> far;
    int iters = 0;
    int free_nodes = 0;
};

inline StudyRun study_run(const StudyConfig& sc, int level, int N, const std::vector<Vec2>& dirs) {
    const TriMesh mesh = build_structured_mesh(sc.rect, level, sc.degree);
    const CoupledProblem cp(mesh, *sc.field, *sc.curve, N, sc.wave);
    const InterfaceState st = solve_interface(cp, SolveMethod::gmres, sc.tol);
    const Reconstruction rec = reconstruct(cp, st);
    StudyRun r;
    r.far = far_field(cp.grid(), cp.wavenumber(), rec.density, dirs);
    r.iters = st.diag.iterations;
    r.free_nodes = mesh.num_free();
    return r;
}

inline double max_rel_error(const std::vector<Complex>& f, const std::vector<Complex>& ref) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        num = std::max(num, std::abs(f[i] - ref[i]));
        den = std::max(den, std::abs(ref[i]));
    }
    return den > 0.0 ? num / den : num;
}

}  // namespace detail

inline ConvergenceTable convergence_study(const StudyConfig& sc, const std::vector<int>& levels,
                                          const std::vector<int>& Ns) {
    if (!sc.field || !sc.curve) throw config_error("convergence_study: field and curve must be set");
    if (levels.empty() || Ns.empty()) throw config_error("convergence_study: need at least one level and one N");
    const auto dirs = uniform_directions(sc.far_angles);

    std::vector<Complex> truth;
    ConvergenceTable table;
    if (sc.oracle) {
        truth = mie_far_field(*sc.oracle, dirs);
        table.truth = "series oracle";
    } else {
        const int lmax = *std::max_element(levels.begin(), levels.end());
        const int nmax = *std::max_element(Ns.begin(), Ns.end());
        truth = detail::study_run(sc, lmax + 1, 2 * nmax, dirs).far;
        table.truth = "self-reference (level " + std::to_string(lmax + 1) + ", N " + std::to_string(2 * nmax) + ")";
    }

    table.levels = levels;
    table.Ns = Ns;
    table.error.resize(static_cast<Eigen::Index>(levels.size()), static_cast<Eigen::Index>(Ns.size()));
    table.iters.resize(static_cast<Eigen::Index>(levels.size()), static_cast<Eigen::Index>(Ns.size()));
    table.free_nodes.resize(levels.size());
    for (std::size_t li = 0; li < levels.size(); ++li)
        for (std::size_t ni = 0; ni < Ns.size(); ++ni) {
            const auto run = detail::study_run(sc, levels[li], Ns[ni], dirs);
            table.error(static_cast<Eigen::Index>(li), static_cast<Eigen::Index>(ni)) = detail::max_rel_error(run.far, truth);
            table.iters(static_cast<Eigen::Index>(li), static_cast<Eigen::Index>(ni)) = run.iters;
            table.free_nodes[li] = run.free_nodes;
        }

    if (levels.size() >= 2) {
        const Eigen::Index last_n = static_cast<Eigen::Index>(Ns.size()) - 1;
        for (std::size_t li = 0; li + 1 < levels.size(); ++li) {
            const double e0 = table.error(static_cast<Eigen::Index>(li), last_n);
            const double e1 = table.error(static_cast<Eigen::Index>(li) + 1, last_n);
            table.observed_order.push_back(std::log2(e0 / e1) / (levels[li + 1] - levels[li]));
        }
    }
    return table;
}

}  // namespace fembem
