#pragma once

// Cylinder Bessel and Hankel functions of real argument, double precision.
//
// The solver needs J/Y/H^(1) of integer order: orders 0 and 1 for the
// Helmholtz kernels, and moderate orders (<= ~250) for the circular-scatterer
// series solutions used as test oracles.  No external special-function
// library is assumed; everything here is validated against frozen
// multiprecision reference values in the test suite.
//
// Method selection:
//   x < 12      power series (long double accumulation)
//   12 <= x <18 downward (Miller) recurrence for J, Neumann J-series for Y
//   x >= 18     Hankel asymptotic expansion

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

namespace fembem {

inline constexpr double euler_gamma = 0.57721566490153286061;

namespace detail {

// J_0..J_nmax by downward recurrence, normalized with J0 + 2*sum J_{2k} = 1.
inline std::vector<double> bessel_j_chain(int nmax, double x) {
    if (x < 0.0) throw std::domain_error("bessel_j_chain: x must be >= 0");
    std::vector<double> out(static_cast<std::size_t>(nmax) + 1, 0.0);
    if (x == 0.0) {
        out[0] = 1.0;
        return out;
    }
    const int start = nmax + 42 + static_cast<int>(x);
    long double fp1 = 0.0L, f = 1e-300L;
    long double norm = 0.0L;
    for (int n = start; n >= 0; --n) {
        const long double fm1 = (2.0L * (n + 1)) / x * f - fp1;
        fp1 = f;
        f = fm1;
        if (n <= nmax) out[static_cast<std::size_t>(n)] = static_cast<double>(f);
        if (n > 0 && n % 2 == 0) norm += 2.0L * f;
        if (std::abs(static_cast<double>(f)) > 1e250) {
            const long double s = 1e-250L;
            f *= s;
            fp1 *= s;
            norm *= s;
            for (auto& v : out) v *= 1e-250;
        }
    }
    norm += f;
    const double scale = static_cast<double>(1.0L / norm);
    for (auto& v : out) v *= scale;
    return out;
}

inline double j0_series(double x) {
    const long double q = static_cast<long double>(x) * x / 4.0L;
    long double t = 1.0L, s = 1.0L;
    for (int m = 1; m < 64; ++m) {
        t *= -q / (static_cast<long double>(m) * m);
        s += t;
        if (std::abs(static_cast<double>(t)) < 1e-20 * std::abs(static_cast<double>(s))) break;
    }
    return static_cast<double>(s);
}

inline double j1_series(double x) {
    const long double q = static_cast<long double>(x) * x / 4.0L;
    long double t = static_cast<long double>(x) / 2.0L, s = t;
    for (int m = 1; m < 64; ++m) {
        t *= -q / (static_cast<long double>(m) * (m + 1));
        s += t;
        if (std::abs(static_cast<double>(t)) < 1e-20 * std::abs(static_cast<double>(s))) break;
    }
    return static_cast<double>(s);
}

inline double y0_series(double x, double j0x) {
    const long double q = static_cast<long double>(x) * x / 4.0L;
    long double u = 1.0L, H = 0.0L, s = 0.0L;
    int sign = 1;
    for (int m = 1; m < 64; ++m) {
        u *= q / (static_cast<long double>(m) * m);
        H += 1.0L / m;
        s += sign * H * u;  // sign = (-1)^{m+1}
        sign = -sign;
        if (std::abs(static_cast<double>(u)) * (H + 1) < 1e-20) break;
    }
    const long double lead = (std::log(static_cast<long double>(x) / 2.0L) + euler_gamma) * j0x;
    return static_cast<double>(2.0L / M_PIl * (lead + s));
}

inline double y1_series(double x, double j1x) {
    const long double q = static_cast<long double>(x) * x / 4.0L;
    long double u = 1.0L;   // q^m / (m! (m+1)!)
    long double Hm = 0.0L, Hm1 = 1.0L;
    long double s = 1.0L;   // m = 0 term: (H_0 + H_1) * 1
    int sign = -1;
    for (int m = 1; m < 64; ++m) {
        u *= q / (static_cast<long double>(m) * (m + 1));
        Hm += 1.0L / m;
        Hm1 += 1.0L / (m + 1);
        s += sign * (Hm + Hm1) * u;
        sign = -sign;
        if (std::abs(static_cast<double>(u)) * (Hm + Hm1) < 1e-20) break;
    }
    const long double lead = (std::log(static_cast<long double>(x) / 2.0L) + euler_gamma) * j1x;
    return static_cast<double>(2.0L / M_PIl * lead - 2.0L / (M_PIl * x) -
                               x / (2.0L * M_PIl) * s);
}

// Hankel asymptotic amplitude series P, Q for order nu (DLMF 10.17).
inline void asym_pq(int nu, double x, double& P, double& Q) {
    const double mu = 4.0 * nu * nu;
    double t = 1.0;
    P = 1.0;
    Q = 0.0;
    double prev = std::numeric_limits<double>::max();
    for (int j = 1; j < 40; ++j) {
        const double odd = 2.0 * j - 1.0;
        t *= (mu - odd * odd) / (8.0 * j * x);
        if (std::abs(t) >= prev) break;  // asymptotic series started diverging
        prev = std::abs(t);
        const int sign = ((j / 2) % 2 == 0) ? 1 : -1;
        if (j % 2 == 0)
            P += sign * t;
        else
            Q += sign * t;
        if (std::abs(t) < 1e-18) break;
    }
}

struct J0Y0 {
    double j, y;
};

inline J0Y0 asym_order0(double x) {
    double P, Q;
    asym_pq(0, x, P, Q);
    const double c = std::cos(x), s = std::sin(x);
    const double inv_sqrt2 = 0.70710678118654752440;
    const double cw = (c + s) * inv_sqrt2;   // cos(x - pi/4)
    const double sw = (s - c) * inv_sqrt2;   // sin(x - pi/4)
    const double f = std::sqrt(2.0 / (M_PI * x));
    return {f * (P * cw - Q * sw), f * (P * sw + Q * cw)};
}

inline J0Y0 asym_order1(double x) {
    double P, Q;
    asym_pq(1, x, P, Q);
    const double c = std::cos(x), s = std::sin(x);
    const double inv_sqrt2 = 0.70710678118654752440;
    const double cw = (s - c) * inv_sqrt2;    // cos(x - 3pi/4)
    const double sw = -(s + c) * inv_sqrt2;   // sin(x - 3pi/4)
    const double f = std::sqrt(2.0 / (M_PI * x));
    return {f * (P * cw - Q * sw), f * (P * sw + Q * cw)};
}

// Neumann J-series for Y0, Y1 in the band where neither the power series
// nor the asymptotic expansion reaches full double accuracy.
inline double y0_neumann(double x, const std::vector<double>& j) {
    long double s = 0.0L;
    int sign = 1;  // (-1)^{k+1} for k = 1
    for (int k = 1; 2 * k < static_cast<int>(j.size()); ++k) {
        s += sign * 2.0L * j[static_cast<std::size_t>(2 * k)] / k;
        sign = -sign;
    }
    s += (std::log(static_cast<long double>(x) / 2.0L) + euler_gamma) * j[0];
    return static_cast<double>(2.0L / M_PIl * s);
}

inline double y1_neumann(double x, const std::vector<double>& j) {
    long double s = -static_cast<long double>(j[0]) / x - j[1];
    int sign = 1;  // -(-1)^k at k = 1
    for (int k = 1; 2 * k + 1 < static_cast<int>(j.size()); ++k) {
        s += sign * (1.0L / k + 1.0L / (k + 1)) * j[static_cast<std::size_t>(2 * k + 1)];
        sign = -sign;
    }
    s += (std::log(static_cast<long double>(x) / 2.0L) + euler_gamma) * j[1];
    return static_cast<double>(2.0L / M_PIl * s);
}

}  // namespace detail

inline double bessel_j0(double x) {
    x = std::abs(x);
    if (x < 12.0) return detail::j0_series(x);
    if (x < 18.0) return detail::bessel_j_chain(0, x)[0];
    return detail::asym_order0(x).j;
}

inline double bessel_j1(double x) {
    const double ax = std::abs(x);
    double v;
    if (ax < 12.0)
        v = detail::j1_series(ax);
    else if (ax < 18.0)
        v = detail::bessel_j_chain(1, ax)[1];
    else
        v = detail::asym_order1(ax).j;
    return x < 0.0 ? -v : v;
}

inline double bessel_y0(double x) {
    if (!(x > 0.0)) throw std::domain_error("bessel_y0: requires x > 0");
    if (x < 12.0) return detail::y0_series(x, detail::j0_series(x));
    if (x < 18.0) return detail::y0_neumann(x, detail::bessel_j_chain(static_cast<int>(x) + 40, x));
    return detail::asym_order0(x).y;
}

inline double bessel_y1(double x) {
    if (!(x > 0.0)) throw std::domain_error("bessel_y1: requires x > 0");
    if (x < 12.0) return detail::y1_series(x, detail::j1_series(x));
    if (x < 18.0) return detail::y1_neumann(x, detail::bessel_j_chain(static_cast<int>(x) + 41, x));
    return detail::asym_order1(x).y;
}

// J_0(x), ..., J_nmax(x).  Stable for any order/argument combination.
inline std::vector<double> bessel_j_all(int nmax, double x) {
    if (nmax < 0) throw std::invalid_argument("bessel_j_all: nmax must be >= 0");
    const double ax = std::abs(x);
    auto out = detail::bessel_j_chain(nmax, ax);
    // tighten the first two entries with the direct evaluations
    out[0] = bessel_j0(ax);
    if (nmax >= 1) out[1] = bessel_j1(ax);
    if (x < 0.0)
        for (int n = 1; n <= nmax; n += 2) out[static_cast<std::size_t>(n)] = -out[static_cast<std::size_t>(n)];
    return out;
}

// Y_0(x), ..., Y_nmax(x) by upward recurrence (stable; |Y_n| grows with n).
// Entries overflow to -inf/ +inf for very large order at small argument;
// callers treat non-finite values as "mode negligible" (J_n/H_n -> 0 there).
inline std::vector<double> bessel_y_all(int nmax, double x) {
    if (nmax < 0) throw std::invalid_argument("bessel_y_all: nmax must be >= 0");
    std::vector<double> out(static_cast<std::size_t>(nmax) + 1);
    out[0] = bessel_y0(x);
    if (nmax >= 1) out[1] = bessel_y1(x);
    for (int n = 1; n < nmax; ++n)
        out[static_cast<std::size_t>(n) + 1] = 2.0 * n / x * out[static_cast<std::size_t>(n)] -
                                               out[static_cast<std::size_t>(n) - 1];
    return out;
}

inline double bessel_jn(int n, double x) { return bessel_j_all(std::abs(n), x)[static_cast<std::size_t>(std::abs(n))] * ((n < 0 && n % 2 != 0) ? -1.0 : 1.0); }

inline double bessel_yn(int n, double x) {
    if (n < 0) throw std::invalid_argument("bessel_yn: order must be >= 0");
    return bessel_y_all(n, x)[static_cast<std::size_t>(n)];
}

inline std::complex<double> hankel1_0(double x) { return {bessel_j0(x), bessel_y0(x)}; }
inline std::complex<double> hankel1_1(double x) { return {bessel_j1(x), bessel_y1(x)}; }

}  // namespace fembem
