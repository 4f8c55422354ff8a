#pragma once

// Unrestarted GMRES with modified Gram-Schmidt and one reorthogonalization
// pass.  The interface systems it serves are small (a few hundred unknowns)
// and well conditioned, so full orthogonalization is cheap.

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace fembem {

struct GmresResult {
    Eigen::VectorXcd x;
    int iterations = 0;
    double relative_residual = 0.0;
    std::vector<double> history;  // relative residual after each iteration
    bool converged = false;
};

inline GmresResult gmres(const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& apply,
                         const Eigen::VectorXcd& b, double tol, int max_iter) {
    using Complex = std::complex<double>;
    GmresResult res;
    const Eigen::Index n = b.size();
    res.x = Eigen::VectorXcd::Zero(n);
    const double bnorm = b.norm();
    if (bnorm == 0.0) {
        res.converged = true;
        return res;
    }
    max_iter = std::min<int>(max_iter, static_cast<int>(n));

    std::vector<Eigen::VectorXcd> V;
    V.reserve(static_cast<std::size_t>(max_iter) + 1);
    V.push_back(b / bnorm);

    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(max_iter + 1, max_iter);
    Eigen::VectorXcd g = Eigen::VectorXcd::Zero(max_iter + 1);
    g(0) = bnorm;
    std::vector<double> cs(static_cast<std::size_t>(max_iter));
    std::vector<Complex> sn(static_cast<std::size_t>(max_iter));

    int j = 0;
    for (; j < max_iter; ++j) {
        Eigen::VectorXcd w = apply(V[static_cast<std::size_t>(j)]);
        for (int i = 0; i <= j; ++i) {
            const Complex h = V[static_cast<std::size_t>(i)].dot(w);
            H(i, j) = h;
            w -= h * V[static_cast<std::size_t>(i)];
        }
        for (int i = 0; i <= j; ++i) {  // second pass
            const Complex c = V[static_cast<std::size_t>(i)].dot(w);
            H(i, j) += c;
            w -= c * V[static_cast<std::size_t>(i)];
        }
        const double wnorm = w.norm();
        H(j + 1, j) = wnorm;

        // previously accumulated rotations
        for (int i = 0; i < j; ++i) {
            const Complex hi = H(i, j), hi1 = H(i + 1, j);
            H(i, j) = cs[static_cast<std::size_t>(i)] * hi + sn[static_cast<std::size_t>(i)] * hi1;
            H(i + 1, j) = -std::conj(sn[static_cast<std::size_t>(i)]) * hi + cs[static_cast<std::size_t>(i)] * hi1;
        }
        // new rotation zeroing H(j+1, j)
        {
            const Complex a = H(j, j);
            const double bb = H(j + 1, j).real();
            const double t = std::sqrt(std::norm(a) + bb * bb);
            if (t == 0.0) {
                cs[static_cast<std::size_t>(j)] = 1.0;
                sn[static_cast<std::size_t>(j)] = 0.0;
            } else if (a == Complex(0.0, 0.0)) {
                cs[static_cast<std::size_t>(j)] = 0.0;
                sn[static_cast<std::size_t>(j)] = 1.0;
            } else {
                cs[static_cast<std::size_t>(j)] = std::abs(a) / t;
                sn[static_cast<std::size_t>(j)] = a / std::abs(a) * bb / t;
            }
            H(j, j) = cs[static_cast<std::size_t>(j)] * a + sn[static_cast<std::size_t>(j)] * H(j + 1, j);
            H(j + 1, j) = 0.0;
            const Complex gj = g(j);
            g(j) = cs[static_cast<std::size_t>(j)] * gj;
            g(j + 1) = -std::conj(sn[static_cast<std::size_t>(j)]) * gj;
        }

        const double rel = std::abs(g(j + 1)) / bnorm;
        res.history.push_back(rel);
        if (rel <= tol || wnorm == 0.0) {
            // converged, or happy breakdown (Krylov space exhausted)
            ++j;
            res.converged = true;
            break;
        }
        if (j + 1 < max_iter) V.push_back(w / wnorm);
    }

    res.iterations = j;
    res.relative_residual = res.history.empty() ? 1.0 : res.history.back();
    // back substitution on the j x j triangular system
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(j);
    for (int i = j - 1; i >= 0; --i) {
        Complex acc = g(i);
        for (int l = i + 1; l < j; ++l) acc -= H(i, l) * y(l);
        y(i) = acc / H(i, i);
    }
    for (int i = 0; i < j; ++i) res.x += y(i) * V[static_cast<std::size_t>(i)];
    return res;
}

}  // namespace fembem
