#pragma once

// Lagrange basis of degree d on the reference triangle, nodes on the
// principal lattice (i/d, j/d), i + j <= d.  Lattice enumeration order is
// j-major: (i, j) -> index with j outer loop; the mesh uses the same order.

#include <array>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace fembem {

class LagrangeBasis {
  public:
    explicit LagrangeBasis(int degree) : d_(degree) {
        if (degree < 1 || degree > 4) throw std::invalid_argument("LagrangeBasis: degree must be in 1..4");
        for (int j = 0; j <= d_; ++j)
            for (int i = 0; i <= d_ - j; ++i) {
                lattice_.push_back({i, j});
                ref_nodes_.emplace_back(static_cast<double>(i) / d_, static_cast<double>(j) / d_);
            }
        n_ = static_cast<int>(lattice_.size());
        // monomials xi^a eta^b, a + b <= d, same enumeration
        Eigen::MatrixXd vand(n_, n_);
        for (int r = 0; r < n_; ++r)
            for (int c = 0; c < n_; ++c)
                vand(r, c) = std::pow(ref_nodes_[static_cast<std::size_t>(r)].x(), lattice_[static_cast<std::size_t>(c)][0]) *
                             std::pow(ref_nodes_[static_cast<std::size_t>(r)].y(), lattice_[static_cast<std::size_t>(c)][1]);
        coeff_ = vand.fullPivLu().inverse();  // column k: monomial coefficients of basis k
    }

    static const LagrangeBasis& get(int degree) {
        static const std::array<LagrangeBasis, 4> cache = {LagrangeBasis(1), LagrangeBasis(2), LagrangeBasis(3), LagrangeBasis(4)};
        if (degree < 1 || degree > 4) throw std::invalid_argument("LagrangeBasis: degree must be in 1..4");
        return cache[static_cast<std::size_t>(degree - 1)];
    }

    int degree() const { return d_; }
    int size() const { return n_; }
    const std::vector<Eigen::Vector2d>& ref_nodes() const { return ref_nodes_; }
    const std::vector<std::array<int, 2>>& lattice() const { return lattice_; }

    void eval(double xi, double eta, Eigen::VectorXd& out) const {
        Eigen::VectorXd mono(n_);
        for (int c = 0; c < n_; ++c)
            mono(c) = ipow(xi, lattice_[static_cast<std::size_t>(c)][0]) * ipow(eta, lattice_[static_cast<std::size_t>(c)][1]);
        out.noalias() = coeff_.transpose() * mono;
    }

    // gradients w.r.t. reference coordinates; out is n x 2
    void eval_grad(double xi, double eta, Eigen::MatrixX2d& out) const {
        Eigen::VectorXd dxi(n_), deta(n_);
        for (int c = 0; c < n_; ++c) {
            const int a = lattice_[static_cast<std::size_t>(c)][0], b = lattice_[static_cast<std::size_t>(c)][1];
            dxi(c) = a == 0 ? 0.0 : a * ipow(xi, a - 1) * ipow(eta, b);
            deta(c) = b == 0 ? 0.0 : b * ipow(xi, a) * ipow(eta, b - 1);
        }
        out.resize(n_, 2);
        out.col(0).noalias() = coeff_.transpose() * dxi;
        out.col(1).noalias() = coeff_.transpose() * deta;
    }

  private:
    static double ipow(double x, int p) {
        double r = 1.0;
        for (int i = 0; i < p; ++i) r *= x;
        return r;
    }

    int d_, n_ = 0;
    std::vector<std::array<int, 2>> lattice_;
    std::vector<Eigen::Vector2d> ref_nodes_;
    Eigen::MatrixXd coeff_;
};

}  // namespace fembem
