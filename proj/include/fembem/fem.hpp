#pragma once

// High-order Lagrange FEM for the interior Dirichlet problem
//   laplace(u) + k^2 n^2 u = 0 in Omega_2,  u = f on Sigma,
// assembled over free nodes as A u_free = D f with A real symmetric sparse.
// Factorization is LDL^T (1x1 pivots) with a sparse-LU fallback when the
// indefinite matrix hits a vanishing pivot.

#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "fembem/errors.hpp"
#include "fembem/incident.hpp"
#include "fembem/mesh.hpp"
#include "fembem/quadrature.hpp"

namespace fembem {

using SpMat = Eigen::SparseMatrix<double>;

struct FemSystem {
    const TriMesh* mesh = nullptr;
    double k = 0.0;
    const RefractiveField* field = nullptr;
    SpMat A;  // L x L, b(phi_j, phi_i) over free nodes
    SpMat D;  // L x M, -b(phi_dirichlet, phi_free)

    std::shared_ptr<Eigen::SimplicialLDLT<SpMat>> ldlt;
    std::shared_ptr<Eigen::SparseLU<SpMat>> lu;

    bool factorized() const { return ldlt != nullptr || lu != nullptr; }

    Eigen::VectorXd solve_real(const Eigen::VectorXd& rhs) const {
        if (!factorized()) throw solver_error("FemSystem: solve before factorize");
        return ldlt ? Eigen::VectorXd(ldlt->solve(rhs)) : Eigen::VectorXd(lu->solve(rhs));
    }

    // A and D are real; complex right-hand sides are solved as two real solves.
    Eigen::VectorXcd solve(const Eigen::VectorXcd& rhs) const {
        const Eigen::VectorXd xr = solve_real(rhs.real());
        const Eigen::VectorXd xi = solve_real(rhs.imag());
        return xr + Complex(0.0, 1.0) * xi;
    }

    Eigen::VectorXcd apply_dirichlet_coupling(const Eigen::VectorXcd& f) const {
        return D * f.real() + Complex(0.0, 1.0) * (D * f.imag());
    }
};

inline FemSystem assemble(const TriMesh& mesh, double k, const RefractiveField& field) {
    if (!(k >= 0.0)) throw std::invalid_argument("assemble: wavenumber must be >= 0");
    FemSystem sys;
    sys.mesh = &mesh;
    sys.k = k;
    sys.field = &field;

    const int d = mesh.degree();
    const auto& basis = LagrangeBasis::get(d);
    const int n = basis.size();
    const auto& rule = triangle_rule(2 * d);
    const int nq = static_cast<int>(rule.points.size());

    // reference basis tables at quadrature points
    Eigen::MatrixXd phi(nq, n);
    std::vector<Eigen::MatrixX2d> gphi(static_cast<std::size_t>(nq));
    for (int q = 0; q < nq; ++q) {
        Eigen::VectorXd row(n);
        basis.eval(rule.points[static_cast<std::size_t>(q)].x(), rule.points[static_cast<std::size_t>(q)].y(), row);
        phi.row(q) = row;
        basis.eval_grad(rule.points[static_cast<std::size_t>(q)].x(), rule.points[static_cast<std::size_t>(q)].y(),
                        gphi[static_cast<std::size_t>(q)]);
    }

    const int L = mesh.num_free(), M = mesh.num_dirichlet();
    std::vector<Eigen::Triplet<double>> ta, td;
    ta.reserve(static_cast<std::size_t>(mesh.num_triangles()) * static_cast<std::size_t>(n) * static_cast<std::size_t>(n));

    Eigen::MatrixXd el(n, n);
    Eigen::MatrixX2d grads(n, 2);
    const double k2 = k * k;

    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.tri_vertices(t);
        const Vec2& a = mesh.vertex(tri[0]);
        const Vec2 e1 = mesh.vertex(tri[1]) - a, e2 = mesh.vertex(tri[2]) - a;
        const double det = e1.x() * e2.y() - e1.y() * e2.x();
        const double area = 0.5 * det;
        const double diam2 = std::max({e1.squaredNorm(), e2.squaredNorm(), (e2 - e1).squaredNorm()});
        if (area < 1e-14 * diam2)
            throw geometry_error("assemble: degenerate triangle " + std::to_string(t));
        // J^{-T} columns
        const Vec2 g1(e2.y() / det, -e2.x() / det);   // d xi / d (x,y)
        const Vec2 g2(-e1.y() / det, e1.x() / det);   // d eta / d (x,y)

        el.setZero();
        for (int q = 0; q < nq; ++q) {
            const auto& gq = gphi[static_cast<std::size_t>(q)];
            for (int i = 0; i < n; ++i) grads.row(i) = (gq(i, 0) * g1 + gq(i, 1) * g2).transpose();
            const Vec2 xq = a + rule.points[static_cast<std::size_t>(q)].x() * e1 + rule.points[static_cast<std::size_t>(q)].y() * e2;
            const double wq = rule.weights[static_cast<std::size_t>(q)] * std::abs(det);  // area = |det|/2, folded below
            const double mw = k2 * field.value(xq);
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j) {
                    const double v = 0.5 * wq * (grads.row(i).dot(grads.row(j)) - mw * phi(q, i) * phi(q, j));
                    el(i, j) += v;
                }
        }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < i; ++j) el(i, j) = el(j, i);

        const auto& en = mesh.tri_nodes(t);
        for (int i = 0; i < n; ++i) {
            const int fi = mesh.free_index_of(en[static_cast<std::size_t>(i)]);
            if (fi < 0) continue;
            for (int j = 0; j < n; ++j) {
                const int nj = en[static_cast<std::size_t>(j)];
                const int fj = mesh.free_index_of(nj);
                if (fj >= 0)
                    ta.emplace_back(fi, fj, el(i, j));
                else
                    td.emplace_back(fi, mesh.dirichlet_index_of(nj), -el(i, j));
            }
        }
    }

    sys.A.resize(L, L);
    sys.A.setFromTriplets(ta.begin(), ta.end());
    sys.D.resize(L, M);
    sys.D.setFromTriplets(td.begin(), td.end());
    return sys;
}

inline FemSystem& factorize(FemSystem& sys) {
    auto ldlt = std::make_shared<Eigen::SimplicialLDLT<SpMat>>();
    ldlt->compute(sys.A);
    bool ok = ldlt->info() == Eigen::Success;
    if (ok) {
        const Eigen::VectorXd dv = ldlt->vectorD();
        const double dmax = dv.cwiseAbs().maxCoeff();
        for (int i = 0; i < dv.size() && ok; ++i)
            if (!std::isfinite(dv(i)) || std::abs(dv(i)) < 1e-12 * dmax) ok = false;
    }
    if (ok) {
        sys.ldlt = std::move(ldlt);
        sys.lu.reset();
        return sys;
    }
    // unpivoted LDL^T broke down; retry with a pivoting sparse LU
    auto lu = std::make_shared<Eigen::SparseLU<SpMat>>();
    lu->compute(sys.A);
    if (lu->info() != Eigen::Success)
        throw solver_error(
            "factorize: resonant configuration (FEM matrix numerically singular); "
            "change the artificial boundary Sigma or the wavenumber k");
    sys.lu = std::move(lu);
    sys.ldlt.reset();
    return sys;
}

struct FemSolution {
    const TriMesh* mesh = nullptr;
    Eigen::VectorXcd values;  // all mesh nodes
};

inline FemSolution solve_dirichlet(const FemSystem& sys, const Eigen::VectorXcd& f_sigma) {
    if (!sys.factorized()) throw solver_error("solve_dirichlet: system not factorized");
    const TriMesh& mesh = *sys.mesh;
    if (f_sigma.size() != mesh.num_dirichlet())
        throw std::invalid_argument("solve_dirichlet: Dirichlet data has wrong length");
    const Eigen::VectorXcd rhs = sys.apply_dirichlet_coupling(f_sigma);
    const Eigen::VectorXcd uf = sys.solve(rhs);
    FemSolution sol;
    sol.mesh = &mesh;
    sol.values = Eigen::VectorXcd::Zero(mesh.num_nodes());
    const auto& fr = mesh.free_node_ids();
    for (int i = 0; i < mesh.num_free(); ++i) sol.values(fr[static_cast<std::size_t>(i)]) = uf(i);
    const auto& di = mesh.dirichlet_node_ids();
    for (int i = 0; i < mesh.num_dirichlet(); ++i) sol.values(di[static_cast<std::size_t>(i)]) = f_sigma(i);
    return sol;
}

inline Complex eval_solution(const FemSolution& sol, const TriMesh::Location& loc) {
    const TriMesh& mesh = *sol.mesh;
    const auto& basis = LagrangeBasis::get(mesh.degree());
    Eigen::VectorXd phi(basis.size());
    basis.eval(loc.bary(1), loc.bary(2), phi);
    const auto& en = mesh.tri_nodes(loc.tri);
    Complex v = 0.0;
    for (int i = 0; i < basis.size(); ++i) v += phi(i) * sol.values(en[static_cast<std::size_t>(i)]);
    return v;
}

/// Degree-d Lagrange interpolation of the solution at interior points.
inline Eigen::VectorXcd trace_at_points(const FemSolution& sol, const std::vector<Vec2>& points) {
    Eigen::VectorXcd out(static_cast<Eigen::Index>(points.size()));
    int seed = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto loc = sol.mesh->locate(points[i], seed);
        if (!loc)
            throw geometry_error("trace_at_points: point (" + std::to_string(points[i].x()) + ", " +
                                 std::to_string(points[i].y()) + ") is outside the mesh");
        seed = loc->tri;
        out(static_cast<Eigen::Index>(i)) = eval_solution(sol, *loc);
    }
    return out;
}

struct FieldRaster {
    Rect rect{0, 0, 0, 0};
    int nx = 0, ny = 0;
    std::vector<Complex> values;  // row-major, NaN outside the mesh

    Complex at(int i, int j) const { return values[static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i)]; }
};

inline FieldRaster eval_field_on_grid(const FemSolution& sol, const Rect& rect, int nx, int ny) {
    FieldRaster r;
    r.rect = rect;
    r.nx = nx;
    r.ny = ny;
    r.values.resize(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
    const Complex absent(std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN());
    int seed = 0;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const Vec2 p(rect.xmin + (nx > 1 ? rect.width() * i / (nx - 1) : 0.0),
                         rect.ymin + (ny > 1 ? rect.height() * j / (ny - 1) : 0.0));
            const auto loc = sol.mesh->locate(p, seed);
            if (loc) {
                seed = loc->tri;
                r.values[static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i)] = eval_solution(sol, *loc);
            } else {
                r.values[static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i)] = absent;
            }
        }
    return r;
}

struct ErrorNorms {
    double l2 = 0.0, h1semi = 0.0;
    double l2_ref = 0.0, h1semi_ref = 0.0;
    double h1() const { return std::sqrt(l2 * l2 + h1semi * h1semi); }
    double h1_ref() const { return std::sqrt(l2_ref * l2_ref + h1semi_ref * h1semi_ref); }
};

// Quadrature comparison against a smooth reference field (for convergence
// studies); rule degree 2d + 4 to resolve the oscillatory reference.
inline ErrorNorms compare_to_exact(const FemSolution& sol,
                                   const std::function<Complex(const Vec2&)>& exact,
                                   const std::function<Eigen::Vector2cd(const Vec2&)>& exact_grad) {
    const TriMesh& mesh = *sol.mesh;
    const int d = mesh.degree();
    const auto& basis = LagrangeBasis::get(d);
    const int n = basis.size();
    const auto& rule = triangle_rule(std::min(12, 2 * d + 4));
    const int nq = static_cast<int>(rule.points.size());

    Eigen::MatrixXd phi(nq, n);
    std::vector<Eigen::MatrixX2d> gphi(static_cast<std::size_t>(nq));
    for (int q = 0; q < nq; ++q) {
        Eigen::VectorXd row(n);
        basis.eval(rule.points[static_cast<std::size_t>(q)].x(), rule.points[static_cast<std::size_t>(q)].y(), row);
        phi.row(q) = row;
        basis.eval_grad(rule.points[static_cast<std::size_t>(q)].x(), rule.points[static_cast<std::size_t>(q)].y(),
                        gphi[static_cast<std::size_t>(q)]);
    }

    ErrorNorms norms;
    Eigen::VectorXcd coeff(n);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.tri_vertices(t);
        const Vec2& a = mesh.vertex(tri[0]);
        const Vec2 e1 = mesh.vertex(tri[1]) - a, e2 = mesh.vertex(tri[2]) - a;
        const double det = e1.x() * e2.y() - e1.y() * e2.x();
        const Vec2 g1(e2.y() / det, -e2.x() / det), g2(-e1.y() / det, e1.x() / det);
        const auto& en = mesh.tri_nodes(t);
        for (int i = 0; i < n; ++i) coeff(i) = sol.values(en[static_cast<std::size_t>(i)]);
        for (int q = 0; q < nq; ++q) {
            const Vec2 xq = a + rule.points[static_cast<std::size_t>(q)].x() * e1 + rule.points[static_cast<std::size_t>(q)].y() * e2;
            const double wq = 0.5 * rule.weights[static_cast<std::size_t>(q)] * std::abs(det);
            Complex uh = 0.0;
            Eigen::Vector2cd guh = Eigen::Vector2cd::Zero();
            const auto& gq = gphi[static_cast<std::size_t>(q)];
            for (int i = 0; i < n; ++i) {
                uh += phi(q, i) * coeff(i);
                const Vec2 gr = gq(i, 0) * g1 + gq(i, 1) * g2;
                guh += coeff(i) * gr.cast<Complex>();
            }
            const Complex ue = exact(xq);
            const Eigen::Vector2cd gue = exact_grad(xq);
            norms.l2 += wq * std::norm(uh - ue);
            norms.h1semi += wq * (guh - gue).squaredNorm();
            norms.l2_ref += wq * std::norm(ue);
            norms.h1semi_ref += wq * gue.squaredNorm();
        }
    }
    norms.l2 = std::sqrt(norms.l2);
    norms.h1semi = std::sqrt(norms.h1semi);
    norms.l2_ref = std::sqrt(norms.l2_ref);
    norms.h1semi_ref = std::sqrt(norms.h1semi_ref);
    return norms;
}

}  // namespace fembem
