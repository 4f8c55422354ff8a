#pragma once

// The interface system coupling the interior FEM solve to the exterior
// Nystrom solve.  Unknowns: f_hat (total field at the M Dirichlet nodes of
// Sigma) and f_tilde (scattered-field trace at the 2N Gamma nodes).  The
// reduced system on f_tilde is the Schur complement
//     (I - Ktilde Khat) f_tilde = -u_inc|_Gamma + Ktilde (u_inc|_Sigma),
// where Ktilde = (FEM solve, trace on Gamma) and Khat = (BEM solve,
// potential at Sigma nodes), followed by f_hat = u_inc|_Sigma + Khat f_tilde.

#include <chrono>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fembem/fem.hpp"
#include "fembem/gmres.hpp"
#include "fembem/incident.hpp"
#include "fembem/nystrom.hpp"

namespace fembem {

struct SolveDiagnostics {
    std::string method;
    int iterations = 0;
    double residual = 0.0;
    std::vector<double> history;
    double setup_seconds = 0.0;
    double solve_seconds = 0.0;
};

struct InterfaceState {
    Eigen::VectorXcd f_hat;    // M values on Sigma nodes (total field)
    Eigen::VectorXcd f_tilde;  // 2N values on Gamma nodes (scattered trace)
    SolveDiagnostics diag;
};

enum class SolveMethod { gmres, direct };

class CoupledProblem {
  public:
    CoupledProblem(const TriMesh& mesh, const RefractiveField& field, const SmoothCurve& curve, int N,
                   const IncidentWave& wave)
        : wave_(wave) {
        const auto t0 = std::chrono::steady_clock::now();
        fem_ = assemble(mesh, wave.wavenumber(), field);
        factorize(fem_);
        grid_ = NystromGrid::build(curve, N);
        bem_ = assemble_bem(grid_, wave.wavenumber());

        const auto& nodes = mesh.node_coords();
        sigma_points_.reserve(static_cast<std::size_t>(mesh.num_dirichlet()));
        for (int id : mesh.dirichlet_node_ids()) sigma_points_.push_back(nodes[static_cast<std::size_t>(id)]);

        gamma_points_.reserve(static_cast<std::size_t>(grid_.size()));
        gamma_locs_.reserve(static_cast<std::size_t>(grid_.size()));
        int seed = 0;
        for (const auto& c : grid_.cp) {
            gamma_points_.push_back(c.x);
            const auto loc = mesh.locate(c.x, seed);
            if (!loc)
                throw config_error("coupled problem: Gamma node (" + std::to_string(c.x.x()) + ", " +
                                   std::to_string(c.x.y()) + ") is outside the FEM domain (check nesting)");
            seed = loc->tri;
            gamma_locs_.push_back(*loc);
        }

        // potential map P: combined kernel from every Gamma node to every Sigma node
        const int M = mesh.num_dirichlet(), n2 = grid_.size();
        P_.resize(M, n2);
        const double trap = M_PI / grid_.N;
        for (int i = 0; i < M; ++i)
            for (int j = 0; j < n2; ++j)
                P_(i, j) = trap * detail::combined_kernel(grid_.cp[static_cast<std::size_t>(j)], wave.wavenumber(),
                                                          sigma_points_[static_cast<std::size_t>(i)]);
        setup_seconds_ = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }

    const TriMesh& mesh() const { return *fem_.mesh; }
    const FemSystem& fem() const { return fem_; }
    const BemSystem& bem() const { return bem_; }
    const NystromGrid& grid() const { return grid_; }
    const IncidentWave& wave() const { return wave_; }
    double wavenumber() const { return wave_.wavenumber(); }
    const std::vector<Vec2>& sigma_points() const { return sigma_points_; }
    const std::vector<Vec2>& gamma_points() const { return gamma_points_; }
    const Eigen::MatrixXcd& potential_map() const { return P_; }
    double setup_seconds() const { return setup_seconds_; }

    Eigen::VectorXcd incident_on_sigma(const IncidentWave& w) const {
        Eigen::VectorXcd v(static_cast<Eigen::Index>(sigma_points_.size()));
        for (std::size_t i = 0; i < sigma_points_.size(); ++i) v(static_cast<Eigen::Index>(i)) = w.value(sigma_points_[i]);
        return v;
    }

    Eigen::VectorXcd incident_on_gamma(const IncidentWave& w) const {
        Eigen::VectorXcd v(static_cast<Eigen::Index>(gamma_points_.size()));
        for (std::size_t i = 0; i < gamma_points_.size(); ++i) v(static_cast<Eigen::Index>(i)) = w.value(gamma_points_[i]);
        return v;
    }

    // trace on Gamma of the FEM solve with Dirichlet data f_hat
    Eigen::VectorXcd apply_ktilde(const Eigen::VectorXcd& f_hat) const {
        const FemSolution u = solve_dirichlet(fem_, f_hat);
        Eigen::VectorXcd out(static_cast<Eigen::Index>(gamma_locs_.size()));
        for (std::size_t j = 0; j < gamma_locs_.size(); ++j)
            out(static_cast<Eigen::Index>(j)) = eval_solution(u, gamma_locs_[j]);
        return out;
    }

    // combined potential at Sigma nodes of the BEM solve with trace data f_tilde
    Eigen::VectorXcd apply_khat(const Eigen::VectorXcd& f_tilde) const {
        return P_ * solve_density(bem_, f_tilde);
    }

    FemSolution interior_solution(const Eigen::VectorXcd& f_hat) const { return solve_dirichlet(fem_, f_hat); }

  private:
    FemSystem fem_;
    NystromGrid grid_;
    BemSystem bem_;
    IncidentWave wave_;
    std::vector<Vec2> sigma_points_, gamma_points_;
    std::vector<TriMesh::Location> gamma_locs_;
    Eigen::MatrixXcd P_;
    double setup_seconds_ = 0.0;
};

inline Eigen::VectorXcd apply_schur(const CoupledProblem& cp, const Eigen::VectorXcd& f_tilde) {
    return f_tilde - cp.apply_ktilde(cp.apply_khat(f_tilde));
}

inline Eigen::VectorXcd interface_rhs(const CoupledProblem& cp, const IncidentWave& wave) {
    return -cp.incident_on_gamma(wave) + cp.apply_ktilde(cp.incident_on_sigma(wave));
}

inline Eigen::VectorXcd interface_rhs(const CoupledProblem& cp) { return interface_rhs(cp, cp.wave()); }

// Dense Schur complement, built one column per Gamma unknown (each column is
// one BEM solve + potential evaluation + one FEM solve + trace).  The
// factorization is reusable across incident waves.
struct DenseSchur {
    Eigen::MatrixXcd A;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu;
    double build_seconds = 0.0;
};

inline DenseSchur build_dense_schur(const CoupledProblem& cp) {
    const auto t0 = std::chrono::steady_clock::now();
    const int n = cp.grid().size();
    DenseSchur ds;
    ds.A.resize(n, n);
    // Khat applied to the identity: P * B^{-1}
    const Eigen::MatrixXcd khat = cp.potential_map() * cp.bem().lu.solve(Eigen::MatrixXcd::Identity(n, n));
    for (int j = 0; j < n; ++j) {
        ds.A.col(j) = -cp.apply_ktilde(khat.col(j));
        ds.A(j, j) += 1.0;
    }
    ds.lu.compute(ds.A);
    ds.build_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return ds;
}

inline InterfaceState solve_interface(const CoupledProblem& cp, const DenseSchur& ds, const IncidentWave& wave) {
    const auto t0 = std::chrono::steady_clock::now();
    InterfaceState st;
    st.diag.method = "direct";
    const Eigen::VectorXcd rhs = interface_rhs(cp, wave);
    st.f_tilde = ds.lu.solve(rhs);
    st.diag.residual = rhs.size() ? (rhs - ds.A * st.f_tilde).norm() / std::max(rhs.norm(), 1e-300) : 0.0;
    st.f_hat = cp.incident_on_sigma(wave) + cp.apply_khat(st.f_tilde);
    st.diag.setup_seconds = ds.build_seconds;
    st.diag.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return st;
}

inline InterfaceState solve_interface(const CoupledProblem& cp, SolveMethod method, double tol = 1e-8) {
    if (!(tol > 0.0)) throw std::invalid_argument("solve_interface: tolerance must be positive");
    if (method == SolveMethod::direct) return solve_interface(cp, build_dense_schur(cp), cp.wave());

    const auto t0 = std::chrono::steady_clock::now();
    InterfaceState st;
    st.diag.method = "gmres";
    const Eigen::VectorXcd rhs = interface_rhs(cp);
    const int maxit = 10 * cp.grid().size();
    const GmresResult res = gmres([&cp](const Eigen::VectorXcd& v) { return apply_schur(cp, v); }, rhs, tol, maxit);
    if (!res.converged) {
        std::string hist;
        for (double r : res.history) hist += " " + std::to_string(r);
        throw solver_error("solve_interface: GMRES did not reach tol " + std::to_string(tol) + " within " +
                           std::to_string(maxit) + " iterations; residual history:" + hist);
    }
    st.f_tilde = res.x;
    st.f_hat = cp.incident_on_sigma(cp.wave()) + cp.apply_khat(st.f_tilde);
    st.diag.iterations = res.iterations;
    st.diag.residual = res.relative_residual;
    st.diag.history = res.history;
    st.diag.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return st;
}

struct Reconstruction {
    FemSolution interior;  // total field u_h on Omega_2
    Density density;       // BEM density phi with omega = (DL - ik SL) phi
};

inline Reconstruction reconstruct(const CoupledProblem& cp, const InterfaceState& st) {
    Reconstruction rec;
    rec.interior = solve_dirichlet(cp.fem(), st.f_hat);
    rec.density = solve_density(cp.bem(), st.f_tilde);
    return rec;
}

// Max mismatch |u_h - (omega + u_inc)| over random points of the overlap
// region Omega_12 (inside Sigma, outside Gamma).  Points closer to Gamma
// than one grid spacing are rejected: the plain trapezoidal potential is
// inaccurate there and would mask the actual matching quality.
inline double overlap_consistency(const CoupledProblem& cp, const InterfaceState& st, int samples,
                                  std::uint64_t seed = 0x5eedULL) {
    const Reconstruction rec = reconstruct(cp, st);
    const TriMesh& mesh = cp.mesh();
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        xmin = std::min(xmin, mesh.vertex(v).x());
        xmax = std::max(xmax, mesh.vertex(v).x());
        ymin = std::min(ymin, mesh.vertex(v).y());
        ymax = std::max(ymax, mesh.vertex(v).y());
    }
    const SmoothCurve& curve = cp.grid().curve;
    double max_speed = 0.0;
    for (const auto& c : cp.grid().cp) max_speed = std::max(max_speed, c.speed);
    const double margin = 2.0 * M_PI / cp.grid().N * max_speed;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(xmin, xmax), uy(ymin, ymax);
    std::vector<Vec2> pts;
    std::vector<TriMesh::Location> locs;
    const int max_attempts = 20000 + 2000 * samples;
    for (int att = 0; att < max_attempts && static_cast<int>(pts.size()) < samples; ++att) {
        const Vec2 p(ux(rng), uy(rng));
        if (curve.contains(p)) continue;
        if (curve.distance_to(p, 1024) < margin) continue;
        const auto loc = mesh.locate(p);
        if (!loc) continue;
        pts.push_back(p);
        locs.push_back(*loc);
    }
    if (pts.empty()) throw config_error("overlap_consistency: overlap region Omega_12 appears to be empty");

    const auto omega = eval_potentials(cp.grid(), cp.wavenumber(), rec.density, pts);
    double defect = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Complex uh = eval_solution(rec.interior, locs[i]);
        defect = std::max(defect, std::abs(uh - (omega[i] + cp.wave().value(pts[i]))));
    }
    return defect;
}

}  // namespace fembem
