#pragma once

// Drivers behind the CLI subcommands: solve a configured problem and write
// artifacts, run convergence tables, emit reference far fields.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fembem/config.hpp"
#include "fembem/coupling.hpp"
#include "fembem/oracles.hpp"

namespace fembem {

namespace detail {

inline void ensure_writable(const std::filesystem::path& p, bool overwrite) {
    if (!overwrite && std::filesystem::exists(p))
        throw config_error("output file '" + p.string() + "' exists; pass overwrite to replace it");
}

inline std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

inline void write_farfield_csv(const std::filesystem::path& path, const std::vector<Complex>& far, int n_angles) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot open '" + path.string() + "' for writing");
    out << "theta,re,im,abs\n";
    for (int i = 0; i < n_angles; ++i) {
        const double theta = 2.0 * M_PI * i / n_angles;
        const Complex& f = far[static_cast<std::size_t>(i)];
        out << detail::fmt_g17(theta) << ',' << detail::fmt_g17(f.real()) << ',' << detail::fmt_g17(f.imag()) << ','
            << detail::fmt_g17(std::abs(f)) << '\n';
    }
}

struct RunSummary {
    int level = 0, degree = 0;
    int L = 0, M = 0, N = 0;
    std::string method;
    int iterations = 0;
    double residual = 0.0;
    double setup_seconds = 0.0, solve_seconds = 0.0;
    double overlap_defect = -1.0;  // < 0: not measured
    int straddling = 0;
    std::string out_dir;
};

inline void write_summary_json(const std::filesystem::path& path, const RunSummary& s) {
    Json j;
    j["level"] = s.level;
    j["degree"] = s.degree;
    j["free_nodes"] = s.L;
    j["dirichlet_nodes"] = s.M;
    j["N"] = s.N;
    j["bem_dof"] = 2 * s.N;
    j["method"] = s.method;
    j["iterations"] = s.iterations;
    j["residual"] = s.residual;
    j["setup_seconds"] = s.setup_seconds;
    j["solve_seconds"] = s.solve_seconds;
    if (s.overlap_defect >= 0.0) j["overlap_defect"] = s.overlap_defect;
    j["straddling_triangles"] = s.straddling;
    std::ofstream out(path);
    if (!out) throw config_error("cannot open '" + path.string() + "' for writing");
    out << j.dump(2) << '\n';
}

inline RunSummary run_solve(const RunConfig& cfg) {
    cfg.validate();
    const SmoothCurve curve = cfg.curve.make();
    const RefractiveField medium = cfg.medium.make();
    const IncidentWave wave = cfg.make_wave();

    std::vector<int> straddling;
    const TriMesh mesh = build_structured_mesh(cfg.rect, cfg.level, cfg.degree, &medium, &straddling);
    const NestingReport nest = validate_nesting(curve, mesh, medium);
    if (!nest.ok) throw config_error("configuration failed nesting validation: " + nest.message);

    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    detail::ensure_writable(dir / "farfield.csv", cfg.overwrite);
    detail::ensure_writable(dir / "summary.json", cfg.overwrite);
    detail::ensure_writable(dir / "solver_log.txt", cfg.overwrite);

    const CoupledProblem cp(mesh, medium, curve, cfg.N, wave);
    const InterfaceState st =
        solve_interface(cp, cfg.method == "direct" ? SolveMethod::direct : SolveMethod::gmres, cfg.tol);
    const Reconstruction rec = reconstruct(cp, st);

    const auto dirs = uniform_directions(cfg.far_angles);
    const auto far = far_field(cp.grid(), cp.wavenumber(), rec.density, dirs);
    write_farfield_csv(dir / "farfield.csv", far, cfg.far_angles);

    {
        std::ofstream log(dir / "solver_log.txt");
        log << "# method " << st.diag.method << "\n";
        if (st.diag.method == "gmres") {
            log << "# iter, residual\n";
            for (std::size_t i = 0; i < st.diag.history.size(); ++i)
                log << i + 1 << ", " << detail::fmt_g17(st.diag.history[i]) << "\n";
        } else {
            log << "# dense Schur solve, residual " << detail::fmt_g17(st.diag.residual) << "\n";
        }
    }

    RunSummary summary;
    summary.level = cfg.level;
    summary.degree = cfg.degree;
    summary.L = mesh.num_free();
    summary.M = mesh.num_dirichlet();
    summary.N = cfg.N;
    summary.method = st.diag.method;
    summary.iterations = st.diag.iterations;
    summary.residual = st.diag.residual;
    summary.setup_seconds = cp.setup_seconds();
    summary.solve_seconds = st.diag.solve_seconds;
    summary.straddling = static_cast<int>(straddling.size());
    summary.out_dir = cfg.out_dir;

    if (cfg.raster_nx > 0) {
        detail::ensure_writable(dir / "raster.csv", cfg.overwrite);
        const FieldRaster raster = eval_field_on_grid(rec.interior, cfg.rect, cfg.raster_nx, cfg.raster_ny);
        std::ofstream out(dir / "raster.csv");
        out << "x,y,re,im\n";
        for (int j = 0; j < raster.ny; ++j)
            for (int i = 0; i < raster.nx; ++i) {
                const double x = cfg.rect.xmin + (raster.nx > 1 ? cfg.rect.width() * i / (raster.nx - 1) : 0.0);
                const double y = cfg.rect.ymin + (raster.ny > 1 ? cfg.rect.height() * j / (raster.ny - 1) : 0.0);
                const Complex v = raster.at(i, j);
                out << detail::fmt_g17(x) << ',' << detail::fmt_g17(y) << ',' << detail::fmt_g17(v.real()) << ','
                    << detail::fmt_g17(v.imag()) << '\n';
            }
    }

    if (cfg.overlap_samples > 0) {
        detail::ensure_writable(dir / "overlap.txt", cfg.overwrite);
        summary.overlap_defect = overlap_consistency(cp, st, cfg.overlap_samples);
        std::ofstream out(dir / "overlap.txt");
        out << "samples " << cfg.overlap_samples << "\nmax_defect " << detail::fmt_g17(summary.overlap_defect) << "\n";
    }

    write_summary_json(dir / "summary.json", summary);
    return summary;
}

inline void write_convergence_table(const std::filesystem::path& dir, const ConvergenceTable& t, bool overwrite) {
    std::filesystem::create_directories(dir);
    detail::ensure_writable(dir / "convergence.csv", overwrite);
    detail::ensure_writable(dir / "convergence.txt", overwrite);
    {
        std::ofstream csv(dir / "convergence.csv");
        csv << "level,free_nodes,N,error,iterations\n";
        for (std::size_t li = 0; li < t.levels.size(); ++li)
            for (std::size_t ni = 0; ni < t.Ns.size(); ++ni)
                csv << t.levels[li] << ',' << t.free_nodes[li] << ',' << t.Ns[ni] << ','
                    << detail::fmt_g17(t.error(static_cast<Eigen::Index>(li), static_cast<Eigen::Index>(ni))) << ','
                    << t.iters(static_cast<Eigen::Index>(li), static_cast<Eigen::Index>(ni)) << '\n';
    }
    std::ofstream txt(dir / "convergence.txt");
    txt << "truth: " << t.truth << "\n";
    txt << "level      L";
    for (int n : t.Ns) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%16s N=%-5d", "", n);
        txt << buf;
    }
    txt << "\n";
    for (std::size_t li = 0; li < t.levels.size(); ++li) {
        char head[40];
        std::snprintf(head, sizeof head, "%5d %8d", t.levels[li], t.free_nodes[li]);
        txt << head;
        for (std::size_t ni = 0; ni < t.Ns.size(); ++ni) {
            char buf[48];
            std::snprintf(buf, sizeof buf, "   %12.3e (%03d)",
                          t.error(static_cast<Eigen::Index>(li), static_cast<Eigen::Index>(ni)),
                          t.iters(static_cast<Eigen::Index>(li), static_cast<Eigen::Index>(ni)));
            txt << buf;
        }
        txt << "\n";
    }
    if (!t.observed_order.empty()) {
        txt << "observed order (largest N):";
        for (double o : t.observed_order) {
            char buf[24];
            std::snprintf(buf, sizeof buf, " %.2f", o);
            txt << buf;
        }
        txt << "\n";
    }
}

// The medium presets with a closed-form or modal-ODE reference; other media
// fall back to self-reference truth.
inline std::unique_ptr<SeriesSolution> make_series_oracle(const RunConfig& cfg) {
    if (cfg.medium.preset == "constant_disk" && cfg.medium.center.norm() == 0.0)
        return std::make_unique<SeriesSolution>(
            SeriesSolution::penetrable_disk(cfg.k, cfg.medium.radius, cfg.medium.n0, cfg.direction, cfg.amplitude));
    if (cfg.medium.preset == "smooth_disk" && cfg.medium.center.norm() == 0.0) {
        const double n2 = cfg.medium.n0 * cfg.medium.n0;
        const double ri = cfg.medium.r_inner, ro = cfg.medium.r_outer;
        return std::make_unique<SeriesSolution>(SeriesSolution::penetrable_profile(
            cfg.k, ri, ro, [n2, ri, ro](double r) { return 1.0 + (n2 - 1.0) * cutoff_chi((r - ri) / (ro - ri)); },
            cfg.direction, cfg.amplitude));
    }
    return nullptr;
}

inline ConvergenceTable run_convergence(const RunConfig& cfg, const std::vector<int>& levels, const std::vector<int>& Ns) {
    cfg.validate();
    const SmoothCurve curve = cfg.curve.make();
    const RefractiveField medium = cfg.medium.make();
    {
        const TriMesh coarse = build_structured_mesh(cfg.rect, levels.empty() ? 0 : levels.front(), cfg.degree);
        const NestingReport nest = validate_nesting(curve, coarse, medium);
        if (!nest.ok) throw config_error("configuration failed nesting validation: " + nest.message);
    }
    StudyConfig sc;
    sc.rect = cfg.rect;
    sc.degree = cfg.degree;
    sc.field = &medium;
    sc.curve = &curve;
    sc.wave = cfg.make_wave();
    sc.tol = cfg.tol;
    sc.far_angles = cfg.far_angles;
    const auto oracle = make_series_oracle(cfg);
    sc.oracle = oracle.get();
    ConvergenceTable table = convergence_study(sc, levels, Ns);
    write_convergence_table(cfg.out_dir, table, cfg.overwrite);
    return table;
}

struct OracleRequest {
    std::string kind;  // "sound-soft" | "penetrable"
    double k = M_PI;
    double radius = 1.0;
    double n0 = 2.0;
    Vec2 direction = Vec2(1.0, 0.0);
    double amplitude = 1.0;
    int angles = 1000;
    std::string out_dir = "out";
    bool overwrite = false;
};

inline void run_oracle(const OracleRequest& req) {
    if (!(req.k > 0.0) || !(req.radius > 0.0)) throw config_error("oracle: k and radius must be positive");
    if (req.angles < 1) throw config_error("oracle: angles must be positive");
    std::unique_ptr<SeriesSolution> sol;
    if (req.kind == "sound-soft")
        sol = std::make_unique<SeriesSolution>(SeriesSolution::sound_soft_circle(req.k, req.radius, req.direction, req.amplitude));
    else if (req.kind == "penetrable") {
        if (!(req.n0 > 0.0)) throw config_error("oracle: n0 must be positive");
        sol = std::make_unique<SeriesSolution>(SeriesSolution::penetrable_disk(req.k, req.radius, req.n0, req.direction, req.amplitude));
    } else {
        throw config_error("oracle: unknown kind '" + req.kind + "' (expected sound-soft or penetrable)");
    }
    const std::filesystem::path dir(req.out_dir);
    std::filesystem::create_directories(dir);
    detail::ensure_writable(dir / "oracle_farfield.csv", req.overwrite);
    const auto far = mie_far_field(*sol, uniform_directions(req.angles));
    write_farfield_csv(dir / "oracle_farfield.csv", far, req.angles);
}

}  // namespace fembem
