// Command-line driver: solve, convergence, oracle, validate.
// Exit codes: 0 success, 2 configuration error, 3 solver error.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fembem/fembem.hpp"

namespace {

std::vector<int> parse_int_list(const std::string& s, const std::string& what) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stoi(item));
        } catch (...) {
            throw fembem::config_error("cannot parse " + what + " list '" + s + "'");
        }
    }
    if (out.empty()) throw fembem::config_error(what + " list is empty");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Overlapping FEM-BEM solver for 2-D Helmholtz scattering in heterogeneous media"};
    app.require_subcommand(1);

    std::string config_path, solver_override, out_override, levels_str, n_str;
    double tol_override = -1.0;

    auto* solve = app.add_subcommand("solve", "solve a configured problem and write far field + diagnostics");
    solve->add_option("--config", config_path, "JSON configuration file")->required();
    solve->add_option("--solver", solver_override, "override solver method (gmres|direct)");
    solve->add_option("--tol", tol_override, "override GMRES residual tolerance");
    solve->add_option("--out", out_override, "override output directory");

    auto* conv = app.add_subcommand("convergence", "far-field error table over mesh levels and N values");
    conv->add_option("--config", config_path, "JSON configuration file")->required();
    conv->add_option("--levels", levels_str, "comma-separated refinement levels, e.g. 1,2,3")->required();
    conv->add_option("--N", n_str, "comma-separated Nystrom parameters, e.g. 20,40")->required();
    conv->add_option("--out", out_override, "override output directory");

    fembem::OracleRequest oracle_req;
    double oracle_dir_angle = 0.0;
    auto* oracle = app.add_subcommand("oracle", "write the reference series far field for a circular scatterer");
    oracle->add_option("--kind", oracle_req.kind, "sound-soft | penetrable")->required();
    oracle->add_option("--k", oracle_req.k, "wavenumber");
    oracle->add_option("--radius", oracle_req.radius, "scatterer radius");
    oracle->add_option("--n0", oracle_req.n0, "interior refractive index (penetrable)");
    oracle->add_option("--direction", oracle_dir_angle, "incident direction angle in radians");
    oracle->add_option("--amplitude", oracle_req.amplitude, "incident amplitude");
    oracle->add_option("--angles", oracle_req.angles, "number of far-field angles");
    oracle->add_option("--out", oracle_req.out_dir, "output directory");
    oracle->add_flag("--overwrite", oracle_req.overwrite, "replace existing artifacts");

    auto* validate = app.add_subcommand("validate", "check a configuration (nesting, mesh alignment) without solving");
    validate->add_option("--config", config_path, "JSON configuration file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) {
            fembem::RunConfig cfg = fembem::RunConfig::from_file(config_path);
            if (!solver_override.empty()) cfg.method = solver_override;
            if (tol_override > 0.0) cfg.tol = tol_override;
            if (!out_override.empty()) cfg.out_dir = out_override;
            cfg.validate();
            const auto summary = fembem::run_solve(cfg);
            std::printf("solved: L=%d M=%d 2N=%d method=%s iterations=%d residual=%.3e\n", summary.L, summary.M,
                        2 * summary.N, summary.method.c_str(), summary.iterations, summary.residual);
            std::printf("artifacts in %s\n", summary.out_dir.c_str());
        } else if (conv->parsed()) {
            fembem::RunConfig cfg = fembem::RunConfig::from_file(config_path);
            if (!out_override.empty()) cfg.out_dir = out_override;
            const auto levels = parse_int_list(levels_str, "levels");
            const auto ns = parse_int_list(n_str, "N");
            const auto table = fembem::run_convergence(cfg, levels, ns);
            std::printf("convergence table (truth: %s) written to %s\n", table.truth.c_str(), cfg.out_dir.c_str());
        } else if (oracle->parsed()) {
            oracle_req.direction = fembem::Vec2(std::cos(oracle_dir_angle), std::sin(oracle_dir_angle));
            fembem::run_oracle(oracle_req);
            std::printf("oracle far field written to %s\n", oracle_req.out_dir.c_str());
        } else if (validate->parsed()) {
            const fembem::RunConfig cfg = fembem::RunConfig::from_file(config_path);
            const auto curve = cfg.curve.make();
            const auto medium = cfg.medium.make();
            std::vector<int> straddling;
            const auto mesh = fembem::build_structured_mesh(cfg.rect, cfg.level, cfg.degree, &medium, &straddling);
            const auto report = fembem::validate_nesting(curve, mesh, medium);
            if (!report.ok) throw fembem::config_error("nesting validation failed: " + report.message);
            std::printf("valid: L=%d M=%d, Gamma-to-Sigma clearance %.6g", mesh.num_free(), mesh.num_dirichlet(),
                        report.clearance_gamma_sigma);
            if (std::isfinite(report.clearance_hetero_gamma))
                std::printf(", heterogeneity-to-Gamma clearance %.6g", report.clearance_hetero_gamma);
            std::printf("\n");
            if (!straddling.empty())
                std::printf("warning: %zu triangles straddle the heterogeneity boundary (first: %d)\n",
                            straddling.size(), straddling.front());
        }
    } catch (const fembem::config_error& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const fembem::geometry_error& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return 3;
    }
    return 0;
}
