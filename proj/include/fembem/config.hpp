#pragma once

// JSON run configuration.  Strict parsing: unknown keys are rejected so a
// typo cannot silently fall back to a default.

#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "fembem/curve.hpp"
#include "fembem/errors.hpp"
#include "fembem/incident.hpp"
#include "fembem/mesh.hpp"
#include "fembem/refractive.hpp"

namespace fembem {

using Json = nlohmann::json;

namespace detail {

inline void require_keys(const Json& obj, const std::string& where, const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw config_error("config: '" + where + "' must be an object");
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key)) throw config_error("config: unknown key '" + key + "' in '" + where + "'");
}

inline Vec2 read_vec2(const Json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2) throw config_error("config: '" + where + "' must be a 2-element array");
    return Vec2(j[0].get<double>(), j[1].get<double>());
}

}  // namespace detail

struct CurveConfig {
    std::string kind = "circle";
    Vec2 center = Vec2::Zero();
    double radius = 3.5;
    double scale = 7.0 * M_SQRT2 / 4.0;

    SmoothCurve make() const {
        if (kind == "circle") return SmoothCurve::circle(center, radius);
        if (kind == "rounded_square") return SmoothCurve::rounded_square(scale);
        throw config_error("config: unknown curve kind '" + kind + "'");
    }
};

struct MediumConfig {
    std::string preset = "star";
    Vec2 center = Vec2::Zero();
    double radius = 1.0;
    double n0 = 2.0;
    double r_inner = 0.8;
    double r_outer = 1.2;

    RefractiveField make() const {
        if (preset == "uniform") return RefractiveField::uniform();
        if (preset == "star") return RefractiveField::star_index();
        if (preset == "pikachu") return RefractiveField::pikachu_index();
        if (preset == "constant_disk") return RefractiveField::constant_disk(center, radius, n0);
        if (preset == "smooth_disk") return RefractiveField::smooth_disk(center, r_inner, r_outer, n0);
        throw config_error("config: unknown medium preset '" + preset + "'");
    }
};

struct RunConfig {
    Rect rect{-6.0, 6.0, -8.0, 8.0};
    int level = 2;
    int degree = 3;
    CurveConfig curve;
    MediumConfig medium;

    double k = M_PI / 4.0;
    Vec2 direction = Vec2(1.0, 0.0);
    double amplitude = 1.0;

    std::string method = "gmres";
    double tol = 1e-8;
    int N = 40;

    std::string out_dir = "out";
    int far_angles = 1000;
    int raster_nx = 0, raster_ny = 0;  // 0: no raster
    int overlap_samples = 0;           // 0: skip the overlap report
    bool overwrite = false;

    IncidentWave make_wave() const { return IncidentWave(k, direction, amplitude); }

    void validate() const {
        if (!(k > 0.0)) throw config_error("config: wave.k must be positive");
        if (degree < 1 || degree > 4) throw config_error("config: geometry.degree must be in {1,2,3,4}");
        if (level < 0) throw config_error("config: geometry.level must be >= 0");
        if (!(rect.width() > 0.0) || !(rect.height() > 0.0)) throw config_error("config: geometry.rect is empty");
        if (method != "gmres" && method != "direct") throw config_error("config: solver.method must be 'gmres' or 'direct'");
        if (!(tol > 0.0)) throw config_error("config: solver.tol must be positive");
        if (N < 4) throw config_error("config: solver.N must be at least 4");
        if (far_angles < 1) throw config_error("config: output.farfield_angles must be positive");
        if (raster_nx < 0 || raster_ny < 0 || (raster_nx > 0) != (raster_ny > 0))
            throw config_error("config: output.raster must give two positive sizes");
        if (overlap_samples < 0) throw config_error("config: output.overlap_samples must be >= 0");
        if (direction.norm() == 0.0) throw config_error("config: wave.direction must be nonzero");
        (void)curve.make();
        (void)medium.make();
    }

    static RunConfig from_json(const Json& j) {
        detail::require_keys(j, "<root>", {"geometry", "medium", "wave", "solver", "output"});
        RunConfig c;
        if (j.contains("geometry")) {
            const auto& g = j.at("geometry");
            detail::require_keys(g, "geometry", {"rect", "level", "degree", "curve"});
            if (g.contains("rect")) {
                const auto& r = g.at("rect");
                if (!r.is_array() || r.size() != 4) throw config_error("config: geometry.rect must be [xmin, xmax, ymin, ymax]");
                c.rect = Rect{r[0].get<double>(), r[1].get<double>(), r[2].get<double>(), r[3].get<double>()};
            }
            if (g.contains("level")) c.level = g.at("level").get<int>();
            if (g.contains("degree")) c.degree = g.at("degree").get<int>();
            if (g.contains("curve")) {
                const auto& cv = g.at("curve");
                detail::require_keys(cv, "geometry.curve", {"kind", "center", "radius", "scale"});
                if (cv.contains("kind")) c.curve.kind = cv.at("kind").get<std::string>();
                if (cv.contains("center")) c.curve.center = detail::read_vec2(cv.at("center"), "geometry.curve.center");
                if (cv.contains("radius")) c.curve.radius = cv.at("radius").get<double>();
                if (cv.contains("scale")) c.curve.scale = cv.at("scale").get<double>();
            }
        }
        if (j.contains("medium")) {
            const auto& m = j.at("medium");
            detail::require_keys(m, "medium", {"preset", "center", "radius", "n0", "r_inner", "r_outer"});
            if (m.contains("preset")) c.medium.preset = m.at("preset").get<std::string>();
            if (m.contains("center")) c.medium.center = detail::read_vec2(m.at("center"), "medium.center");
            if (m.contains("radius")) c.medium.radius = m.at("radius").get<double>();
            if (m.contains("n0")) c.medium.n0 = m.at("n0").get<double>();
            if (m.contains("r_inner")) c.medium.r_inner = m.at("r_inner").get<double>();
            if (m.contains("r_outer")) c.medium.r_outer = m.at("r_outer").get<double>();
        }
        if (j.contains("wave")) {
            const auto& w = j.at("wave");
            detail::require_keys(w, "wave", {"k", "direction", "amplitude"});
            if (w.contains("k")) c.k = w.at("k").get<double>();
            if (w.contains("direction")) c.direction = detail::read_vec2(w.at("direction"), "wave.direction");
            if (w.contains("amplitude")) c.amplitude = w.at("amplitude").get<double>();
        }
        if (j.contains("solver")) {
            const auto& s = j.at("solver");
            detail::require_keys(s, "solver", {"method", "tol", "N"});
            if (s.contains("method")) c.method = s.at("method").get<std::string>();
            if (s.contains("tol")) c.tol = s.at("tol").get<double>();
            if (s.contains("N")) c.N = s.at("N").get<int>();
        }
        if (j.contains("output")) {
            const auto& o = j.at("output");
            detail::require_keys(o, "output", {"dir", "farfield_angles", "raster", "overlap_samples", "overwrite"});
            if (o.contains("dir")) c.out_dir = o.at("dir").get<std::string>();
            if (o.contains("farfield_angles")) c.far_angles = o.at("farfield_angles").get<int>();
            if (o.contains("raster")) {
                const auto& r = o.at("raster");
                if (!r.is_array() || r.size() != 2) throw config_error("config: output.raster must be [nx, ny]");
                c.raster_nx = r[0].get<int>();
                c.raster_ny = r[1].get<int>();
            }
            if (o.contains("overlap_samples")) c.overlap_samples = o.at("overlap_samples").get<int>();
            if (o.contains("overwrite")) c.overwrite = o.at("overwrite").get<bool>();
        }
        c.validate();
        return c;
    }

    static RunConfig from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw config_error("config: cannot open '" + path + "'");
        Json j;
        try {
            in >> j;
        } catch (const std::exception& e) {
            throw config_error("config: JSON parse failure in '" + path + "': " + e.what());
        }
        return from_json(j);
    }
};

}  // namespace fembem
