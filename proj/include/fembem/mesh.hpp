#pragma once

// Conforming triangulations with degree-d Lagrange nodes and a
// free/Dirichlet node partition (Dirichlet = nodes on the domain boundary).
// Structured rectangle meshes, uniform quadrisection refinement, and
// Triangle-tool compatible ASCII I/O (vertices + elements; higher-order
// nodes are regenerated on load).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fembem/curve.hpp"
#include "fembem/errors.hpp"
#include "fembem/lagrange.hpp"
#include "fembem/refractive.hpp"

namespace fembem {

struct Rect {
    double xmin, xmax, ymin, ymax;
    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
};

class TriMesh {
  public:
    struct Location {
        int tri = -1;
        Eigen::Vector3d bary;  // w.r.t. tri vertices (v0, v1, v2)
    };

    static TriMesh from_vertex_mesh(std::vector<Vec2> vertices,
                                    std::vector<std::array<int, 3>> triangles,
                                    int degree) {
        TriMesh m;
        m.vertices_ = std::move(vertices);
        m.triangles_ = std::move(triangles);
        m.degree_ = degree;
        m.build(true);
        return m;
    }

    int degree() const { return degree_; }
    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_triangles() const { return static_cast<int>(triangles_.size()); }
    int num_nodes() const { return static_cast<int>(nodes_.size()); }
    int num_free() const { return static_cast<int>(free_nodes_.size()); }
    int num_dirichlet() const { return static_cast<int>(dirichlet_nodes_.size()); }

    const std::vector<Vec2>& node_coords() const { return nodes_; }
    const std::vector<int>& free_node_ids() const { return free_nodes_; }
    const std::vector<int>& dirichlet_node_ids() const { return dirichlet_nodes_; }
    int free_index_of(int node) const { return free_index_[static_cast<std::size_t>(node)]; }
    int dirichlet_index_of(int node) const { return dirichlet_index_[static_cast<std::size_t>(node)]; }

    const Vec2& vertex(int v) const { return vertices_[static_cast<std::size_t>(v)]; }
    const std::array<int, 3>& tri_vertices(int t) const { return triangles_[static_cast<std::size_t>(t)]; }
    const std::vector<int>& tri_nodes(int t) const { return element_nodes_[static_cast<std::size_t>(t)]; }
    const std::vector<std::pair<int, int>>& boundary_edges() const { return boundary_edges_; }

    double mesh_size() const { return h_; }

    double triangle_area(int t) const {
        const auto& tri = triangles_[static_cast<std::size_t>(t)];
        const Vec2 e1 = vertex(tri[1]) - vertex(tri[0]);
        const Vec2 e2 = vertex(tri[2]) - vertex(tri[0]);
        return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
    }

    double domain_area() const {
        double a = 0.0;
        for (int t = 0; t < num_triangles(); ++t) a += triangle_area(t);
        return a;
    }

    // -- point location: walk from a seed triangle, brute-force fallback ----

    Eigen::Vector3d barycentric(int t, const Vec2& p) const {
        const auto& tri = triangles_[static_cast<std::size_t>(t)];
        const Vec2& a = vertex(tri[0]);
        const Vec2 e1 = vertex(tri[1]) - a, e2 = vertex(tri[2]) - a, r = p - a;
        const double det = e1.x() * e2.y() - e1.y() * e2.x();
        const double l1 = (r.x() * e2.y() - r.y() * e2.x()) / det;
        const double l2 = (e1.x() * r.y() - e1.y() * r.x()) / det;
        return {1.0 - l1 - l2, l1, l2};
    }

    std::optional<Location> locate(const Vec2& p, int seed = 0) const {
        constexpr double tol = 1e-10;
        int cur = std::clamp(seed, 0, num_triangles() - 1);
        const int max_steps = 2 * static_cast<int>(std::sqrt(static_cast<double>(num_triangles()))) + 64;
        for (int step = 0; step < max_steps; ++step) {
            const Eigen::Vector3d b = barycentric(cur, p);
            int worst = 0;
            if (b(1) < b(worst)) worst = 1;
            if (b(2) < b(worst)) worst = 2;
            if (b(worst) >= -tol) return Location{cur, b};
            // cross the edge opposite the most negative barycentric coordinate
            const int edge = (worst + 1) % 3;  // edge (v_{worst+1}, v_{worst+2})
            const int next = neighbors_[static_cast<std::size_t>(cur)][static_cast<std::size_t>(edge)];
            if (next < 0) break;
            cur = next;
        }
        // brute force
        int best = -1;
        double best_min = -std::numeric_limits<double>::max();
        Eigen::Vector3d best_b;
        for (int t = 0; t < num_triangles(); ++t) {
            const Eigen::Vector3d b = barycentric(t, p);
            const double mn = b.minCoeff();
            if (mn > best_min) {
                best_min = mn;
                best = t;
                best_b = b;
            }
            if (mn >= 0.0) break;
        }
        if (best >= 0 && best_min >= -tol) return Location{best, best_b};
        return std::nullopt;
    }

    double distance_to_boundary(const Vec2& p) const {
        double d = std::numeric_limits<double>::max();
        for (const auto& [a, b] : boundary_edges_) d = std::min(d, segment_distance(vertex(a), vertex(b), p));
        return d;
    }

    // -- refinement ---------------------------------------------------------

    TriMesh refined() const {
        std::vector<Vec2> verts = vertices_;
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            const int id = static_cast<int>(verts.size());
            verts.push_back(0.5 * (vertices_[static_cast<std::size_t>(key.first)] + vertices_[static_cast<std::size_t>(key.second)]));
            midpoint.emplace(key, id);
            return id;
        };
        std::vector<std::array<int, 3>> tris;
        tris.reserve(triangles_.size() * 4);
        for (const auto& t : triangles_) {
            const int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
            tris.push_back({t[0], ab, ca});
            tris.push_back({ab, t[1], bc});
            tris.push_back({ca, bc, t[2]});
            tris.push_back({ab, bc, ca});
        }
        return from_vertex_mesh(std::move(verts), std::move(tris), degree_);
    }

    // -- heterogeneity alignment -------------------------------------------

    // Triangles with sample points on both sides of the support boundary.
    std::vector<int> straddling_triangles(const RefractiveField& field) const {
        std::vector<int> out;
        if (!field.has_support()) return out;
        const auto& probe = straddle_probe_points();
        for (int t = 0; t < num_triangles(); ++t) {
            const auto& tri = triangles_[static_cast<std::size_t>(t)];
            const Vec2& a = vertex(tri[0]);
            const Vec2& b = vertex(tri[1]);
            const Vec2& c = vertex(tri[2]);
            bool any_in = false, any_out = false;
            for (const auto& q : probe) {
                const Vec2 p = q(0) * a + q(1) * b + q(2) * c;
                (field.in_support(p) ? any_in : any_out) = true;
            }
            if (any_in && any_out) out.push_back(t);
        }
        return out;
    }

    // -- Triangle-format I/O --------------------------------------------------

    void save(const std::string& basepath) const {
        std::ofstream nodef(basepath + ".node");
        std::ofstream elef(basepath + ".ele");
        if (!nodef || !elef) throw geometry_error("mesh save: cannot open '" + basepath + ".node/.ele' for writing");
        std::vector<char> on_boundary(vertices_.size(), 0);
        for (const auto& [a, b] : boundary_edges_) {
            on_boundary[static_cast<std::size_t>(a)] = 1;
            on_boundary[static_cast<std::size_t>(b)] = 1;
        }
        nodef << vertices_.size() << " 2 0 1\n";
        char buf[128];
        for (std::size_t i = 0; i < vertices_.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%zu %.17g %.17g %d\n", i + 1, vertices_[i].x(), vertices_[i].y(),
                          static_cast<int>(on_boundary[i]));
            nodef << buf;
        }
        elef << triangles_.size() << " 3 0\n";
        for (std::size_t i = 0; i < triangles_.size(); ++i)
            elef << i + 1 << ' ' << triangles_[i][0] + 1 << ' ' << triangles_[i][1] + 1 << ' ' << triangles_[i][2] + 1 << '\n';
    }

    static TriMesh load(const std::string& basepath, int degree) {
        std::ifstream nodef(basepath + ".node");
        if (!nodef) throw geometry_error("mesh load: cannot open '" + basepath + ".node'");
        std::size_t nv = 0;
        int dim = 0, nattr = 0, nmark = 0;
        if (!(nodef >> nv >> dim >> nattr >> nmark) || dim != 2)
            throw geometry_error("mesh load: malformed .node header in '" + basepath + ".node'");
        std::vector<Vec2> verts(nv);
        for (std::size_t i = 0; i < nv; ++i) {
            std::size_t idx;
            double x, y;
            if (!(nodef >> idx >> x >> y)) throw geometry_error("mesh load: truncated .node file");
            for (int a = 0; a < nattr + nmark; ++a) {
                double skip;
                if (!(nodef >> skip)) throw geometry_error("mesh load: truncated .node row");
            }
            if (idx < 1 || idx > nv) throw geometry_error("mesh load: node index out of range");
            verts[idx - 1] = Vec2(x, y);
        }
        std::ifstream elef(basepath + ".ele");
        if (!elef) throw geometry_error("mesh load: cannot open '" + basepath + ".ele'");
        std::size_t nt = 0;
        int per = 0, eattr = 0;
        if (!(elef >> nt >> per >> eattr) || per != 3)
            throw geometry_error("mesh load: malformed .ele header (expected 3-node triangles)");
        std::vector<std::array<int, 3>> tris(nt);
        for (std::size_t i = 0; i < nt; ++i) {
            std::size_t idx;
            int a, b, c;
            if (!(elef >> idx >> a >> b >> c)) throw geometry_error("mesh load: truncated .ele file");
            for (int q = 0; q < eattr; ++q) {
                double skip;
                if (!(elef >> skip)) throw geometry_error("mesh load: truncated .ele row");
            }
            if (idx < 1 || idx > nt) throw geometry_error("mesh load: element index out of range");
            tris[idx - 1] = {a - 1, b - 1, c - 1};
        }
        return from_vertex_mesh(std::move(verts), std::move(tris), degree);
    }

  private:
    friend TriMesh build_structured_mesh(const Rect&, int, int, const RefractiveField*, std::vector<int>*);

    static double segment_distance(const Vec2& a, const Vec2& b, const Vec2& p) {
        const Vec2 ab = b - a;
        const double t = std::clamp(ab.dot(p - a) / ab.squaredNorm(), 0.0, 1.0);
        return (a + t * ab - p).norm();
    }

    static const std::vector<Eigen::Vector3d>& straddle_probe_points() {
        // interior lattice, shrunk toward the centroid so aligned boundaries
        // never produce on-edge samples
        static const std::vector<Eigen::Vector3d> pts = [] {
            std::vector<Eigen::Vector3d> v;
            const int d = 5;
            const Eigen::Vector3d centroid(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0);
            for (int j = 0; j <= d; ++j)
                for (int i = 0; i <= d - j; ++i) {
                    const Eigen::Vector3d b(1.0 - static_cast<double>(i + j) / d, static_cast<double>(i) / d,
                                            static_cast<double>(j) / d);
                    v.push_back(0.92 * b + 0.08 * centroid);
                }
            return v;
        }();
        return pts;
    }

    void build(bool check) {
        const int nv = num_vertices();
        for (std::size_t t = 0; t < triangles_.size(); ++t) {
            const auto& tri = triangles_[t];
            for (int v : tri)
                if (v < 0 || v >= nv) throw geometry_error("mesh: triangle " + std::to_string(t) + " has vertex index out of range");
            if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
                throw geometry_error("mesh: triangle " + std::to_string(t) + " has repeated vertices");
            if (check && triangle_area(static_cast<int>(t)) <= 0.0)
                throw geometry_error("mesh orientation error: triangle " + std::to_string(t) +
                                     " is clockwise or degenerate (signed area <= 0)");
        }

        // directed edges: conformity requires every directed edge at most once
        std::map<std::pair<int, int>, int> directed;
        std::map<std::pair<int, int>, std::array<int, 2>> undirected;  // up to two incident (tri, local edge)
        for (std::size_t t = 0; t < triangles_.size(); ++t) {
            const auto& tri = triangles_[t];
            for (int e = 0; e < 3; ++e) {
                const int a = tri[static_cast<std::size_t>(e)], b = tri[static_cast<std::size_t>((e + 1) % 3)];
                if (check && !directed.emplace(std::make_pair(a, b), static_cast<int>(t)).second)
                    throw geometry_error("mesh conformity error: directed edge (" + std::to_string(a) + "," +
                                         std::to_string(b) + ") appears twice (triangle " + std::to_string(t) + ")");
                auto [it, fresh] = undirected.try_emplace(std::minmax(a, b), std::array<int, 2>{-1, -1});
                auto& inc = it->second;
                if (inc[0] < 0)
                    inc[0] = static_cast<int>(t) * 3 + e;
                else if (inc[1] < 0)
                    inc[1] = static_cast<int>(t) * 3 + e;
                else if (check)
                    throw geometry_error("mesh conformity error: edge shared by more than two triangles");
            }
        }

        neighbors_.assign(triangles_.size(), {-1, -1, -1});
        boundary_edges_.clear();
        for (const auto& [key, inc] : undirected) {
            if (inc[1] < 0) {
                boundary_edges_.push_back(key);
            } else {
                const int t0 = inc[0] / 3, e0 = inc[0] % 3, t1 = inc[1] / 3, e1 = inc[1] % 3;
                neighbors_[static_cast<std::size_t>(t0)][static_cast<std::size_t>(e0)] = t1;
                neighbors_[static_cast<std::size_t>(t1)][static_cast<std::size_t>(e1)] = t0;
            }
        }

        build_nodes(undirected);

        h_ = 0.0;
        for (const auto& [key, inc] : undirected)
            h_ = std::max(h_, (vertices_[static_cast<std::size_t>(key.first)] - vertices_[static_cast<std::size_t>(key.second)]).norm());
    }

    void build_nodes(const std::map<std::pair<int, int>, std::array<int, 2>>& undirected) {
        const int d = degree_;
        const auto& basis = LagrangeBasis::get(d);
        nodes_ = vertices_;

        std::map<std::pair<int, int>, int> edge_base;
        std::map<std::pair<int, int>, bool> edge_boundary;
        for (const auto& [key, inc] : undirected) {
            edge_boundary[key] = inc[1] < 0;
            if (d < 2) continue;
            edge_base[key] = static_cast<int>(nodes_.size());
            const Vec2& a = vertices_[static_cast<std::size_t>(key.first)];
            const Vec2& b = vertices_[static_cast<std::size_t>(key.second)];
            for (int s = 1; s < d; ++s) nodes_.push_back(a + (b - a) * (static_cast<double>(s) / d));
        }

        element_nodes_.assign(triangles_.size(), {});
        for (std::size_t t = 0; t < triangles_.size(); ++t) {
            const auto& tri = triangles_[t];
            auto& en = element_nodes_[t];
            en.resize(static_cast<std::size_t>(basis.size()));
            int local = 0;
            for (const auto& ij : basis.lattice()) {
                const int i = ij[0], j = ij[1];
                int id;
                if (i == 0 && j == 0)
                    id = tri[0];
                else if (i == d && j == 0)
                    id = tri[1];
                else if (i == 0 && j == d)
                    id = tri[2];
                else if (j == 0)
                    id = edge_node(edge_base, d, tri[0], tri[1], i);
                else if (i + j == d)
                    id = edge_node(edge_base, d, tri[1], tri[2], j);
                else if (i == 0)
                    id = edge_node(edge_base, d, tri[0], tri[2], j);
                else {
                    id = static_cast<int>(nodes_.size());
                    const Vec2 p = (1.0 - static_cast<double>(i + j) / d) * vertices_[static_cast<std::size_t>(tri[0])] +
                                   (static_cast<double>(i) / d) * vertices_[static_cast<std::size_t>(tri[1])] +
                                   (static_cast<double>(j) / d) * vertices_[static_cast<std::size_t>(tri[2])];
                    nodes_.push_back(p);
                }
                en[static_cast<std::size_t>(local++)] = id;
            }
        }

        // Dirichlet nodes: everything on a boundary edge
        std::vector<char> dirichlet(nodes_.size(), 0);
        for (const auto& [key, is_bnd] : edge_boundary) {
            if (!is_bnd) continue;
            dirichlet[static_cast<std::size_t>(key.first)] = 1;
            dirichlet[static_cast<std::size_t>(key.second)] = 1;
            if (d >= 2) {
                const int base = edge_base.at(key);
                for (int s = 0; s < d - 1; ++s) dirichlet[static_cast<std::size_t>(base + s)] = 1;
            }
        }
        free_nodes_.clear();
        dirichlet_nodes_.clear();
        free_index_.assign(nodes_.size(), -1);
        dirichlet_index_.assign(nodes_.size(), -1);
        for (std::size_t n = 0; n < nodes_.size(); ++n) {
            if (dirichlet[n]) {
                dirichlet_index_[n] = static_cast<int>(dirichlet_nodes_.size());
                dirichlet_nodes_.push_back(static_cast<int>(n));
            } else {
                free_index_[n] = static_cast<int>(free_nodes_.size());
                free_nodes_.push_back(static_cast<int>(n));
            }
        }
    }

    // Edge-interior node ids count from the smaller vertex id; 'step' counts
    // lattice steps from 'from' towards 'to'.
    static int edge_node(const std::map<std::pair<int, int>, int>& edge_base, int degree, int from, int to, int step) {
        const auto key = std::minmax(from, to);
        const int pos = (from == key.first) ? step : degree - step;
        return edge_base.at(key) + pos - 1;
    }

    std::vector<Vec2> vertices_;
    std::vector<std::array<int, 3>> triangles_;
    int degree_ = 1;
    double h_ = 0.0;

    std::vector<Vec2> nodes_;
    std::vector<std::vector<int>> element_nodes_;
    std::vector<int> free_nodes_, dirichlet_nodes_;
    std::vector<int> free_index_, dirichlet_index_;
    std::vector<std::array<int, 3>> neighbors_;
    std::vector<std::pair<int, int>> boundary_edges_;
};

// Uniform mesh of a rectangle: the base grid uses the smallest integer cell
// counts matching the aspect ratio, each refinement level quadrisects every
// triangle (equivalently doubles the grid).  When a heterogeneity is given,
// triangles straddling its support boundary are reported through
// straddle_out; straddling is a warning, not a failure (smooth supports
// cannot be aligned by a structured grid).
inline TriMesh build_structured_mesh(const Rect& rect, int level, int degree,
                                     const RefractiveField* hetero = nullptr,
                                     std::vector<int>* straddle_out = nullptr) {
    if (degree < 1 || degree > 4) throw std::invalid_argument("build_structured_mesh: degree must be in {1,2,3,4}");
    if (level < 0) throw std::invalid_argument("build_structured_mesh: level must be >= 0");
    if (!(rect.width() > 0.0) || !(rect.height() > 0.0)) throw geometry_error("build_structured_mesh: empty rectangle");

    const double aspect = rect.width() / rect.height();
    int nx0 = 1, ny0 = 1;
    for (int q = 1; q <= 48; ++q) {
        const double p = aspect * q;
        if (std::abs(p - std::round(p)) < 1e-9 * std::max(1.0, p) && std::round(p) >= 1.0) {
            nx0 = static_cast<int>(std::round(p));
            ny0 = q;
            break;
        }
    }
    const int nx = nx0 << level, ny = ny0 << level;

    std::vector<Vec2> verts;
    verts.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            verts.emplace_back(rect.xmin + rect.width() * i / nx, rect.ymin + rect.height() * j / ny);

    auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
    std::vector<std::array<int, 3>> tris;
    tris.reserve(static_cast<std::size_t>(2 * nx * ny));
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            tris.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
            tris.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
        }

    TriMesh mesh = TriMesh::from_vertex_mesh(std::move(verts), std::move(tris), degree);
    if (hetero && straddle_out) *straddle_out = mesh.straddling_triangles(*hetero);
    return mesh;
}

struct NestingReport {
    bool ok = true;
    std::string message;
    Vec2 offending = Vec2::Zero();
    double clearance_gamma_sigma = 0.0;   // min distance from Gamma to the mesh boundary
    double clearance_hetero_gamma = std::numeric_limits<double>::infinity();
};

// Checks the nesting support(n) in Omega_1 (interior of Gamma) and
// Gamma strictly inside the meshed polygon Omega_2, by sampling.
inline NestingReport validate_nesting(const SmoothCurve& gamma, const TriMesh& mesh, const RefractiveField& hetero,
                                      int samples = 720) {
    NestingReport rep;
    rep.clearance_gamma_sigma = std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i) {
        const double t = 2.0 * M_PI * i / samples;
        const Vec2 p = gamma.position(t);
        if (!mesh.locate(p)) {
            rep.ok = false;
            rep.offending = p;
            rep.message = "Gamma leaves the FEM domain at t = " + std::to_string(t) + " (point " +
                          std::to_string(p.x()) + ", " + std::to_string(p.y()) + ")";
            return rep;
        }
        rep.clearance_gamma_sigma = std::min(rep.clearance_gamma_sigma, mesh.distance_to_boundary(p));
    }
    if (rep.clearance_gamma_sigma <= 0.0) {
        rep.ok = false;
        rep.message = "Gamma touches the FEM boundary Sigma";
        return rep;
    }
    if (hetero.has_support()) {
        for (const Vec2& p : hetero.support_boundary(samples)) {
            if (!gamma.contains(p)) {
                rep.ok = false;
                rep.offending = p;
                rep.message = "heterogeneity support leaves the interior of Gamma at (" + std::to_string(p.x()) +
                              ", " + std::to_string(p.y()) + ")";
                return rep;
            }
            rep.clearance_hetero_gamma = std::min(rep.clearance_hetero_gamma, gamma.distance_to(p, 1024));
        }
        if (rep.clearance_hetero_gamma <= 0.0) {
            rep.ok = false;
            rep.message = "heterogeneity support touches Gamma";
            return rep;
        }
    }
    return rep;
}

}  // namespace fembem
