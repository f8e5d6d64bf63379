#pragma once

// Pure simplicial complexes with vertex coordinates: faces, stars and links,
// the discrete-domain conditions, the local Delaunay test and a brute-force
// Delaunay generator used as an independent oracle.

#include <algorithm>
#include <cstdint>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "liouville/detail/lp.hpp"
#include "liouville/geometry.hpp"

namespace liouville {

using VertexId = std::int64_t;
/// Sorted vertex ids of a simplex.
using Simplex = std::vector<VertexId>;
using Edge = std::pair<VertexId, VertexId>;
/// A vertex bijection φ: V → V'.
using VertexMap = std::map<VertexId, VertexId>;

inline Edge make_edge(VertexId a, VertexId b) { return a < b ? Edge{a, b} : Edge{b, a}; }

inline Simplex sorted_simplex(Simplex s) {
    std::sort(s.begin(), s.end());
    return s;
}

/// Only top-dimensional cells are stored; lower faces are derived, so the complex is pure by construction.
struct GeometricComplex {
    int dim = 0;
    std::map<VertexId, Point> vertices;
    std::set<Simplex> cells;

    GeometricComplex() = default;

    GeometricComplex(int dimension, std::map<VertexId, Point> verts, const std::vector<Simplex>& top_cells)
        : dim(dimension), vertices(std::move(verts)) {
        for (const auto& [id, p] : vertices) {
            if (p.size() != dim) throw Error(ErrorKind::DimensionMismatch, "vertex " + std::to_string(id) + " has wrong dimension");
            if (!p.allFinite()) throw Error(ErrorKind::Degenerate, "vertex " + std::to_string(id) + " is not finite");
        }
        for (const auto& c : top_cells) add_cell(c);
    }

    void add_cell(const Simplex& cell) {
        Simplex s = sorted_simplex(cell);
        if (static_cast<int>(s.size()) != dim + 1)
            throw Error(ErrorKind::DimensionMismatch, "cells must have n+1 vertices");
        if (std::adjacent_find(s.begin(), s.end()) != s.end())
            throw Error(ErrorKind::DegenerateSimplex, "cell repeats a vertex");
        for (VertexId v : s)
            if (!vertices.contains(v)) throw Error(ErrorKind::UnknownVertex, "cell references vertex " + std::to_string(v));
        if (!cells.insert(std::move(s)).second) throw Error(ErrorKind::DegenerateSimplex, "duplicate cell");
    }

    std::vector<Point> points(const Simplex& s) const {
        std::vector<Point> out;
        out.reserve(s.size());
        for (VertexId v : s) out.push_back(vertices.at(v));
        return out;
    }

    double length(VertexId a, VertexId b) const { return (vertices.at(a) - vertices.at(b)).norm(); }

    double diameter() const {
        std::vector<Point> pts;
        for (const auto& [id, p] : vertices) pts.push_back(p);
        return pts.empty() ? 0.0 : detail::diameter(pts);
    }
};

using EdgeLengths = std::map<Edge, double>;

/// Combinatorics plus one positive length per edge; no coordinates.
struct EdgeLengthManifold {
    int dim = 0;
    std::set<Simplex> cells;
    EdgeLengths lengths;

    double length(VertexId a, VertexId b) const {
        auto it = lengths.find(make_edge(a, b));
        if (it == lengths.end())
            throw Error(ErrorKind::MissingLength, "no length for edge " + std::to_string(a) + "-" + std::to_string(b));
        return it->second;
    }
};

inline EdgeLengthManifold edge_length_manifold(const GeometricComplex& k);

// ---------------------------------------------------------------------------
// Faces and incidence

namespace detail {

inline void k_subsets(const Simplex& s, std::size_t k, std::size_t start, Simplex& current, std::vector<Simplex>& out) {
    if (current.size() == k) {
        out.push_back(current);
        return;
    }
    for (std::size_t i = start; i + (k - current.size()) <= s.size(); ++i) {
        current.push_back(s[i]);
        k_subsets(s, k, i + 1, current, out);
        current.pop_back();
    }
}

}  // namespace detail

/// All subsets of `s` with `size` elements, in lexicographic order.
inline std::vector<Simplex> subsets(const Simplex& s, std::size_t size) {
    std::vector<Simplex> out;
    Simplex current;
    detail::k_subsets(s, size, 0, current, out);
    return out;
}

/// k-dimensional faces (k+1 vertices).
inline std::set<Simplex> faces(const std::set<Simplex>& cells, int k) {
    std::set<Simplex> out;
    for (const auto& c : cells)
        for (auto& f : subsets(c, static_cast<std::size_t>(k + 1))) out.insert(std::move(f));
    return out;
}

inline std::set<Simplex> faces(const GeometricComplex& k_complex, int k) { return faces(k_complex.cells, k); }

/// k-face → cells containing it.
inline std::map<Simplex, std::vector<Simplex>> face_incidence(const std::set<Simplex>& cells, int k) {
    std::map<Simplex, std::vector<Simplex>> out;
    for (const auto& c : cells)
        for (auto& f : subsets(c, static_cast<std::size_t>(k + 1))) out[std::move(f)].push_back(c);
    return out;
}

inline std::map<Simplex, std::vector<Simplex>> face_incidence(const GeometricComplex& k_complex, int k) {
    return face_incidence(k_complex.cells, k);
}

inline std::vector<Simplex> incident_cells(const GeometricComplex& k_complex, const Simplex& face) {
    const Simplex f = sorted_simplex(face);
    std::vector<Simplex> out;
    for (const auto& c : k_complex.cells)
        if (std::includes(c.begin(), c.end(), f.begin(), f.end())) out.push_back(c);
    return out;
}

inline std::vector<Edge> edges(const std::set<Simplex>& cells) {
    std::vector<Edge> out;
    for (const auto& f : faces(cells, 1)) out.emplace_back(f[0], f[1]);
    return out;
}

inline std::vector<Edge> edges(const GeometricComplex& k_complex) { return edges(k_complex.cells); }

// ---------------------------------------------------------------------------
// Geometric validity

enum class DefectKind { DegenerateCell, DuplicateVertex, ImproperIntersection };

struct Defect {
    DefectKind kind;
    std::vector<VertexId> ids;  // the cell, the vertex pair, or both cells concatenated
    std::string description;
};

namespace detail {

/// Do two n-simplices meet outside their common face? The LP maximizes the barycentric weight
/// a common point can carry on the vertices of `a` that `b` lacks; it is zero iff a ∩ b lies in
/// the shared face.
inline bool improper_intersection(const GeometricComplex& k, const Simplex& a, const Simplex& b, double weight = 1e-7) {
    const auto n = static_cast<Eigen::Index>(k.dim);
    const auto na = static_cast<Eigen::Index>(a.size()), nb = static_cast<Eigen::Index>(b.size());
    Matrix lhs = Matrix::Zero(n + 2, na + nb);
    Vector rhs = Vector::Zero(n + 2);
    Vector objective = Vector::Zero(na + nb);
    // center coordinates for conditioning
    const Point shift = k.vertices.at(a[0]);
    for (Eigen::Index i = 0; i < na; ++i) {
        const VertexId v = a[static_cast<std::size_t>(i)];
        lhs.block(0, i, n, 1) = k.vertices.at(v) - shift;
        lhs(n, i) = 1.0;
        if (!std::binary_search(b.begin(), b.end(), v)) objective(i) = 1.0;
    }
    for (Eigen::Index j = 0; j < nb; ++j) {
        lhs.block(0, na + j, n, 1) = shift - k.vertices.at(b[static_cast<std::size_t>(j)]);
        lhs(n + 1, na + j) = 1.0;
    }
    const double extent = lhs.topRows(n).cwiseAbs().maxCoeff();
    if (extent > 0.0) lhs.topRows(n) /= extent;
    rhs(n) = 1.0;
    rhs(n + 1) = 1.0;
    const auto best = lp_maximize(lhs, rhs, objective);
    return best && *best > weight;
}

inline bool boxes_overlap(const GeometricComplex& k, const Simplex& a, const Simplex& b, double slack) {
    const auto n = k.dim;
    Point lo_a = Point::Constant(n, 1e300), hi_a = Point::Constant(n, -1e300);
    Point lo_b = lo_a, hi_b = hi_a;
    for (VertexId v : a) {
        lo_a = lo_a.cwiseMin(k.vertices.at(v));
        hi_a = hi_a.cwiseMax(k.vertices.at(v));
    }
    for (VertexId v : b) {
        lo_b = lo_b.cwiseMin(k.vertices.at(v));
        hi_b = hi_b.cwiseMax(k.vertices.at(v));
    }
    return ((lo_a.array() - slack) <= hi_b.array()).all() && ((lo_b.array() - slack) <= hi_a.array()).all();
}

}  // namespace detail

/// Degenerate cells, near-duplicate vertices and cell pairs meeting outside a common face.
inline std::vector<Defect> validate_geometry(const GeometricComplex& k, double tolerance = tol::kDegeneracy) {
    std::vector<Defect> defects;
    std::set<Simplex> degenerate;
    for (const auto& c : k.cells) {
        if (!detail::affinely_independent(k.points(c))) {
            degenerate.insert(c);
            defects.push_back({DefectKind::DegenerateCell, c, "cell is affinely dependent"});
        }
    }
    const double scale = std::max(k.diameter(), tol::kAbsoluteFloor);
    for (auto i = k.vertices.begin(); i != k.vertices.end(); ++i)
        for (auto j = std::next(i); j != k.vertices.end(); ++j)
            if ((i->second - j->second).norm() < tolerance * scale)
                defects.push_back({DefectKind::DuplicateVertex, {i->first, j->first}, "vertices coincide"});

    const std::vector<Simplex> cells(k.cells.begin(), k.cells.end());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (degenerate.contains(cells[i])) continue;
        for (std::size_t j = i + 1; j < cells.size(); ++j) {
            if (degenerate.contains(cells[j])) continue;
            if (!detail::boxes_overlap(k, cells[i], cells[j], tolerance * scale)) continue;
            if (detail::improper_intersection(k, cells[i], cells[j]) || detail::improper_intersection(k, cells[j], cells[i])) {
                std::vector<VertexId> ids = cells[i];
                ids.insert(ids.end(), cells[j].begin(), cells[j].end());
                defects.push_back({DefectKind::ImproperIntersection, ids, "cells intersect outside a common face"});
            }
        }
    }
    return defects;
}

// ---------------------------------------------------------------------------
// Discrete domains

/// Combinatorial criterion: v is interior iff every (n-1)-face containing v lies in exactly two cells.
inline std::set<VertexId> interior_vertices(const std::set<Simplex>& top_cells, int dim) {
    std::set<VertexId> in_cells, on_boundary;
    for (const auto& c : top_cells) in_cells.insert(c.begin(), c.end());
    for (const auto& [face, cells] : face_incidence(top_cells, dim - 1))
        if (cells.size() != 2) on_boundary.insert(face.begin(), face.end());
    std::set<VertexId> out;
    std::set_difference(in_cells.begin(), in_cells.end(), on_boundary.begin(), on_boundary.end(),
                        std::inserter(out, out.end()));
    return out;
}

inline std::set<VertexId> interior_vertices(const GeometricComplex& k) { return interior_vertices(k.cells, k.dim); }

inline std::set<Simplex> boundary_faces(const GeometricComplex& k) {
    std::set<Simplex> out;
    for (const auto& [face, cells] : face_incidence(k, k.dim - 1))
        if (cells.size() == 1) out.insert(face);
    return out;
}

struct DomainReport {
    bool pure = false;
    bool every_cell_has_interior_vertex = false;
    bool interior_subgraph_connected = false;
    std::set<VertexId> interior_vertices;
    std::set<Simplex> boundary_faces;
    std::vector<Simplex> cells_without_interior_vertex;
    bool verdict = false;
};

inline DomainReport is_discrete_domain(const GeometricComplex& k) {
    DomainReport r;
    r.pure = !k.cells.empty();
    r.interior_vertices = interior_vertices(k);
    r.boundary_faces = boundary_faces(k);
    for (const auto& c : k.cells)
        if (std::none_of(c.begin(), c.end(), [&](VertexId v) { return r.interior_vertices.contains(v); }))
            r.cells_without_interior_vertex.push_back(c);
    r.every_cell_has_interior_vertex = r.pure && r.cells_without_interior_vertex.empty();

    if (!r.interior_vertices.empty()) {
        std::map<VertexId, std::vector<VertexId>> adjacency;
        for (const auto& [a, b] : edges(k))
            if (r.interior_vertices.contains(a) && r.interior_vertices.contains(b)) {
                adjacency[a].push_back(b);
                adjacency[b].push_back(a);
            }
        std::set<VertexId> seen{*r.interior_vertices.begin()};
        std::queue<VertexId> queue;
        queue.push(*r.interior_vertices.begin());
        while (!queue.empty()) {
            const VertexId v = queue.front();
            queue.pop();
            for (VertexId w : adjacency[v])
                if (seen.insert(w).second) queue.push(w);
        }
        r.interior_subgraph_connected = seen.size() == r.interior_vertices.size();
    }
    r.verdict = r.pure && r.every_cell_has_interior_vertex && r.interior_subgraph_connected;
    return r;
}

// ---------------------------------------------------------------------------
// Local Delaunay condition

struct DelaunayViolation {
    Simplex cell;
    VertexId vertex;
    double depth;  // (|x - center| - radius) / radius, negative inside
};

struct DelaunayReport {
    bool verdict = true;
    std::vector<DelaunayViolation> violations;
    int cospherical_count = 0;
    int symmetry_mismatches = 0;  // only counted with check_symmetry
};

struct DelaunayOptions {
    double tolerance = tol::kInBall;
    /// Also test the reverse direction of every shared face and count disagreements.
    bool check_symmetry = false;
};

namespace detail {

inline VertexId opposite_vertex(const Simplex& cell, const Simplex& face) {
    for (VertexId v : cell)
        if (!std::binary_search(face.begin(), face.end(), v)) return v;
    throw Error(ErrorKind::Degenerate, "face is not a proper face of the cell");
}

}  // namespace detail

/// One in-ball test per interior (n-1)-face; cospherical configurations are not violations.
inline DelaunayReport is_locally_delaunay(const GeometricComplex& k, const DelaunayOptions& options = {}) {
    DelaunayReport r;
    std::map<Simplex, Sphere> spheres;
    auto sphere_of = [&](const Simplex& c) -> const Sphere& {
        auto it = spheres.find(c);
        if (it == spheres.end()) it = spheres.emplace(c, circumsphere(k.points(c))).first;
        return it->second;
    };
    for (const auto& [face, cells] : face_incidence(k, k.dim - 1)) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            for (std::size_t j = i + 1; j < cells.size(); ++j) {
                const Simplex& sigma = cells[i];
                const Simplex& other = cells[j];
                const VertexId apex = detail::opposite_vertex(other, face);
                const Sphere& s = sphere_of(sigma);
                const Point& x = k.vertices.at(apex);
                const BallSide side = in_open_ball(s, x, options.tolerance);
                if (side == BallSide::OnSphere) ++r.cospherical_count;
                if (side == BallSide::Inside)
                    r.violations.push_back({sigma, apex, ((x - s.center).norm() - s.radius) / s.radius});
                if (options.check_symmetry) {
                    const BallSide back = in_open_ball(sphere_of(other), k.vertices.at(detail::opposite_vertex(sigma, face)),
                                                       options.tolerance);
                    if ((back == BallSide::Inside) != (side == BallSide::Inside)) ++r.symmetry_mismatches;
                }
            }
    }
    r.verdict = r.violations.empty();
    return r;
}

// ---------------------------------------------------------------------------
// Stars, links, isomorphisms

inline GeometricComplex star(const GeometricComplex& k, VertexId v) {
    if (!k.vertices.contains(v)) throw Error(ErrorKind::UnknownVertex, "vertex " + std::to_string(v));
    GeometricComplex out;
    out.dim = k.dim;
    for (const auto& c : k.cells)
        if (std::binary_search(c.begin(), c.end(), v)) {
            for (VertexId w : c) out.vertices.emplace(w, k.vertices.at(w));
            out.cells.insert(c);
        }
    return out;
}

/// Faces of the star cells opposite v.
inline std::set<Simplex> link(const GeometricComplex& k, VertexId v) {
    std::set<Simplex> out;
    for (const auto& c : star(k, v).cells) {
        Simplex f;
        for (VertexId w : c)
            if (w != v) f.push_back(w);
        out.insert(std::move(f));
    }
    return out;
}

inline Simplex map_simplex(const Simplex& s, const VertexMap& phi) {
    Simplex out;
    out.reserve(s.size());
    for (VertexId v : s) out.push_back(phi.at(v));
    return sorted_simplex(std::move(out));
}

inline VertexMap identity_map(const GeometricComplex& k) {
    VertexMap phi;
    for (const auto& [id, p] : k.vertices) phi.emplace(id, id);
    return phi;
}

/// φ is a bijection V → V' that maps cells onto cells.
inline bool check_isomorphism(const GeometricComplex& k, const GeometricComplex& k2, const VertexMap& phi) {
    if (k.dim != k2.dim || phi.size() != k.vertices.size() || k.vertices.size() != k2.vertices.size()) return false;
    std::set<VertexId> image;
    for (const auto& [id, p] : k.vertices) {
        auto it = phi.find(id);
        if (it == phi.end() || !k2.vertices.contains(it->second)) return false;
        image.insert(it->second);
    }
    if (image.size() != k2.vertices.size()) return false;
    if (k.cells.size() != k2.cells.size()) return false;
    for (const auto& c : k.cells)
        if (!k2.cells.contains(map_simplex(c, phi))) return false;
    return true;
}

inline EdgeLengthManifold edge_length_manifold(const GeometricComplex& k) {
    EdgeLengthManifold m{k.dim, k.cells, {}};
    for (const auto& [a, b] : edges(k)) m.lengths[{a, b}] = k.length(a, b);
    return m;
}

/// Faces of the cells containing v, opposite v.
inline std::set<Simplex> link(const std::set<Simplex>& cells, VertexId v) {
    std::set<Simplex> out;
    for (const auto& c : cells)
        if (std::binary_search(c.begin(), c.end(), v)) {
            Simplex f;
            for (VertexId w : c)
                if (w != v) f.push_back(w);
            out.insert(std::move(f));
        }
    return out;
}

inline GeometricComplex mirror(const GeometricComplex& k) {
    GeometricComplex out = k;
    for (auto& [id, p] : out.vertices) p(0) = -p(0);
    return out;
}

// ---------------------------------------------------------------------------

/// Every affinely independent (n+1)-subset whose open circumball holds no other input point.
/// Vertex ids are the input indices. Cospherical inputs may yield overlapping cells.
inline GeometricComplex brute_force_delaunay(std::span<const Point> points, double tolerance = tol::kInBall) {
    if (points.empty()) throw Error(ErrorKind::TooFewPoints, "no points");
    const int n = static_cast<int>(points.front().size());
    if (static_cast<int>(points.size()) < n + 1) throw Error(ErrorKind::TooFewPoints, "need at least n+1 points");
    std::map<VertexId, Point> verts;
    for (std::size_t i = 0; i < points.size(); ++i) verts.emplace(static_cast<VertexId>(i), points[i]);
    GeometricComplex out(n, std::move(verts), {});

    Simplex all(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) all[i] = static_cast<VertexId>(i);
    for (const auto& candidate : subsets(all, static_cast<std::size_t>(n + 1))) {
        const auto pts = out.points(candidate);
        if (!detail::affinely_independent(pts)) continue;
        const Sphere s = circumsphere(pts);
        bool empty = true;
        for (std::size_t i = 0; i < points.size() && empty; ++i) {
            if (std::binary_search(candidate.begin(), candidate.end(), static_cast<VertexId>(i))) continue;
            if (in_open_ball(s, points[i], tolerance) == BallSide::Inside) empty = false;
        }
        if (empty) out.cells.insert(candidate);
    }
    return out;
}

}  // namespace liouville
