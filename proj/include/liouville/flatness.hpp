#pragma once

// Discrete conformal flatness at a vertex: the link of v, inverted in the unit
// sphere about v, must be a convex polyhedron whose edge lengths are
// ℓ_ij / (ℓ_0i ℓ_0j). Embedded stars are checked directly; abstract links are
// realized numerically (n = 3) or by the polygon inequalities (n = 2).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "liouville/complex.hpp"

namespace liouville {

/// Image of a vertex link under the unit inversion at the vertex.
struct LinkPolyhedron {
    int dim = 0;
    std::map<VertexId, Point> vertices;
    std::set<Simplex> facets;

    double diameter() const {
        std::vector<Point> pts;
        for (const auto& [id, p] : vertices) pts.push_back(p);
        return pts.empty() ? 0.0 : detail::diameter(pts);
    }
};

using TildeLengths = std::map<Edge, double>;

/// ℓ̃_ij = ℓ_ij / (ℓ_0i ℓ_0j) for every edge of the link of v0.
inline TildeLengths tilde_lengths(const EdgeLengths& lengths, VertexId v0, const std::set<Simplex>& link_facets) {
    auto get = [&](VertexId a, VertexId b) {
        auto it = lengths.find(make_edge(a, b));
        if (it == lengths.end())
            throw Error(ErrorKind::MissingLength, "no length for edge " + std::to_string(a) + "-" + std::to_string(b));
        if (!(it->second > 0.0)) throw Error(ErrorKind::Degenerate, "edge lengths must be positive");
        return it->second;
    };
    TildeLengths out;
    for (const auto& facet : link_facets)
        for (const auto& e : subsets(facet, 2)) {
            const Edge key = make_edge(e[0], e[1]);
            if (!out.contains(key)) out[key] = get(e[0], e[1]) / (get(v0, e[0]) * get(v0, e[1]));
        }
    return out;
}

inline TildeLengths tilde_lengths(const GeometricComplex& k, VertexId v0) {
    return tilde_lengths(edge_length_manifold(star(k, v0)).lengths, v0, link(k, v0));
}

inline LinkPolyhedron inverted_link_polyhedron(const GeometricComplex& k, VertexId v) {
    if (!interior_vertices(k).contains(v)) throw Error(ErrorKind::NotInterior, "vertex " + std::to_string(v) + " is not interior");
    const GeometricComplex s = star(k, v);
    const Point& center = k.vertices.at(v);
    const double floor = tol::kDegeneracy * s.diameter();
    LinkPolyhedron p;
    p.dim = k.dim;
    p.facets = link(k, v);
    for (const auto& [id, x] : s.vertices) {
        if (id == v) continue;
        const Point d = x - center;
        if (d.norm() <= floor) throw Error(ErrorKind::DegenerateStar, "link vertex coincides with the star center");
        p.vertices.emplace(id, center + d / d.squaredNorm());
    }
    return p;
}

struct ConvexityCertificate {
    bool convex = false;
    std::map<Simplex, Point> outward_normals;
    std::map<Simplex, double> min_clearance;  // smallest distance of a non-facet vertex below the facet plane
    int on_plane_count = 0;                   // vertex/facet pairs inside the tolerance band
};

/// Supporting-hyperplane test: every facet plane has all other vertices on one side.
/// Vertices within tolerance · diameter of a plane are counted as on-plane, not as violations.
inline ConvexityCertificate is_convex_polyhedron(const LinkPolyhedron& p, double tolerance = tol::kConvexity) {
    ConvexityCertificate cert;
    cert.convex = !p.facets.empty();
    const double band = std::max(tolerance * p.diameter(), tol::kAbsoluteFloor);
    for (const auto& facet : p.facets) {
        std::vector<Point> pts;
        for (VertexId id : facet) pts.push_back(p.vertices.at(id));
        if (static_cast<int>(pts.size()) != p.dim || !detail::affinely_independent(pts))
            throw Error(ErrorKind::DegenerateFacet, "facet does not span a hyperplane");
        Eigen::JacobiSVD<Matrix> svd(detail::edge_matrix(pts), Eigen::ComputeFullU);
        Point normal = svd.matrixU().col(p.dim - 1);

        double lo = 0.0, hi = 0.0;
        bool any_off_plane = false;
        std::vector<double> dist;
        for (const auto& [id, x] : p.vertices) {
            if (std::binary_search(facet.begin(), facet.end(), id)) continue;
            const double d = normal.dot(x - pts[0]);
            dist.push_back(d);
            lo = std::min(lo, d);
            hi = std::max(hi, d);
            if (std::abs(d) <= band)
                ++cert.on_plane_count;
            else
                any_off_plane = true;
        }
        if (hi > band && lo < -band) cert.convex = false;
        if (!any_off_plane) cert.convex = false;  // flat: not a full-dimensional polyhedron
        if (hi > band) {
            normal = -normal;
            for (double& d : dist) d = -d;
        }
        double clearance = std::numeric_limits<double>::infinity();
        for (double d : dist) clearance = std::min(clearance, -d);
        cert.outward_normals.emplace(facet, normal);
        cert.min_clearance.emplace(facet, clearance);
    }
    return cert;
}

/// Embedded flatness test at an interior vertex: is the inverted link convex?
inline bool flatness_check_embedded(const GeometricComplex& k, VertexId v, double tolerance = tol::kConvexity) {
    return is_convex_polyhedron(inverted_link_polyhedron(k, v), tolerance).convex;
}

/// A convex polygon with these side lengths exists iff each is strictly less than the sum of the others.
inline bool polygon_inequality_check(std::span<const double> lengths) {
    if (lengths.size() < 3) throw Error(ErrorKind::TooFewEdges, "a polygon needs at least three sides");
    double total = 0.0;
    for (double l : lengths) {
        if (!(l > 0.0)) throw Error(ErrorKind::Degenerate, "side lengths must be positive");
        total += l;
    }
    return std::all_of(lengths.begin(), lengths.end(), [&](double l) { return l < total - l; });
}

struct FlatnessReport {
    std::map<VertexId, bool> per_vertex;
    bool overall = true;
    std::vector<std::string> warnings;
};

inline FlatnessReport is_conformally_flat(const GeometricComplex& k, double tolerance = tol::kConvexity) {
    FlatnessReport r;
    for (VertexId v : interior_vertices(k)) {
        const bool flat = flatness_check_embedded(k, v, tolerance);
        r.per_vertex[v] = flat;
        r.overall = r.overall && flat;
    }
    if (r.per_vertex.empty()) r.warnings.emplace_back("complex has no interior vertices; flatness holds vacuously");
    return r;
}

// ---------------------------------------------------------------------------
// Abstract links (lengths only)

namespace detail {

/// Closed connected triangulated surface with Euler characteristic 2.
inline bool is_triangulated_sphere(const std::set<Simplex>& facets) {
    if (facets.empty()) return false;
    for (const auto& f : facets)
        if (f.size() != 3) return false;
    const auto incidence = face_incidence(facets, 1);
    for (const auto& [edge, fs] : incidence)
        if (fs.size() != 2) return false;
    std::set<VertexId> verts;
    for (const auto& f : facets) verts.insert(f.begin(), f.end());
    const auto euler = static_cast<long>(verts.size()) - static_cast<long>(incidence.size()) + static_cast<long>(facets.size());
    if (euler != 2) return false;
    std::map<VertexId, std::vector<VertexId>> adj;
    for (const auto& [edge, fs] : incidence) {
        adj[edge[0]].push_back(edge[1]);
        adj[edge[1]].push_back(edge[0]);
    }
    std::set<VertexId> seen{*verts.begin()};
    std::vector<VertexId> todo{*verts.begin()};
    while (!todo.empty()) {
        const VertexId v = todo.back();
        todo.pop_back();
        for (VertexId w : adj[v])
            if (seen.insert(w).second) todo.push_back(w);
    }
    return seen.size() == verts.size();
}

/// Hinges of a triangulated sphere: (a, b, c, d) with facet (a, b, c) oriented consistently
/// and d the far vertex of the facet across edge ab.
inline std::vector<std::array<int, 4>> oriented_hinges(const std::set<Simplex>& facets, const std::map<VertexId, int>& index) {
    std::vector<std::array<VertexId, 3>> oriented;
    std::map<std::pair<VertexId, VertexId>, std::size_t> owner;  // directed edge -> oriented facet
    std::set<Simplex> done;
    std::vector<std::array<VertexId, 3>> todo{{(*facets.begin())[0], (*facets.begin())[1], (*facets.begin())[2]}};
    const auto incidence = face_incidence(facets, 1);
    while (!todo.empty()) {
        const auto f = todo.back();
        todo.pop_back();
        if (!done.insert(sorted_simplex({f[0], f[1], f[2]})).second) continue;
        oriented.push_back(f);
        for (int i = 0; i < 3; ++i) {
            const VertexId a = f[i], b = f[(i + 1) % 3];
            owner[{a, b}] = oriented.size() - 1;
            for (const auto& g : incidence.at(sorted_simplex({a, b}))) {
                if (done.contains(g)) continue;
                const VertexId c = g[0] != a && g[0] != b ? g[0] : g[1] != a && g[1] != b ? g[1] : g[2];
                todo.push_back({b, a, c});
            }
        }
    }
    std::vector<std::array<int, 4>> hinges;
    for (const auto& [edge, k] : owner) {
        const auto& f = oriented[k];
        const auto& g = oriented[owner.at({edge.second, edge.first})];
        const VertexId c = f[0] != edge.first && f[0] != edge.second ? f[0] : f[1] != edge.first && f[1] != edge.second ? f[1] : f[2];
        const VertexId d = g[0] != edge.first && g[0] != edge.second ? g[0] : g[1] != edge.first && g[1] != edge.second ? g[1] : g[2];
        hinges.push_back({index.at(edge.first), index.at(edge.second), index.at(c), index.at(d)});
    }
    return hinges;
}

/// Signed height of d above the plane of the oriented facet (a, b, c).
inline double hinge_height(const std::vector<Point>& x, const std::array<int, 4>& h) {
    const Eigen::Vector3d a = x[h[0]], b = x[h[1]], c = x[h[2]], d = x[h[3]];
    const Eigen::Vector3d n = (b - a).cross(c - a);
    return n.dot(d - a) / std::max(n.norm(), 1e-300);
}

/// Levenberg-Marquardt on Σ (|w_i - w_j| - target_ij)² plus, for each hinge, the squared
/// height of the far vertex above the facet plane on the outward side (zero when convex).
/// Returns the max absolute edge error.
inline double fit_edge_lengths(std::vector<Point>& pos, const std::vector<std::pair<int, int>>& edge_index,
                               const std::vector<double>& target, int max_iterations,
                               const std::vector<std::array<int, 4>>& hinges = {}, double outward = 1.0) {
    const int nv = static_cast<int>(pos.size());
    const int dim = static_cast<int>(pos.front().size());
    const int ne = static_cast<int>(edge_index.size());
    const int nh = static_cast<int>(hinges.size());
    auto residuals = [&](const std::vector<Point>& x) {
        Vector r(ne + nh);
        for (int e = 0; e < ne; ++e) r(e) = (x[edge_index[e].first] - x[edge_index[e].second]).norm() - target[e];
        for (int h = 0; h < nh; ++h) r(ne + h) = std::max(0.0, outward * hinge_height(x, hinges[h]));
        return r;
    };
    double step_size = 0.0;
    for (double t : target) step_size = std::max(step_size, t);
    step_size *= 1e-7;
    Vector r = residuals(pos);
    double cost = r.squaredNorm();
    double mu = 1e-3;
    for (int it = 0; it < max_iterations && r.cwiseAbs().maxCoeff() > 1e-15; ++it) {
        Matrix jac = Matrix::Zero(ne + nh, nv * dim);
        for (int e = 0; e < ne; ++e) {
            const auto [a, b] = edge_index[e];
            const Point d = pos[a] - pos[b];
            const double len = std::max(d.norm(), 1e-300);
            jac.block(e, a * dim, 1, dim) = d.transpose() / len;
            jac.block(e, b * dim, 1, dim) = -d.transpose() / len;
        }
        for (int h = 0; h < nh; ++h) {
            if (r(ne + h) == 0.0) continue;
            std::vector<Point> x = pos;
            for (int v : hinges[h])
                for (int c = 0; c < dim; ++c) {
                    const double keep = x[v](c);
                    x[v](c) = keep + step_size;
                    const double up = hinge_height(x, hinges[h]);
                    x[v](c) = keep - step_size;
                    const double down = hinge_height(x, hinges[h]);
                    x[v](c) = keep;
                    jac(ne + h, v * dim + c) = outward * (up - down) / (2.0 * step_size);
                }
        }
        const Matrix jtj = jac.transpose() * jac;
        const Vector g = jac.transpose() * r;
        bool improved = false;
        for (int tries = 0; tries < 30 && !improved; ++tries) {
            Matrix lhs = jtj;
            lhs.diagonal().array() += mu * (1.0 + jtj.diagonal().array());
            const Vector step = lhs.ldlt().solve(-g);
            std::vector<Point> trial = pos;
            for (int i = 0; i < nv; ++i) trial[i] += step.segment(i * dim, dim);
            const Vector tr = residuals(trial);
            if (tr.squaredNorm() < cost) {
                pos = std::move(trial);
                r = tr;
                const double old = cost;
                cost = r.squaredNorm();
                mu = std::max(mu / 3.0, 1e-15);
                improved = true;
                if (old - cost <= 1e-30 * (1.0 + old)) it = max_iterations;
            } else {
                mu *= 4.0;
            }
        }
        if (!improved) break;
    }
    return r.head(ne).cwiseAbs().maxCoeff();
}

}  // namespace detail

enum class RealizationStatus { Certified, Inconclusive };

struct Realization {
    RealizationStatus status = RealizationStatus::Inconclusive;
    LinkPolyhedron polyhedron;  // best attempt, certified or not
    double residual = 0.0;      // max |edge length - target|
    int attempts_used = 0;
};

struct RealizeOptions {
    int attempts = 12;
    std::uint64_t seed = 1;
    int max_iterations = 400;
};

/// Best-effort realization of an abstract link (triangulated 2-sphere) as a convex polyhedron
/// in R^3 with prescribed edge lengths. Certified means residual <= 1e-8 · mean(ℓ̃) and convex;
/// Inconclusive does not refute existence.
inline Realization realize_link_polyhedron(const std::set<Simplex>& link_facets, const TildeLengths& lengths,
                                           const RealizeOptions& options = {}) {
    if (!detail::is_triangulated_sphere(link_facets))
        throw Error(ErrorKind::NotASphere, "link is not a triangulated 2-sphere");
    std::vector<VertexId> ids;
    {
        std::set<VertexId> verts;
        for (const auto& f : link_facets) verts.insert(f.begin(), f.end());
        ids.assign(verts.begin(), verts.end());
    }
    std::map<VertexId, int> index;
    for (int i = 0; i < static_cast<int>(ids.size()); ++i) index[ids[static_cast<std::size_t>(i)]] = i;
    std::vector<std::pair<int, int>> edge_index;
    std::vector<double> target;
    double mean = 0.0;
    for (const auto& e : faces(link_facets, 1)) {
        auto it = lengths.find(make_edge(e[0], e[1]));
        if (it == lengths.end()) throw Error(ErrorKind::MissingLength, "link edge without a length");
        edge_index.emplace_back(index.at(e[0]), index.at(e[1]));
        target.push_back(it->second);
        mean += it->second;
    }
    mean /= static_cast<double>(target.size());

    // Spectral embedding of the link graph: Laplacian eigenvectors 1..3, pushed to the sphere.
    const int nv = static_cast<int>(ids.size());
    Matrix laplacian = Matrix::Zero(nv, nv);
    for (const auto& [a, b] : edge_index) {
        laplacian(a, b) -= 1.0;
        laplacian(b, a) -= 1.0;
        laplacian(a, a) += 1.0;
        laplacian(b, b) += 1.0;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(laplacian);
    std::vector<Point> base(static_cast<std::size_t>(nv));
    for (int i = 0; i < nv; ++i) {
        Point p = eig.eigenvectors().block(i, 1, 1, 3).transpose();
        base[static_cast<std::size_t>(i)] = p.norm() > 0 ? Point(p.normalized()) : Point(Point::Unit(3, 0));
    }

    const auto hinges = detail::oriented_hinges(link_facets, index);
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    Realization best;
    best.residual = std::numeric_limits<double>::infinity();
    for (int attempt = 0; attempt < options.attempts; ++attempt) {
        std::vector<Point> pos = base;
        const double jitter = attempt == 0 ? 0.0 : 0.15 * attempt;
        for (auto& p : pos) {
            for (int c = 0; c < 3; ++c) p(c) += jitter * noise(rng);
            if (p.norm() > 0) p.normalize();
        }
        double current = 0.0;
        for (std::size_t e = 0; e < edge_index.size(); ++e)
            current += (pos[static_cast<std::size_t>(edge_index[e].first)] - pos[static_cast<std::size_t>(edge_index[e].second)]).norm();
        const double s = mean * static_cast<double>(edge_index.size()) / std::max(current, 1e-300);
        for (auto& p : pos) p *= s;

        double residual = detail::fit_edge_lengths(pos, edge_index, target, options.max_iterations);
        auto certify = [&](double res) {
            LinkPolyhedron poly{3, {}, link_facets};
            for (int i = 0; i < nv; ++i) poly.vertices.emplace(ids[static_cast<std::size_t>(i)], pos[static_cast<std::size_t>(i)]);
            bool convex = false;
            if (res <= 1e-8 * mean) {
                try {
                    convex = is_convex_polyhedron(poly).convex;
                } catch (const Error&) {
                    convex = false;
                }
            }
            if (!convex && res < best.residual) {
                best.polyhedron = poly;
                best.residual = res;
            }
            return convex ? std::optional<LinkPolyhedron>(std::move(poly)) : std::nullopt;
        };
        if (auto poly = certify(residual)) return {RealizationStatus::Certified, std::move(*poly), residual, attempt + 1};
        // isometric but folded: push reflex hinges flat, then unfold
        double outward = 0.0;
        for (const auto& h : hinges) outward -= detail::hinge_height(pos, h);
        residual = detail::fit_edge_lengths(pos, edge_index, target, options.max_iterations, hinges, outward < 0 ? -1.0 : 1.0);
        if (auto poly = certify(residual)) return {RealizationStatus::Certified, std::move(*poly), residual, attempt + 1};
        best.attempts_used = attempt + 1;
    }
    return best;
}

enum class AbstractFlatness { Certified, Refuted, Inconclusive };

inline std::string_view to_string(AbstractFlatness f) {
    switch (f) {
    case AbstractFlatness::Certified: return "Certified";
    case AbstractFlatness::Refuted: return "Refuted";
    case AbstractFlatness::Inconclusive: return "Inconclusive";
    }
    return "?";
}

/// Flatness at an interior vertex of a lengths-only manifold. n = 2 is decided exactly by
/// the polygon inequalities; n = 3 is a best-effort realization; other dimensions are unsupported.
inline AbstractFlatness abstract_flatness_check(const EdgeLengthManifold& m, VertexId v, const RealizeOptions& options = {}) {
    if (!interior_vertices(m.cells, m.dim).contains(v))
        throw Error(ErrorKind::NotInterior, "vertex " + std::to_string(v) + " is not interior");
    const auto link_facets = link(m.cells, v);
    const TildeLengths tilde = tilde_lengths(m.lengths, v, link_facets);
    if (m.dim == 2) {
        std::vector<double> sides;
        for (const auto& [e, l] : tilde) sides.push_back(l);
        return polygon_inequality_check(sides) ? AbstractFlatness::Certified : AbstractFlatness::Refuted;
    }
    if (m.dim == 3)
        return realize_link_polyhedron(link_facets, tilde, options).status == RealizationStatus::Certified
                   ? AbstractFlatness::Certified
                   : AbstractFlatness::Inconclusive;
    throw Error(ErrorKind::DimensionMismatch, "abstract flatness is implemented for n = 2 and n = 3 only");
}

}  // namespace liouville
