#pragma once

// Conformal invariants from the induced hyperbolic structure: each euclidean
// simplex, read inside its circumsphere as an ideal hyperbolic simplex. For
// n = 3 the ideal tetrahedron is determined by the complex cross-ratio of its
// vertices on the sphere at infinity; its dihedral angles summed around an
// interior edge give the cone angle there.

#include <array>
#include <cmath>
#include <complex>
#include <concepts>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "liouville/complex.hpp"

namespace liouville {

/// (ℓ_ij ℓ_kl) / (ℓ_ik ℓ_jl), pairing (ij|kl) against (ik|jl).
template <std::invocable<VertexId, VertexId> LengthFn>
double length_cross_ratio(LengthFn&& length, VertexId i, VertexId j, VertexId k, VertexId l) {
    return (length(i, j) * length(k, l)) / (length(i, k) * length(j, l));
}

inline double length_cross_ratio(const EdgeLengths& lengths, VertexId i, VertexId j, VertexId k, VertexId l) {
    return length_cross_ratio(
        [&](VertexId a, VertexId b) {
            auto it = lengths.find(make_edge(a, b));
            if (it == lengths.end())
                throw Error(ErrorKind::MissingLength, "no length for edge " + std::to_string(a) + "-" + std::to_string(b));
            return it->second;
        },
        i, j, k, l);
}

/// Dihedral angles of the ideal tetrahedron spanned by the vertices v0..v3 on their
/// circumsphere. alpha sits on edges {0,3},{1,2}; beta on {1,3},{0,2}; gamma on {2,3},{0,1}.
struct IdealAngles {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;

    /// Angle at the edge between local vertex indices a and b (0..3).
    double at(int a, int b) const {
        if (a > b) std::swap(a, b);
        if ((a == 0 && b == 3) || (a == 1 && b == 2)) return alpha;
        if ((a == 1 && b == 3) || (a == 0 && b == 2)) return beta;
        return gamma;
    }

    double sum() const { return alpha + beta + gamma; }
};

namespace detail {

/// Point of the unit sphere maximizing the minimum distance to `points` over a fixed candidate set.
inline Point projection_pole(std::span<const Point> points) {
    std::vector<Point> candidates;
    Point centroid = Point::Zero(3);
    for (const auto& q : points) {
        candidates.push_back(-q);
        centroid += q;
    }
    if (centroid.norm() > 1e-12) candidates.push_back(-centroid.normalized());
    constexpr int kSamples = 256;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < kSamples; ++i) {
        const double z = 1.0 - 2.0 * (i + 0.5) / kSamples;
        const double r = std::sqrt(1.0 - z * z);
        candidates.push_back((Point(3) << r * std::cos(golden * i), r * std::sin(golden * i), z).finished());
    }
    Point best = candidates.front();
    double best_score = -1.0;
    for (const auto& c : candidates) {
        double score = 1e300;
        for (const auto& q : points) score = std::min(score, (c - q).norm());
        if (score > best_score) {
            best_score = score;
            best = c;
        }
    }
    return best;
}

}  // namespace detail

/// Requires a non-degenerate tetrahedron in R^3.
inline IdealAngles ideal_tetrahedron_angles(std::span<const Point> tet) {
    detail::check_simplex(tet);
    if (tet.size() != 4) throw Error(ErrorKind::DimensionMismatch, "ideal angles need a tetrahedron in R^3");
    const Sphere s = circumsphere(tet);
    std::array<Point, 4> q;
    for (std::size_t i = 0; i < 4; ++i) q[i] = (tet[i] - s.center) / s.radius;

    const Point pole = detail::projection_pole(q);
    // orthonormal frame (e1, e2) of the plane orthogonal to the pole
    Point helper = std::abs(pole(0)) < 0.9 ? Point(Point::Unit(3, 0)) : Point(Point::Unit(3, 1));
    const Point e1 = (helper - helper.dot(pole) * pole).normalized();
    const Point e2 = Eigen::Vector3d(pole).cross(Eigen::Vector3d(e1));
    std::array<std::complex<double>, 4> z;
    for (std::size_t i = 0; i < 4; ++i) {
        const double denom = 1.0 - q[i].dot(pole);
        z[i] = std::complex<double>(q[i].dot(e1), q[i].dot(e2)) / denom;
    }
    // z0 ↦ 0, z1 ↦ 1, z3 ↦ ∞; the shape parameter is the image of z2
    const std::complex<double> shape = ((z[2] - z[0]) * (z[1] - z[3])) / ((z[2] - z[3]) * (z[1] - z[0]));
    IdealAngles a;
    a.alpha = std::abs(std::arg(shape));
    a.beta = std::abs(std::arg(1.0 - shape));
    a.gamma = std::abs(std::arg(shape / (shape - 1.0)));
    return a;
}

/// Tetrahedron in R^3 with the six given edge lengths, indexed as d[i][j].
inline std::array<Point, 4> realize_tetrahedron(const std::array<std::array<double, 4>, 4>& d) {
    std::array<Point, 4> p;
    const double d01 = d[0][1], d02 = d[0][2], d03 = d[0][3];
    p[0] = Point::Zero(3);
    p[1] = (Point(3) << d01, 0.0, 0.0).finished();
    const double x2 = (d01 * d01 + d02 * d02 - d[1][2] * d[1][2]) / (2.0 * d01);
    const double y2sq = d02 * d02 - x2 * x2;
    if (!(y2sq > 0.0)) throw Error(ErrorKind::NotRealizable, "triangle inequality fails");
    const double y2 = std::sqrt(y2sq);
    p[2] = (Point(3) << x2, y2, 0.0).finished();
    const double x3 = (d01 * d01 + d03 * d03 - d[1][3] * d[1][3]) / (2.0 * d01);
    const double y3 = (x2 * x2 + y2 * y2 + d03 * d03 - d[2][3] * d[2][3] - 2.0 * x3 * x2) / (2.0 * y2);
    const double z3sq = d03 * d03 - x3 * x3 - y3 * y3;
    if (!(z3sq > 0.0)) throw Error(ErrorKind::NotRealizable, "lengths do not form a euclidean tetrahedron");
    p[3] = (Point(3) << x3, y3, std::sqrt(z3sq)).finished();
    return p;
}

namespace detail {

template <class CellPoints>
double cone_angle_impl(const std::set<Simplex>& cells, int dim, const Edge& e, CellPoints&& cell_points) {
    if (dim != 3) throw Error(ErrorKind::DimensionMismatch, "cone angles are defined for n = 3");
    std::set<Simplex> around;
    for (const auto& c : cells)
        if (std::binary_search(c.begin(), c.end(), e.first) && std::binary_search(c.begin(), c.end(), e.second))
            around.insert(c);
    if (around.empty()) throw Error(ErrorKind::BoundaryFace, "edge is not in the complex");
    for (const auto& [tri, inc] : face_incidence(around, 2))
        if (std::binary_search(tri.begin(), tri.end(), e.first) && std::binary_search(tri.begin(), tri.end(), e.second) &&
            inc.size() != 2)
            throw Error(ErrorKind::BoundaryFace, "cells around the edge do not close up");
    double total = 0.0;
    for (const auto& c : around) {
        const auto pts = cell_points(c);
        const auto ia = static_cast<int>(std::lower_bound(c.begin(), c.end(), e.first) - c.begin());
        const auto ib = static_cast<int>(std::lower_bound(c.begin(), c.end(), e.second) - c.begin());
        total += ideal_tetrahedron_angles(pts).at(ia, ib);
    }
    return total;
}

inline std::vector<Point> realize_cell(const EdgeLengthManifold& m, const Simplex& c) {
    std::array<std::array<double, 4>, 4> d{};
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) d[i][j] = i == j ? 0.0 : m.length(c[i], c[j]);
    const auto p = realize_tetrahedron(d);
    return {p.begin(), p.end()};
}

/// Edges whose surrounding cells close up into a cycle.
inline std::vector<Edge> interior_edges(const std::set<Simplex>& cells) {
    std::set<Edge> boundary;
    for (const auto& [tri, inc] : face_incidence(cells, 2))
        if (inc.size() != 2)
            for (const auto& e : subsets(tri, 2)) boundary.insert({e[0], e[1]});
    std::vector<Edge> out;
    for (const auto& e : edges(cells))
        if (!boundary.contains(e)) out.push_back(e);
    return out;
}

}  // namespace detail

/// Sum of the ideal dihedral angles at an interior edge of a 3-complex.
inline double cone_angle(const GeometricComplex& k, const Edge& e) {
    return detail::cone_angle_impl(k.cells, k.dim, make_edge(e.first, e.second),
                                   [&](const Simplex& c) { return k.points(c); });
}

/// Lengths-only variant: each cell is realized in R^3 from its six edge lengths.
inline double cone_angle(const EdgeLengthManifold& m, const Edge& e) {
    return detail::cone_angle_impl(m.cells, m.dim, make_edge(e.first, e.second),
                                   [&](const Simplex& c) { return detail::realize_cell(m, c); });
}

struct InvariantProfile {
    std::map<std::pair<Simplex, Simplex>, double> per_cell_cross_ratios;  // (cell, quadruple) → ratio
    std::map<Edge, double> cone_angles;                                   // interior edges, n = 3 only
};

inline InvariantProfile invariant_profile(const EdgeLengthManifold& m) {
    InvariantProfile profile;
    for (const auto& c : m.cells)
        for (const auto& q : subsets(c, 4))
            profile.per_cell_cross_ratios[{c, q}] = length_cross_ratio(m.lengths, q[0], q[1], q[2], q[3]);
    if (m.dim == 3)
        for (const auto& e : detail::interior_edges(m.cells)) profile.cone_angles[e] = cone_angle(m, e);
    return profile;
}

inline InvariantProfile invariant_profile(const GeometricComplex& k) {
    InvariantProfile profile;
    const EdgeLengthManifold m = edge_length_manifold(k);
    for (const auto& c : k.cells)
        for (const auto& q : subsets(c, 4))
            profile.per_cell_cross_ratios[{c, q}] = length_cross_ratio(m.lengths, q[0], q[1], q[2], q[3]);
    if (k.dim == 3)
        for (const auto& e : detail::interior_edges(k.cells)) profile.cone_angles[e] = cone_angle(k, e);
    return profile;
}

/// Necessary condition for discrete conformal equivalence under φ: every cross-ratio and cone
/// angle of K matches its φ-counterpart in K' to relative tolerance. Matching profiles are
/// not claimed to imply equivalence.
inline bool necessary_equivalence_check(const GeometricComplex& k, const GeometricComplex& k2, const VertexMap& phi,
                                        double tolerance = 1e-8) {
    if (!check_isomorphism(k, k2, phi)) throw Error(ErrorKind::NotIsomorphic, "vertex map is not a combinatorial isomorphism");
    auto close = [&](double a, double b) { return std::abs(a - b) <= tolerance * std::max(std::abs(a), std::abs(b)); };
    const EdgeLengthManifold m2 = edge_length_manifold(k2);
    const InvariantProfile profile = invariant_profile(k);
    for (const auto& [key, ratio] : profile.per_cell_cross_ratios) {
        const auto& q = key.second;
        const double mapped = length_cross_ratio(m2.lengths, phi.at(q[0]), phi.at(q[1]), phi.at(q[2]), phi.at(q[3]));
        if (!close(ratio, mapped)) return false;
    }
    for (const auto& [e, angle] : profile.cone_angles)
        if (!close(angle, cone_angle(k2, make_edge(phi.at(e.first), phi.at(e.second))))) return false;
    return true;
}

}  // namespace liouville
