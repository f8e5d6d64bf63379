#pragma once

// Discrete conformal equivalence (ℓ'_ij = e^{(u_i+u_j)/2} ℓ_ij) and the
// constructive recovery of Möbius transformations between complexes.
//
// For a pair of n-simplices the unit inversions at v_0 and v'_0 turn the
// remaining vertices into similar (n-1)-simplices; composing the two
// inversions with either similarity between them gives the two Möbius maps
// carrying one simplex to the other. A discrete domain is Möbius equivalent to
// its image iff the orientation-preserving per-cell maps all agree.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "liouville/complex.hpp"
#include "liouville/flatness.hpp"

namespace liouville {

struct ConformalFactors {
    std::map<VertexId, double> u;
    double residual = 0.0;     // max over edges of |log ℓ' - log ℓ - (u_i + u_j)/2|
    int kernel_dimension = 0;  // number of bipartite components of the edge graph
};

namespace detail {

/// Bipartite connected components of the graph on `vertices` with the given edges.
inline int bipartite_components(const std::vector<VertexId>& vertices, const std::vector<Edge>& edge_list) {
    std::map<VertexId, std::vector<VertexId>> adj;
    for (const auto& [a, b] : edge_list) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::map<VertexId, int> color;
    int count = 0;
    for (VertexId start : vertices) {
        if (color.contains(start) || !adj.contains(start)) continue;
        bool bipartite = true;
        std::queue<VertexId> queue;
        color[start] = 0;
        queue.push(start);
        while (!queue.empty()) {
            const VertexId v = queue.front();
            queue.pop();
            for (VertexId w : adj[v]) {
                auto it = color.find(w);
                if (it == color.end()) {
                    color[w] = 1 - color[v];
                    queue.push(w);
                } else if (it->second == color[v]) {
                    bipartite = false;
                }
            }
        }
        if (bipartite) ++count;
    }
    return count;
}

}  // namespace detail

/// Minimum-norm least-squares scale factors for a pair of edge-length assignments on the
/// same edge set: u_i + u_j = 2 log(ℓ'_ij / ℓ_ij). Always returns; callers judge the residual.
inline ConformalFactors fit_scale_factors(const std::vector<Edge>& edge_list, const EdgeLengths& lengths,
                                          const EdgeLengths& target_lengths) {
    if (edge_list.empty()) throw Error(ErrorKind::EmptyEdgeSet, "complex has no edges");
    std::map<VertexId, Eigen::Index> index;
    std::vector<VertexId> ids;
    for (const auto& [a, b] : edge_list)
        for (VertexId v : {a, b})
            if (!index.contains(v)) {
                index[v] = static_cast<Eigen::Index>(ids.size());
                ids.push_back(v);
            }
    const auto ne = static_cast<Eigen::Index>(edge_list.size());
    Matrix incidence = Matrix::Zero(ne, static_cast<Eigen::Index>(ids.size()));
    Vector rhs(ne);
    for (Eigen::Index e = 0; e < ne; ++e) {
        const auto& [a, b] = edge_list[static_cast<std::size_t>(e)];
        const double l = lengths.at(make_edge(a, b)), l2 = target_lengths.at(make_edge(a, b));
        if (!(l > 0.0) || !(l2 > 0.0)) throw Error(ErrorKind::Degenerate, "edge lengths must be positive");
        incidence(e, index[a]) = 1.0;
        incidence(e, index[b]) = 1.0;
        rhs(e) = 2.0 * (std::log(l2) - std::log(l));
    }
    const Vector u = incidence.completeOrthogonalDecomposition().solve(rhs);
    ConformalFactors f;
    for (std::size_t i = 0; i < ids.size(); ++i) f.u[ids[i]] = u(static_cast<Eigen::Index>(i));
    f.residual = (0.5 * (incidence * u - rhs)).cwiseAbs().maxCoeff();
    f.kernel_dimension = detail::bipartite_components(ids, edge_list);
    return f;
}

inline ConformalFactors fit_scale_factors(const GeometricComplex& k, const GeometricComplex& k2, const VertexMap& phi) {
    if (!check_isomorphism(k, k2, phi)) throw Error(ErrorKind::NotIsomorphic, "vertex map is not a combinatorial isomorphism");
    const std::vector<Edge> edge_list = edges(k);
    EdgeLengths lengths, target;
    for (const auto& [a, b] : edge_list) {
        lengths[{a, b}] = k.length(a, b);
        target[{a, b}] = k2.length(phi.at(a), phi.at(b));
    }
    ConformalFactors f = fit_scale_factors(edge_list, lengths, target);
    for (const auto& [id, p] : k.vertices) f.u.try_emplace(id, 0.0);  // isolated vertices
    return f;
}

/// Scale factors u with |φ(a) - φ(b)| = e^{(u_a + u_b)/2} |a - b| on every edge, or
/// NotConformallyEquivalentError when the least-squares residual exceeds the tolerance.
inline ConformalFactors solve_scale_factors(const GeometricComplex& k, const GeometricComplex& k2, const VertexMap& phi,
                                            double tolerance = tol::kScaleFactors) {
    ConformalFactors f = fit_scale_factors(k, k2, phi);
    if (f.residual > tolerance) throw NotConformallyEquivalentError(f.residual);
    return f;
}

// ---------------------------------------------------------------------------
// Simplex pairs

/// Largest relative defect of |w_i - w_j| · |v_i - v_0| · |v_j - v_0| = |v_i - v_j| over the
/// simplex, where w = unit inversion at v_0.
inline double inversion_identity_defect(std::span<const Point> simplex) {
    const Sphere unit{simplex[0], 1.0};
    double worst = 0.0;
    for (std::size_t i = 1; i < simplex.size(); ++i)
        for (std::size_t j = i + 1; j < simplex.size(); ++j) {
            const Point wi = invert_point(unit, simplex[i]), wj = invert_point(unit, simplex[j]);
            const double lhs = (wi - wj).norm() * (simplex[i] - simplex[0]).norm() * (simplex[j] - simplex[0]).norm();
            const double rhs = (simplex[i] - simplex[j]).norm();
            worst = std::max(worst, std::abs(lhs - rhs) / rhs);
        }
    return worst;
}

struct MobiusPair {
    MobiusTransform preserving;
    MobiusTransform reversing;
};

/// The two Möbius transformations taking the vertices of `sigma` to those of `target`, in order.
inline MobiusPair mobius_from_simplex(std::span<const Point> sigma, std::span<const Point> target,
                                      double tolerance = tol::kSimilarity) {
    detail::check_simplex(sigma);
    detail::check_simplex(target);
    if (sigma.size() != target.size()) throw Error(ErrorKind::DimensionMismatch, "simplices of different dimension");
    const Sphere at_v0{sigma[0], 1.0}, at_target0{target[0], 1.0};
    std::vector<Point> w, w2;
    for (std::size_t i = 1; i < sigma.size(); ++i) {
        w.push_back(invert_point(at_v0, sigma[i]));
        w2.push_back(invert_point(at_target0, target[i]));
    }
    if (inversion_identity_defect(sigma) > 1e-8 || inversion_identity_defect(target) > 1e-8)
        throw Error(ErrorKind::DegenerateSimplex, "inversion distance identity fails numerically");

    SimilarityPair f;
    try {
        f = fit_similarity(w, w2, tolerance);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::NotSimilar)
            throw Error(ErrorKind::NotConformal, "no vertex scale factors relate the two simplices");
        throw Error(ErrorKind::DegenerateSimplex, e.what());
    }
    const MobiusTransform s = sphere_inversion(at_v0), s2 = sphere_inversion(at_target0);
    MobiusPair out{mobius_compose(s2, mobius_compose(similarity(f.preserving), s)),
                   mobius_compose(s2, mobius_compose(similarity(f.reversing), s))};

    const double scale = std::max(detail::diameter(target), tol::kAbsoluteFloor);
    for (const auto* t : {&out.preserving, &out.reversing})
        for (std::size_t i = 0; i < sigma.size(); ++i) {
            const auto image = mobius_apply(*t, ExtendedPoint(sigma[i]));
            if (image.is_infinite() || (image.point() - target[i]).norm() > std::max(tolerance, 1e-9) * scale * 10.0)
                throw Error(ErrorKind::NotConformal, "recovered transformation misses a vertex");
        }
    return out;
}

/// T2 = T1 ∘ C = C' ∘ T1 with C, C' the inversions in the circumspheres of sigma and target.
inline bool mobius_pair_relation(std::span<const Point> sigma, std::span<const Point> target, const MobiusTransform& t1,
                                 const MobiusTransform& t2, double tolerance = tol::kProjective) {
    const MobiusTransform c = sphere_inversion(circumsphere(sigma));
    const MobiusTransform c2 = sphere_inversion(circumsphere(target));
    return mobius_equal(t2, mobius_compose(t1, c), tolerance) && mobius_equal(t2, mobius_compose(c2, t1), tolerance);
}

// ---------------------------------------------------------------------------
// Complexes

struct LiouvilleVerdict {
    bool conformally_equivalent = false;
    bool mobius_equivalent = false;
    std::optional<MobiusTransform> transform;
    std::map<Simplex, MobiusTransform> per_cell_transforms;
    double max_cell_disagreement = 0.0;
    std::optional<ConformalFactors> factors;
    bool orientation_reversing = false;
    std::vector<std::string> warnings;
};

struct VerifyOptions {
    double tolerance = tol::kLiouville;
};

namespace detail {

inline std::vector<Point> mapped_points(const GeometricComplex& k2, const Simplex& cell, const VertexMap& phi) {
    std::vector<Point> out;
    for (VertexId v : cell) out.push_back(k2.vertices.at(phi.at(v)));
    return out;
}

inline void require_domain(const GeometricComplex& k, const char* which, LiouvilleVerdict& verdict) {
    const DomainReport domain = is_discrete_domain(k);
    const DelaunayReport delaunay = is_locally_delaunay(k);
    const std::string name(which);
    if (k.dim >= 3) {
        if (!domain.verdict) throw Error(ErrorKind::NotDomain, name + " is not a discrete domain");
        if (!delaunay.verdict) throw Error(ErrorKind::NotDelaunay, name + " is not locally Delaunay");
        return;
    }
    if (!domain.verdict) verdict.warnings.push_back(name + " is not a discrete domain");
    if (!delaunay.verdict) verdict.warnings.push_back(name + " is not locally Delaunay");
}

}  // namespace detail

/// Decides discrete conformal and Möbius equivalence of K and K' with respect to φ.
///
/// A failed scale-factor fit settles (false, false) for any pair of complexes. Otherwise the
/// domain and local Delaunay hypotheses are required for n >= 3; for n = 2 they (and the
/// dimension hypothesis) only produce warnings, so planar counterexamples can be examined.
inline LiouvilleVerdict verify_liouville(const GeometricComplex& k, const GeometricComplex& k2, const VertexMap& phi,
                                         const VerifyOptions& options = {}) {
    if (!check_isomorphism(k, k2, phi)) throw Error(ErrorKind::NotIsomorphic, "vertex map is not a combinatorial isomorphism");
    LiouvilleVerdict verdict;
    verdict.factors = fit_scale_factors(k, k2, phi);
    if (verdict.factors->residual > options.tolerance) return verdict;
    verdict.conformally_equivalent = true;

    if (k.dim < 3) verdict.warnings.emplace_back("dimension n < 3: conformal equivalence need not imply Möbius equivalence");
    detail::require_domain(k, "source complex", verdict);
    detail::require_domain(k2, "target complex", verdict);

    const Simplex& first = *k.cells.begin();
    verdict.orientation_reversing =
        simplex_orientation(k.points(first)) != simplex_orientation(detail::mapped_points(k2, first, phi));
    const GeometricComplex target = verdict.orientation_reversing ? mirror(k2) : k2;
    const MobiusTransform flip = verdict.orientation_reversing ? mirror_transform(k.dim) : MobiusTransform::identity(k.dim);

    // per-simplex similarity ratios deviate by a few multiples of the edge residual
    const double simplex_tolerance = 8.0 * std::max(options.tolerance, tol::kSimilarity);
    for (const auto& cell : k.cells) {
        const MobiusPair pair = mobius_from_simplex(k.points(cell), detail::mapped_points(target, cell, phi), simplex_tolerance);
        verdict.per_cell_transforms.emplace(cell, mobius_compose(flip, pair.preserving));
    }
    const MobiusTransform& reference = verdict.per_cell_transforms.at(first);
    for (const auto& [cell, t] : verdict.per_cell_transforms)
        verdict.max_cell_disagreement = std::max(verdict.max_cell_disagreement, mobius_distance(reference, t));
    verdict.mobius_equivalent = verdict.max_cell_disagreement <= options.tolerance;
    if (verdict.mobius_equivalent) verdict.transform = reference;
    return verdict;
}

struct MobiusImage {
    GeometricComplex complex;
    ConformalFactors factors;
};

/// Same combinatorics, vertices M(v); u(v) = log of the conformal factor of M at v.
inline MobiusImage mobius_image(const GeometricComplex& k, const MobiusTransform& m) {
    if (m.dim() != k.dim) throw Error(ErrorKind::DimensionMismatch, "transform and complex dimensions differ");
    MobiusImage out;
    out.complex.dim = k.dim;
    out.complex.cells = k.cells;
    for (const auto& [id, p] : k.vertices) {
        const auto image = mobius_apply(m, ExtendedPoint(p));
        if (image.is_infinite()) throw Error(ErrorKind::VertexAtPole, "vertex " + std::to_string(id) + " maps to infinity");
        double factor = 0.0;
        try {
            factor = conformal_factor(m, p);
        } catch (const Error&) {
            throw Error(ErrorKind::VertexAtPole, "vertex " + std::to_string(id) + " maps to infinity");
        }
        out.complex.vertices.emplace(id, image.point());
        out.factors.u[id] = std::log(factor);
    }
    std::vector<VertexId> ids;
    for (const auto& [id, p] : k.vertices) ids.push_back(id);
    const auto edge_list = edges(k);
    for (const auto& [a, b] : edge_list) {
        const double predicted = 0.5 * (out.factors.u[a] + out.factors.u[b]);
        const double actual = std::log(out.complex.length(a, b)) - std::log(k.length(a, b));
        out.factors.residual = std::max(out.factors.residual, std::abs(actual - predicted));
    }
    out.factors.kernel_dimension = detail::bipartite_components(ids, edge_list);
    return out;
}

/// The single Möbius transformation carrying star(v) onto star(φ(v)), recovered from the
/// similarity between the two inverted links.
inline MobiusTransform star_transform(const GeometricComplex& k, const GeometricComplex& k2, const VertexMap& phi, VertexId v,
                                      double tolerance = tol::kLiouville) {
    const VertexId v2 = phi.at(v);
    const LinkPolyhedron p = inverted_link_polyhedron(k, v);
    const LinkPolyhedron p2 = inverted_link_polyhedron(k2, v2);
    if (!is_convex_polyhedron(p).convex || !is_convex_polyhedron(p2).convex)
        throw Error(ErrorKind::NotConvex, "inverted link is not convex");

    std::vector<Point> src, dst;
    for (const auto& [id, w] : p.vertices) {
        auto it = p2.vertices.find(phi.at(id));
        if (it == p2.vertices.end()) throw Error(ErrorKind::NotIsomorphic, "links do not correspond under the vertex map");
        src.push_back(w);
        dst.push_back(it->second);
    }
    const ProcrustesFit fit = procrustes_similarity(src, dst, true);
    if (fit.max_residual > tolerance * p2.diameter()) throw Error(ErrorKind::NotSimilar, "inverted links are not similar");

    const MobiusTransform t = mobius_compose(sphere_inversion({k2.vertices.at(v2), 1.0}),
                                             mobius_compose(similarity(fit.params), sphere_inversion({k.vertices.at(v), 1.0})));
    const GeometricComplex s = star(k, v);
    const double scale = star(k2, v2).diameter();
    for (const auto& [id, x] : s.vertices) {
        const auto image = mobius_apply(t, ExtendedPoint(x));
        if (image.is_infinite() || (image.point() - k2.vertices.at(phi.at(id))).norm() > tolerance * scale)
            throw Error(ErrorKind::NotSimilar, "star transformation misses vertex " + std::to_string(id));
    }
    return t;
}

}  // namespace liouville
