// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "fixtures.hpp"

using namespace liouville;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

/// Seeded discrete domains in R^3 with 5 to 20 cells.
std::vector<GeometricComplex> domain_cases(int count, std::uint64_t seed) {
    Random rng(seed);
    std::vector<GeometricComplex> out;
    while (static_cast<int>(out.size()) < count) {
        const int inner = 1 + static_cast<int>(rng.uniform(0.0, 2.0));
        const int shell = 6 + static_cast<int>(rng.uniform(0.0, 4.0));
        GeometricComplex k = generate_domain(inner, shell, 3, rng);
        if (k.cells.size() >= 5 && k.cells.size() <= 20) out.push_back(std::move(k));
    }
    return out;
}

struct MobiusCase {
    GeometricComplex source;
    MobiusTransform m;
    MobiusImage image;
};

std::vector<MobiusCase> mobius_cases() {
    std::vector<MobiusCase> out;
    Random rng(2024);
    for (auto& k : domain_cases(100, 1001)) {
        const MobiusTransform m = random_mobius_for(k, rng);
        MobiusImage image = mobius_image(k, m);
        out.push_back({std::move(k), m, std::move(image)});
    }
    return out;
}

Outcome easy_implication(const std::vector<MobiusCase>& cases) {
    int ok = 0;
    double worst_residual = 0.0, worst_u = 0.0;
    for (const auto& c : cases) {
        ConformalFactors f;
        try {
            f = solve_scale_factors(c.source, c.image.complex, identity_map(c.source), 1e-8);
        } catch (const Error&) {
            continue;
        }
        double u_err = 0.0;
        if (f.kernel_dimension == 0) {
            for (const auto& [id, u] : f.u) u_err = std::max(u_err, std::abs(u - std::log(conformal_factor(c.m, c.source.vertices.at(id)))));
        } else {
            for (const auto& [a, b] : edges(c.source)) {
                const double expected = std::log(conformal_factor(c.m, c.source.vertices.at(a))) +
                                        std::log(conformal_factor(c.m, c.source.vertices.at(b)));
                u_err = std::max(u_err, std::abs(f.u.at(a) + f.u.at(b) - expected));
            }
        }
        worst_residual = std::max(worst_residual, f.residual);
        worst_u = std::max(worst_u, u_err);
        if (f.residual <= 1e-8 && u_err <= 1e-7) ++ok;
    }
    return {ok == static_cast<int>(cases.size()),
            fmt("%d/%zu cases, max residual %.2e, max |u - log factor| %.2e", ok, cases.size(), worst_residual, worst_u)};
}

Outcome forward_liouville(const std::vector<MobiusCase>& cases) {
    int ok = 0;
    double worst_disagreement = 0.0, worst_distance = 0.0;
    for (const auto& c : cases) {
        const LiouvilleVerdict v = verify_liouville(c.source, c.image.complex, identity_map(c.source));
        if (!v.mobius_equivalent || !v.transform) continue;
        worst_disagreement = std::max(worst_disagreement, v.max_cell_disagreement);
        worst_distance = std::max(worst_distance, mobius_distance(*v.transform, c.m));
        if (v.max_cell_disagreement <= 1e-6 && mobius_equal(*v.transform, c.m, 1e-6)) ++ok;
    }
    return {ok == static_cast<int>(cases.size()),
            fmt("%d/%zu cases, max cell disagreement %.2e, max distance to M %.2e", ok, cases.size(), worst_disagreement,
                worst_distance)};
}

Outcome rigidity(const std::vector<MobiusCase>& cases) {
    Random rng(77);
    int rejected = 0;
    double smallest = std::numeric_limits<double>::infinity();
    for (const auto& c : cases) {
        GeometricComplex bent = c.image.complex;
        const VertexId v = *interior_vertices(bent).begin();
        double mean = 0.0;
        int degree = 0;
        for (const auto& [a, b] : edges(bent))
            if (a == v || b == v) {
                mean += bent.length(a, b);
                ++degree;
            }
        mean /= degree;
        bent.vertices[v] += 0.01 * mean * rng.uniform_point(3, -1, 1).normalized();
        const LiouvilleVerdict verdict = verify_liouville(c.source, bent, identity_map(c.source));
        smallest = std::min(smallest, verdict.factors->residual);
        if (!verdict.conformally_equivalent && verdict.factors->residual > 1e-4) ++rejected;
    }
    return {rejected >= 99, fmt("%d/%zu perturbed cases rejected, smallest residual %.2e", rejected, cases.size(), smallest)};
}

Outcome planar_control() {
    const GeometricComplex k = fixtures::two_triangles();
    const GeometricComplex k2 = fixtures::relayout_two_triangles(k, {{0, 0.3}, {1, 0.0}, {2, 0.0}, {3, 0.0}});
    const LiouvilleVerdict v = verify_liouville(k, k2, identity_map(k));
    return {v.conformally_equivalent && !v.mobius_equivalent && v.max_cell_disagreement > 1e-2,
            fmt("conformal %s, mobius %s, max cell disagreement %.3e", v.conformally_equivalent ? "yes" : "no",
                v.mobius_equivalent ? "yes" : "no", v.max_cell_disagreement)};
}

std::vector<std::vector<Point>> random_simplices(int count) {
    Random rng(505);
    std::vector<std::vector<Point>> out;
    while (static_cast<int>(out.size()) < count) {
        std::vector<Point> s;
        for (int i = 0; i < 4; ++i) s.push_back(rng.uniform_point(3, -1, 1));
        if (detail::affinely_independent(s, 1e-2)) out.push_back(std::move(s));
    }
    return out;
}

Outcome simplex_pairs(const std::vector<std::vector<Point>>& simplices) {
    Random rng(506);
    int ok = 0;
    for (const auto& s : simplices) {
        const GeometricComplex k(3, {{0, s[0]}, {1, s[1]}, {2, s[2]}, {3, s[3]}}, {{0, 1, 2, 3}});
        const MobiusTransform m = random_mobius_for(k, rng);
        const auto target = mobius_image(k, m).complex.points({0, 1, 2, 3});
        try {
            const MobiusPair pair = mobius_from_simplex(s, target);
            const bool relation = mobius_pair_relation(s, target, pair.preserving, pair.reversing, 1e-8) &&
                                  mobius_pair_relation(s, target, pair.reversing, pair.preserving, 1e-8);
            const bool one_preserving = pair.preserving.preserves_orientation() && !pair.reversing.preserves_orientation();
            if (relation && one_preserving) ++ok;
        } catch (const Error&) {
        }
    }
    return {ok == static_cast<int>(simplices.size()), fmt("%d/%zu pairs satisfy both relations with one preserving branch", ok,
                                                          simplices.size())};
}

Outcome inversion_identity(const std::vector<std::vector<Point>>& simplices) {
    std::vector<std::vector<Point>> all = simplices;
    all.push_back(fixtures::unit_tetrahedron());
    all.push_back(fixtures::regular_tetrahedron());
    for (const auto& k : {fixtures::octahedron_star(), fixtures::distorted_octahedron_star(), fixtures::kuhn_grid(2),
                          fixtures::hexagon_star(), fixtures::two_triangles(), fixtures::single_tetrahedron()})
        for (const auto& c : k.cells) all.push_back(k.points(c));
    double worst = 0.0;
    for (const auto& s : all) worst = std::max(worst, inversion_identity_defect(s));
    return {worst <= 1e-10, fmt("%zu simplices, max relative defect %.2e", all.size(), worst)};
}

/// Facets of the convex hull of points in general position (brute force).
std::vector<Simplex> hull_facets(const std::vector<Point>& p) {
    std::vector<Simplex> out;
    const int n = static_cast<int>(p.size());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int l = j + 1; l < n; ++l) {
                const Eigen::Vector3d a = p[i], b = p[j], c = p[l];
                const Eigen::Vector3d normal = (b - a).cross(c - a);
                bool pos = false, neg = false;
                for (int q = 0; q < n; ++q) {
                    if (q == i || q == j || q == l) continue;
                    const double s = normal.dot(Eigen::Vector3d(p[q]) - a);
                    pos = pos || s > 0;
                    neg = neg || s < 0;
                }
                if (!(pos && neg)) out.push_back({i + 1, j + 1, l + 1});
            }
    return out;
}

/// Smallest |relative depth| of the opposite vertex across any interior face.
double cosphericity_margin(const GeometricComplex& k) {
    double margin = std::numeric_limits<double>::infinity();
    for (const auto& [face, cells] : face_incidence(k, k.dim - 1)) {
        if (cells.size() != 2) continue;
        for (int side = 0; side < 2; ++side) {
            const Sphere s = circumsphere(k.points(cells[side]));
            for (VertexId v : cells[1 - side])
                if (!std::binary_search(face.begin(), face.end(), v))
                    margin = std::min(margin, std::abs((k.vertices.at(v) - s.center).norm() - s.radius) / s.radius);
        }
    }
    return margin;
}

/// Cone over the convex hull of random directions, with radial jitter.
std::optional<GeometricComplex> random_star(Random& rng, double jitter) {
    const int count = 6 + static_cast<int>(rng.uniform(0.0, 7.0));
    std::vector<Point> dirs;
    for (int i = 0; i < count; ++i) dirs.push_back(rng.uniform_point(3, -1, 1).normalized());
    const auto facets = hull_facets(dirs);
    std::map<VertexId, Point> verts{{0, Point::Zero(3)}};
    for (int i = 0; i < count; ++i) verts[i + 1] = dirs[static_cast<std::size_t>(i)] * (1.0 + jitter * rng.uniform(-1.0, 1.0));
    std::vector<Simplex> cells;
    for (const auto& f : facets) {
        // the origin must lie well inside the hull
        const Eigen::Vector3d a = dirs[f[0] - 1], b = dirs[f[1] - 1], c = dirs[f[2] - 1];
        if (std::abs((b - a).cross(c - a).normalized().dot(a)) < 0.05) return std::nullopt;
        cells.push_back({0, f[0], f[1], f[2]});
    }
    GeometricComplex k(3, std::move(verts), cells);
    if (!validate_geometry(k).empty() || !interior_vertices(k).contains(0)) return std::nullopt;
    return k;
}

Outcome delaunay_convex() {
    Random rng(707);
    int agree = 0, stars = 0, delaunay = 0;
    while (stars < 50) {
        const auto k = random_star(rng, stars % 2 == 0 ? 0.05 : 0.4);
        if (!k || cosphericity_margin(*k) < 1e-3) continue;
        ++stars;
        const bool d = is_locally_delaunay(*k).verdict;
        const bool c = is_convex_polyhedron(inverted_link_polyhedron(*k, 0)).convex;
        delaunay += d;
        agree += d == c;
    }
    return {agree == stars, fmt("%d/%d stars agree (%d Delaunay, %d not)", agree, stars, delaunay, stars - delaunay)};
}

Outcome realization() {
    Random rng(808);
    int attempted = 0, certified = 0, contradictions = 0;
    double worst = 0.0;
    while (attempted < 60) {
        const auto k = generate_domain(2, 10, 3, rng);
        for (VertexId v : interior_vertices(k)) {
            if (attempted == 60) break;
            ++attempted;
            const LinkPolyhedron truth = inverted_link_polyhedron(k, v);
            const Realization r = realize_link_polyhedron(truth.facets, tilde_lengths(k, v));
            if (r.status != RealizationStatus::Certified) continue;
            ++certified;
            std::vector<Point> a, b;
            for (const auto& [id, x] : truth.vertices) {
                a.push_back(r.polyhedron.vertices.at(id));
                b.push_back(x);
            }
            const double residual = procrustes_similarity(a, b, true).max_residual / truth.diameter();
            worst = std::max(worst, residual);
            if (residual > 1e-6) ++contradictions;
        }
    }
    return {certified * 10 >= attempted * 9 && contradictions == 0,
            fmt("%d/%d links certified, %d contradictions, max residual/diameter %.2e", certified, attempted, contradictions, worst)};
}

Outcome invariants() {
    Random rng(909);
    double rescale_ratio = 0.0, rescale_cone = 0.0, mobius_ratio = 0.0, mobius_cone = 0.0, angle_sum = 0.0;
    auto relative = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); };
    for (const auto& k : domain_cases(20, 910)) {
        const EdgeLengthManifold m = edge_length_manifold(k);
        const InvariantProfile base = invariant_profile(m);
        // vertex factors are redrawn with smaller spread until every rescaled cell is a tetrahedron
        InvariantProfile scaled;
        for (double spread = 0.3;; spread /= 2) {
            EdgeLengthManifold rescaled = m;
            std::map<VertexId, double> u;
            for (const auto& [id, p] : k.vertices) u[id] = rng.uniform(-spread, spread);
            for (auto& [e, l] : rescaled.lengths) l *= std::exp(0.5 * (u[e.first] + u[e.second]));
            try {
                scaled = invariant_profile(rescaled);
                break;
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::NotRealizable) throw;
            }
        }
        const InvariantProfile image = invariant_profile(mobius_image(k, random_mobius_for(k, rng)).complex);
        for (const auto& [key, r] : base.per_cell_cross_ratios) {
            rescale_ratio = std::max(rescale_ratio, relative(r, scaled.per_cell_cross_ratios.at(key)));
            mobius_ratio = std::max(mobius_ratio, relative(r, image.per_cell_cross_ratios.at(key)));
        }
        for (const auto& [e, a] : base.cone_angles) {
            rescale_cone = std::max(rescale_cone, relative(a, scaled.cone_angles.at(e)));
            mobius_cone = std::max(mobius_cone, relative(a, image.cone_angles.at(e)));
        }
        for (const auto& c : k.cells) angle_sum = std::max(angle_sum, std::abs(ideal_tetrahedron_angles(k.points(c)).sum() - kPi));
    }
    const IdealAngles regular = ideal_tetrahedron_angles(fixtures::regular_tetrahedron());
    const double regular_err =
        std::max({std::abs(regular.alpha - kPi / 3), std::abs(regular.beta - kPi / 3), std::abs(regular.gamma - kPi / 3)});
    const bool pass = rescale_ratio <= 1e-12 && rescale_cone <= 1e-12 && mobius_ratio <= 1e-8 && mobius_cone <= 1e-8 &&
                      angle_sum <= 1e-12 && regular_err <= 1e-10;
    return {pass, fmt("rescaling: ratios %.1e, cones %.1e; mobius: ratios %.1e, cones %.1e; |sum - pi| %.1e; regular %.1e",
                      rescale_ratio, rescale_cone, mobius_ratio, mobius_cone, angle_sum, regular_err)};
}

Outcome oracle_consistency() {
    int clean = 0, runs = 0;
    for (int n : {2, 3})
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
            ++runs;
            const auto k = brute_force_delaunay(sample_cube_points(n == 2 ? 15 : 12, n, seed));
            const DelaunayReport r = is_locally_delaunay(k);
            clean += r.verdict && r.violations.empty();
        }
    return {clean == runs, fmt("%d/%d triangulations with zero violations", clean, runs)};
}

}  // namespace

int main() {
    const auto cases = mobius_cases();
    const auto simplices = random_simplices(100);
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"easy implication round trip", [&] { return easy_implication(cases); }},
        {"forward Liouville verification", [&] { return forward_liouville(cases); }},
        {"rigidity negative control", [&] { return rigidity(cases); }},
        {"planar dimension control", planar_control},
        {"simplex pair structure", [&] { return simplex_pairs(simplices); }},
        {"inversion distance identity", [&] { return inversion_identity(simplices); }},
        {"Delaunay iff convex inverted link", delaunay_convex},
        {"realization unique up to similarity", realization},
        {"hyperbolic invariants", invariants},
        {"Delaunay oracle consistency", oracle_consistency},
    };
    int failures = 0, index = 0;
    for (const auto& [name, check] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failures += !o.pass;
        std::printf("%s %2d %s: %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", ++index, name.c_str(), o.detail.c_str(), seconds);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
