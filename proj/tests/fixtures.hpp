#pragma once

#include <cmath>
#include <vector>

#include "liouville/liouville.hpp"

namespace fixtures {

using liouville::GeometricComplex;
using liouville::Point;
using liouville::Simplex;
using liouville::VertexId;

inline Point p2(double x, double y) { return (Point(2) << x, y).finished(); }
inline Point p3(double x, double y, double z) { return (Point(3) << x, y, z).finished(); }

inline std::vector<Point> unit_tetrahedron() {
    return {p3(0, 0, 0), p3(1, 0, 0), p3(0, 1, 0), p3(0, 0, 1)};
}

inline std::vector<Point> regular_tetrahedron() {
    return {p3(1, 1, 1), p3(1, -1, -1), p3(-1, 1, -1), p3(-1, -1, 1)};
}

inline GeometricComplex single_tetrahedron() {
    const auto pts = unit_tetrahedron();
    return GeometricComplex(3, {{0, pts[0]}, {1, pts[1]}, {2, pts[2]}, {3, pts[3]}}, {{0, 1, 2, 3}});
}

/// Octahedron vertices ±e_i (ids 1..6) coned from the origin (id 0): eight tetrahedra,
/// one interior vertex.
inline GeometricComplex octahedron_star(double scale = 1.0) {
    std::map<VertexId, Point> v{{0, p3(0, 0, 0)},
                                {1, p3(scale, 0, 0)},  {2, p3(-scale, 0, 0)}, {3, p3(0, scale, 0)},
                                {4, p3(0, -scale, 0)}, {5, p3(0, 0, scale)},  {6, p3(0, 0, -scale)}};
    std::vector<Simplex> cells;
    for (VertexId x : {1, 2})
        for (VertexId y : {3, 4})
            for (VertexId z : {5, 6}) cells.push_back({0, x, y, z});
    return GeometricComplex(3, std::move(v), cells);
}

/// Octahedron star with the apex at (0.5,0,0) and vertex 2 pushed out to (-3,0,0). The four
/// cells around the edge {0,2} see the far vertex of their neighbor inside their circumsphere.
inline GeometricComplex distorted_octahedron_star() {
    GeometricComplex k = octahedron_star();
    k.vertices[0] = p3(0.5, 0, 0);
    k.vertices[2] = p3(-3, 0, 0);
    return k;
}

/// Kuhn triangulation of a grid of size cells × cells × cells: each unit cube split into six
/// tetrahedra along the main diagonal. Vertex id = x + (cells+1)·(y + (cells+1)·z).
inline GeometricComplex kuhn_grid(int cells) {
    const int side = cells + 1;
    auto id = [&](int x, int y, int z) { return static_cast<VertexId>(x + side * (y + side * z)); };
    std::map<VertexId, Point> verts;
    for (int z = 0; z < side; ++z)
        for (int y = 0; y < side; ++y)
            for (int x = 0; x < side; ++x) verts[id(x, y, z)] = p3(x, y, z);
    std::vector<Simplex> out;
    const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (int z = 0; z < cells; ++z)
        for (int y = 0; y < cells; ++y)
            for (int x = 0; x < cells; ++x)
                for (const auto& perm : perms) {
                    int c[3] = {x, y, z};
                    Simplex s{id(c[0], c[1], c[2])};
                    for (int axis : perm) {
                        ++c[axis];
                        s.push_back(id(c[0], c[1], c[2]));
                    }
                    out.push_back(s);
                }
    return GeometricComplex(3, std::move(verts), out);
}

/// Planar hexagon star: center 0 and six boundary vertices on the unit circle.
inline GeometricComplex hexagon_star() {
    std::map<VertexId, Point> v{{0, p2(0, 0)}};
    std::vector<Simplex> cells;
    for (int i = 0; i < 6; ++i) {
        const double a = i * M_PI / 3.0;
        v[i + 1] = p2(std::cos(a), std::sin(a));
        cells.push_back({0, i + 1, (i + 1) % 6 + 1});
    }
    return GeometricComplex(2, std::move(v), cells);
}

/// Two triangles abc, abd sharing the edge ab.
inline GeometricComplex two_triangles() {
    return GeometricComplex(2, {{0, p2(0, 0)}, {1, p2(1, 0)}, {2, p2(0.5, 0.8)}, {3, p2(0.5, -0.7)}},
                            {{0, 1, 2}, {0, 1, 3}});
}

/// Two triangles re-laid out in the plane from the lengths e^{(u_i+u_j)/2} ℓ_ij: a on the origin,
/// b on the positive x-axis, c above and d below.
inline GeometricComplex relayout_two_triangles(const GeometricComplex& k, const std::map<VertexId, double>& u) {
    auto len = [&](VertexId i, VertexId j) { return std::exp(0.5 * (u.at(i) + u.at(j))) * k.length(i, j); };
    auto apex = [&](VertexId v, double side) {
        const double ab = len(0, 1), av = len(0, v), bv = len(1, v);
        const double x = (ab * ab + av * av - bv * bv) / (2 * ab);
        return p2(x, side * std::sqrt(av * av - x * x));
    };
    return GeometricComplex(2, {{0, p2(0, 0)}, {1, p2(len(0, 1), 0)}, {2, apex(2, 1)}, {3, apex(3, -1)}},
                            {k.cells.begin(), k.cells.end()});
}

}  // namespace fixtures
