#include <gtest/gtest.h>

#include <cmath>
#include <optional>
#include <sstream>

#include "fixtures.hpp"

using namespace liouville;
using fixtures::p3;

namespace {

template <class F>
std::optional<ErrorKind> kind_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    return std::nullopt;
}

io::ComplexDocument parse(const std::string& text) {
    std::istringstream in(text);
    return io::read_complex(in);
}

MobiusTransform transform(const std::string& body, int n = 3, bool raw = false) {
    std::istringstream in("liouville-transform 1\n" + body);
    return io::read_transform(in, n, raw);
}

}  // namespace

TEST(ComplexFormat, RoundTripsCoordinatesExactly) {
    Random rng(51);
    for (int trial = 0; trial < 5; ++trial) {
        const auto k = generate_domain(3, 10, 3, rng);
        std::ostringstream out;
        io::write_complex(out, k);
        const auto doc = parse(out.str());
        ASSERT_TRUE(doc.is_geometric());
        const GeometricComplex back = doc.to_geometric();
        EXPECT_EQ(back.dim, k.dim);
        EXPECT_EQ(back.cells, k.cells);
        for (const auto& [id, p] : k.vertices) EXPECT_EQ(back.vertices.at(id), p);
    }
}

TEST(ComplexFormat, RoundTripsLengths) {
    const auto m = edge_length_manifold(fixtures::octahedron_star());
    std::ostringstream out;
    io::write_manifold(out, m);
    const auto doc = parse(out.str());
    EXPECT_FALSE(doc.is_geometric());
    const EdgeLengthManifold back = doc.to_manifold();
    EXPECT_EQ(back.cells, m.cells);
    EXPECT_EQ(back.lengths, m.lengths);
}

TEST(ComplexFormat, CommentsAndBlankLines) {
    const auto doc = parse(
        "# a triangle\n"
        "liouville-complex 1\n\n"
        "dimension 2   # plane\n"
        "vertex 0 0 0\nvertex 1 1 0\nvertex 2 0 1\n"
        "cell 2 0 1\n");
    const auto k = doc.to_geometric();
    EXPECT_EQ(k.cells, (std::set<Simplex>{{0, 1, 2}}));
    EXPECT_EQ(k.vertices.at(1), fixtures::p2(1, 0));
}

TEST(ComplexFormat, Errors) {
    const std::vector<std::string> bad{
        "",
        "liouville-complex 2\ndimension 2\n",
        "liouville-complex 1\nvertex 0 0 0\n",
        "liouville-complex 1\ndimension 2\nvertex 0 0\n",
        "liouville-complex 1\ndimension 2\nvertex 0 0 x\n",
        "liouville-complex 1\ndimension 2\nvertex 0 0 nan\n",
        "liouville-complex 1\ndimension 2\nvertex 0 0 0\nvertex 0 1 1\n",
        "liouville-complex 1\ndimension 2\ncell 0 1\n",
        "liouville-complex 1\ndimension 2\nvertex 0 0 0\nvertex 1\n",
        "liouville-complex 1\ndimension 2\nvertex 0 0 0\nvertex 1 1 0\nvertex 2 0 1\ncell 0 1 3\n",
        "liouville-complex 1\ndimension 2\nvertex 0 0 0\nlength 0 1 1\n",
        "liouville-complex 1\ndimension 2\nlength 0 1 -1\n",
        "liouville-complex 1\ndimension 2\nlength 0 1 1\nlength 1 0 2\n",
        "liouville-complex 1\ndimension 2\nface 0 1\n",
    };
    for (const auto& text : bad) EXPECT_EQ(kind_of([&] { parse(text); }), ErrorKind::Parse) << text;
}

TEST(ComplexFormat, MissingLength) {
    const auto doc = parse("liouville-complex 1\ndimension 2\ncell 0 1 2\nlength 0 1 1\nlength 1 2 1\n");
    EXPECT_EQ(kind_of([&] { doc.to_manifold(); }), ErrorKind::MissingLength);
}

TEST(MapFormat, RoundTrip) {
    io::MapDocument doc{"a.cx", "b.cx", {{0, 3}, {1, 2}, {2, 1}, {3, 0}}};
    std::ostringstream out;
    io::write_map(out, doc);
    std::istringstream in(out.str());
    const auto back = io::read_map(in);
    EXPECT_EQ(back.source, "a.cx");
    EXPECT_EQ(back.target, "b.cx");
    EXPECT_EQ(back.phi, doc.phi);
}

TEST(MapFormat, RejectsNonBijection) {
    for (const std::string text : {"liouville-map 1\nmap 0 1\nmap 0 2\n", "liouville-map 1\nmap 0 1\nmap 2 1\n",
                                   "liouville-map 1\nmap 0\n"}) {
        std::istringstream in(text);
        EXPECT_EQ(kind_of([&] { io::read_map(in); }), ErrorKind::Parse) << text;
    }
}

TEST(FactorsFormat, RoundTrip) {
    ConformalFactors f;
    f.u = {{0, std::log(2.0)}, {4, -1.0 / 3.0}, {9, 0.0}};
    std::ostringstream out;
    io::write_factors(out, f);
    std::istringstream in(out.str());
    EXPECT_EQ(io::read_factors(in), f.u);
}

TEST(TransformFormat, Primitives) {
    const Point x = p3(0.3, -0.7, 2.0);
    EXPECT_TRUE(mobius_equal(transform(""), MobiusTransform::identity(3)));
    EXPECT_TRUE(mobius_apply_finite(transform("scale 2\n"), x).isApprox(2 * x, 1e-14));
    EXPECT_TRUE(mobius_apply_finite(transform("translate 1 2 3\n"), x).isApprox(x + p3(1, 2, 3), 1e-14));
    EXPECT_TRUE(mobius_apply_finite(transform("rotate 0 1 1.5707963267948966\n"), x).isApprox(p3(0.7, 0.3, 2.0), 1e-14));
    EXPECT_TRUE(mobius_apply_finite(transform("orthogonal 1 0 0 0 0 1 0 1 0\n"), x).isApprox(p3(0.3, 2.0, -0.7), 1e-14));
    // x ↦ c + r²(x - c)/|x - c|²
    const Point c = p3(1, 0, 0);
    const Point expected = c + 4.0 * (x - c) / (x - c).squaredNorm();
    EXPECT_TRUE(mobius_apply_finite(transform("inversion 2 1 0 0\n"), x).isApprox(expected, 1e-14));
}

TEST(TransformFormat, AppliedInListedOrder) {
    const Point x = p3(1, 1, 1);
    EXPECT_TRUE(mobius_apply_finite(transform("scale 2\ntranslate 1 0 0\n"), x).isApprox(p3(3, 2, 2), 1e-14));
    EXPECT_TRUE(mobius_apply_finite(transform("translate 1 0 0\nscale 2\n"), x).isApprox(p3(4, 2, 2), 1e-14));
}

TEST(TransformFormat, RawMatrix) {
    const MobiusTransform m = transform("inversion 1 0 0 0\nscale 3\n");
    std::string body = "matrix";
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) body += ' ' + io::format_number(m.matrix()(i, j));
    EXPECT_EQ(kind_of([&] { transform(body + "\n"); }), ErrorKind::Parse);
    EXPECT_TRUE(mobius_equal(transform(body + "\n", 3, true), m, 1e-12));
}

TEST(TransformFormat, Errors) {
    const std::vector<std::string> bad{
        "scale 0\n",        "scale -1\n",          "translate 1 2\n",      "inversion 0 0 0 0\n",
        "inversion 1 0 0\n", "rotate 0 3 1\n",      "rotate 1 1 1\n",       "orthogonal 1 0 0 0 2 0 0 0 1\n",
        "shear 1\n",         "dimension 2\n",       "matrix 1 0\n",
    };
    for (const auto& body : bad) EXPECT_EQ(kind_of([&] { transform(body, 3, true); }), ErrorKind::Parse) << body;
}

TEST(Files, MissingFile) {
    EXPECT_EQ(kind_of([] { io::read_file("/nonexistent/complex.txt", io::read_complex); }), ErrorKind::Parse);
}
