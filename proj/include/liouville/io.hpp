#pragma once

// Line-oriented text formats. Every document starts with a versioned header
// line; '#' starts a comment; numbers are written with 17 significant digits
// so that parse ∘ write is the identity.
//
//   liouville-complex 1          liouville-map 1          liouville-transform 1
//   dimension 3                  source a.cplx            inversion <r> <c_1..c_n>
//   vertex <id> <x_1..x_n>       target b.cplx            scale <λ>
//   cell <id_0..id_n>            map <v> <v'>             translate <b_1..b_n>
//   length <i> <j> <ℓ>                                    rotate <i> <j> <radians>
//                                                         orthogonal <a_11..a_nn>
//   liouville-factors 1                                   matrix <(n+2)² entries>
//   factor <id> <u>

#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "liouville/conformal.hpp"

namespace liouville::io {

inline constexpr int kFormatVersion = 1;

/// Parsed complex file: geometric (coordinates) or abstract (edge lengths).
struct ComplexDocument {
    int dim = 0;
    std::map<VertexId, std::optional<Point>> vertices;
    std::vector<Simplex> cells;
    EdgeLengths lengths;

    bool is_geometric() const {
        if (vertices.empty()) return false;
        for (const auto& [id, p] : vertices)
            if (!p) return false;
        return true;
    }

    GeometricComplex to_geometric() const {
        if (!is_geometric()) throw Error(ErrorKind::Parse, "complex has no vertex coordinates");
        std::map<VertexId, Point> verts;
        for (const auto& [id, p] : vertices) verts.emplace(id, *p);
        return GeometricComplex(dim, std::move(verts), cells);
    }

    /// Lengths come from coordinates for geometric documents.
    EdgeLengthManifold to_manifold() const {
        if (is_geometric()) return edge_length_manifold(to_geometric());
        EdgeLengthManifold m{dim, {}, lengths};
        for (const auto& c : cells) m.cells.insert(sorted_simplex(c));
        for (const auto& e : edges(m.cells))
            if (!m.lengths.contains(e))
                throw Error(ErrorKind::MissingLength, "edge " + std::to_string(e.first) + "-" + std::to_string(e.second) + " has no length");
        return m;
    }
};

namespace detail {

struct LineReader {
    std::istream& in;
    int line_no = 0;

    /// Next non-empty, comment-stripped line split into tokens.
    bool next(std::vector<std::string>& tokens) {
        std::string line;
        while (std::getline(in, line)) {
            ++line_no;
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            std::istringstream ss(line);
            tokens.clear();
            for (std::string t; ss >> t;) tokens.push_back(t);
            if (!tokens.empty()) return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": " + msg);
    }

    double number(const std::string& s) const {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            fail("expected a number, got '" + s + "'");
        }
        if (used != s.size() || !std::isfinite(v)) fail("expected a finite number, got '" + s + "'");
        return v;
    }

    VertexId id(const std::string& s) const {
        VertexId v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) fail("expected an integer id, got '" + s + "'");
        return v;
    }

    int integer(const std::string& s) const { return static_cast<int>(id(s)); }

    void header(const std::string& kind) {
        std::vector<std::string> t;
        if (!next(t) || t.size() != 2 || t[0] != kind) fail("expected header '" + kind + " " + std::to_string(kFormatVersion) + "'");
        if (integer(t[1]) != kFormatVersion) fail("unsupported format version " + t[1]);
    }
};

inline std::string format_number(double v) {
    std::ostringstream ss;
    ss << std::setprecision(17) << v;
    return ss.str();
}

}  // namespace detail

using detail::format_number;

inline ComplexDocument read_complex(std::istream& in) {
    detail::LineReader r{in};
    r.header("liouville-complex");
    ComplexDocument doc;
    std::vector<std::string> t;
    while (r.next(t)) {
        const std::string& key = t[0];
        if (key == "dimension") {
            if (t.size() != 2) r.fail("dimension takes one value");
            doc.dim = r.integer(t[1]);
            if (doc.dim < 1) r.fail("dimension must be positive");
        } else if (key == "vertex") {
            if (doc.dim < 1) r.fail("dimension must precede vertex records");
            if (t.size() != 2 && t.size() != static_cast<std::size_t>(doc.dim) + 2)
                r.fail("vertex takes an id and either no or n coordinates");
            const VertexId id = r.id(t[1]);
            std::optional<Point> p;
            if (t.size() > 2) {
                p = Point(doc.dim);
                for (int i = 0; i < doc.dim; ++i) (*p)(i) = r.number(t[static_cast<std::size_t>(i) + 2]);
            }
            if (!doc.vertices.emplace(id, std::move(p)).second) r.fail("duplicate vertex id " + t[1]);
        } else if (key == "cell") {
            if (doc.dim < 1) r.fail("dimension must precede cell records");
            if (t.size() != static_cast<std::size_t>(doc.dim) + 2) r.fail("cell takes n+1 vertex ids");
            Simplex c;
            for (std::size_t i = 1; i < t.size(); ++i) c.push_back(r.id(t[i]));
            doc.cells.push_back(std::move(c));
        } else if (key == "length") {
            if (t.size() != 4) r.fail("length takes two ids and a value");
            const double l = r.number(t[3]);
            if (!(l > 0.0)) r.fail("lengths must be positive");
            if (!doc.lengths.emplace(make_edge(r.id(t[1]), r.id(t[2])), l).second) r.fail("duplicate length record");
        } else {
            r.fail("unknown record '" + key + "'");
        }
    }
    if (doc.dim < 1) r.fail("missing dimension");
    bool any_coords = false;
    for (const auto& [id, p] : doc.vertices) any_coords = any_coords || p.has_value();
    if (any_coords && !doc.is_geometric()) r.fail("either all vertices carry coordinates or none do");
    if (any_coords && !doc.lengths.empty()) r.fail("length records are only allowed without coordinates");
    for (const auto& c : doc.cells)
        for (VertexId v : c)
            if (!doc.vertices.contains(v)) {
                if (any_coords) r.fail("cell references unknown vertex " + std::to_string(v));
                doc.vertices.emplace(v, std::nullopt);
            }
    return doc;
}

inline void write_complex(std::ostream& out, const GeometricComplex& k) {
    out << "liouville-complex " << kFormatVersion << "\n";
    out << "dimension " << k.dim << "\n";
    for (const auto& [id, p] : k.vertices) {
        out << "vertex " << id;
        for (Eigen::Index i = 0; i < p.size(); ++i) out << ' ' << format_number(p(i));
        out << "\n";
    }
    for (const auto& c : k.cells) {
        out << "cell";
        for (VertexId v : c) out << ' ' << v;
        out << "\n";
    }
}

inline void write_manifold(std::ostream& out, const EdgeLengthManifold& m) {
    out << "liouville-complex " << kFormatVersion << "\n";
    out << "dimension " << m.dim << "\n";
    for (const auto& c : m.cells) {
        out << "cell";
        for (VertexId v : c) out << ' ' << v;
        out << "\n";
    }
    for (const auto& [e, l] : m.lengths) out << "length " << e.first << ' ' << e.second << ' ' << format_number(l) << "\n";
}

struct MapDocument {
    std::string source, target;
    VertexMap phi;
};

inline MapDocument read_map(std::istream& in) {
    detail::LineReader r{in};
    r.header("liouville-map");
    MapDocument doc;
    std::set<VertexId> image;
    std::vector<std::string> t;
    while (r.next(t)) {
        if (t[0] == "source" && t.size() == 2) {
            doc.source = t[1];
        } else if (t[0] == "target" && t.size() == 2) {
            doc.target = t[1];
        } else if (t[0] == "map" && t.size() == 3) {
            const VertexId a = r.id(t[1]), b = r.id(t[2]);
            if (!doc.phi.emplace(a, b).second) r.fail("vertex " + t[1] + " mapped twice");
            if (!image.insert(b).second) r.fail("vertex " + t[2] + " is the image of two vertices");
        } else {
            r.fail("unknown or malformed record '" + t[0] + "'");
        }
    }
    return doc;
}

inline void write_map(std::ostream& out, const MapDocument& doc) {
    out << "liouville-map " << kFormatVersion << "\n";
    if (!doc.source.empty()) out << "source " << doc.source << "\n";
    if (!doc.target.empty()) out << "target " << doc.target << "\n";
    for (const auto& [a, b] : doc.phi) out << "map " << a << ' ' << b << "\n";
}

inline void write_factors(std::ostream& out, const ConformalFactors& f) {
    out << "liouville-factors " << kFormatVersion << "\n";
    for (const auto& [id, u] : f.u) out << "factor " << id << ' ' << format_number(u) << "\n";
}

inline std::map<VertexId, double> read_factors(std::istream& in) {
    detail::LineReader r{in};
    r.header("liouville-factors");
    std::map<VertexId, double> u;
    std::vector<std::string> t;
    while (r.next(t)) {
        if (t[0] != "factor" || t.size() != 3) r.fail("expected 'factor <id> <u>'");
        u[r.id(t[1])] = r.number(t[2]);
    }
    return u;
}

/// Composition of primitives; lines are applied in order, first line first.
/// Raw `matrix` records are rejected unless allow_raw_matrix is set.
inline MobiusTransform read_transform(std::istream& in, int n, bool allow_raw_matrix = false) {
    detail::LineReader r{in};
    r.header("liouville-transform");
    MobiusTransform m = MobiusTransform::identity(n);
    std::vector<std::string> t;
    auto numbers = [&](std::size_t from) {
        std::vector<double> v;
        for (std::size_t i = from; i < t.size(); ++i) v.push_back(r.number(t[i]));
        return v;
    };
    auto then = [&](const MobiusTransform& next) { m = mobius_compose(next, m); };
    while (r.next(t)) {
        const std::string& key = t[0];
        const auto args = numbers(key == "rotate" ? 3 : 1);
        if (key == "dimension") {
            if (args.size() != 1 || static_cast<int>(args[0]) != n) r.fail("transform dimension does not match the complex");
        } else if (key == "inversion") {
            if (args.size() != static_cast<std::size_t>(n) + 1) r.fail("inversion takes a radius and n center coordinates");
            if (!(args[0] > 0.0)) r.fail("inversion radius must be positive");
            then(sphere_inversion({Eigen::Map<const Vector>(args.data() + 1, n), args[0]}));
        } else if (key == "scale") {
            if (args.size() != 1 || !(args[0] > 0.0)) r.fail("scale takes one positive factor");
            then(similarity({args[0], Matrix::Identity(n, n), Point::Zero(n)}));
        } else if (key == "translate") {
            if (args.size() != static_cast<std::size_t>(n)) r.fail("translate takes n components");
            then(similarity({1.0, Matrix::Identity(n, n), Eigen::Map<const Vector>(args.data(), n)}));
        } else if (key == "rotate") {
            if (t.size() != 4) r.fail("rotate takes two axis indices and an angle");
            const int i = r.integer(t[1]), j = r.integer(t[2]);
            if (i < 0 || j < 0 || i >= n || j >= n || i == j) r.fail("rotation axes out of range");
            const double angle = r.number(t[3]);
            Matrix a = Matrix::Identity(n, n);
            a(i, i) = std::cos(angle);
            a(j, j) = std::cos(angle);
            a(i, j) = -std::sin(angle);
            a(j, i) = std::sin(angle);
            then(similarity({1.0, a, Point::Zero(n)}));
        } else if (key == "orthogonal") {
            if (args.size() != static_cast<std::size_t>(n * n)) r.fail("orthogonal takes n*n entries");
            const Matrix a = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(args.data(), n, n);
            try {
                then(similarity({1.0, a, Point::Zero(n)}));
            } catch (const Error& e) {
                r.fail(e.what());
            }
        } else if (key == "matrix") {
            if (!allow_raw_matrix) r.fail("raw matrix records need the raw-matrix option");
            if (args.size() != static_cast<std::size_t>((n + 2) * (n + 2))) r.fail("matrix takes (n+2)^2 entries");
            const Matrix raw = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(args.data(), n + 2, n + 2);
            try {
                then(MobiusTransform::from_matrix(raw));
            } catch (const Error& e) {
                r.fail(e.what());
            }
        } else {
            r.fail("unknown transform primitive '" + key + "'");
        }
    }
    return m;
}

template <class Reader>
auto read_file(const std::string& path, Reader&& reader) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Parse, "cannot open " + path);
    return reader(in);
}

}  // namespace liouville::io
