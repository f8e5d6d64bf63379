#include "liouville/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include "liouville/liouville.hpp"

namespace liouville::cli {
namespace {

using io::format_number;

std::string ids(const Simplex& s) {
    std::string out;
    for (VertexId v : s) out += (out.empty() ? "" : " ") + std::to_string(v);
    return out;
}

void print_matrix(std::ostream& out, const Matrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        out << " ";
        for (Eigen::Index j = 0; j < m.cols(); ++j) out << ' ' << format_number(m(i, j));
        out << "\n";
    }
}

void print_factors(std::ostream& out, const ConformalFactors& f) {
    out << "residual: " << format_number(f.residual) << "\n";
    out << "kernel dimension: " << f.kernel_dimension << "\n";
    for (const auto& [id, u] : f.u) out << "u " << id << ' ' << format_number(u) << "\n";
}

io::ComplexDocument load_complex(const std::string& path) {
    return io::read_file(path, [](std::istream& in) { return io::read_complex(in); });
}

GeometricComplex load_geometric(const std::string& path) {
    const auto doc = load_complex(path);
    if (!doc.is_geometric()) throw Error(ErrorKind::Parse, path + ": command needs vertex coordinates");
    return doc.to_geometric();
}

// ---------------------------------------------------------------------------

int cmd_validate(const std::string& path, double tolerance, std::ostream& out) {
    const GeometricComplex k = load_geometric(path);
    const auto defects = validate_geometry(k);
    const DomainReport domain = is_discrete_domain(k);
    const DelaunayReport delaunay = is_locally_delaunay(k, {tolerance, false});

    out << "cells: " << k.cells.size() << "\n";
    out << "vertices: " << k.vertices.size() << "\n";
    out << "geometry defects: " << defects.size() << "\n";
    for (const auto& d : defects) out << "  " << d.description << "\n";

    out << "discrete domain: " << (domain.verdict ? "yes" : "no") << "\n";
    out << "  pure: " << (domain.pure ? "yes" : "no") << "\n";
    out << "  interior vertices: " << domain.interior_vertices.size() << "\n";
    out << "  every cell has an interior vertex: " << (domain.every_cell_has_interior_vertex ? "yes" : "no") << "\n";
    for (const auto& c : domain.cells_without_interior_vertex) out << "    no interior vertex in cell " << ids(c) << "\n";
    out << "  interior vertices connected: " << (domain.interior_subgraph_connected ? "yes" : "no") << "\n";

    out << "locally Delaunay: " << (delaunay.verdict ? "yes" : "no") << "\n";
    out << "  cospherical pairs: " << delaunay.cospherical_count << "\n";
    for (const auto& v : delaunay.violations)
        out << "  violation: vertex " << v.vertex << " inside circumsphere of cell " << ids(v.cell) << " (depth "
            << format_number(v.depth) << ")\n";

    return defects.empty() && domain.verdict && delaunay.verdict ? kOk : kNegative;
}

int cmd_verify(const std::string& a, const std::string& b, const std::string& map_path, double tolerance, std::ostream& out) {
    const GeometricComplex k = load_geometric(a);
    const GeometricComplex k2 = load_geometric(b);
    const auto map = io::read_file(map_path, [](std::istream& in) { return io::read_map(in); });
    const LiouvilleVerdict v = verify_liouville(k, k2, map.phi, {tolerance});

    out << "conformally equivalent: " << (v.conformally_equivalent ? "yes" : "no") << "\n";
    out << "mobius equivalent: " << (v.mobius_equivalent ? "yes" : "no") << "\n";
    if (v.factors) print_factors(out, *v.factors);
    if (v.conformally_equivalent) {
        out << "orientation reversing: " << (v.orientation_reversing ? "yes" : "no") << "\n";
        out << "max cell disagreement: " << format_number(v.max_cell_disagreement) << "\n";
    }
    if (v.transform) {
        out << "transform:\n";
        print_matrix(out, normalized_representative(v.transform->matrix()));
    }
    for (const auto& w : v.warnings) out << "warning: " << w << "\n";

    if (v.mobius_equivalent) return kOk;
    return v.conformally_equivalent ? kConformalOnly : kInequivalent;
}

int cmd_apply(const std::string& path, const std::string& transform_path, const std::string& output, std::string factors_path,
              bool raw_matrix, std::ostream& out) {
    const GeometricComplex k = load_geometric(path);
    const MobiusTransform m =
        io::read_file(transform_path, [&](std::istream& in) { return io::read_transform(in, k.dim, raw_matrix); });
    const MobiusImage image = mobius_image(k, m);

    if (output.empty() || output == "-") {
        io::write_complex(out, image.complex);
    } else {
        std::ofstream f(output);
        if (!f) throw Error(ErrorKind::Parse, "cannot write " + output);
        io::write_complex(f, image.complex);
        if (factors_path.empty()) factors_path = output + ".factors";
    }
    if (!factors_path.empty()) {
        std::ofstream f(factors_path);
        if (!f) throw Error(ErrorKind::Parse, "cannot write " + factors_path);
        io::write_factors(f, image.factors);
    }
    return kOk;
}

int cmd_flatness(const std::string& path, std::optional<VertexId> vertex, bool abstract, double tolerance, std::ostream& out) {
    const auto doc = load_complex(path);
    std::vector<VertexId> targets;
    auto pick = [&](const std::set<VertexId>& interior) {
        if (vertex) {
            if (!interior.contains(*vertex))
                throw Error(ErrorKind::NotInterior, "vertex " + std::to_string(*vertex) + " is not interior");
            targets = {*vertex};
        } else {
            targets.assign(interior.begin(), interior.end());
        }
        if (targets.empty()) out << "warning: no interior vertices; flatness holds vacuously\n";
    };

    bool any_negative = false, any_inconclusive = false;
    if (!abstract) {
        const GeometricComplex k = doc.to_geometric();
        pick(interior_vertices(k));
        for (VertexId v : targets) {
            const bool flat = flatness_check_embedded(k, v, tolerance);
            any_negative = any_negative || !flat;
            out << "vertex " << v << ": " << (flat ? "flat" : "not flat") << "\n";
        }
    } else {
        const EdgeLengthManifold m = doc.to_manifold();
        pick(interior_vertices(m.cells, m.dim));
        if (m.dim == 2)
            out << "note: n = 2 uses the strict polygon inequalities, each side shorter than the sum of the others\n";
        for (VertexId v : targets) {
            const AbstractFlatness f = abstract_flatness_check(m, v);
            any_negative = any_negative || f == AbstractFlatness::Refuted;
            any_inconclusive = any_inconclusive || f == AbstractFlatness::Inconclusive;
            out << "vertex " << v << ": " << to_string(f) << "\n";
        }
    }
    if (any_negative) return kNegative;
    return any_inconclusive ? kInconclusive : kOk;
}

int cmd_invariants(const std::string& path, std::ostream& out) {
    const auto doc = load_complex(path);
    const InvariantProfile p = doc.is_geometric() ? invariant_profile(doc.to_geometric()) : invariant_profile(doc.to_manifold());
    out << "cross ratios: " << p.per_cell_cross_ratios.size() << "\n";
    for (const auto& [key, r] : p.per_cell_cross_ratios)
        out << "ratio cell " << ids(key.first) << " quad " << ids(key.second) << ' ' << format_number(r) << "\n";
    if (doc.dim == 3) {
        out << "cone angles: " << p.cone_angles.size() << "\n";
        for (const auto& [e, angle] : p.cone_angles)
            out << "cone " << e.first << ' ' << e.second << ' ' << format_number(angle) << "\n";
    }
    return kOk;
}

int cmd_generate(int points, std::uint64_t seed, int dim, int max_attempts, const std::string& output, std::ostream& out,
                 std::ostream& err) {
    if (points < dim + 1) throw Error(ErrorKind::TooFewPoints, "need at least n+1 points");
    const GeneratedComplex g = generate_complex(points, dim, seed, max_attempts);
    if (output.empty() || output == "-") {
        io::write_complex(out, g.complex);
    } else {
        std::ofstream f(output);
        if (!f) throw Error(ErrorKind::Parse, "cannot write " + output);
        io::write_complex(f, g.complex);
    }
    if (!g.valid) {
        err << "generate: no valid complex after " << g.attempts << " attempts; wrote the last attempt\n";
        return kNegative;
    }
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Discrete conformal and Möbius equivalence of simplicial complexes", "liouville"};
    app.require_subcommand(1);
    std::function<int()> action;

    double tolerance = 0.0;
    std::string a, b, map_path, transform_path, output, factors_path;
    std::optional<VertexId> vertex;
    bool abstract = false, raw_matrix = false;
    int points = 10, dim = 3, max_attempts = 200;
    std::uint64_t seed = 1;

    auto* validate = app.add_subcommand("validate", "Check the discrete domain and local Delaunay conditions");
    validate->add_option("complex", a)->required();
    validate->add_option("--tol", tolerance, "in-ball tolerance");
    validate->callback([&] { action = [&] { return cmd_validate(a, tolerance > 0 ? tolerance : tol::kInBall, out); }; });

    auto* verify = app.add_subcommand("verify", "Decide conformal and Möbius equivalence under a vertex map");
    verify->add_option("source", a)->required();
    verify->add_option("target", b)->required();
    verify->add_option("map", map_path)->required();
    verify->add_option("--tol", tolerance, "equivalence tolerance");
    verify->callback([&] { action = [&] { return cmd_verify(a, b, map_path, tolerance > 0 ? tolerance : tol::kLiouville, out); }; });

    auto* apply = app.add_subcommand("apply", "Apply a Möbius transformation to a complex");
    apply->add_option("complex", a)->required();
    apply->add_option("transform", transform_path)->required();
    apply->add_option("-o,--output", output, "output complex file (default stdout)");
    apply->add_option("--factors", factors_path, "scale factor sidecar (default <output>.factors)");
    apply->add_flag("--raw-matrix", raw_matrix, "accept raw matrix records");
    apply->callback([&] { action = [&] { return cmd_apply(a, transform_path, output, factors_path, raw_matrix, out); }; });

    auto* flatness = app.add_subcommand("flatness", "Check conformal flatness at interior vertices");
    flatness->add_option("complex", a)->required();
    flatness->add_option("--vertex", vertex, "check a single vertex");
    flatness->add_flag("--abstract", abstract, "use edge lengths only");
    flatness->add_option("--tol", tolerance, "convexity tolerance");
    flatness->callback(
        [&] { action = [&] { return cmd_flatness(a, vertex, abstract, tolerance > 0 ? tolerance : tol::kConvexity, out); }; });

    auto* invariants = app.add_subcommand("invariants", "Print cross-ratios and cone angles");
    invariants->add_option("complex", a)->required();
    invariants->callback([&] { action = [&] { return cmd_invariants(a, out); }; });

    auto* generate = app.add_subcommand("generate", "Delaunay complex of seeded random points");
    generate->add_option("--points", points)->check(CLI::PositiveNumber);
    generate->add_option("--seed", seed);
    generate->add_option("--dim", dim)->check(CLI::Range(1, 8));
    generate->add_option("--attempts", max_attempts, "retry bound")->check(CLI::PositiveNumber);
    generate->add_option("-o,--output", output, "output complex file (default stdout)");
    generate->callback([&] { action = [&] { return cmd_generate(points, seed, dim, max_attempts, output, out, err); }; });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kInputError;
    }

    try {
        return action();
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    }
}

}  // namespace liouville::cli
