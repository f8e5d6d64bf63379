#pragma once

// Seeded generators for point clouds, random Möbius transformations and
// Delaunay complexes. Output depends only on the seed: uniforms are built from
// raw 64-bit engine output rather than library distributions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "liouville/complex.hpp"

namespace liouville {

class Random {
public:
    explicit Random(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [lo, hi).
    double uniform(double lo = 0.0, double hi = 1.0) {
        return lo + (hi - lo) * static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    int uniform_int(int lo, int hi) { return lo + static_cast<int>(uniform() * (hi - lo + 1)); }

    double normal() {
        const double u1 = 1.0 - uniform(), u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    Point uniform_point(int n, double lo, double hi) {
        Point p(n);
        for (int i = 0; i < n; ++i) p(i) = uniform(lo, hi);
        return p;
    }

    Point unit_vector(int n) {
        Point p(n);
        do {
            for (int i = 0; i < n; ++i) p(i) = normal();
        } while (p.norm() < 1e-8);
        return p.normalized();
    }

    /// Haar-distributed element of O(n).
    Matrix orthogonal(int n) {
        Matrix g(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) g(i, j) = normal();
        Eigen::HouseholderQR<Matrix> qr(g);
        Matrix q = qr.householderQ();
        const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
        for (int i = 0; i < n; ++i)
            if (r(i, i) < 0.0) q.col(i) = -q.col(i);
        return q;
    }

private:
    std::mt19937_64 engine_;
};

inline std::vector<Point> sample_cube_points(int count, int n, std::uint64_t seed) {
    Random rng(seed);
    std::vector<Point> pts;
    for (int i = 0; i < count; ++i) pts.push_back(rng.uniform_point(n, 0.0, 1.0));
    return pts;
}

/// `inner` points in the ball of radius 0.35 and `shell` points on the unit sphere. With at least
/// one inner point no Delaunay cell has all its vertices on the shell, so every cell has an
/// interior vertex.
inline std::vector<Point> sample_domain_points(int inner, int shell, int n, Random& rng) {
    std::vector<Point> pts;
    for (int i = 0; i < inner; ++i) pts.push_back(0.35 * std::pow(rng.uniform(), 1.0 / n) * rng.unit_vector(n));
    for (int i = 0; i < shell; ++i) pts.push_back(rng.unit_vector(n));
    return pts;
}

struct RandomMobiusOptions {
    int max_factors = 4;
    double center_range = 2.0;
    double min_radius = 0.5, max_radius = 1.5;
    double min_scale = 0.5, max_scale = 2.0;
};

/// Product of 1..max_factors random sphere inversions and similarities.
inline MobiusTransform random_mobius(int n, Random& rng, const RandomMobiusOptions& options = {}) {
    MobiusTransform m = MobiusTransform::identity(n);
    const int factors = rng.uniform_int(1, options.max_factors);
    for (int i = 0; i < factors; ++i) {
        if (rng.uniform() < 0.5) {
            const Sphere s{rng.uniform_point(n, -options.center_range, options.center_range),
                           rng.uniform(options.min_radius, options.max_radius)};
            m = mobius_compose(sphere_inversion(s), m);
        } else {
            const SimilarityParams p{rng.uniform(options.min_scale, options.max_scale), rng.orthogonal(n),
                                     rng.uniform_point(n, -1.0, 1.0)};
            m = mobius_compose(similarity(p), m);
        }
    }
    return m;
}

/// Random Möbius map whose pole keeps a relative margin from every closed circumball of K and
/// whose conformal factor stays within [1/spread, spread] on the vertices. Images of locally
/// Delaunay complexes under such maps stay locally Delaunay.
inline MobiusTransform random_mobius_for(const GeometricComplex& k, Random& rng, double margin = 0.25,
                                         double spread = 50.0, const RandomMobiusOptions& options = {}) {
    std::vector<Sphere> balls;
    for (const auto& c : k.cells) balls.push_back(circumsphere(k.points(c)));
    for (int attempt = 0; attempt < 10000; ++attempt) {
        const MobiusTransform m = random_mobius(k.dim, rng, options);
        const ExtendedPoint p = pole(m);
        if (p.is_finite() &&
            std::any_of(balls.begin(), balls.end(),
                        [&](const Sphere& s) { return (p.point() - s.center).norm() <= (1.0 + margin) * s.radius; }))
            continue;
        bool tame = true;
        for (const auto& [id, x] : k.vertices) {
            const double f = conformal_factor(m, x);
            tame = tame && f <= spread && f >= 1.0 / spread;
        }
        if (tame) return m;
    }
    throw Error(ErrorKind::Degenerate, "no admissible Möbius transformation found");
}

inline bool passes_validation(const GeometricComplex& k) {
    return is_discrete_domain(k).verdict && is_locally_delaunay(k).verdict;
}

struct GeneratedComplex {
    GeometricComplex complex;
    int attempts = 0;
    bool valid = false;  // discrete domain and locally Delaunay
};

/// Delaunay complex of `count` seeded uniform points in the unit cube. Attempts reseed
/// deterministically until the result is a locally Delaunay discrete domain.
inline GeneratedComplex generate_complex(int count, int n, std::uint64_t seed, int max_attempts = 200) {
    GeneratedComplex out;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        const auto pts = sample_cube_points(count, n, seed + static_cast<std::uint64_t>(attempt) * 0x9E3779B97F4A7C15ULL);
        out.complex = brute_force_delaunay(pts);
        out.attempts = attempt + 1;
        if (passes_validation(out.complex)) {
            out.valid = true;
            break;
        }
    }
    return out;
}

/// Discrete domain from `inner` points near the origin and `shell` points on the unit sphere.
/// Retries with fresh points until the Delaunay complex passes validation.
inline GeometricComplex generate_domain(int inner, int shell, int n, Random& rng, int max_attempts = 200) {
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        const auto pts = sample_domain_points(inner, shell, n, rng);
        GeometricComplex k = brute_force_delaunay(pts);
        if (passes_validation(k) && validate_geometry(k).empty()) return k;
    }
    throw Error(ErrorKind::NotDomain, "no valid domain within the attempt budget");
}

}  // namespace liouville
