#pragma once

// Points, spheres, similarities and Möbius transformations of the one-point
// compactified space R^n ∪ {∞}, realized as (n+2)×(n+2) matrices acting on
// the light cone of Minkowski space R^{n+1,1}.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "liouville/error.hpp"

namespace liouville {

using Point = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// A point of R^n or the point at infinity.
class ExtendedPoint {
public:
    ExtendedPoint(Point p) : point_(std::move(p)) {}  // NOLINT(google-explicit-constructor)

    static ExtendedPoint infinity() { return ExtendedPoint(); }

    bool is_infinite() const noexcept { return !point_.has_value(); }
    bool is_finite() const noexcept { return point_.has_value(); }

    /// Only valid for finite points.
    const Point& point() const {
        if (!point_) throw Error(ErrorKind::ImageAtInfinity, "point at infinity has no coordinates");
        return *point_;
    }

private:
    ExtendedPoint() = default;
    std::optional<Point> point_;
};

struct Sphere {
    Point center;
    double radius = 1.0;
};

/// x ↦ scale · rotation · x + translation, rotation orthogonal.
struct SimilarityParams {
    double scale = 1.0;
    Matrix rotation;
    Point translation;

    Point apply(const Point& x) const { return scale * (rotation * x) + translation; }

    static SimilarityParams identity(int n) {
        return {1.0, Matrix::Identity(n, n), Point::Zero(n)};
    }
};

// ---------------------------------------------------------------------------
// Minkowski space R^{n+1,1}, J = diag(1, …, 1, -1).

inline double minkowski(const Vector& a, const Vector& b) {
    const auto k = a.size() - 1;
    return a.head(k).dot(b.head(k)) - a(k) * b(k);
}

inline Matrix minkowski_metric(int n) {
    Matrix j = Matrix::Identity(n + 2, n + 2);
    j(n + 1, n + 1) = -1.0;
    return j;
}

/// Light-cone lift x ↦ (x, (|x|²-1)/2, (|x|²+1)/2). ⟨lift x, lift y⟩ = -|x-y|²/2.
inline Vector lift(const Point& x) {
    const auto n = x.size();
    const double sq = x.squaredNorm();
    Vector y(n + 2);
    y.head(n) = x;
    y(n) = 0.5 * (sq - 1.0);
    y(n + 1) = 0.5 * (sq + 1.0);
    return y;
}

/// Representative (0, …, 0, 1, 1) of the infinity ray.
inline Vector lift_infinity(int n) {
    Vector y = Vector::Zero(n + 2);
    y(n) = 1.0;
    y(n + 1) = 1.0;
    return y;
}

inline Vector lift(const ExtendedPoint& x, int n) {
    return x.is_infinite() ? lift_infinity(n) : lift(x.point());
}

/// Inverse of lift, up to the projective scale of y.
inline ExtendedPoint project(const Vector& y, double light_cone_tol = tol::kLightCone) {
    const auto n = y.size() - 2;
    const double norm_sq = y.squaredNorm();
    if (norm_sq == 0.0) throw Error(ErrorKind::NotOnLightCone, "zero vector");
    if (std::abs(minkowski(y, y)) > light_cone_tol * norm_sq)
        throw Error(ErrorKind::NotOnLightCone, "vector is not null");
    const double s = y(n + 1) - y(n);
    if (std::abs(s) <= tol::kAbsoluteFloor * std::sqrt(norm_sq)) return ExtendedPoint::infinity();
    return Point(y.head(n) / s);
}

// ---------------------------------------------------------------------------

/// An element of PO(n+1,1). The stored representative always satisfies
/// MᵀJM = c·J with c > 0 and has a positive bottom-right entry, i.e. it maps
/// the future light cone to itself.
class MobiusTransform {
public:
    static MobiusTransform identity(int n) { return MobiusTransform(Matrix::Identity(n + 2, n + 2)); }

    /// Validates the Lorentz-conformality invariant before accepting a raw matrix.
    static MobiusTransform from_matrix(const Matrix& m, double tolerance = tol::kProjective) {
        if (m.rows() != m.cols() || m.rows() < 3)
            throw Error(ErrorKind::DimensionMismatch, "Möbius matrix must be square of size n+2 >= 3");
        const int n = static_cast<int>(m.rows()) - 2;
        const Matrix j = minkowski_metric(n);
        const Matrix g = m.transpose() * j * m;
        const double c = (g * j).trace() / (n + 2);
        if (!(c > 0.0) || (g - c * j).cwiseAbs().maxCoeff() > tolerance * c)
            throw Error(ErrorKind::NotOnLightCone, "matrix does not preserve the Minkowski form up to a positive scale");
        return MobiusTransform(m);
    }

    int dim() const noexcept { return static_cast<int>(matrix_.rows()) - 2; }
    const Matrix& matrix() const noexcept { return matrix_; }

    /// c in MᵀJM = c·J.
    double form_scale() const {
        const Matrix j = minkowski_metric(dim());
        return (matrix_.transpose() * j * matrix_ * j).trace() / (dim() + 2);
    }

    bool preserves_orientation() const { return matrix_.determinant() > 0.0; }

private:
    explicit MobiusTransform(Matrix m) : matrix_(std::move(m)) {
        const auto k = matrix_.rows() - 1;
        if (matrix_(k, k) < 0.0) matrix_ = -matrix_;
    }

    friend MobiusTransform mobius_compose(const MobiusTransform&, const MobiusTransform&);
    friend MobiusTransform mobius_inverse(const MobiusTransform&);
    friend MobiusTransform sphere_inversion(const Sphere&);
    friend MobiusTransform similarity(const SimilarityParams&);

    Matrix matrix_;
};

inline ExtendedPoint mobius_apply(const MobiusTransform& m, const ExtendedPoint& x) {
    if (x.is_finite() && x.point().size() != m.dim())
        throw Error(ErrorKind::DimensionMismatch, "point dimension does not match transform");
    return project(m.matrix() * lift(x, m.dim()));
}

inline Point mobius_apply_finite(const MobiusTransform& m, const Point& x) {
    auto image = mobius_apply(m, ExtendedPoint(x));
    if (image.is_infinite()) throw Error(ErrorKind::ImageAtInfinity, "point maps to infinity");
    return image.point();
}

/// first ∘ second: apply `second`, then `first`.
inline MobiusTransform mobius_compose(const MobiusTransform& first, const MobiusTransform& second) {
    if (first.dim() != second.dim()) throw Error(ErrorKind::DimensionMismatch, "compose");
    Matrix product = first.matrix() * second.matrix();
    // rescale to MᵀJM = J so repeated composition stays O(1)
    const double form_scale = std::pow(std::abs(product.determinant()), 2.0 / static_cast<double>(product.rows()));
    if (form_scale > 0.0) product /= std::sqrt(form_scale);
    return MobiusTransform(std::move(product));
}

/// Uses M⁻¹ = J Mᵀ J / c.
inline MobiusTransform mobius_inverse(const MobiusTransform& m) {
    const Matrix j = minkowski_metric(m.dim());
    return MobiusTransform(j * m.matrix().transpose() * j / m.form_scale());
}

/// Unit Frobenius norm, sign chosen so the largest-magnitude entry is positive.
inline Matrix normalized_representative(const Matrix& m) {
    Matrix out = m / m.norm();
    Eigen::Index r = 0, c = 0;
    out.cwiseAbs().maxCoeff(&r, &c);
    if (out(r, c) < 0.0) out = -out;
    return out;
}

/// Largest entrywise difference of the normalized representatives. When the
/// largest-magnitude entry is ambiguous in sign the better-aligned sign is used.
inline double mobius_distance(const MobiusTransform& a, const MobiusTransform& b) {
    if (a.dim() != b.dim()) throw Error(ErrorKind::DimensionMismatch, "mobius_distance");
    const Matrix na = normalized_representative(a.matrix());
    Matrix nb = normalized_representative(b.matrix());
    if ((na.array() * nb.array()).sum() < 0.0) nb = -nb;
    return (na - nb).cwiseAbs().maxCoeff();
}

inline bool mobius_equal(const MobiusTransform& a, const MobiusTransform& b, double tolerance = tol::kProjective) {
    return mobius_distance(a, b) <= tolerance;
}

/// x ↦ c + r²(x-c)/|x-c|², as the Minkowski reflection in the sphere's spacelike vector.
inline MobiusTransform sphere_inversion(const Sphere& s) {
    if (!(s.radius > 0.0)) throw Error(ErrorKind::Degenerate, "sphere radius must be positive");
    const int n = static_cast<int>(s.center.size());
    const Vector normal = lift(s.center) - 0.5 * s.radius * s.radius * lift_infinity(n);
    const double norm_sq = minkowski(normal, normal);  // = r²
    Vector j_normal = normal;
    j_normal(n + 1) = -j_normal(n + 1);
    Matrix m = Matrix::Identity(n + 2, n + 2) - (2.0 / norm_sq) * normal * j_normal.transpose();
    return MobiusTransform(std::move(m));
}

inline MobiusTransform similarity(const SimilarityParams& p) {
    const int n = static_cast<int>(p.translation.size());
    if (p.rotation.rows() != n || p.rotation.cols() != n)
        throw Error(ErrorKind::DimensionMismatch, "rotation must be n×n");
    if (!(p.scale > 0.0)) throw Error(ErrorKind::NonOrthogonal, "scale must be positive");
    if ((p.rotation.transpose() * p.rotation - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > tol::kOrthogonal)
        throw Error(ErrorKind::NonOrthogonal, "AᵀA deviates from the identity");

    // Null coordinates (x, a, c) with a = q - p, c = q + p; lift(x) = (x, 1, |x|²).
    Matrix to_null = Matrix::Identity(n + 2, n + 2);
    to_null(n, n) = -1.0;
    to_null(n, n + 1) = 1.0;
    to_null(n + 1, n) = 1.0;
    to_null(n + 1, n + 1) = 1.0;
    Matrix from_null = Matrix::Identity(n + 2, n + 2);
    from_null(n, n) = -0.5;
    from_null(n, n + 1) = 0.5;
    from_null(n + 1, n) = 0.5;
    from_null(n + 1, n + 1) = 0.5;

    Matrix rotate = Matrix::Identity(n + 2, n + 2);
    rotate.topLeftCorner(n, n) = p.rotation;

    Matrix scale = Matrix::Identity(n + 2, n + 2);
    scale(n, n) = 1.0 / p.scale;
    scale(n + 1, n + 1) = p.scale;

    const Vector& b = p.translation;
    Matrix translate = Matrix::Identity(n + 2, n + 2);
    translate.block(0, n, n, 1) = b;
    translate.block(n + 1, 0, 1, n) = 2.0 * b.transpose();
    translate(n + 1, n) = b.squaredNorm();

    return MobiusTransform(from_null * translate * scale * rotate * to_null);
}

/// Reflection negating the first coordinate.
inline MobiusTransform mirror_transform(int n) {
    Matrix a = Matrix::Identity(n, n);
    a(0, 0) = -1.0;
    return similarity({1.0, a, Point::Zero(n)});
}

/// Preimage of ∞.
inline ExtendedPoint pole(const MobiusTransform& m) {
    return mobius_apply(mobius_inverse(m), ExtendedPoint::infinity());
}

/// e^{u(x)} with |Mx - My| = sqrt(e^{u(x)} e^{u(y)}) |x - y|.
inline double conformal_factor(const MobiusTransform& m, const Point& x) {
    const int n = m.dim();
    const Vector y = m.matrix() * lift(x);
    const double weight = y(n + 1) - y(n);
    if (std::abs(weight) <= tol::kAbsoluteFloor * y.norm())
        throw Error(ErrorKind::ImageAtInfinity, "conformal factor undefined where the image is infinite");
    return std::sqrt(m.form_scale()) / std::abs(weight);
}

/// Image of x under the inversion in s (x must differ from the center).
inline Point invert_point(const Sphere& s, const Point& x) {
    const Point d = x - s.center;
    return s.center + (s.radius * s.radius / d.squaredNorm()) * d;
}

// ---------------------------------------------------------------------------
// Simplices

namespace detail {

inline Matrix edge_matrix(std::span<const Point> points) {
    const auto n = points.front().size();
    Matrix e(n, static_cast<Eigen::Index>(points.size()) - 1);
    for (std::size_t i = 1; i < points.size(); ++i) e.col(static_cast<Eigen::Index>(i) - 1) = points[i] - points[0];
    return e;
}

/// Smallest/largest singular value of the edge-vector matrix is at least the degeneracy ratio.
inline bool affinely_independent(std::span<const Point> points, double ratio = tol::kDegeneracy) {
    if (points.size() < 2) return true;
    const Matrix e = edge_matrix(points);
    if (e.cols() > e.rows()) return false;
    const Vector sv = Eigen::JacobiSVD<Matrix>(e).singularValues();
    return sv(0) > 0.0 && sv(sv.size() - 1) >= ratio * sv(0);
}

inline void check_simplex(std::span<const Point> points) {
    if (points.empty()) throw Error(ErrorKind::DegenerateSimplex, "empty simplex");
    const auto n = points.front().size();
    if (static_cast<Eigen::Index>(points.size()) != n + 1)
        throw Error(ErrorKind::DimensionMismatch, "an n-simplex in R^n needs n+1 points");
    for (const auto& p : points)
        if (p.size() != n) throw Error(ErrorKind::DimensionMismatch, "mixed point dimensions");
    if (!affinely_independent(points)) throw Error(ErrorKind::DegenerateSimplex, "points are affinely dependent");
}

inline double diameter(std::span<const Point> points) {
    double d = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j) d = std::max(d, (points[i] - points[j]).norm());
    return d;
}

}  // namespace detail

inline Sphere circumsphere(std::span<const Point> simplex) {
    detail::check_simplex(simplex);
    const Matrix e = detail::edge_matrix(simplex);
    Vector rhs(e.cols());
    for (Eigen::Index i = 0; i < e.cols(); ++i) rhs(i) = 0.5 * e.col(i).squaredNorm();
    const Vector offset = e.transpose().colPivHouseholderQr().solve(rhs);
    return {simplex[0] + offset, offset.norm()};
}

enum class BallSide { Inside, OnSphere, Outside };

/// Open-ball semantics: points within the tolerance band count as OnSphere, not Inside.
inline BallSide in_open_ball(const Sphere& s, const Point& x, double tolerance = tol::kInBall) {
    const double d = (x - s.center).norm() - s.radius;
    const double band = std::max(tolerance * s.radius, tol::kAbsoluteFloor);
    if (std::abs(d) <= band) return BallSide::OnSphere;
    return d < 0.0 ? BallSide::Inside : BallSide::Outside;
}

/// Sign of det(v1 - v0, …, vn - v0).
inline int simplex_orientation(std::span<const Point> simplex) {
    detail::check_simplex(simplex);
    return detail::edge_matrix(simplex).determinant() > 0.0 ? 1 : -1;
}

struct SimilarityPair {
    SimilarityParams preserving;
    SimilarityParams reversing;
};

/// Both similarities taking n points spanning an (n-1)-flat onto n similar points.
/// The two solutions differ by the reflection across the affine hull of dst.
inline SimilarityPair fit_similarity(std::span<const Point> src, std::span<const Point> dst,
                                     double tolerance = tol::kSimilarity) {
    if (src.size() != dst.size() || src.empty())
        throw Error(ErrorKind::DimensionMismatch, "fit_similarity needs equally many points");
    const auto n = src.front().size();
    if (static_cast<Eigen::Index>(src.size()) != n)
        throw Error(ErrorKind::DimensionMismatch, "fit_similarity expects n points in R^n");
    if (!detail::affinely_independent(src) || !detail::affinely_independent(dst))
        throw Error(ErrorKind::Degenerate, "point set is affinely dependent");

    double ratio_sum = 0.0;
    std::vector<double> ratios;
    for (std::size_t i = 0; i < src.size(); ++i)
        for (std::size_t j = i + 1; j < src.size(); ++j) {
            ratios.push_back((dst[i] - dst[j]).norm() / (src[i] - src[j]).norm());
            ratio_sum += ratios.back();
        }
    const double lambda = ratio_sum / static_cast<double>(ratios.size());
    for (double r : ratios)
        if (std::abs(r / lambda - 1.0) > tolerance)
            throw Error(ErrorKind::NotSimilar, "pairwise distance ratios disagree");

    Point cs = Point::Zero(n), cd = Point::Zero(n);
    for (std::size_t i = 0; i < src.size(); ++i) {
        cs += src[i];
        cd += dst[i];
    }
    cs /= static_cast<double>(n);
    cd /= static_cast<double>(n);
    Matrix xs(n, n), xd(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        xs.col(i) = src[static_cast<std::size_t>(i)] - cs;
        xd.col(i) = (dst[static_cast<std::size_t>(i)] - cd) / lambda;
    }
    const Point ns = Eigen::JacobiSVD<Matrix>(xs, Eigen::ComputeFullU).matrixU().col(n - 1);
    const Point nd = Eigen::JacobiSVD<Matrix>(xd, Eigen::ComputeFullU).matrixU().col(n - 1);
    const double weight = xs.squaredNorm() / static_cast<double>(std::max<Eigen::Index>(n - 1, 1));
    const Matrix cross = xd * xs.transpose();

    auto solve = [&](double sign) {
        const Matrix h = cross + sign * weight * nd * ns.transpose();
        Eigen::JacobiSVD<Matrix> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
        Matrix a = svd.matrixU() * svd.matrixV().transpose();
        return SimilarityParams{lambda, a, cd - lambda * a * cs};
    };
    SimilarityParams plus = solve(1.0), minus = solve(-1.0);
    if (plus.rotation.determinant() > 0.0) return {plus, minus};
    return {minus, plus};
}

/// Least-squares similarity between two matched point sets of any size (Umeyama).
/// With allow_reflection the orthogonal part may have determinant -1.
struct ProcrustesFit {
    SimilarityParams params;
    double max_residual = 0.0;
};

inline ProcrustesFit procrustes_similarity(std::span<const Point> src, std::span<const Point> dst,
                                           bool allow_reflection) {
    if (src.size() != dst.size() || src.empty())
        throw Error(ErrorKind::DimensionMismatch, "procrustes needs equally many points");
    const auto n = src.front().size();
    const auto m = static_cast<double>(src.size());
    Point cs = Point::Zero(n), cd = Point::Zero(n);
    for (std::size_t i = 0; i < src.size(); ++i) {
        cs += src[i];
        cd += dst[i];
    }
    cs /= m;
    cd /= m;
    Matrix cov = Matrix::Zero(n, n);
    double var_src = 0.0;
    for (std::size_t i = 0; i < src.size(); ++i) {
        cov += (dst[i] - cd) * (src[i] - cs).transpose();
        var_src += (src[i] - cs).squaredNorm();
    }
    if (var_src == 0.0) throw Error(ErrorKind::Degenerate, "source points coincide");
    Eigen::JacobiSVD<Matrix> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Vector signs = Vector::Ones(n);
    if (!allow_reflection && svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0) signs(n - 1) = -1.0;
    const Matrix a = svd.matrixU() * signs.asDiagonal() * svd.matrixV().transpose();
    const double scale = svd.singularValues().dot(signs) / var_src;
    ProcrustesFit fit{{scale, a, cd - scale * a * cs}, 0.0};
    for (std::size_t i = 0; i < src.size(); ++i)
        fit.max_residual = std::max(fit.max_residual, (fit.params.apply(src[i]) - dst[i]).norm());
    return fit;
}

}  // namespace liouville
