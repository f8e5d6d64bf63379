#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace liouville {

enum class ErrorKind {
    NotOnLightCone,
    DimensionMismatch,
    NonOrthogonal,
    ImageAtInfinity,
    DegenerateSimplex,
    Degenerate,
    NotSimilar,
    UnknownVertex,
    TooFewPoints,
    NotConformallyEquivalent,
    EmptyEdgeSet,
    NotConformal,
    NotDomain,
    NotDelaunay,
    NotIsomorphic,
    VertexAtPole,
    NotConvex,
    NotInterior,
    MissingLength,
    DegenerateStar,
    DegenerateFacet,
    TooFewEdges,
    NotASphere,
    NotRealizable,
    BoundaryFace,
    Parse,
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::NotOnLightCone: return "NotOnLightCone";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NonOrthogonal: return "NonOrthogonal";
    case ErrorKind::ImageAtInfinity: return "ImageAtInfinity";
    case ErrorKind::DegenerateSimplex: return "DegenerateSimplex";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::NotSimilar: return "NotSimilar";
    case ErrorKind::UnknownVertex: return "UnknownVertex";
    case ErrorKind::TooFewPoints: return "TooFewPoints";
    case ErrorKind::NotConformallyEquivalent: return "NotConformallyEquivalent";
    case ErrorKind::EmptyEdgeSet: return "EmptyEdgeSet";
    case ErrorKind::NotConformal: return "NotConformal";
    case ErrorKind::NotDomain: return "NotDomain";
    case ErrorKind::NotDelaunay: return "NotDelaunay";
    case ErrorKind::NotIsomorphic: return "NotIsomorphic";
    case ErrorKind::VertexAtPole: return "VertexAtPole";
    case ErrorKind::NotConvex: return "NotConvex";
    case ErrorKind::NotInterior: return "NotInterior";
    case ErrorKind::MissingLength: return "MissingLength";
    case ErrorKind::DegenerateStar: return "DegenerateStar";
    case ErrorKind::DegenerateFacet: return "DegenerateFacet";
    case ErrorKind::TooFewEdges: return "TooFewEdges";
    case ErrorKind::NotASphere: return "NotASphere";
    case ErrorKind::NotRealizable: return "NotRealizable";
    case ErrorKind::BoundaryFace: return "BoundaryFace";
    case ErrorKind::Parse: return "Parse";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a machine-checkable kind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Raised by solve_scale_factors; keeps the least-squares residual that failed the test.
class NotConformallyEquivalentError : public Error {
public:
    explicit NotConformallyEquivalentError(double residual)
        : Error(ErrorKind::NotConformallyEquivalent,
                "log-length residual " + std::to_string(residual) + " exceeds tolerance"),
          residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

namespace tol {
// Relative tolerances; all geometric predicates scale these by a radius or diameter.
inline constexpr double kAbsoluteFloor = 1e-12;
inline constexpr double kProjective = 1e-8;
inline constexpr double kLightCone = 1e-8;
inline constexpr double kDegeneracy = 1e-9;  // smallest/largest singular value of edge vectors
inline constexpr double kInBall = 1e-9;
inline constexpr double kConvexity = 1e-9;
inline constexpr double kSimilarity = 1e-8;
inline constexpr double kOrthogonal = 1e-9;
inline constexpr double kScaleFactors = 1e-6;
inline constexpr double kLiouville = 1e-6;
}  // namespace tol

}  // namespace liouville
