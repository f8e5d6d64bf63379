#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace liouville::detail {

/// max cᵀx subject to A x = b, x >= 0. Dense two-phase tableau simplex with Bland's rule,
/// sized for the handful of variables a simplex-pair test needs. Empty if infeasible;
/// +inf if unbounded.
inline std::optional<double> lp_maximize(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                                         double eps = 1e-11) {
    const Eigen::Index rows = a.rows(), cols = a.cols();
    const Eigen::Index total = cols + rows;  // original | artificial
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(rows + 2, total + 1);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const double sign = b(i) < 0.0 ? -1.0 : 1.0;
        t.row(i).head(cols) = sign * a.row(i);
        t(i, cols + i) = 1.0;
        t(i, total) = sign * b(i);
    }
    // row rows: phase-two objective (reduced costs of -c); row rows+1: phase-one objective
    t.row(rows).head(cols) = -c.transpose();
    for (Eigen::Index i = 0; i < rows; ++i) t.row(rows + 1) -= t.row(i);
    for (Eigen::Index i = 0; i < rows; ++i) t(rows + 1, cols + i) = 0.0;

    std::vector<Eigen::Index> basis(static_cast<std::size_t>(rows));
    for (Eigen::Index i = 0; i < rows; ++i) basis[static_cast<std::size_t>(i)] = cols + i;

    auto pivot = [&](Eigen::Index leave, Eigen::Index enter) {
        t.row(leave) /= t(leave, enter);
        for (Eigen::Index i = 0; i < t.rows(); ++i)
            if (i != leave && t(i, enter) != 0.0) t.row(i) -= t(i, enter) * t.row(leave);
        basis[static_cast<std::size_t>(leave)] = enter;
    };
    // returns false if unbounded
    auto run = [&](Eigen::Index objective, Eigen::Index allowed) {
        for (int iter = 0; iter < 10000; ++iter) {
            Eigen::Index enter = -1;
            for (Eigen::Index j = 0; j < allowed; ++j)
                if (t(objective, j) < -eps) {
                    enter = j;
                    break;
                }
            if (enter < 0) return true;
            Eigen::Index leave = -1;
            double best = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < rows; ++i) {
                if (t(i, enter) <= eps) continue;
                const double ratio = t(i, total) / t(i, enter);
                if (ratio < best - eps || (ratio <= best + eps && leave >= 0 &&
                                           basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
                    best = std::min(best, ratio);
                    leave = i;
                }
            }
            if (leave < 0) return false;
            pivot(leave, enter);
        }
        return true;
    };

    run(rows + 1, total);
    const double scale = 1.0 + b.cwiseAbs().sum();
    if (-t(rows + 1, total) > 1e-9 * scale) return std::nullopt;
    // drive remaining artificials out of the basis where possible
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (basis[static_cast<std::size_t>(i)] < cols) continue;
        for (Eigen::Index j = 0; j < cols; ++j)
            if (std::abs(t(i, j)) > 1e-9) {
                pivot(i, j);
                break;
            }
    }
    if (!run(rows, cols)) return std::numeric_limits<double>::infinity();
    return t(rows, total);
}

}  // namespace liouville::detail
