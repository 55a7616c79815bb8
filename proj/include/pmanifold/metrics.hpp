#pragma once

#include "pmanifold/geometry.hpp"
#include "pmanifold/point_cloud.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace pmanifold {

/// Directed kNN distances: entry (i, j) = |y_i - y_j| for each of i's k
/// nearest neighbours, zero elsewhere. Stored as exactly n k edges.
struct AdjacencyDistance {
    std::size_t n = 0;
    std::size_t k = 0;
    std::vector<Edge> entries;  ///< sorted by (from, to)
};

AdjacencyDistance adjacency_distance(const PointCloud& cloud, std::size_t k);

/// Mean absolute difference of two adjacency matrices over the union of their
/// nonzero entries, normalised by n k.
double delta(const AdjacencyDistance& a, const AdjacencyDistance& a_tilde);

/// Mean length of the directed kNN edges.
double mean_knn_distance(const AdjacencyDistance& a);

struct CorrelationScore {
    double r_total = 0.0;
    std::array<double, 2> r{};         ///< sign-aligned per-component correlations
    std::array<double, 2> p_values{};  ///< two-sided, t distribution with n - 2 dof
};

/// Pearson correlation of two equally long signals.
double pearson(const std::vector<double>& a, const std::vector<double>& b);

/// Per-component zero-lag correlation of an embedding against ground truth.
CorrelationScore correlation_score(const std::vector<Eigen::Vector2d>& embedding,
                                   const std::vector<Eigen::Vector2d>& truth);

enum class CurveKind { Linear, Quadratic, Exponential };

std::string to_string(CurveKind kind);
CurveKind curve_kind_from_string(const std::string& name);

/// Least-squares trend. Parameters: linear (a, b) for a + b x; quadratic
/// (a, b, c) for a + b x + c x^2; exponential (a, b) for a e^{b x}.
struct FitReport {
    CurveKind kind = CurveKind::Linear;
    std::vector<double> parameters;
    double r_squared = 0.0;

    double predict(double x) const;
};

/// 1 - SS_res / SS_tot.
double r_squared(const std::vector<double>& ys, const std::vector<double>& fitted);

FitReport fit_curve(const std::vector<double>& xs, const std::vector<double>& ys, CurveKind kind);

}  // namespace pmanifold
