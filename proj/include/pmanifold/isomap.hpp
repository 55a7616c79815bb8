#pragma once

#include "pmanifold/point_cloud.hpp"

#include <cstddef>
#include <vector>

namespace pmanifold {

struct IsomapResult {
    RowMatrix embedding;                       ///< one row per kept point, columns by decreasing eigenvalue
    std::vector<double> residual_variances;    ///< entry e-1 for dimension e = 1 .. dims
    std::vector<double> eigenvalues;           ///< top dims eigenvalues of the centred Gram matrix
    std::vector<std::size_t> kept;             ///< input indices of the embedded points
    std::size_t dropped = 0;                   ///< points outside the largest graph component
};

/// kNN graph (symmetrised) -> all-pairs Dijkstra -> classical scaling.
/// A disconnected graph is reduced to its largest component.
IsomapResult isomap(const PointCloud& cloud, std::size_t k, std::size_t dims);

/// Classical scaling of a symmetric distance matrix into `dims` coordinates.
RowMatrix classical_scaling(const Eigen::MatrixXd& distances, std::size_t dims,
                            std::vector<double>* eigenvalues = nullptr);

}  // namespace pmanifold
