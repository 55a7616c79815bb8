#include "pmanifold/point_cloud.hpp"

#include "pmanifold/error.hpp"

#include <string>

namespace pmanifold {

PointCloud::PointCloud(RowMatrix points) : points_(std::move(points)) {
    if (points_.rows() > 0 && points_.cols() < 2) {
        throw InputError("point cloud dimension must be at least 2, got " + std::to_string(points_.cols()));
    }
    if (!points_.allFinite()) {
        throw InputError("point cloud contains non-finite coordinates");
    }
}

PointCloud::PointCloud(std::size_t n, std::size_t d)
    : PointCloud(RowMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d))) {}

PointCloud PointCloud::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) {
        return PointCloud{};
    }
    const std::size_t d = rows.front().size();
    RowMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != d) {
            throw InputError("row " + std::to_string(i + 1) + " has " + std::to_string(rows[i].size()) +
                             " coordinates, expected " + std::to_string(d));
        }
        for (std::size_t j = 0; j < d; ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return PointCloud(std::move(m));
}

PointCloud PointCloud::subset(const std::vector<std::size_t>& indices) const {
    RowMatrix m(static_cast<Eigen::Index>(indices.size()), points_.cols());
    for (std::size_t r = 0; r < indices.size(); ++r) {
        m.row(static_cast<Eigen::Index>(r)) = points_.row(static_cast<Eigen::Index>(indices[r]));
    }
    return PointCloud(std::move(m));
}

}  // namespace pmanifold
