#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace pmanifold {

using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// n points in d-dimensional ambient space, one point per row.
///
/// Construction validates that every coordinate is finite and that d >= 2
/// whenever the cloud is non-empty.
class PointCloud {
public:
    PointCloud() = default;
    explicit PointCloud(RowMatrix points);
    PointCloud(std::size_t n, std::size_t d);

    static PointCloud from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t size() const { return static_cast<std::size_t>(points_.rows()); }
    std::size_t dim() const { return static_cast<std::size_t>(points_.cols()); }
    bool empty() const { return points_.rows() == 0; }

    auto point(std::size_t i) const { return points_.row(static_cast<Eigen::Index>(i)).transpose(); }
    auto row(std::size_t i) { return points_.row(static_cast<Eigen::Index>(i)); }

    const RowMatrix& matrix() const { return points_; }

    /// Rows selected by index, in the given order.
    PointCloud subset(const std::vector<std::size_t>& indices) const;

    double distance(std::size_t i, std::size_t j) const {
        return (points_.row(static_cast<Eigen::Index>(i)) - points_.row(static_cast<Eigen::Index>(j))).norm();
    }

private:
    RowMatrix points_;
};

}  // namespace pmanifold
