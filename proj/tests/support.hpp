#pragma once

#include "pmanifold/point_cloud.hpp"

#include <cstdint>
#include <random>

namespace pmanifold::testing {

inline PointCloud random_cloud(std::size_t n, std::size_t d, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    PointCloud cloud(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            cloud.row(i)(static_cast<Eigen::Index>(j)) = u(rng);
        }
    }
    return cloud;
}

/// Uniform points on the z = 0 unit square in 3-D.
inline PointCloud flat_patch(std::size_t n, std::uint64_t seed) {
    PointCloud cloud = random_cloud(n, 3, seed);
    for (std::size_t i = 0; i < n; ++i) {
        cloud.row(i)(2) = 0.0;
    }
    return cloud;
}

inline PointCloud transformed(const PointCloud& cloud, const Eigen::MatrixXd& rotation, const Vector& shift) {
    RowMatrix m = cloud.matrix() * rotation.transpose();
    m.rowwise() += shift.transpose();
    return PointCloud(std::move(m));
}

/// Rotation about a unit axis in 3-D.
inline Eigen::MatrixXd rotation3(double angle, Eigen::Vector3d axis) {
    return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

}  // namespace pmanifold::testing
