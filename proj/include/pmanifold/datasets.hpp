#pragma once

#include "pmanifold/point_cloud.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <vector>

namespace pmanifold {

/// y3 = y1^2 + y2^2 + e with y1, y2 ~ U[-2, 2] and e ~ U(-noise, noise).
PointCloud paraboloid(std::size_t n = 2000, double noise = 0.05, std::uint64_t seed = 0);

/// theta ~ U[pi/4, 5pi/2], phi ~ U[-2, 2];
/// y = (theta^0.8 cos theta, theta^0.8 sin theta, phi) plus independent U(-noise, noise) per coordinate.
PointCloud noisy_swiss_roll(std::size_t n = 2500, double noise = 0.4, std::uint64_t seed = 0);

struct MobbingData {
    PointCloud cloud;                       ///< row k = (x_1, y_1, ..., x_N, y_N) at step k
    std::vector<Eigen::Vector2d> truth;     ///< first agent rotated clockwise by pi/4
};

/// N agents on a circle of radius 3 translating with velocity (1, 1)/80 per
/// step; agent i (1-based) has phase pi i / N. Gaussian noise with standard
/// deviation noise_sd is drawn per agent and coordinate.
MobbingData predator_mobbing(std::size_t agents = 20, std::size_t steps = 2000, double rho = 14.0,
                             double noise_sd = 0.01, std::uint64_t seed = 0);

}  // namespace pmanifold
