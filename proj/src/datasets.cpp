#include "pmanifold/datasets.hpp"

#include "pmanifold/error.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace pmanifold {

namespace {

void check_noise(double noise) {
    if (!(noise >= 0.0) || !std::isfinite(noise)) {
        throw InputError("noise amplitude must be finite and nonnegative");
    }
}

// Symmetric uniform draw; always consumes one variate so the sequence does
// not depend on the amplitude.
double symmetric(std::mt19937_64& rng, double amplitude) {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    return amplitude * (2.0 * u - 1.0);
}

}  // namespace

PointCloud paraboloid(std::size_t n, double noise, std::uint64_t seed) {
    check_noise(noise);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> side(-2.0, 2.0);
    RowMatrix points(static_cast<Eigen::Index>(n), 3);
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        const double y1 = side(rng);
        const double y2 = side(rng);
        points(i, 0) = y1;
        points(i, 1) = y2;
        points(i, 2) = y1 * y1 + y2 * y2 + symmetric(rng, noise);
    }
    return PointCloud(std::move(points));
}

PointCloud noisy_swiss_roll(std::size_t n, double noise, std::uint64_t seed) {
    check_noise(noise);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.25 * std::numbers::pi, 2.5 * std::numbers::pi);
    std::uniform_real_distribution<double> height(-2.0, 2.0);
    RowMatrix points(static_cast<Eigen::Index>(n), 3);
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        const double theta = angle(rng);
        const double phi = height(rng);
        const double r = std::pow(theta, 0.8);
        points(i, 0) = r * std::cos(theta) + symmetric(rng, noise);
        points(i, 1) = r * std::sin(theta) + symmetric(rng, noise);
        points(i, 2) = phi + symmetric(rng, noise);
    }
    return PointCloud(std::move(points));
}

MobbingData predator_mobbing(std::size_t agents, std::size_t steps, double rho, double noise_sd,
                             std::uint64_t seed) {
    if (agents < 1 || steps < 1) {
        throw InputError("predator mobbing needs at least one agent and one step");
    }
    check_noise(noise_sd);
    if (!std::isfinite(rho)) {
        throw InputError("revolution count must be finite");
    }
    constexpr double kRadius = 3.0;
    constexpr double kVelocity = 1.0 / 80.0;
    const double pi = std::numbers::pi;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    MobbingData out;
    RowMatrix points(static_cast<Eigen::Index>(steps), static_cast<Eigen::Index>(2 * agents));
    out.truth.resize(steps);
    for (std::size_t k = 0; k < steps; ++k) {
        const double kk = static_cast<double>(k);
        const auto row = static_cast<Eigen::Index>(k);
        for (std::size_t i = 1; i <= agents; ++i) {
            const double phase = 2.0 * pi * rho * kk / static_cast<double>(steps) +
                                 pi * static_cast<double>(i) / static_cast<double>(agents);
            const double ex = noise_sd * gauss(rng);
            const double ey = noise_sd * gauss(rng);
            const auto col = static_cast<Eigen::Index>(2 * (i - 1));
            points(row, col) = kRadius * std::cos(phase) + kk * kVelocity + ex;
            points(row, col + 1) = kRadius * std::sin(phase) + kk * kVelocity + ey;
        }
        const double x = points(row, 0);
        const double y = points(row, 1);
        out.truth[k] = Eigen::Vector2d((x - y) / std::sqrt(2.0), (x + y) / std::sqrt(2.0));
    }
    out.cloud = PointCloud(std::move(points));
    return out;
}

}  // namespace pmanifold
