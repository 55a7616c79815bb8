#include "pmanifold/datasets.hpp"
#include "pmanifold/error.hpp"
#include "pmanifold/isomap.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace pmanifold;

namespace {

const PointCloud kSquare = PointCloud::from_rows({{0, 0}, {1, 0}, {1, 1}, {0, 1}});

double worst_distance_error(const RowMatrix& embedding, const Eigen::MatrixXd& expected) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < embedding.rows(); ++i) {
        for (Eigen::Index j = 0; j < embedding.rows(); ++j) {
            worst = std::max(worst, std::abs((embedding.row(i) - embedding.row(j)).norm() - expected(i, j)));
        }
    }
    return worst;
}

}  // namespace

TEST(Isomap, SquareCornersUpToRigidMotion) {
    const IsomapResult r = isomap(kSquare, 3, 2);
    Eigen::MatrixXd d(4, 4);
    for (Eigen::Index i = 0; i < 4; ++i) {
        for (Eigen::Index j = 0; j < 4; ++j) {
            d(i, j) = kSquare.distance(i, j);
        }
    }
    EXPECT_LE(worst_distance_error(r.embedding, d), 1e-6);
    EXPECT_EQ(r.dropped, 0u);
    EXPECT_NEAR(r.residual_variances[1], 0.0, 1e-12);
}

TEST(Isomap, TwoNeighbourSquareIsAFourCycle) {
    // With k = 2 only sides are edges, so diagonals are 2 hops of length 1.
    Eigen::MatrixXd cycle(4, 4);
    cycle << 0, 1, 2, 1,
             1, 0, 1, 2,
             2, 1, 0, 1,
             1, 2, 1, 0;
    const IsomapResult r = isomap(kSquare, 2, 2);
    const RowMatrix oracle = classical_scaling(cycle, 2);
    Eigen::MatrixXd expected(4, 4);
    for (Eigen::Index i = 0; i < 4; ++i) {
        for (Eigen::Index j = 0; j < 4; ++j) {
            expected(i, j) = (oracle.row(i) - oracle.row(j)).norm();
        }
    }
    EXPECT_LE(worst_distance_error(r.embedding, expected), 1e-9);
    // The 4-cycle metric embeds as a square of side sqrt 2.
    EXPECT_NEAR(expected(0, 1), std::sqrt(2.0), 1e-9);
}

TEST(ClassicalScaling, RecoversPlanarConfiguration) {
    const PointCloud c = pmanifold::testing::random_cloud(12, 2, 71);
    Eigen::MatrixXd d(12, 12);
    for (Eigen::Index i = 0; i < 12; ++i) {
        for (Eigen::Index j = 0; j < 12; ++j) {
            d(i, j) = c.distance(i, j);
        }
    }
    std::vector<double> eig;
    const RowMatrix x = classical_scaling(d, 2, &eig);
    EXPECT_LE(worst_distance_error(x, d), 1e-9);
    ASSERT_EQ(eig.size(), 2u);
    EXPECT_GE(eig[0], eig[1]);
}

TEST(Isomap, StraightLineIsOneDimensional) {
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 30; ++i) {
        rows.push_back({0.1 * i, 0.2 * i, -0.05 * i});
    }
    const IsomapResult r = isomap(PointCloud::from_rows(rows), 4, 2);
    EXPECT_NEAR(r.residual_variances[0], 0.0, 1e-12);
}

TEST(Isomap, FlatPatchPreservesDistances) {
    const PointCloud c = pmanifold::testing::flat_patch(1000, 72);
    const IsomapResult r = isomap(c, 20, 2);
    ASSERT_EQ(r.kept.size(), c.size());
    std::vector<double> rel;
    for (std::size_t i = 0; i < c.size(); i += 5) {
        for (std::size_t j = i + 1; j < c.size(); j += 7) {
            const double ambient = c.distance(i, j);
            const double embedded = (r.embedding.row(static_cast<Eigen::Index>(i)) -
                                     r.embedding.row(static_cast<Eigen::Index>(j)))
                                        .norm();
            rel.push_back(std::abs(embedded - ambient) / ambient);
        }
    }
    std::nth_element(rel.begin(), rel.begin() + rel.size() / 2, rel.end());
    EXPECT_LE(rel[rel.size() / 2], 0.02);
}

TEST(Isomap, ResidualVarianceNonIncreasing) {
    const PointCloud roll = noisy_swiss_roll(600, 0.0, 73);
    const IsomapResult r = isomap(roll, 8, 3);
    ASSERT_EQ(r.residual_variances.size(), 3u);
    for (std::size_t e = 1; e < 3; ++e) {
        EXPECT_LE(r.residual_variances[e], r.residual_variances[e - 1] + 1e-12);
    }
    for (double v : r.residual_variances) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
    }
    for (std::size_t e = 1; e < r.eigenvalues.size(); ++e) {
        EXPECT_GE(r.eigenvalues[e - 1], r.eigenvalues[e]);
    }
}

TEST(Isomap, DropsPointsOutsideLargestComponent) {
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 20; ++i) {
        rows.push_back({0.1 * i, 0.0});
    }
    rows.push_back({50.0, 50.0});
    rows.push_back({50.1, 50.0});
    rows.push_back({50.0, 50.1});
    const IsomapResult r = isomap(PointCloud::from_rows(rows), 2, 1);
    EXPECT_EQ(r.dropped, 3u);
    EXPECT_EQ(r.kept.size(), 20u);
    EXPECT_EQ(r.embedding.rows(), 20);
}

TEST(Isomap, DeterministicAndValidated) {
    const PointCloud c = pmanifold::testing::random_cloud(80, 3, 74);
    EXPECT_EQ(isomap(c, 6, 2).embedding, isomap(c, 6, 2).embedding);
    EXPECT_THROW(isomap(c, 6, 4), InputError);
    EXPECT_THROW(isomap(c, 80, 2), InputError);
}
