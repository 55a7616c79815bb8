#include "pmanifold/isomap.hpp"

#include "pmanifold/error.hpp"
#include "pmanifold/geometry.hpp"
#include "pmanifold/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace pmanifold {

namespace {

// 1 - r^2 between the upper triangles of two distance matrices.
double residual_variance(const Eigen::MatrixXd& geodesic, const RowMatrix& coords, Eigen::Index dims) {
    const Eigen::Index n = geodesic.rows();
    double sa = 0.0;
    double sb = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    double sab = 0.0;
    double count = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double a = geodesic(i, j);
            const double b = (coords.row(i).head(dims) - coords.row(j).head(dims)).norm();
            sa += a;
            sb += b;
            saa += a * a;
            sbb += b * b;
            sab += a * b;
            count += 1.0;
        }
    }
    const double cov = sab - sa * sb / count;
    const double va = saa - sa * sa / count;
    const double vb = sbb - sb * sb / count;
    if (!(va > 0.0) || !(vb > 0.0)) {
        return 1.0;
    }
    const double r = cov / std::sqrt(va * vb);
    return std::clamp(1.0 - r * r, 0.0, 1.0);
}

}  // namespace

RowMatrix classical_scaling(const Eigen::MatrixXd& distances, std::size_t dims, std::vector<double>* eigenvalues) {
    const Eigen::Index n = distances.rows();
    if (distances.cols() != n) {
        throw InputError("distance matrix must be square");
    }
    if (dims < 1 || static_cast<Eigen::Index>(dims) > n) {
        throw InputError("classical scaling dims must lie in [1, n]");
    }
    Eigen::MatrixXd b = distances.array().square().matrix();
    const Eigen::VectorXd row_mean = b.rowwise().mean();
    const double total = row_mean.mean();
    b = -0.5 * ((b.colwise() - row_mean).rowwise() - row_mean.transpose()).array() - 0.5 * total;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b);
    if (eig.info() != Eigen::Success) {
        throw AlgorithmError("classical scaling eigendecomposition failed");
    }
    RowMatrix coords(n, static_cast<Eigen::Index>(dims));
    if (eigenvalues) {
        eigenvalues->clear();
    }
    for (std::size_t c = 0; c < dims; ++c) {
        const Eigen::Index col = n - 1 - static_cast<Eigen::Index>(c);
        const double lambda = eig.eigenvalues()[col];
        Eigen::VectorXd v = eig.eigenvectors().col(col);
        // Fix the sign: largest-magnitude entry positive.
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v[arg] < 0.0) {
            v = -v;
        }
        coords.col(static_cast<Eigen::Index>(c)) = v * std::sqrt(std::max(lambda, 0.0));
        if (eigenvalues) {
            eigenvalues->push_back(lambda);
        }
    }
    return coords;
}

IsomapResult isomap(const PointCloud& cloud, std::size_t k, std::size_t dims) {
    if (dims < 1 || dims > cloud.dim()) {
        throw InputError("isomap dims must lie in [1, " + std::to_string(cloud.dim()) + "]");
    }
    if (k < 1) {
        throw InputError("k too small: isomap graph would be empty");
    }
    const WeightedGraph graph = symmetrize(knn_graph(cloud, k));
    const auto labels = connected_components(graph);
    std::vector<std::size_t> sizes(*std::max_element(labels.begin(), labels.end()) + 1, 0);
    for (std::size_t l : labels) {
        ++sizes[l];
    }
    const std::size_t largest = static_cast<std::size_t>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());

    IsomapResult result;
    std::vector<std::size_t> local(cloud.size(), kNoPredecessor);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (labels[i] == largest) {
            local[i] = result.kept.size();
            result.kept.push_back(i);
        }
    }
    result.dropped = cloud.size() - result.kept.size();
    const std::size_t n = result.kept.size();
    if (n < 2) {
        throw AlgorithmError("isomap graph has no connected pair of points");
    }
    std::vector<std::vector<std::pair<std::size_t, double>>> adjacency(n);
    for (const Edge& e : graph.edges) {
        if (local[e.from] != kNoPredecessor && local[e.to] != kNoPredecessor) {
            adjacency[local[e.from]].emplace_back(local[e.to], e.weight);
            adjacency[local[e.to]].emplace_back(local[e.from], e.weight);
        }
    }
    Eigen::MatrixXd geodesic(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    parallel_for(n, [&](std::size_t s) {
        const ShortestPaths sp = dijkstra(adjacency, s);
        for (std::size_t j = 0; j < n; ++j) {
            geodesic(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(s)) = sp.distance[j];
        }
    });
    // Dijkstra is exact, but round the two triangles together for symmetry.
    geodesic = (0.5 * (geodesic + geodesic.transpose())).eval();

    const std::size_t out_dims = std::min(dims, n);
    result.embedding = classical_scaling(geodesic, out_dims, &result.eigenvalues);
    result.residual_variances.resize(out_dims);
    parallel_for(out_dims, [&](std::size_t e) {
        result.residual_variances[e] = residual_variance(geodesic, result.embedding, static_cast<Eigen::Index>(e + 1));
    });
    return result;
}

}  // namespace pmanifold
