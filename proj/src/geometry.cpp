#include "pmanifold/geometry.hpp"

#include "pmanifold/error.hpp"
#include "pmanifold/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <queue>
#include <set>
#include <tuple>
#include <string>
#include <utility>

namespace pmanifold {

namespace {

constexpr double kTieTolerance = 1e-9;
constexpr double kZeroComponent = 1e-12;

void make_first_component_positive(Vector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) > kZeroComponent) {
            if (v(i) < 0.0) {
                v = -v;
            }
            return;
        }
    }
}

// Lexicographically largest unit vector in the column span of the
// orthonormal basis `basis`.
Vector lexicographic_max(const Eigen::MatrixXd& basis) {
    for (Eigen::Index k = 0; k < basis.rows(); ++k) {
        Vector w = basis * basis.row(k).transpose();
        const double norm = w.norm();
        if (norm > kZeroComponent) {
            return w / norm;
        }
    }
    return basis.col(0);
}

double spread_along(const PointCloud& cloud, const Vector& mu, const Vector& v, double eigenvalue,
                    SpreadMode mode) {
    if (mode == SpreadMode::StandardDeviation) {
        return std::sqrt(std::max(eigenvalue, 0.0));
    }
    double extent = 0.0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        extent = std::max(extent, std::abs((cloud.point(i) - mu).dot(v)));
    }
    return extent;
}

Vector column_mean(const PointCloud& cloud) { return cloud.matrix().colwise().mean().transpose(); }

}  // namespace

ReferenceFrame ReferenceFrame::from_directions(Vector mu, Vector v1, double sigma1, Vector v2, double sigma2) {
    ReferenceFrame frame;
    frame.q1 = mu + v1 * sigma1;
    frame.q2 = mu + v2 * sigma2;
    frame.mu = std::move(mu);
    frame.v1 = std::move(v1);
    frame.v2 = std::move(v2);
    frame.sigma1 = sigma1;
    frame.sigma2 = sigma2;
    return frame;
}

ReferenceFrame pca2(const PointCloud& cloud, SpreadMode spread) {
    if (cloud.size() < 3) {
        throw InputError("pca2 needs at least 3 points, got " + std::to_string(cloud.size()));
    }
    const Vector mu = column_mean(cloud);
    const Eigen::MatrixXd centered = cloud.matrix().rowwise() - mu.transpose();
    const Eigen::MatrixXd covariance =
        (centered.transpose() * centered) / static_cast<double>(cloud.size() - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(covariance);
    if (solver.info() != Eigen::Success) {
        throw AlgorithmError("covariance eigendecomposition failed");
    }
    // Eigen orders eigenvalues ascending; walk from the top.
    const Vector values = solver.eigenvalues().reverse();
    const Eigen::MatrixXd vectors = solver.eigenvectors().rowwise().reverse();
    const Eigen::Index d = values.size();

    const double top = values(0);
    const double scale = 1.0 + mu.squaredNorm();
    if (!(top > 1e-14 * scale)) {
        throw AlgorithmError("no principal direction");
    }
    if (!(values(1) > 1e-10 * top)) {
        throw AlgorithmError("second principal direction undefined");
    }

    std::vector<Vector> chosen;
    for (Eigen::Index rank = 0; rank < 2; ++rank) {
        // All eigenvectors sharing (within tolerance) the rank-th eigenvalue.
        std::vector<Eigen::Index> tied;
        for (Eigen::Index j = 0; j < d; ++j) {
            if (std::abs(values(j) - values(rank)) <= kTieTolerance * top) {
                tied.push_back(j);
            }
        }
        Eigen::MatrixXd basis(d, static_cast<Eigen::Index>(tied.size()));
        for (std::size_t c = 0; c < tied.size(); ++c) {
            basis.col(static_cast<Eigen::Index>(c)) = vectors.col(tied[c]);
        }
        // Remove directions already taken, then re-orthonormalise, dropping
        // columns that vanish after deflation.
        std::vector<Vector> ortho;
        for (Eigen::Index c = 0; c < basis.cols(); ++c) {
            Vector col = basis.col(c);
            for (const Vector& prev : chosen) {
                col -= prev * prev.dot(col);
            }
            for (const Vector& o : ortho) {
                col -= o * o.dot(col);
            }
            const double norm = col.norm();
            if (norm > 1e-8) {
                ortho.push_back(col / norm);
            }
        }
        if (ortho.empty()) {
            throw AlgorithmError("second principal direction undefined");
        }
        Vector v;
        if (ortho.size() == 1 && tied.size() == 1) {
            v = ortho.front();
            make_first_component_positive(v);
        } else {
            Eigen::MatrixXd sub(d, static_cast<Eigen::Index>(ortho.size()));
            for (std::size_t c = 0; c < ortho.size(); ++c) {
                sub.col(static_cast<Eigen::Index>(c)) = ortho[c];
            }
            v = lexicographic_max(sub);
        }
        v.normalize();
        chosen.push_back(v);
    }

    const double sigma1 = spread_along(cloud, mu, chosen[0], values(0), spread);
    const double sigma2 = spread_along(cloud, mu, chosen[1], values(1), spread);
    return ReferenceFrame::from_directions(mu, chosen[0], sigma1, chosen[1], sigma2);
}

ReferenceFrame axis_frame(const PointCloud& cloud, std::size_t axis1, std::size_t axis2, SpreadMode spread) {
    if (cloud.empty()) {
        throw InputError("axis frame needs a non-empty cloud");
    }
    if (axis1 >= cloud.dim() || axis2 >= cloud.dim() || axis1 == axis2) {
        throw InputError("axis frame needs two distinct axes below dimension " + std::to_string(cloud.dim()));
    }
    const Vector mu = column_mean(cloud);
    Vector v1 = Vector::Zero(static_cast<Eigen::Index>(cloud.dim()));
    Vector v2 = v1;
    v1(static_cast<Eigen::Index>(axis1)) = 1.0;
    v2(static_cast<Eigen::Index>(axis2)) = 1.0;
    auto variance = [&](const Vector& v) {
        double acc = 0.0;
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            const double s = (cloud.point(i) - mu).dot(v);
            acc += s * s;
        }
        return cloud.size() > 1 ? acc / static_cast<double>(cloud.size() - 1) : 0.0;
    };
    const double sigma1 = spread_along(cloud, mu, v1, variance(v1), spread);
    const double sigma2 = spread_along(cloud, mu, v2, variance(v2), spread);
    return ReferenceFrame::from_directions(mu, v1, sigma1, v2, sigma2);
}

std::vector<std::vector<std::pair<std::size_t, double>>> WeightedGraph::adjacency() const {
    std::vector<std::vector<std::pair<std::size_t, double>>> adj(node_count);
    for (const Edge& e : edges) {
        adj[e.from].emplace_back(e.to, e.weight);
        if (!directed) {
            adj[e.to].emplace_back(e.from, e.weight);
        }
    }
    return adj;
}

WeightedGraph range_graph(const PointCloud& cloud, double radius) {
    if (!(radius > 0.0)) {
        throw InputError("range radius must be positive");
    }
    const std::size_t n = cloud.size();
    std::vector<std::vector<Edge>> rows(n);
    parallel_for(n, [&](std::size_t i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dist = cloud.distance(i, j);
            if (dist > 0.0 && dist <= radius) {
                rows[i].push_back({i, j, dist});
            }
        }
    });
    WeightedGraph graph{n, {}, false};
    for (auto& row : rows) {
        graph.edges.insert(graph.edges.end(), row.begin(), row.end());
    }
    return graph;
}

WeightedGraph knn_graph(const PointCloud& cloud, std::size_t k) {
    const std::size_t n = cloud.size();
    if (k < 1) {
        throw InputError("k must be at least 1");
    }
    if (k >= n) {
        throw InputError("k too large: k=" + std::to_string(k) + " needs more than " + std::to_string(n) +
                         " points");
    }
    std::vector<std::vector<Edge>> rows(n);
    parallel_for(n, [&](std::size_t i) {
        std::vector<std::pair<double, std::size_t>> candidates;
        candidates.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) {
                candidates.emplace_back(cloud.distance(i, j), j);
            }
        }
        std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k), candidates.end());
        rows[i].reserve(k);
        for (std::size_t r = 0; r < k; ++r) {
            rows[i].push_back({i, candidates[r].second, candidates[r].first});
        }
    });
    WeightedGraph graph{n, {}, true};
    graph.edges.reserve(n * k);
    for (auto& row : rows) {
        graph.edges.insert(graph.edges.end(), row.begin(), row.end());
    }
    return graph;
}

WeightedGraph symmetrize(const WeightedGraph& graph) {
    std::set<std::pair<std::size_t, std::size_t>> seen;
    WeightedGraph out{graph.node_count, {}, false};
    for (const Edge& e : graph.edges) {
        if (e.from == e.to) {
            continue;
        }
        const auto key = std::minmax(e.from, e.to);
        if (seen.insert(key).second) {
            out.edges.push_back({key.first, key.second, e.weight});
        }
    }
    std::sort(out.edges.begin(), out.edges.end(), [](const Edge& a, const Edge& b) {
        return std::tie(a.from, a.to) < std::tie(b.from, b.to);
    });
    return out;
}

std::vector<std::size_t> ShortestPaths::path_to(std::size_t target) const {
    if (target >= distance.size() || !std::isfinite(distance[target])) {
        return {};
    }
    std::vector<std::size_t> path;
    for (std::size_t v = target; v != kNoPredecessor; v = predecessor[v]) {
        path.push_back(v);
    }
    std::reverse(path.begin(), path.end());
    return path;
}

ShortestPaths dijkstra(const std::vector<std::vector<std::pair<std::size_t, double>>>& adjacency,
                       std::size_t source) {
    const std::size_t n = adjacency.size();
    if (source >= n) {
        throw InputError("dijkstra source " + std::to_string(source) + " out of range for " + std::to_string(n) +
                         " nodes");
    }
    ShortestPaths result;
    result.distance.assign(n, std::numeric_limits<double>::infinity());
    result.predecessor.assign(n, kNoPredecessor);
    std::vector<bool> settled(n, false);

    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    result.distance[source] = 0.0;
    queue.emplace(0.0, source);
    while (!queue.empty()) {
        const auto [dist, u] = queue.top();
        queue.pop();
        if (settled[u]) {
            continue;
        }
        settled[u] = true;
        for (const auto& [v, w] : adjacency[u]) {
            const double candidate = dist + w;
            if (candidate < result.distance[v]) {
                result.distance[v] = candidate;
                result.predecessor[v] = u;
                queue.emplace(candidate, v);
            }
        }
    }
    return result;
}

ShortestPaths dijkstra(const WeightedGraph& graph, std::size_t source) {
    for (const Edge& e : graph.edges) {
        if (e.weight < 0.0) {
            throw InputError("dijkstra requires nonnegative edge weights");
        }
    }
    return dijkstra(graph.adjacency(), source);
}

std::vector<std::size_t> connected_components(const WeightedGraph& graph) {
    const auto adj = graph.adjacency();
    // Directed edges still join components; treat them as undirected here.
    std::vector<std::vector<std::size_t>> undirected(graph.node_count);
    for (std::size_t u = 0; u < graph.node_count; ++u) {
        for (const auto& [v, w] : adj[u]) {
            undirected[u].push_back(v);
            if (graph.directed) {
                undirected[v].push_back(u);
            }
        }
    }
    constexpr std::size_t unset = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> label(graph.node_count, unset);
    std::size_t next = 0;
    std::vector<std::size_t> stack;
    for (std::size_t start = 0; start < graph.node_count; ++start) {
        if (label[start] != unset) {
            continue;
        }
        label[start] = next;
        stack.push_back(start);
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            for (std::size_t v : undirected[u]) {
                if (label[v] == unset) {
                    label[v] = next;
                    stack.push_back(v);
                }
            }
        }
        ++next;
    }
    return label;
}

}  // namespace pmanifold
