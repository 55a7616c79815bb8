#pragma once

#include "pmanifold/point_cloud.hpp"

#include <cstddef>
#include <limits>
#include <vector>

namespace pmanifold {

/// How the directional spread sigma of a principal axis is measured.
enum class SpreadMode {
    HalfExtent,         ///< max_j |(y_j - mu)^T v|: slabs cover every point
    StandardDeviation,  ///< sqrt of the covariance eigenvalue
};

/// Data mean, two principal directions and the derived reference points.
struct ReferenceFrame {
    Vector mu;
    Vector v1;
    Vector v2;
    double sigma1 = 0.0;
    double sigma2 = 0.0;
    Vector q1;
    Vector q2;

    const Vector& direction(int axis) const { return axis == 1 ? v1 : v2; }
    double sigma(int axis) const { return axis == 1 ? sigma1 : sigma2; }

    /// Builds a frame from explicit directions; q_i = mu + v_i sigma_i.
    static ReferenceFrame from_directions(Vector mu, Vector v1, double sigma1, Vector v2, double sigma2);
};

/// Two leading principal components of the cloud.
///
/// Eigenvalue ties are resolved by taking, inside the tied eigenspace, the
/// lexicographically largest unit vector; every returned direction has a
/// positive first nonzero component.
ReferenceFrame pca2(const PointCloud& cloud, SpreadMode spread = SpreadMode::HalfExtent);

/// Frame whose directions are the coordinate axes `axis1` and `axis2`
/// (0-based); spreads follow `spread` as in pca2.
ReferenceFrame axis_frame(const PointCloud& cloud, std::size_t axis1, std::size_t axis2,
                          SpreadMode spread = SpreadMode::HalfExtent);

struct Edge {
    std::size_t from = 0;
    std::size_t to = 0;
    double weight = 0.0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Edge list over `node_count` nodes. Undirected graphs store each edge once
/// with from < to.
struct WeightedGraph {
    std::size_t node_count = 0;
    std::vector<Edge> edges;
    bool directed = false;

    /// Neighbour lists; undirected edges appear in both endpoint lists.
    std::vector<std::vector<std::pair<std::size_t, double>>> adjacency() const;
};

/// Edge (i, j) iff 0 < |y_i - y_j| <= radius.
WeightedGraph range_graph(const PointCloud& cloud, double radius);

/// Directed graph with exactly k out-edges per node to its k nearest distinct
/// points; distance ties go to the lower index.
WeightedGraph knn_graph(const PointCloud& cloud, std::size_t k);

/// Undirected union of knn_graph edges.
WeightedGraph symmetrize(const WeightedGraph& graph);

inline constexpr std::size_t kNoPredecessor = std::numeric_limits<std::size_t>::max();

struct ShortestPaths {
    std::vector<double> distance;          ///< +inf when unreachable
    std::vector<std::size_t> predecessor;  ///< kNoPredecessor for source/unreachable

    /// Node sequence source -> target; empty when unreachable.
    std::vector<std::size_t> path_to(std::size_t target) const;
};

ShortestPaths dijkstra(const WeightedGraph& graph, std::size_t source);

/// Same as above on a prebuilt adjacency list (avoids rebuilding it per source).
ShortestPaths dijkstra(const std::vector<std::vector<std::pair<std::size_t, double>>>& adjacency,
                       std::size_t source);

/// 0-based contiguous labels ordered by the smallest node index in each component.
std::vector<std::size_t> connected_components(const WeightedGraph& graph);

}  // namespace pmanifold
