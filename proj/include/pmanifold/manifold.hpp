#pragma once

#include "pmanifold/geometry.hpp"
#include "pmanifold/point_cloud.hpp"
#include "pmanifold/slicing.hpp"
#include "pmanifold/spline.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace pmanifold {

using Coord = Eigen::Vector2d;

/// Ordered path through a cluster's range graph.
struct Geodesic {
    std::vector<std::size_t> path;   ///< indices into the member cloud
    std::vector<double> cumulative;  ///< cumulative edge length, starts at 0

    double length() const { return cumulative.empty() ? 0.0 : cumulative.back(); }
};

/// Maximum-length shortest path over the range graph of `members`.
///
/// Exact (Dijkstra from every node) up to `exact_limit` members; beyond that
/// a double sweep is used (farthest node from node 0, then farthest from it).
Geodesic longest_geodesic(const PointCloud& members, double radius, std::size_t exact_limit = 2000);

/// Virtual intersection of spline l (family 1) and spline m (family 2).
struct GridNode {
    std::size_t l = 0;
    std::size_t m = 0;
    Vector t;              ///< midpoint of the closest-approach segment
    double lambda1 = 0.0;  ///< parameter on spline l
    double lambda2 = 0.0;  ///< parameter on spline m
    double gap = 0.0;      ///< closest-approach distance
    Coord coord = Coord::Zero();
};

/// Closest pair over a samples x samples parameter mesh, refined by
/// alternating golden-section passes in each parameter. Always returns a node
/// (l and m left at 0).
GridNode closest_approach(const SmoothingSpline& s1, const SmoothingSpline& s2, std::size_t samples = 200);

/// As closest_approach, but absent when the gap exceeds `gap_threshold`.
std::optional<GridNode> intersect_splines(const SmoothingSpline& s1, const SmoothingSpline& s2,
                                          std::size_t samples = 200,
                                          double gap_threshold = std::numeric_limits<double>::infinity());

struct BuildOptions {
    std::size_t samples = 200;                ///< parameter mesh per spline for intersections
    std::optional<double> gap_threshold;      ///< default: gap_spacing_factor * median node spacing
    double gap_spacing_factor = 3.0;
    std::size_t exact_geodesic_limit = 2000;
    SpreadMode spread = SpreadMode::HalfExtent;
    std::optional<ReferenceFrame> frame;      ///< user-supplied reference frame instead of pca2
    std::optional<std::uint64_t> origin_seed; ///< pick the origin node at random with this seed
};

/// Where a spline came from.
struct SplineSource {
    std::size_t slab = 0;
    std::size_t subcluster = 0;
    std::size_t members = 0;
    std::size_t geodesic_points = 0;
};

/// Stage timings and counts reported by build_manifold.
struct BuildStats {
    double slicing_seconds = 0.0;
    double geodesic_seconds = 0.0;
    double intersection_seconds = 0.0;
    std::size_t candidate_nodes = 0;
    double gap_threshold = 0.0;
};

/// Everything needed to reproduce a build: echoed into the model file.
struct ManifoldConfig {
    double p = 0.9;
    SliceConfig slicing;
    std::size_t samples = 200;
    double gap_threshold = 0.0;  ///< the value actually applied
    SpreadMode spread = SpreadMode::HalfExtent;
    std::optional<std::uint64_t> origin_seed;
};

/// Two spline families, their sparse intersection grid, and the origin.
///
/// Node coordinates are signed arc lengths: coord[0] is measured along the
/// node's family-2 spline from where that spline meets the family-1 axis
/// spline, coord[1] along its family-1 spline from the family-2 axis spline.
class PrincipalManifold {
public:
    PrincipalManifold() = default;
    PrincipalManifold(ManifoldConfig config, ReferenceFrame frame, std::vector<SmoothingSpline> family1,
                      std::vector<SmoothingSpline> family2, std::vector<SplineSource> sources1,
                      std::vector<SplineSource> sources2, std::vector<GridNode> nodes, std::size_t origin);

    const ManifoldConfig& config() const { return config_; }
    const ReferenceFrame& frame() const { return frame_; }
    const std::vector<SmoothingSpline>& family1() const { return family1_; }
    const std::vector<SmoothingSpline>& family2() const { return family2_; }
    const std::vector<SplineSource>& sources1() const { return sources1_; }
    const std::vector<SplineSource>& sources2() const { return sources2_; }
    const std::vector<GridNode>& nodes() const { return nodes_; }
    std::size_t origin_index() const { return origin_; }
    const GridNode& origin() const { return nodes_[origin_]; }

    /// Node index for (l, m), if that pair produced a node.
    std::optional<std::size_t> find(std::size_t l, std::size_t m) const;

    /// Index of the node nearest to z in ambient space (ties to lower (l, m)).
    std::size_t nearest_node(const Vector& z) const;

    /// 2-D coordinates of an ambient point.
    Coord embed(const Vector& z) const;
    std::vector<Coord> embed(const PointCloud& cloud) const;

    /// Ambient point for embedding coordinates x, interpolated from the node
    /// nearest x in coordinate space and its neighbours along its two splines
    /// (the neighbour on x's side when there is one). A node alone on its
    /// spline borrows the nearest node displaced mostly along that coordinate.
    Vector invert(const Coord& x) const;

    /// Unit tangents at node i: [0] of its family-2 spline (coordinate 1),
    /// [1] of its family-1 spline (coordinate 2).
    const std::pair<Vector, Vector>& tangents(std::size_t i) const { return tangents_[i]; }

private:
    ManifoldConfig config_;
    ReferenceFrame frame_;
    std::vector<SmoothingSpline> family1_;
    std::vector<SmoothingSpline> family2_;
    std::vector<SplineSource> sources1_;
    std::vector<SplineSource> sources2_;
    std::vector<GridNode> nodes_;  ///< sorted by (l, m)
    std::size_t origin_ = 0;
    std::vector<std::pair<Vector, Vector>> tangents_;
    std::vector<std::vector<std::size_t>> on_family1_;  ///< node indices per family-1 spline, by coord[1]
    std::vector<std::vector<std::size_t>> on_family2_;  ///< node indices per family-2 spline, by coord[0]
};

/// Runs slicing, smoothing and grid construction.
PrincipalManifold build_manifold(const PointCloud& cloud, double p, const SliceConfig& slicing,
                                 const BuildOptions& options = {}, BuildStats* stats = nullptr);

/// Assigns node coordinates for a grid with the given origin, returning the
/// nodes with `coord` filled in. Exposed for tests.
std::vector<GridNode> assign_coordinates(const std::vector<SmoothingSpline>& family1,
                                         const std::vector<SmoothingSpline>& family2, std::vector<GridNode> nodes,
                                         std::size_t origin);

}  // namespace pmanifold
