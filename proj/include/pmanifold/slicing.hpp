#pragma once

#include "pmanifold/geometry.hpp"
#include "pmanifold/point_cloud.hpp"

#include <cstddef>
#include <vector>

namespace pmanifold {

struct SliceConfig {
    std::size_t n_c1 = 10;                  ///< slab count along the first reference axis
    std::size_t n_c2 = 10;                  ///< slab count along the second reference axis
    std::size_t min_subcluster_size = 4;    ///< smaller components are dropped as outliers
    double subcluster_radius_scale = 1.0;   ///< range radius = scale * slab width

    std::size_t count(int axis) const { return axis == 1 ? n_c1 : n_c2; }
};

/// One slab (or sub-cluster of a slab) of points. Indices are 0-based.
struct Cluster {
    int axis = 1;
    std::size_t slab_index = 0;
    std::size_t subcluster_index = 0;
    std::vector<std::size_t> members;  ///< ascending point indices
    double width = 0.0;                ///< 2 sigma_axis / n_c
};

/// Points a_0 .. a_{n_c} dividing mu -/+ v sigma into n_c equal parts.
std::vector<Vector> slab_boundaries(const ReferenceFrame& frame, int axis, std::size_t n_c);

/// Assigns every point to exactly one of n_c slabs along `axis`.
///
/// A point belongs to slab j (1-based) when its scaled projection
/// s = (y - a_0)^T v / width lies in (j - 1, j]; points before a_0 go to the
/// first slab and points past a_{n_c} to the last.
std::vector<Cluster> slice_partition(const PointCloud& cloud, const ReferenceFrame& frame, int axis,
                                     const SliceConfig& config);

/// Splits a slab into connected components of its range graph at radius
/// subcluster_radius_scale * width, discarding components below
/// min_subcluster_size. Result order follows the smallest member index.
std::vector<Cluster> split_subclusters(const Cluster& cluster, const PointCloud& cloud, const SliceConfig& config);

}  // namespace pmanifold
