#include "pmanifold/slicing.hpp"

#include "pmanifold/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace pmanifold {

namespace {

void check_axis(int axis) {
    if (axis != 1 && axis != 2) {
        throw InputError("reference axis must be 1 or 2");
    }
}

}  // namespace

std::vector<Vector> slab_boundaries(const ReferenceFrame& frame, int axis, std::size_t n_c) {
    check_axis(axis);
    if (n_c < 1) {
        throw InputError("slab count must be at least 1");
    }
    const Vector& v = frame.direction(axis);
    const double sigma = frame.sigma(axis);
    const double n = static_cast<double>(n_c);
    std::vector<Vector> a;
    a.reserve(n_c + 1);
    for (std::size_t j = 0; j <= n_c; ++j) {
        a.push_back(frame.mu + v * sigma * (2.0 * static_cast<double>(j) - n) / n);
    }
    return a;
}

std::vector<Cluster> slice_partition(const PointCloud& cloud, const ReferenceFrame& frame, int axis,
                                     const SliceConfig& config) {
    check_axis(axis);
    const std::size_t n_c = config.count(axis);
    if (n_c < 1) {
        throw InputError("slab count must be at least 1");
    }
    const Vector& v = frame.direction(axis);
    const double sigma = frame.sigma(axis);
    const double width = 2.0 * sigma / static_cast<double>(n_c);

    std::vector<Cluster> slabs(n_c);
    for (std::size_t j = 0; j < n_c; ++j) {
        slabs[j].axis = axis;
        slabs[j].slab_index = j;
        slabs[j].width = width;
    }
    if (cloud.empty()) {
        return slabs;
    }
    if (!(width > 0.0)) {
        // Zero spread: everything sits on the single boundary plane.
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            slabs.front().members.push_back(i);
        }
        return slabs;
    }
    const Vector a0 = frame.mu - v * sigma;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const double s = (cloud.point(i) - a0).dot(v) / width;
        // (j-1, j] -> slab j-1 (0-based); integer s belongs to the lower slab.
        const double slot = std::ceil(s) - 1.0;
        std::size_t j = 0;
        if (slot > 0.0) {
            j = std::min(static_cast<std::size_t>(slot), n_c - 1);
        }
        slabs[j].members.push_back(i);
    }
    return slabs;
}

std::vector<Cluster> split_subclusters(const Cluster& cluster, const PointCloud& cloud, const SliceConfig& config) {
    if (cluster.members.empty()) {
        throw InputError("cannot split an empty cluster");
    }
    std::vector<std::size_t> ordered = cluster.members;
    std::sort(ordered.begin(), ordered.end());
    const PointCloud members = cloud.subset(ordered);
    const double radius = config.subcluster_radius_scale * cluster.width;
    std::vector<std::size_t> labels(members.size());
    if (radius > 0.0) {
        labels = connected_components(range_graph(members, radius));
    } else {
        for (std::size_t i = 0; i < labels.size(); ++i) {
            labels[i] = i;
        }
    }

    // Labels are already ordered by smallest local index, and local order
    // follows the ascending global member order.
    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t local = 0; local < labels.size(); ++local) {
        groups[labels[local]].push_back(ordered[local]);
    }
    std::vector<Cluster> out;
    for (auto& [label, indices] : groups) {
        if (indices.size() < config.min_subcluster_size) {
            continue;
        }
        Cluster sub;
        sub.axis = cluster.axis;
        sub.slab_index = cluster.slab_index;
        sub.subcluster_index = out.size();
        sub.members = std::move(indices);
        sub.width = cluster.width;
        out.push_back(std::move(sub));
    }
    return out;
}

}  // namespace pmanifold
