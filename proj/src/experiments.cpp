#include "pmanifold/experiments.hpp"

#include "pmanifold/datasets.hpp"
#include "pmanifold/error.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace pmanifold {

PointCloud coords_to_cloud(const std::vector<Coord>& coords) {
    RowMatrix m(static_cast<Eigen::Index>(coords.size()), 2);
    for (std::size_t i = 0; i < coords.size(); ++i) {
        m.row(static_cast<Eigen::Index>(i)) = coords[i].transpose();
    }
    return PointCloud(std::move(m));
}

double embedding_delta(const PointCloud& cloud, const std::vector<Coord>& embedding, std::size_t k) {
    if (embedding.size() != cloud.size()) {
        throw InputError("embedding has " + std::to_string(embedding.size()) + " rows for " +
                         std::to_string(cloud.size()) + " points");
    }
    return delta(adjacency_distance(cloud, k), adjacency_distance(coords_to_cloud(embedding), k));
}

std::string to_string(SweepKind kind) {
    switch (kind) {
        case SweepKind::Smoothing:
            return "p";
        case SweepKind::Noise:
            return "noise";
        case SweepKind::Size:
            return "n";
    }
    return "p";
}

SweepKind sweep_kind_from_string(const std::string& name) {
    if (name == "p") {
        return SweepKind::Smoothing;
    }
    if (name == "noise") {
        return SweepKind::Noise;
    }
    if (name == "n") {
        return SweepKind::Size;
    }
    throw InputError("unknown sweep kind '" + name + "' (expected p, noise or n)");
}

SweepConfig default_sweep(SweepKind kind) {
    SweepConfig c;
    c.kind = kind;
    switch (kind) {
        case SweepKind::Smoothing:
            c.start = 0.0;
            c.stop = 1.0;
            c.step = 0.01;
            c.n = 3000;
            c.noise = 0.0;
            break;
        case SweepKind::Noise:
            c.start = 0.0;
            c.stop = 1.035;
            c.step = 0.015;
            c.n = 3000;
            c.p = 0.9;
            break;
        case SweepKind::Size:
            c.start = 500;
            c.stop = 3500;
            c.step = 40;
            c.n = 3500;
            c.noise = 0.2;
            c.p = 0.9;
            break;
    }
    return c;
}

std::vector<double> sweep_values(double start, double stop, double step) {
    if (!(step > 0.0) || !std::isfinite(start) || !std::isfinite(stop) || stop < start) {
        throw InputError("sweep needs a positive step and start <= stop");
    }
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> values(count);
    for (std::size_t i = 0; i < count; ++i) {
        values[i] = start + step * static_cast<double>(i);
    }
    return values;
}

SweepResult run_sweep(const SweepConfig& config) {
    const auto values = sweep_values(config.start, config.stop, config.step);
    SweepResult result;
    PointCloud shared;
    if (config.kind == SweepKind::Smoothing) {
        shared = noisy_swiss_roll(config.n, config.noise, config.seed);
    } else if (config.kind == SweepKind::Size) {
        shared = noisy_swiss_roll(config.n, config.noise, config.seed);
    }
    for (double value : values) {
        SweepPoint point;
        point.value = value;
        try {
            PointCloud cloud;
            double p = config.p;
            switch (config.kind) {
                case SweepKind::Smoothing:
                    cloud = shared;
                    p = std::min(value, 1.0);
                    break;
                case SweepKind::Noise:
                    cloud = noisy_swiss_roll(config.n, value, config.seed);
                    break;
                case SweepKind::Size: {
                    const auto n = static_cast<std::size_t>(std::llround(value));
                    if (n > shared.size()) {
                        throw InputError("sweep size " + std::to_string(n) + " exceeds the roll size " +
                                         std::to_string(shared.size()));
                    }
                    std::vector<std::size_t> prefix(n);
                    std::iota(prefix.begin(), prefix.end(), std::size_t{0});
                    cloud = shared.subset(prefix);
                    break;
                }
            }
            BuildOptions build = config.build;
            if (!config.axes.empty()) {
                build.frame = axis_frame(cloud, config.axes.at(0), config.axes.at(1), build.spread);
            }
            const PrincipalManifold manifold = build_manifold(cloud, p, config.slicing, build);
            point.nodes = manifold.nodes().size();
            point.delta = embedding_delta(cloud, manifold.embed(cloud), config.metric_k);
        } catch (const AlgorithmError& e) {
            point.delta = std::numeric_limits<double>::quiet_NaN();
            point.error = e.what();
        }
        result.points.push_back(std::move(point));
    }
    std::vector<double> xs;
    std::vector<double> ys;
    for (const SweepPoint& pt : result.points) {
        if (!std::isfinite(pt.delta)) {
            continue;
        }
        if (config.kind == SweepKind::Smoothing && pt.value > config.fit_limit + 1e-12) {
            continue;
        }
        xs.push_back(pt.value);
        ys.push_back(pt.delta);
    }
    const CurveKind kind = config.kind == SweepKind::Smoothing ? CurveKind::Linear
                           : config.kind == SweepKind::Noise   ? CurveKind::Quadratic
                                                               : CurveKind::Exponential;
    if (xs.size() >= (kind == CurveKind::Quadratic ? 3u : 2u)) {
        result.fit = fit_curve(xs, ys, kind);
    }
    return result;
}

}  // namespace pmanifold
