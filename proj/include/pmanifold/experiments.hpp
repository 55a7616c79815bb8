#pragma once

#include "pmanifold/manifold.hpp"
#include "pmanifold/metrics.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pmanifold {

/// Delta between a cloud and its 2-D embedding, both with k neighbours.
double embedding_delta(const PointCloud& cloud, const std::vector<Coord>& embedding, std::size_t k);

PointCloud coords_to_cloud(const std::vector<Coord>& coords);

enum class SweepKind { Smoothing, Noise, Size };

std::string to_string(SweepKind kind);
SweepKind sweep_kind_from_string(const std::string& name);

/// Parameter sweep over swiss rolls. Defaults per kind come from default_sweep.
struct SweepConfig {
    SweepKind kind = SweepKind::Smoothing;
    double start = 0.0;
    double stop = 1.0;
    double step = 0.01;
    std::size_t n = 3000;         ///< roll size (Size sweeps: size of the roll prefixes are drawn from)
    double noise = 0.0;           ///< fixed noise for Smoothing / Size sweeps
    double p = 0.9;               ///< fixed smoothing for Noise / Size sweeps
    SliceConfig slicing{15, 15, 4, 1.0};
    BuildOptions build;
    std::vector<std::size_t> axes;  ///< two coordinate axes for the reference frame; empty = principal directions
    std::size_t metric_k = 10;
    std::uint64_t seed = 0;
    double fit_limit = 0.88;      ///< Smoothing sweeps fit a line on values <= fit_limit
};

SweepConfig default_sweep(SweepKind kind);

struct SweepPoint {
    double value = 0.0;
    double delta = 0.0;        ///< NaN when the build failed
    std::size_t nodes = 0;
    std::string error;         ///< diagnostic for failed builds
};

struct SweepResult {
    std::vector<SweepPoint> points;
    std::optional<FitReport> fit;  ///< absent when too few finite points fall in the fit window
};

/// Sweep values start, start + step, ... up to stop (inclusive within 1e-9 step).
std::vector<double> sweep_values(double start, double stop, double step);

SweepResult run_sweep(const SweepConfig& config);

}  // namespace pmanifold
