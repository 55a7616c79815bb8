#include "pmanifold/manifold.hpp"

#include "pmanifold/error.hpp"
#include "pmanifold/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <tuple>

namespace pmanifold {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

Geodesic make_geodesic(const PointCloud& members, std::vector<std::size_t> path) {
    Geodesic g;
    g.path = std::move(path);
    g.cumulative.assign(g.path.size(), 0.0);
    for (std::size_t i = 1; i < g.path.size(); ++i) {
        g.cumulative[i] = g.cumulative[i - 1] + members.distance(g.path[i - 1], g.path[i]);
    }
    return g;
}

// Farthest reachable node; throws when some node is unreachable.
std::pair<std::size_t, double> farthest(const ShortestPaths& sp) {
    std::size_t best = 0;
    double best_d = -1.0;
    for (std::size_t j = 0; j < sp.distance.size(); ++j) {
        const double d = sp.distance[j];
        if (!std::isfinite(d)) {
            throw AlgorithmError("geodesic on disconnected cluster");
        }
        if (d > best_d) {
            best_d = d;
            best = j;
        }
    }
    return {best, best_d};
}

constexpr double kGolden = 0.6180339887498949;

// Golden-section minimum of f on [lo, hi].
template <class F>
double golden_min(F&& f, double lo, double hi) {
    double a = lo;
    double b = hi;
    double c = b - kGolden * (b - a);
    double d = a + kGolden * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < 90 && b - a > 1e-15; ++it) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kGolden * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kGolden * (b - a);
            fd = f(d);
        }
    }
    // Keep the best of the bracket and its ends so boundary minima are exact.
    double best = 0.5 * (a + b);
    double fb = f(best);
    for (double cand : {lo, hi}) {
        const double fv = f(cand);
        if (fv < fb) {
            fb = fv;
            best = cand;
        }
    }
    return best;
}

struct SampledSpline {
    std::vector<double> lambda;
    RowMatrix points;
};

SampledSpline sample(const SmoothingSpline& s, std::size_t samples) {
    SampledSpline out;
    out.lambda.resize(samples);
    out.points.resize(static_cast<Eigen::Index>(samples), static_cast<Eigen::Index>(s.dim()));
    const double a = s.front();
    const double b = s.back();
    for (std::size_t i = 0; i < samples; ++i) {
        const double lam = a + (b - a) * static_cast<double>(i) / static_cast<double>(samples - 1);
        out.lambda[i] = lam;
        out.points.row(static_cast<Eigen::Index>(i)) = s.value(lam).transpose();
    }
    return out;
}

GridNode refine(const SmoothingSpline& s1, const SmoothingSpline& s2, const SampledSpline& m1,
                const SampledSpline& m2) {
    const std::size_t n1 = m1.lambda.size();
    const std::size_t n2 = m2.lambda.size();
    std::size_t bi = 0;
    std::size_t bj = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n1; ++i) {
        const auto p = m1.points.row(static_cast<Eigen::Index>(i));
        for (std::size_t j = 0; j < n2; ++j) {
            const double d = (p - m2.points.row(static_cast<Eigen::Index>(j))).squaredNorm();
            if (d < best) {
                best = d;
                bi = i;
                bj = j;
            }
        }
    }
    double a = m1.lambda[bi];
    double b = m2.lambda[bj];
    const double h1 = (s1.back() - s1.front()) / static_cast<double>(n1 - 1);
    const double h2 = (s2.back() - s2.front()) / static_cast<double>(n2 - 1);
    Vector pa = s1.value(a);
    Vector pb = s2.value(b);
    for (int pass = 0; pass < 100; ++pass) {
        const double a_new = golden_min([&](double t) { return (s1.value(t) - pb).squaredNorm(); },
                                        std::max(s1.front(), a - h1), std::min(s1.back(), a + h1));
        pa = s1.value(a_new);
        const double b_new = golden_min([&](double t) { return (pa - s2.value(t)).squaredNorm(); },
                                        std::max(s2.front(), b - h2), std::min(s2.back(), b + h2));
        pb = s2.value(b_new);
        const double moved = std::abs(a_new - a) + std::abs(b_new - b);
        a = a_new;
        b = b_new;
        if (moved < 1e-14) {
            break;
        }
    }
    // Coordinate passes crawl when the curves are nearly parallel; finish with
    // joint Newton steps on |s1(a) - s2(b)|^2, kept only while they descend.
    double f = (pa - pb).squaredNorm();
    for (int it = 0; it < 50 && f > 0.0; ++it) {
        const Vector r = pa - pb;
        const Vector d1 = s1.derivative(a);
        const Vector d2 = s2.derivative(b);
        const Eigen::Vector2d g(r.dot(d1), -r.dot(d2));
        Eigen::Matrix2d H;
        H << d1.dot(d1) + r.dot(s1.second_derivative(a)), -d1.dot(d2), -d1.dot(d2),
            d2.dot(d2) - r.dot(s2.second_derivative(b));
        const Eigen::LLT<Eigen::Matrix2d> llt(H);
        if (llt.info() != Eigen::Success) {
            break;
        }
        const Eigen::Vector2d step = llt.solve(-g);
        const double a_new = std::clamp(a + step(0), s1.front(), s1.back());
        const double b_new = std::clamp(b + step(1), s2.front(), s2.back());
        const Vector qa = s1.value(a_new);
        const Vector qb = s2.value(b_new);
        const double f_new = (qa - qb).squaredNorm();
        if (!(f_new < f)) {
            break;
        }
        a = a_new;
        b = b_new;
        pa = qa;
        pb = qb;
        f = f_new;
    }
    GridNode node;
    node.lambda1 = a;
    node.lambda2 = b;
    node.t = 0.5 * (pa + pb);
    node.gap = (pa - pb).norm();
    return node;
}

struct NodeKeyLess {
    bool operator()(const GridNode& x, const GridNode& y) const { return std::tie(x.l, x.m) < std::tie(y.l, y.m); }
};

double median(std::vector<double> v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double hi = v[mid];
    if (v.size() % 2 == 1) {
        return hi;
    }
    return 0.5 * (hi + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
}

}  // namespace

Geodesic longest_geodesic(const PointCloud& members, double radius, std::size_t exact_limit) {
    const std::size_t n = members.size();
    if (n == 0) {
        throw InputError("longest geodesic needs at least one point");
    }
    if (n == 1) {
        return make_geodesic(members, {0});
    }
    const auto adjacency = range_graph(members, radius).adjacency();
    if (n > exact_limit) {
        const auto first = farthest(dijkstra(adjacency, 0)).first;
        const ShortestPaths sp = dijkstra(adjacency, first);
        const auto second = farthest(sp).first;
        return make_geodesic(members, sp.path_to(second));
    }
    std::vector<std::pair<std::size_t, double>> best(n);
    std::vector<char> disconnected(n, 0);
    parallel_for(n, [&](std::size_t s) {
        try {
            best[s] = farthest(dijkstra(adjacency, s));
        } catch (const AlgorithmError&) {
            disconnected[s] = 1;
        }
    });
    if (std::any_of(disconnected.begin(), disconnected.end(), [](char c) { return c != 0; })) {
        throw AlgorithmError("geodesic on disconnected cluster");
    }
    std::size_t source = 0;
    for (std::size_t s = 1; s < n; ++s) {
        if (best[s].second > best[source].second) {
            source = s;
        }
    }
    return make_geodesic(members, dijkstra(adjacency, source).path_to(best[source].first));
}

GridNode closest_approach(const SmoothingSpline& s1, const SmoothingSpline& s2, std::size_t samples) {
    if (samples < 2) {
        throw InputError("intersection mesh needs at least 2 samples per spline");
    }
    if (s1.dim() != s2.dim()) {
        throw InputError("splines disagree on dimension");
    }
    return refine(s1, s2, sample(s1, samples), sample(s2, samples));
}

std::optional<GridNode> intersect_splines(const SmoothingSpline& s1, const SmoothingSpline& s2, std::size_t samples,
                                          double gap_threshold) {
    GridNode node = closest_approach(s1, s2, samples);
    if (node.gap > gap_threshold) {
        return std::nullopt;
    }
    return node;
}

std::vector<GridNode> assign_coordinates(const std::vector<SmoothingSpline>& family1,
                                         const std::vector<SmoothingSpline>& family2, std::vector<GridNode> nodes,
                                         std::size_t origin) {
    if (origin >= nodes.size()) {
        throw InputError("origin node out of range");
    }
    const std::size_t L = family1.size();
    const std::size_t M = family2.size();
    const std::size_t l0 = nodes[origin].l;
    const std::size_t m0 = nodes[origin].m;

    // Arc position of node i along its own family-1 / family-2 spline.
    auto along1 = [&](const GridNode& n) { return family1[n.l].arc_length(family1[n.l].front(), n.lambda1); };
    auto along2 = [&](const GridNode& n) { return family2[n.m].arc_length(family2[n.m].front(), n.lambda2); };

    // coord_2 = offset2[l] + along1, coord_1 = offset1[m] + along2.
    std::vector<std::optional<double>> offset2(L);
    std::vector<std::optional<double>> offset1(M);
    std::vector<std::vector<std::size_t>> on1(L);
    std::vector<std::vector<std::size_t>> on2(M);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        on1[nodes[i].l].push_back(i);
        on2[nodes[i].m].push_back(i);
    }
    for (std::size_t i : on2[m0]) {
        offset2[nodes[i].l] = -along1(nodes[i]);
    }
    for (std::size_t i : on1[l0]) {
        offset1[nodes[i].m] = -along2(nodes[i]);
    }
    auto coord2 = [&](std::size_t i) { return *offset2[nodes[i].l] + along1(nodes[i]); };
    auto coord1 = [&](std::size_t i) { return *offset1[nodes[i].m] + along2(nodes[i]); };

    // Splines without nodes never need an offset.
    auto unanchored = [](const std::vector<std::optional<double>>& off,
                         const std::vector<std::vector<std::size_t>>& on) {
        for (std::size_t i = 0; i < off.size(); ++i) {
            if (!off[i] && !on[i].empty()) {
                return true;
            }
        }
        return false;
    };

    // Splines that miss the axis splines: repeatedly take the closest
    // (unknown, known) node pair and carry the coordinate over by projecting
    // their separation onto the known node's tangent, as embed does.
    while (unanchored(offset1, on2) || unanchored(offset2, on1)) {
        double best = std::numeric_limits<double>::infinity();
        int best_family = 0;
        std::size_t best_u = 0;
        std::size_t best_v = 0;
        for (std::size_t u = 0; u < nodes.size(); ++u) {
            const bool need2 = !offset2[nodes[u].l].has_value();
            const bool need1 = !offset1[nodes[u].m].has_value();
            if (!need1 && !need2) {
                continue;
            }
            for (std::size_t v = 0; v < nodes.size(); ++v) {
                const double d = (nodes[u].t - nodes[v].t).norm();
                if (need2 && offset2[nodes[v].l].has_value() && d < best) {
                    best = d;
                    best_family = 2;
                    best_u = u;
                    best_v = v;
                }
                if (need1 && offset1[nodes[v].m].has_value() && d < best) {
                    best = d;
                    best_family = 1;
                    best_u = u;
                    best_v = v;
                }
            }
        }
        if (best_family == 0) {
            throw AlgorithmError("degenerate grid");
        }
        const GridNode& u = nodes[best_u];
        const GridNode& v = nodes[best_v];
        const Vector diff = u.t - v.t;
        if (best_family == 2) {
            const Vector tangent = family1[v.l].eval(v.lambda1).tangent;
            offset2[u.l] = coord2(best_v) + diff.dot(tangent) - along1(u);
        } else {
            const Vector tangent = family2[v.m].eval(v.lambda2).tangent;
            offset1[u.m] = coord1(best_v) + diff.dot(tangent) - along2(u);
        }
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        nodes[i].coord = Coord(coord1(i), coord2(i));
    }
    return nodes;
}

PrincipalManifold::PrincipalManifold(ManifoldConfig config, ReferenceFrame frame, std::vector<SmoothingSpline> family1,
                                     std::vector<SmoothingSpline> family2, std::vector<SplineSource> sources1,
                                     std::vector<SplineSource> sources2, std::vector<GridNode> nodes,
                                     std::size_t origin)
    : config_(std::move(config)),
      frame_(std::move(frame)),
      family1_(std::move(family1)),
      family2_(std::move(family2)),
      sources1_(std::move(sources1)),
      sources2_(std::move(sources2)),
      nodes_(std::move(nodes)),
      origin_(origin) {
    if (nodes_.empty()) {
        throw InputError("manifold needs at least one grid node");
    }
    if (origin_ >= nodes_.size()) {
        throw InputError("origin node out of range");
    }
    if (!std::is_sorted(nodes_.begin(), nodes_.end(), NodeKeyLess{})) {
        throw InputError("grid nodes must be sorted by (l, m)");
    }
    tangents_.reserve(nodes_.size());
    for (const GridNode& n : nodes_) {
        if (n.l >= family1_.size() || n.m >= family2_.size()) {
            throw InputError("grid node refers to a missing spline");
        }
        tangents_.emplace_back(family2_[n.m].eval(n.lambda2).tangent, family1_[n.l].eval(n.lambda1).tangent);
    }
    on_family1_.resize(family1_.size());
    on_family2_.resize(family2_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        on_family1_[nodes_[i].l].push_back(i);
        on_family2_[nodes_[i].m].push_back(i);
    }
    auto by = [&](int k) {
        return [this, k](std::size_t a, std::size_t b) {
            return std::make_pair(nodes_[a].coord[k], a) < std::make_pair(nodes_[b].coord[k], b);
        };
    };
    for (auto& v : on_family1_) {
        std::sort(v.begin(), v.end(), by(1));
    }
    for (auto& v : on_family2_) {
        std::sort(v.begin(), v.end(), by(0));
    }
}

std::optional<std::size_t> PrincipalManifold::find(std::size_t l, std::size_t m) const {
    GridNode key;
    key.l = l;
    key.m = m;
    const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), key, NodeKeyLess{});
    if (it == nodes_.end() || it->l != l || it->m != m) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - nodes_.begin());
}

std::size_t PrincipalManifold::nearest_node(const Vector& z) const {
    if (z.size() != frame_.mu.size()) {
        throw InputError("point dimension " + std::to_string(z.size()) + " does not match manifold dimension " +
                         std::to_string(frame_.mu.size()));
    }
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const double d = (nodes_[i].t - z).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

Coord PrincipalManifold::embed(const Vector& z) const {
    const std::size_t i = nearest_node(z);
    const Vector offset = z - nodes_[i].t;
    return nodes_[i].coord + Coord(offset.dot(tangents_[i].first), offset.dot(tangents_[i].second));
}

std::vector<Coord> PrincipalManifold::embed(const PointCloud& cloud) const {
    std::vector<Coord> out(cloud.size());
    parallel_for(cloud.size(), [&](std::size_t i) { out[i] = embed(Vector(cloud.point(i))); });
    return out;
}

Vector PrincipalManifold::invert(const Coord& x) const {
    if (!x.allFinite()) {
        throw InputError("embedding coordinates must be finite");
    }
    std::size_t c = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const double d = (nodes_[i].coord - x).squaredNorm();
        if (d < best) {
            best = d;
            c = i;
        }
    }
    const GridNode& n = nodes_[c];
    // Adjacent node along one of c's splines, on x's side when there is one.
    auto neighbour = [&](const std::vector<std::size_t>& line, int k) -> std::optional<std::size_t> {
        const auto at = std::find(line.begin(), line.end(), c);
        std::optional<std::size_t> above;
        std::optional<std::size_t> below;
        for (auto it = at + 1; it != line.end() && !above; ++it) {
            if (nodes_[*it].coord[k] - n.coord[k] > 1e-12) {
                above = *it;
            }
        }
        for (auto it = at; it != line.begin() && !below;) {
            --it;
            if (n.coord[k] - nodes_[*it].coord[k] > 1e-12) {
                below = *it;
            }
        }
        // Lone node on a short spline: take the nearest node in coordinate
        // space displaced mostly along coordinate k instead.
        if (!above && !below) {
            double da = std::numeric_limits<double>::infinity();
            double db = da;
            for (std::size_t i = 0; i < nodes_.size(); ++i) {
                const double diff = nodes_[i].coord[k] - n.coord[k];
                if (std::abs(diff) < std::abs(nodes_[i].coord[1 - k] - n.coord[1 - k])) {
                    continue;
                }
                const double d = (nodes_[i].coord - n.coord).squaredNorm();
                if (diff > 1e-12 && d < da) {
                    da = d;
                    above = i;
                } else if (diff < -1e-12 && d < db) {
                    db = d;
                    below = i;
                }
            }
        }
        if (x[k] >= n.coord[k]) {
            return above ? above : below;
        }
        return below ? below : above;
    };
    const auto along_l = neighbour(on_family1_[n.l], 1);
    const auto along_m = neighbour(on_family2_[n.m], 0);
    if (!along_l || !along_m) {
        throw AlgorithmError("inverse frame incomplete");
    }
    const GridNode& a = nodes_[*along_l];
    const GridNode& b = nodes_[*along_m];
    const double alpha = (x[1] - n.coord[1]) / (a.coord[1] - n.coord[1]);
    const double beta = (x[0] - n.coord[0]) / (b.coord[0] - n.coord[0]);
    return n.t + (a.t - n.t) * alpha + (b.t - n.t) * beta;
}

PrincipalManifold build_manifold(const PointCloud& cloud, double p, const SliceConfig& slicing,
                                 const BuildOptions& options, BuildStats* stats) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw InputError("smoothing parameter must lie in [0, 1]");
    }
    if (options.samples < 2) {
        throw InputError("intersection mesh needs at least 2 samples per spline");
    }
    BuildStats local;
    BuildStats& st = stats ? *stats : local;

    auto start = Clock::now();
    const ReferenceFrame frame = options.frame ? *options.frame : pca2(cloud, options.spread);
    if (frame.mu.size() != static_cast<Eigen::Index>(cloud.dim())) {
        throw InputError("reference frame dimension does not match the cloud");
    }
    std::vector<Cluster> clusters[2];
    for (int axis = 1; axis <= 2; ++axis) {
        for (const Cluster& slab : slice_partition(cloud, frame, axis, slicing)) {
            if (slab.members.empty()) {
                continue;
            }
            for (Cluster& sub : split_subclusters(slab, cloud, slicing)) {
                if (sub.members.size() >= 2) {
                    clusters[axis - 1].push_back(std::move(sub));
                }
            }
        }
    }
    st.slicing_seconds = seconds_since(start);

    // Family 1 runs across the first axis, so its splines are oriented along
    // v2; family 2 along v1.
    start = Clock::now();
    std::vector<SmoothingSpline> family[2];
    std::vector<SplineSource> sources[2];
    for (int f = 0; f < 2; ++f) {
        const auto& list = clusters[f];
        const Vector& orient = f == 0 ? frame.v2 : frame.v1;
        family[f].resize(list.size());
        sources[f].resize(list.size());
        parallel_for(list.size(), [&](std::size_t i) {
            const Cluster& c = list[i];
            const PointCloud members = cloud.subset(c.members);
            const Geodesic g =
                longest_geodesic(members, slicing.subcluster_radius_scale * c.width, options.exact_geodesic_limit);
            std::vector<Vector> ordered;
            ordered.reserve(g.path.size());
            for (std::size_t k : g.path) {
                ordered.emplace_back(members.point(k));
            }
            if ((ordered.back() - ordered.front()).dot(orient) < 0.0) {
                std::reverse(ordered.begin(), ordered.end());
            }
            family[f][i] = fit_smoothing_spline(ordered, p);
            sources[f][i] = SplineSource{c.slab_index, c.subcluster_index, c.members.size(), g.path.size()};
        });
        if (family[f].empty()) {
            throw AlgorithmError("degenerate grid");
        }
    }
    st.geodesic_seconds = seconds_since(start);

    start = Clock::now();
    const std::size_t L = family[0].size();
    const std::size_t M = family[1].size();
    std::vector<SampledSpline> sampled[2];
    for (int f = 0; f < 2; ++f) {
        sampled[f].resize(family[f].size());
        parallel_for(family[f].size(), [&](std::size_t i) { sampled[f][i] = sample(family[f][i], options.samples); });
    }
    std::vector<GridNode> candidates(L * M);
    parallel_for(L * M, [&](std::size_t k) {
        const std::size_t l = k / M;
        const std::size_t m = k % M;
        GridNode node = refine(family[0][l], family[1][m], sampled[0][l], sampled[1][m]);
        node.l = l;
        node.m = m;
        candidates[k] = std::move(node);
    });
    double threshold = std::numeric_limits<double>::infinity();
    if (options.gap_threshold) {
        threshold = *options.gap_threshold;
    } else if (candidates.size() >= 2) {
        std::vector<double> spacing(candidates.size());
        parallel_for(candidates.size(), [&](std::size_t i) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < candidates.size(); ++j) {
                if (j != i) {
                    best = std::min(best, (candidates[i].t - candidates[j].t).norm());
                }
            }
            spacing[i] = best;
        });
        threshold = options.gap_spacing_factor * median(spacing);
    }
    std::vector<GridNode> nodes;
    for (GridNode& c : candidates) {
        if (c.gap <= threshold) {
            nodes.push_back(std::move(c));
        }
    }
    st.candidate_nodes = candidates.size();
    st.gap_threshold = threshold;
    st.intersection_seconds = seconds_since(start);
    if (nodes.empty()) {
        throw AlgorithmError("degenerate grid");
    }

    std::size_t origin = 0;
    if (options.origin_seed) {
        std::mt19937_64 rng(*options.origin_seed);
        origin = std::uniform_int_distribution<std::size_t>(0, nodes.size() - 1)(rng);
    } else {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const double d = (nodes[i].t - frame.mu).squaredNorm();
            if (d < best) {
                best = d;
                origin = i;
            }
        }
    }
    nodes = assign_coordinates(family[0], family[1], std::move(nodes), origin);

    ManifoldConfig config;
    config.p = p;
    config.slicing = slicing;
    config.samples = options.samples;
    config.gap_threshold = threshold;
    config.spread = options.spread;
    config.origin_seed = options.origin_seed;
    return PrincipalManifold(std::move(config), frame, std::move(family[0]), std::move(family[1]),
                             std::move(sources[0]), std::move(sources[1]), std::move(nodes), origin);
}

}  // namespace pmanifold
