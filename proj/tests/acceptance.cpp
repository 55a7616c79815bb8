// One line per acceptance criterion: "[PASS|FAIL] <n> <name>: <measurements> (<seconds> s)".
// Exit status is the number of failed criteria.

#include "pmanifold/cli.hpp"
#include "pmanifold/datasets.hpp"
#include "pmanifold/experiments.hpp"
#include "pmanifold/geometry.hpp"
#include "pmanifold/isomap.hpp"
#include "pmanifold/manifold.hpp"
#include "pmanifold/metrics.hpp"
#include "spline_oracle.hpp"
#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

using namespace pmanifold;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, double limit_seconds, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds > limit_seconds) {
        o.pass = false;
        o.detail += "; over the " + std::to_string(static_cast<int>(limit_seconds)) + " s budget";
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << id << " " << name << ": " << o.detail << " (" << std::fixed
              << std::setprecision(1) << seconds << " s)" << std::endl;
    std::cout.unsetf(std::ios::floatfield);
}

std::string num(double v, int precision = 4) {
    std::ostringstream s;
    s << std::setprecision(precision) << v;
    return s.str();
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string list(const std::vector<SweepPoint>& points) {
    std::string s;
    for (const SweepPoint& p : points) {
        s += (s.empty() ? "" : " ") + num(p.value, 3) + ":" + num(p.delta, 3);
    }
    return s;
}

Outcome spline_oracle() {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> g(0.0, 1.0);
    double worst = 0.0;
    int cases = 0;
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<double> x(5), y(5);
        for (int i = 0; i < 5; ++i) {
            x[i] = u(rng);
            y[i] = g(rng);
        }
        std::sort(x.begin(), x.end());
        RowMatrix values(5, 1);
        for (int i = 0; i < 5; ++i) {
            values(i, 0) = y[i];
        }
        for (double p : {0.3, 0.6, 0.9}) {
            const SmoothingSpline s = fit_smoothing_spline(x, values, p);
            const double diff = std::abs(testing::spline_objective(s, x, y, p) - testing::brute_force_minimum(x, y, p));
            worst = std::max(worst, diff);
            ++cases;
        }
    }
    return {worst <= 1e-8, std::to_string(cases) + " fits, max objective gap " + num(worst, 3) + " (limit 1e-8)"};
}

Outcome flat_patch() {
    const PointCloud c = testing::flat_patch(1000, 1);
    BuildOptions options;
    options.frame = axis_frame(c, 0, 1);
    const PrincipalManifold m = build_manifold(c, 0.9, SliceConfig{10, 10, 4, 1.0}, options);
    const auto x = m.embed(c);
    std::vector<double> rel;
    for (std::size_t i = 0; i < c.size(); ++i) {
        for (std::size_t j = i + 1; j < c.size(); ++j) {
            const double d = c.distance(i, j);
            rel.push_back(std::abs((x[i] - x[j]).norm() - d) / d);
        }
    }
    double round_trip = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        round_trip = std::max(round_trip, (m.invert(x[i]) - c.point(i)).norm());
    }
    const double med = median(rel);
    return {med <= 0.02 && round_trip <= 0.05, "median relative distance error " + num(med) +
                                                   " (limit 0.02), worst round trip " + num(round_trip) +
                                                   " (limit 0.05), " + std::to_string(m.nodes().size()) + " nodes"};
}

// Graph geodesic between the cloud points nearest a and b over the symmetrised 10-NN graph.
double graph_geodesic(const PointCloud& c, const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    auto nearest = [&](const Eigen::Vector3d& q) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < c.size(); ++i) {
            if ((c.point(i) - q).norm() < (c.point(best) - q).norm()) {
                best = i;
            }
        }
        return best;
    };
    return dijkstra(symmetrize(knn_graph(c, 10)), nearest(a)).distance[nearest(b)];
}

Outcome paraboloid_square() {
    const PointCloud c = paraboloid(2000, 0.05, 7);
    BuildOptions options;
    options.frame = axis_frame(c, 0, 1);
    const PrincipalManifold m = build_manifold(c, 0.9, SliceConfig{14, 14, 4, 1.0}, options);
    const auto x = m.embed(c);
    const double d = embedding_delta(c, x, 10);
    const double knn = mean_knn_distance(adjacency_distance(c, 10));
    const double geo1 = graph_geodesic(c, {-2, 0, 4}, {2, 0, 4});
    const double geo2 = graph_geodesic(c, {0, -2, 4}, {0, 2, 4});
    double span[2];
    for (int k = 0; k < 2; ++k) {
        double lo = x[0](k), hi = x[0](k);
        for (const Coord& p : x) {
            lo = std::min(lo, p(k));
            hi = std::max(hi, p(k));
        }
        span[k] = hi - lo;
    }
    const double r1 = span[0] / geo1;
    const double r2 = span[1] / geo2;
    const bool spans = r1 >= 0.5 && r1 <= 2.0 && r2 >= 0.5 && r2 <= 2.0;
    // Length of the axis section y3 = y^2 over [-2, 2], for comparison.
    const double section = 2.0 * (std::sqrt(17.0) + std::asinh(4.0) / 4.0);
    const bool square = d <= 0.15 * knn;
    return {spans && square, "delta " + num(d) + " vs 0.15 x mean kNN distance " + num(0.15 * knn) + " (ratio " +
                                 num(d / knn, 3) + "), spans " + num(span[0]) + " / " + num(span[1]) +
                                 " vs geodesic spans " + num(geo1) + " / " + num(geo2) + " (axis section length " + num(section) + "), " +
                                 std::to_string(m.nodes().size()) + " nodes"};
}

Outcome swiss_roll_split() {
    const PointCloud c = noisy_swiss_roll(2500, 0.4, 1);
    const PrincipalManifold m = build_manifold(c, 0.75, SliceConfig{15, 15, 4, 1.0});
    return {m.family2().size() > 15, std::to_string(m.family1().size()) + " / " + std::to_string(m.family2().size()) +
                                         " splines per family (family 2 must exceed 15), " +
                                         std::to_string(m.nodes().size()) + " nodes"};
}

SweepConfig sweep_config(SweepKind kind, double step) {
    SweepConfig c = default_sweep(kind);
    c.step = step;
    c.seed = 1;
    return c;
}

void split(const std::vector<SweepPoint>& points, std::vector<double>& xs, std::vector<double>& ys,
           double limit = std::numeric_limits<double>::infinity()) {
    for (const SweepPoint& p : points) {
        if (p.value <= limit + 1e-12 && std::isfinite(p.delta)) {
            xs.push_back(p.value);
            ys.push_back(p.delta);
        }
    }
}

Outcome smoothing_trend() {
    SweepConfig c = sweep_config(SweepKind::Smoothing, 0.05);
    SweepResult r = run_sweep(c);
    c.start = c.stop = 0.88;
    const SweepPoint knee = run_sweep(c).points.at(0);
    r.points.push_back(knee);
    std::sort(r.points.begin(), r.points.end(), [](const auto& a, const auto& b) { return a.value < b.value; });
    std::vector<double> xs, ys;
    split(r.points, xs, ys, 0.88);
    const FitReport fit = fit_curve(xs, ys, CurveKind::Linear);
    double tail = 0.0;
    int count = 0;
    for (const SweepPoint& p : r.points) {
        if (p.value >= 0.9 - 1e-12) {
            tail += p.delta;
            ++count;
        }
    }
    tail /= count;
    const double gap = std::abs(tail - knee.delta) / knee.delta;
    const bool pass = fit.parameters[1] < 0 && fit.r_squared >= 0.90 && gap <= 0.10;
    return {pass, "slope " + num(fit.parameters[1]) + ", R^2 " + num(fit.r_squared) +
                      " on p <= 0.88 (limit 0.90), mean delta on [0.9, 1] " + num(tail) + " vs " + num(knee.delta) +
                      " at 0.88 (gap " + num(gap, 3) + ", limit 0.10); p:delta " + list(r.points)};
}

Outcome noise_trend() {
    const SweepResult r = run_sweep(sweep_config(SweepKind::Noise, 0.1));
    std::vector<double> xs, ys;
    split(r.points, xs, ys);
    const FitReport fit = fit_curve(xs, ys, CurveKind::Quadratic);
    return {fit.r_squared >= 0.95 && fit.parameters[2] > 0,
            "quadratic R^2 " + num(fit.r_squared) + " (limit 0.95), leading coefficient " + num(fit.parameters[2]) +
                " (must be positive); noise:delta " + list(r.points)};
}

Outcome size_trend() {
    const SweepResult r = run_sweep(sweep_config(SweepKind::Size, 250));
    std::vector<double> xs, ys;
    split(r.points, xs, ys);
    const FitReport fit = fit_curve(xs, ys, CurveKind::Exponential);
    return {fit.r_squared >= 0.90 && fit.parameters[1] < 0, "exponential rate " + num(fit.parameters[1]) + ", R^2 " +
                                                              num(fit.r_squared) + " (limit 0.90); n:delta " +
                                                              list(r.points)};
}

struct PredatorRun {
    MobbingData data;
    IsomapResult iso;
};

const PredatorRun& predator() {
    static const PredatorRun run = [] {
        PredatorRun r;
        r.data = predator_mobbing(20, 2000, 14.0, 0.01, 1);
        r.iso = isomap(r.data.cloud, 10, 2);
        return r;
    }();
    return run;
}

Outcome predator_correlation() {
    const PredatorRun& run = predator();
    const PrincipalManifold m = build_manifold(run.data.cloud, 0.9, SliceConfig{3, 3, 4, 1.0});
    const CorrelationScore pm = correlation_score(m.embed(run.data.cloud), run.data.truth);
    std::vector<Coord> iso_x;
    std::vector<Coord> iso_truth;
    for (std::size_t i = 0; i < run.iso.kept.size(); ++i) {
        iso_x.emplace_back(run.iso.embedding(static_cast<Eigen::Index>(i), 0),
                           run.iso.embedding(static_cast<Eigen::Index>(i), 1));
        iso_truth.push_back(run.data.truth[run.iso.kept[i]]);
    }
    const CorrelationScore iso = correlation_score(iso_x, iso_truth);
    const bool pass = pm.r_total >= 0.3 && pm.p_values[0] < 0.05 && pm.p_values[1] < 0.05 &&
                      pm.r_total >= 10.0 * iso.r_total;
    return {pass, "manifold r_total " + num(pm.r_total) + " (r " + num(pm.r[0]) + ", " + num(pm.r[1]) + "; p " +
                      num(pm.p_values[0], 3) + ", " + num(pm.p_values[1], 3) + "), Isomap r_total " +
                      num(iso.r_total) + ", ratio " + num(pm.r_total / iso.r_total, 3) + " (limit 10), " +
                      std::to_string(m.nodes().size()) + " nodes"};
}

Outcome isomap_sanity() {
    const PointCloud square = PointCloud::from_rows({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    const IsomapResult r = isomap(square, 3, 2);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < 4; ++i) {
        for (Eigen::Index j = 0; j < 4; ++j) {
            worst = std::max(worst, std::abs((r.embedding.row(i) - r.embedding.row(j)).norm() -
                                             square.distance(static_cast<std::size_t>(i), static_cast<std::size_t>(j))));
        }
    }
    const auto& rv = predator().iso.residual_variances;
    const double first = 1.0 - rv[0];
    const double second = rv[0] - rv[1];
    const bool pass = worst <= 1e-6 && second < 0.2 * first;
    return {pass, "square distance error " + num(worst, 3) + " (limit 1e-6); predator residual variance " +
                      num(rv[0], 3) + " -> " + num(rv[1], 3) + ", drop 1->2 is " + num(second / first, 3) +
                      " of drop 0->1 (limit 0.2)"};
}

Outcome metric_properties() {
    const PointCloud c = testing::random_cloud(200, 3, 2);
    const PointCloud e = testing::random_cloud(200, 2, 3);
    const double self = delta(adjacency_distance(c, 10), adjacency_distance(c, 10));
    const Eigen::MatrixXd r3 = testing::rotation3(0.8, {1, 1, 0});
    const Eigen::MatrixXd r2 = Eigen::Rotation2Dd(2.0).toRotationMatrix();
    const double before = delta(adjacency_distance(c, 10), adjacency_distance(e, 10));
    const double after = delta(adjacency_distance(testing::transformed(c, r3, Eigen::Vector3d(1, -2, 3)), 10),
                               adjacency_distance(testing::transformed(e, r2, Eigen::Vector2d(4, 4)), 10));
    const double hand = delta(adjacency_distance(PointCloud::from_rows({{0, 0}, {1, 0}}), 1),
                              adjacency_distance(PointCloud::from_rows({{0, 0}, {3, 0}}), 1));
    const bool pass = self == 0.0 && std::abs(after - before) <= 1e-12 && hand == 2.0;
    return {pass, "delta(A, A) = " + num(self) + ", rigid motion change " + num(std::abs(after - before), 3) +
                      ", hand case " + num(hand, 17)};
}

Outcome determinism() {
    const fs::path dir = fs::temp_directory_path() / "pmanifold_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto p = [&](const std::string& name) { return (dir / name).string(); };
    const std::vector<std::vector<std::string>> stages = {
        {"generate", "--kind", "swiss_roll", "--n", "1500", "--noise", "0.2", "--seed", "5", "-o", p("roll.csv")},
        {"generate", "--kind", "predator_mobbing", "--agents", "8", "--steps", "400", "--rho", "4", "--seed", "5",
         "-o", p("mob.csv")},
        {"fit", "-i", p("roll.csv"), "-o", p("model.json"), "--nc", "10", "10", "--p", "0.8"},
        {"embed", "-m", p("model.json"), "-i", p("roll.csv"), "-o", p("emb.csv")},
        {"metric", "-i", p("roll.csv"), "-e", p("emb.csv"), "-o", p("metric.json")},
        {"isomap", "-i", p("mob.csv"), "--k", "10", "--dims", "2", "-o", p("iso.csv"), "--residuals", p("rv.csv")},
        {"sweep", "--kind", "noise", "--seed", "5", "--start", "0", "--stop", "0.4", "--step", "0.2", "--n", "1000",
         "--nc", "8", "8", "-o", p("sweep.csv"), "--report", p("sweep.json")},
    };
    const std::vector<std::string> artifacts = {"roll.csv", "mob.csv",  "mob_truth.csv", "model.json", "emb.csv",
                                                "metric.json", "iso.csv", "rv.csv", "sweep.csv", "sweep.json"};
    std::vector<std::string> first;
    for (const char* threads : {"1", "4"}) {
        for (auto args : stages) {
            args.insert(args.begin(), {"--threads", threads});
            std::ostringstream out, err;
            if (cli::run(args, out, err) != 0) {
                return {false, args[2] + " failed: " + err.str()};
            }
        }
        // invert needs an interior coordinate set; take the origin neighbourhood.
        std::ofstream(p("coords.csv")) << "0,0\n0.3,0.2\n-0.2,0.1\n";
        std::ostringstream out, err;
        if (cli::run({"--threads", threads, "invert", "-m", p("model.json"), "-i", p("coords.csv"), "-o", p("inv.csv")},
                     out, err) != 0) {
            return {false, "invert failed: " + err.str()};
        }
        std::vector<std::string> bytes;
        for (const auto& a : artifacts) {
            bytes.push_back(slurp(dir / a));
        }
        bytes.push_back(slurp(dir / "inv.csv"));
        if (first.empty()) {
            first = bytes;
        } else {
            std::size_t same = 0;
            for (std::size_t i = 0; i < bytes.size(); ++i) {
                same += bytes[i] == first[i] && !bytes[i].empty();
            }
            return {same == bytes.size(), std::to_string(same) + " of " + std::to_string(bytes.size()) +
                                              " artifacts byte-identical between 1 and 4 threads"};
        }
    }
    return {false, "unreachable"};
}

}  // namespace

int main() {
    criterion(1, "spline oracle equivalence", 60, spline_oracle);
    criterion(2, "flat-patch fidelity", 60, flat_patch);
    criterion(3, "paraboloid topological square", 300, paraboloid_square);
    criterion(4, "noisy swiss roll sub-cluster splitting", 300, swiss_roll_split);
    criterion(5, "delta vs smoothing: linear decay then saturation", 1800, smoothing_trend);
    criterion(6, "delta vs noise: quadratic growth", 1800, noise_trend);
    criterion(7, "delta vs sample size: exponential decay", 1800, size_trend);
    criterion(8, "predator mobbing correlation vs Isomap", 600, predator_correlation);
    criterion(9, "Isomap sanity", 600, isomap_sanity);
    criterion(10, "metric properties", 60, metric_properties);
    criterion(11, "determinism", 600, determinism);
    std::cout << (11 - failures) << " of 11 criteria passed" << std::endl;
    return failures;
}
