#include "pmanifold/metrics.hpp"

#include "pmanifold/error.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

namespace pmanifold {

AdjacencyDistance adjacency_distance(const PointCloud& cloud, std::size_t k) {
    AdjacencyDistance a;
    a.n = cloud.size();
    a.k = k;
    a.entries = knn_graph(cloud, k).edges;
    std::sort(a.entries.begin(), a.entries.end(),
              [](const Edge& x, const Edge& y) { return std::tie(x.from, x.to) < std::tie(y.from, y.to); });
    return a;
}

double delta(const AdjacencyDistance& a, const AdjacencyDistance& b) {
    if (a.n != b.n || a.k != b.k) {
        throw InputError("adjacency matrices disagree: n=" + std::to_string(a.n) + ", k=" + std::to_string(a.k) +
                         " vs n=" + std::to_string(b.n) + ", k=" + std::to_string(b.k));
    }
    if (a.n == 0 || a.k == 0) {
        return 0.0;
    }
    auto key = [](const Edge& e) { return std::make_pair(e.from, e.to); };
    double sum = 0.0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.entries.size() || j < b.entries.size()) {
        if (j == b.entries.size() || (i < a.entries.size() && key(a.entries[i]) < key(b.entries[j]))) {
            sum += std::abs(a.entries[i++].weight);
        } else if (i == a.entries.size() || key(b.entries[j]) < key(a.entries[i])) {
            sum += std::abs(b.entries[j++].weight);
        } else {
            sum += std::abs(a.entries[i++].weight - b.entries[j++].weight);
        }
    }
    return sum / (static_cast<double>(a.n) * static_cast<double>(a.k));
}

double mean_knn_distance(const AdjacencyDistance& a) {
    if (a.entries.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (const Edge& e : a.entries) {
        sum += e.weight;
    }
    return sum / static_cast<double>(a.entries.size());
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) {
        throw InputError("correlated signals differ in length");
    }
    if (a.size() < 2) {
        throw InputError("correlation needs at least 2 samples");
    }
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (!(saa > 0.0) || !(sbb > 0.0)) {
        throw InputError("zero-variance signal");
    }
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

CorrelationScore correlation_score(const std::vector<Eigen::Vector2d>& embedding,
                                   const std::vector<Eigen::Vector2d>& truth) {
    if (embedding.size() != truth.size()) {
        throw InputError("embedding has " + std::to_string(embedding.size()) + " rows but ground truth has " +
                         std::to_string(truth.size()));
    }
    if (embedding.size() < 3) {
        throw InputError("correlation needs at least 3 samples");
    }
    const std::size_t n = embedding.size();
    const double dof = static_cast<double>(n - 2);
    boost::math::students_t dist(dof);
    CorrelationScore score;
    for (int c = 0; c < 2; ++c) {
        std::vector<double> x(n);
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = embedding[i][c];
            y[i] = truth[i][c];
        }
        const double r = std::abs(pearson(x, y));
        score.r[c] = r;
        if (r >= 1.0) {
            score.p_values[c] = 0.0;
        } else {
            const double t = r * std::sqrt(dof / (1.0 - r * r));
            score.p_values[c] = 2.0 * boost::math::cdf(boost::math::complement(dist, t));
        }
    }
    score.r_total = score.r[0] + score.r[1];
    return score;
}

std::string to_string(CurveKind kind) {
    switch (kind) {
        case CurveKind::Linear:
            return "linear";
        case CurveKind::Quadratic:
            return "quadratic";
        case CurveKind::Exponential:
            return "exponential";
    }
    return "linear";
}

CurveKind curve_kind_from_string(const std::string& name) {
    if (name == "linear") {
        return CurveKind::Linear;
    }
    if (name == "quadratic") {
        return CurveKind::Quadratic;
    }
    if (name == "exponential") {
        return CurveKind::Exponential;
    }
    throw InputError("unknown curve kind '" + name + "'");
}

double FitReport::predict(double x) const {
    switch (kind) {
        case CurveKind::Linear:
            return parameters[0] + parameters[1] * x;
        case CurveKind::Quadratic:
            return parameters[0] + parameters[1] * x + parameters[2] * x * x;
        case CurveKind::Exponential:
            return parameters[0] * std::exp(parameters[1] * x);
    }
    return 0.0;
}

double r_squared(const std::vector<double>& ys, const std::vector<double>& fitted) {
    if (ys.size() != fitted.size() || ys.empty()) {
        throw InputError("r_squared needs equally long, non-empty sequences");
    }
    const double mean = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        ss_res += (ys[i] - fitted[i]) * (ys[i] - fitted[i]);
        ss_tot += (ys[i] - mean) * (ys[i] - mean);
    }
    if (ss_tot == 0.0) {
        return ss_res == 0.0 ? 1.0 : -std::numeric_limits<double>::infinity();
    }
    return 1.0 - ss_res / ss_tot;
}

namespace {

std::vector<double> polyfit(const std::vector<double>& xs, const std::vector<double>& ys, int degree) {
    const auto n = static_cast<Eigen::Index>(xs.size());
    Eigen::MatrixXd design(n, degree + 1);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double power = 1.0;
        for (int c = 0; c <= degree; ++c) {
            design(i, c) = power;
            power *= xs[static_cast<std::size_t>(i)];
        }
        rhs[i] = ys[static_cast<std::size_t>(i)];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-12);
    if (qr.rank() < degree + 1) {
        throw AlgorithmError("singular design");
    }
    const Eigen::VectorXd beta = qr.solve(rhs);
    return std::vector<double>(beta.data(), beta.data() + beta.size());
}

}  // namespace

FitReport fit_curve(const std::vector<double>& xs, const std::vector<double>& ys, CurveKind kind) {
    if (xs.size() != ys.size()) {
        throw InputError("fit_curve needs equally long xs and ys");
    }
    const std::size_t needed = kind == CurveKind::Quadratic ? 3 : 2;
    if (xs.size() < needed) {
        throw InputError("fit_curve needs at least " + std::to_string(needed) + " samples for a " + to_string(kind) +
                         " fit");
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) {
            throw InputError("fit_curve samples must be finite");
        }
    }
    FitReport report;
    report.kind = kind;
    if (kind == CurveKind::Exponential) {
        std::vector<double> logs(ys.size());
        for (std::size_t i = 0; i < ys.size(); ++i) {
            if (!(ys[i] > 0.0)) {
                throw InputError("exponential fit requires positive ys");
            }
            logs[i] = std::log(ys[i]);
        }
        const auto line = polyfit(xs, logs, 1);
        report.parameters = {std::exp(line[0]), line[1]};
    } else {
        report.parameters = polyfit(xs, ys, kind == CurveKind::Linear ? 1 : 2);
    }
    std::vector<double> fitted(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        fitted[i] = report.predict(xs[i]);
    }
    report.r_squared = r_squared(ys, fitted);
    return report;
}

}  // namespace pmanifold
