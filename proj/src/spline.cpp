#include "pmanifold/spline.hpp"

#include "pmanifold/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace pmanifold {

namespace {

constexpr std::size_t kMinQuadraturePieces = 256;

// 5-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr std::array<double, 5> kGaussNodes = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                               0.9061798459386640};
constexpr std::array<double, 5> kGaussWeights = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                                 0.4786286704993665, 0.2369268850561891};

// Symmetric positive-definite pentadiagonal system solved by banded LDL^T.
// diag0[i] = A(i,i), diag1[i] = A(i,i+1), diag2[i] = A(i,i+2).
class PentadiagonalLdlt {
public:
    PentadiagonalLdlt(std::vector<double> diag0, const std::vector<double>& diag1, const std::vector<double>& diag2)
        : d_(std::move(diag0)), l1_(d_.size(), 0.0), l2_(d_.size(), 0.0) {
        const std::size_t n = d_.size();
        for (std::size_t i = 0; i < n; ++i) {
            if (i >= 1) {
                d_[i] -= l1_[i - 1] * l1_[i - 1] * d_[i - 1];
            }
            if (i >= 2) {
                d_[i] -= l2_[i - 2] * l2_[i - 2] * d_[i - 2];
            }
            if (!(d_[i] > 0.0)) {
                throw AlgorithmError("smoothing spline system is not positive definite");
            }
            if (i + 1 < n) {
                double off = diag1[i];
                if (i >= 1) {
                    off -= l2_[i - 1] * l1_[i - 1] * d_[i - 1];
                }
                l1_[i] = off / d_[i];
            }
            if (i + 2 < n) {
                l2_[i] = diag2[i] / d_[i];
            }
        }
    }

    std::vector<double> solve(std::vector<double> b) const {
        const std::size_t n = d_.size();
        for (std::size_t i = 0; i < n; ++i) {
            if (i >= 1) {
                b[i] -= l1_[i - 1] * b[i - 1];
            }
            if (i >= 2) {
                b[i] -= l2_[i - 2] * b[i - 2];
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            b[i] /= d_[i];
        }
        for (std::size_t r = n; r-- > 0;) {
            if (r + 1 < n) {
                b[r] -= l1_[r] * b[r + 1];
            }
            if (r + 2 < n) {
                b[r] -= l2_[r] * b[r + 2];
            }
        }
        return b;
    }

private:
    std::vector<double> d_;
    std::vector<double> l1_;
    std::vector<double> l2_;
};

double clamp_smoothing(double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw InputError("smoothing parameter must lie in [0, 1]");
    }
    return std::max(p, kMinSmoothing);
}

}  // namespace

SmoothingSpline::SmoothingSpline(std::vector<double> knots, std::vector<IntervalCoefficients> coefficients, double p)
    : knots_(std::move(knots)), coefficients_(std::move(coefficients)), p_(p) {
    if (knots_.size() < 2 || coefficients_.size() + 1 != knots_.size()) {
        throw InputError("spline needs m >= 2 knots and m - 1 coefficient blocks");
    }
    for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
        if (!(knots_[i] < knots_[i + 1])) {
            throw InputError("spline knots must be strictly increasing");
        }
    }
    dim_ = static_cast<std::size_t>(coefficients_.front().rows());
    for (const auto& block : coefficients_) {
        if (static_cast<std::size_t>(block.rows()) != dim_) {
            throw InputError("spline coefficient blocks disagree on dimension");
        }
    }
    build_length_table();
}

std::size_t SmoothingSpline::interval_of(double lambda) const {
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), lambda);
    std::size_t i = it == knots_.begin() ? 0 : static_cast<std::size_t>(it - knots_.begin()) - 1;
    return std::min(i, coefficients_.size() - 1);
}

Vector SmoothingSpline::value(double lambda) const {
    if (lambda < knots_.front()) {
        return value(knots_.front()) + derivative(knots_.front()) * (lambda - knots_.front());
    }
    if (lambda > knots_.back()) {
        return value(knots_.back()) + derivative(knots_.back()) * (lambda - knots_.back());
    }
    const std::size_t i = interval_of(lambda);
    const double u = lambda - knots_[i];
    const auto& c = coefficients_[i];
    return c.col(0) + u * (c.col(1) + u * (c.col(2) + u * c.col(3)));
}

Vector SmoothingSpline::derivative(double lambda) const {
    const double t = std::clamp(lambda, knots_.front(), knots_.back());
    const std::size_t i = interval_of(t);
    const double u = t - knots_[i];
    const auto& c = coefficients_[i];
    return c.col(1) + u * (2.0 * c.col(2) + 3.0 * u * c.col(3));
}

Vector SmoothingSpline::second_derivative(double lambda) const {
    if (lambda < knots_.front() || lambda > knots_.back()) {
        return Vector::Zero(static_cast<Eigen::Index>(dim_));
    }
    const std::size_t i = interval_of(lambda);
    const double u = lambda - knots_[i];
    const auto& c = coefficients_[i];
    return 2.0 * c.col(2) + 6.0 * u * c.col(3);
}

SplineSample SmoothingSpline::eval(double lambda) const {
    SplineSample sample{value(lambda), derivative(lambda)};
    double norm = sample.tangent.norm();
    if (norm > 1e-12) {
        sample.tangent /= norm;
        return sample;
    }
    const std::size_t i = interval_of(std::clamp(lambda, knots_.front(), knots_.back()));
    sample.tangent = value(knots_[i + 1]) - value(knots_[i]);
    norm = sample.tangent.norm();
    if (norm <= 1e-12) {
        sample.tangent = value(knots_.back()) - value(knots_.front());
        norm = sample.tangent.norm();
    }
    if (norm <= 1e-12) {
        sample.tangent = Vector::Unit(static_cast<Eigen::Index>(dim_), 0);
        return sample;
    }
    sample.tangent /= norm;
    return sample;
}

void SmoothingSpline::build_length_table() {
    const std::size_t intervals = coefficients_.size();
    pieces_per_interval_ = std::max<std::size_t>(1, (kMinQuadraturePieces + intervals - 1) / intervals);
    cumulative_.assign(intervals * pieces_per_interval_ + 1, 0.0);
    std::size_t slot = 0;
    for (std::size_t i = 0; i < intervals; ++i) {
        const double h = (knots_[i + 1] - knots_[i]) / static_cast<double>(pieces_per_interval_);
        for (std::size_t k = 0; k < pieces_per_interval_; ++k) {
            const double start = knots_[i] + h * static_cast<double>(k);
            const double end = k + 1 == pieces_per_interval_ ? knots_[i + 1] : start + h;
            double piece = 0.0;
            const double half = 0.5 * (end - start);
            const double mid = 0.5 * (end + start);
            for (std::size_t g = 0; g < kGaussNodes.size(); ++g) {
                piece += kGaussWeights[g] * derivative(mid + half * kGaussNodes[g]).norm();
            }
            cumulative_[slot + 1] = cumulative_[slot] + half * piece;
            ++slot;
        }
    }
}

double SmoothingSpline::length_from_start(double lambda) const {
    const double t = std::clamp(lambda, knots_.front(), knots_.back());
    const std::size_t i = interval_of(t);
    const double h = (knots_[i + 1] - knots_[i]) / static_cast<double>(pieces_per_interval_);
    std::size_t k = static_cast<std::size_t>(std::max(0.0, std::floor((t - knots_[i]) / h)));
    k = std::min(k, pieces_per_interval_ - 1);
    const double start = knots_[i] + h * static_cast<double>(k);
    const double half = 0.5 * (t - start);
    const double mid = 0.5 * (t + start);
    double partial = 0.0;
    for (std::size_t g = 0; g < kGaussNodes.size(); ++g) {
        partial += kGaussWeights[g] * derivative(mid + half * kGaussNodes[g]).norm();
    }
    return cumulative_[i * pieces_per_interval_ + k] + half * partial;
}

double SmoothingSpline::arc_length(double from, double to) const {
    if (from == to) {
        return 0.0;
    }
    return length_from_start(to) - length_from_start(from);
}

double SmoothingSpline::bending_energy() const {
    double energy = 0.0;
    for (std::size_t i = 0; i < coefficients_.size(); ++i) {
        const double h = knots_[i + 1] - knots_[i];
        const auto& c = coefficients_[i];
        for (Eigen::Index j = 0; j < c.rows(); ++j) {
            const double a = 2.0 * c(j, 2);
            const double b = 6.0 * c(j, 3);
            energy += a * a * h + a * b * h * h + b * b * h * h * h / 3.0;
        }
    }
    return energy;
}

SmoothingSpline fit_smoothing_spline(const std::vector<double>& sites, const RowMatrix& values, double p) {
    const std::size_t n = sites.size();
    if (n < 2) {
        throw AlgorithmError("degenerate geodesic: fewer than 2 distinct points");
    }
    if (static_cast<std::size_t>(values.rows()) != n) {
        throw InputError("spline sites and values disagree in length");
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!(sites[i] < sites[i + 1])) {
            throw InputError("spline sites must be strictly increasing");
        }
    }
    const double weight = clamp_smoothing(p);
    const double alpha = (1.0 - weight) / weight;
    const std::size_t d = static_cast<std::size_t>(values.cols());

    std::vector<double> h(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = sites[i + 1] - sites[i];
    }

    // Fitted values g and second derivatives gamma (zero at both ends).
    RowMatrix g = values;
    RowMatrix gamma = RowMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));

    if (n >= 3) {
        const std::size_t m = n - 2;
        // Column j of Q touches rows j, j+1, j+2.
        std::vector<double> q0(m), q1(m), q2(m);
        for (std::size_t j = 0; j < m; ++j) {
            q0[j] = 1.0 / h[j];
            q2[j] = 1.0 / h[j + 1];
            q1[j] = -q0[j] - q2[j];
        }
        std::vector<double> diag0(m), diag1(m, 0.0), diag2(m, 0.0);
        for (std::size_t j = 0; j < m; ++j) {
            diag0[j] = (h[j] + h[j + 1]) / 3.0 + alpha * (q0[j] * q0[j] + q1[j] * q1[j] + q2[j] * q2[j]);
            if (j + 1 < m) {
                diag1[j] = h[j + 1] / 6.0 + alpha * (q1[j] * q0[j + 1] + q2[j] * q1[j + 1]);
            }
            if (j + 2 < m) {
                diag2[j] = alpha * q2[j] * q0[j + 2];
            }
        }
        const PentadiagonalLdlt solver(diag0, diag1, diag2);

        for (std::size_t dim = 0; dim < d; ++dim) {
            const auto y = values.col(static_cast<Eigen::Index>(dim));
            std::vector<double> rhs(m);
            for (std::size_t j = 0; j < m; ++j) {
                rhs[j] = q0[j] * y(static_cast<Eigen::Index>(j)) + q1[j] * y(static_cast<Eigen::Index>(j + 1)) +
                         q2[j] * y(static_cast<Eigen::Index>(j + 2));
            }
            const std::vector<double> interior = solver.solve(std::move(rhs));
            for (std::size_t j = 0; j < m; ++j) {
                gamma(static_cast<Eigen::Index>(j + 1), static_cast<Eigen::Index>(dim)) = interior[j];
            }
            for (std::size_t r = 0; r < n; ++r) {
                double q_gamma = 0.0;
                if (r < m) {
                    q_gamma += q0[r] * interior[r];
                }
                if (r >= 1 && r - 1 < m) {
                    q_gamma += q1[r - 1] * interior[r - 1];
                }
                if (r >= 2 && r - 2 < m) {
                    q_gamma += q2[r - 2] * interior[r - 2];
                }
                g(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(dim)) -= alpha * q_gamma;
            }
        }
    }

    std::vector<SmoothingSpline::IntervalCoefficients> blocks(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        auto& block = blocks[i];
        block.resize(static_cast<Eigen::Index>(d), 4);
        const auto ri = static_cast<Eigen::Index>(i);
        for (Eigen::Index dim = 0; dim < static_cast<Eigen::Index>(d); ++dim) {
            const double g0 = g(ri, dim);
            const double g1 = g(ri + 1, dim);
            const double c0 = gamma(ri, dim);
            const double c1 = gamma(ri + 1, dim);
            block(dim, 0) = g0;
            block(dim, 1) = (g1 - g0) / h[i] - h[i] * (2.0 * c0 + c1) / 6.0;
            block(dim, 2) = 0.5 * c0;
            block(dim, 3) = (c1 - c0) / (6.0 * h[i]);
        }
    }
    return SmoothingSpline(sites, std::move(blocks), weight);
}

std::vector<double> chord_parameters(const std::vector<Vector>& ordered_points) {
    std::vector<double> lambda(ordered_points.size(), 0.0);
    for (std::size_t i = 1; i < ordered_points.size(); ++i) {
        lambda[i] = lambda[i - 1] + (ordered_points[i] - ordered_points[i - 1]).norm();
    }
    const double total = lambda.empty() ? 0.0 : lambda.back();
    if (total > 0.0) {
        for (double& l : lambda) {
            l /= total;
        }
    }
    return lambda;
}

SmoothingSpline fit_smoothing_spline(const std::vector<Vector>& ordered_points, double p) {
    if (ordered_points.size() < 2) {
        throw AlgorithmError("degenerate geodesic: fewer than 2 points");
    }
    const std::size_t d = static_cast<std::size_t>(ordered_points.front().size());
    for (const Vector& pt : ordered_points) {
        if (static_cast<std::size_t>(pt.size()) != d) {
            throw InputError("spline points disagree on dimension");
        }
    }
    const std::vector<double> lambda = chord_parameters(ordered_points);
    if (!(lambda.back() > 0.0)) {
        throw AlgorithmError("degenerate geodesic: all points coincide");
    }

    // Merge runs of (numerically) equal chord positions.
    std::vector<double> sites;
    std::vector<Vector> merged;
    std::size_t run_start = 0;
    for (std::size_t i = 1; i <= ordered_points.size(); ++i) {
        if (i < ordered_points.size() && lambda[i] - lambda[run_start] <= 1e-12) {
            continue;
        }
        Vector mean = Vector::Zero(static_cast<Eigen::Index>(d));
        for (std::size_t r = run_start; r < i; ++r) {
            mean += ordered_points[r];
        }
        mean /= static_cast<double>(i - run_start);
        sites.push_back(lambda[run_start]);
        merged.push_back(std::move(mean));
        run_start = i;
    }
    if (merged.size() < 2) {
        throw AlgorithmError("degenerate geodesic: fewer than 2 distinct points");
    }
    // Keep the domain exactly [0, 1] after merging.
    sites.front() = 0.0;
    sites.back() = 1.0;

    RowMatrix values(static_cast<Eigen::Index>(merged.size()), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < merged.size(); ++i) {
        values.row(static_cast<Eigen::Index>(i)) = merged[i].transpose();
    }
    return fit_smoothing_spline(sites, values, p);
}

}  // namespace pmanifold
