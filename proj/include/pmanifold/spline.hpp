#pragma once

#include "pmanifold/point_cloud.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace pmanifold {

/// Smoothing weights below this are clamped; p = 0 would ignore the data.
inline constexpr double kMinSmoothing = 1e-6;

struct SplineSample {
    Vector position;
    Vector tangent;  ///< unit length
};

/// d-dimensional natural cubic spline on increasing knots lambda_1 < ... < lambda_m
/// (0 and 1 for chord-parameterised fits).
///
/// Interval i covers [knot_i, knot_{i+1}] and stores, per dimension, the
/// coefficients (c0, c1, c2, c3) of c0 + c1 u + c2 u^2 + c3 u^3 with
/// u = lambda - knot_i. Outside the knot range the curve continues linearly.
class SmoothingSpline {
public:
    using IntervalCoefficients = Eigen::Matrix<double, Eigen::Dynamic, 4, Eigen::RowMajor>;

    SmoothingSpline() = default;
    SmoothingSpline(std::vector<double> knots, std::vector<IntervalCoefficients> coefficients, double p);

    std::size_t dim() const { return dim_; }
    double smoothing() const { return p_; }
    const std::vector<double>& knots() const { return knots_; }
    const std::vector<IntervalCoefficients>& coefficients() const { return coefficients_; }

    Vector value(double lambda) const;
    Vector derivative(double lambda) const;
    Vector second_derivative(double lambda) const;

    /// Position and unit tangent. A vanishing derivative falls back to the
    /// chord direction of the owning interval.
    SplineSample eval(double lambda) const;

    /// Signed length of the curve between two parameters (negative when
    /// to < from). Parameters are clamped to the knot range.
    double arc_length(double from, double to) const;
    double length() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
    double front() const { return knots_.front(); }
    double back() const { return knots_.back(); }

    /// Exact value of the integral of |S''|^2 over the knot range.
    double bending_energy() const;

private:
    std::size_t interval_of(double lambda) const;
    double length_from_start(double lambda) const;
    void build_length_table();

    std::vector<double> knots_;
    std::vector<IntervalCoefficients> coefficients_;
    double p_ = 1.0;
    std::size_t dim_ = 0;

    std::size_t pieces_per_interval_ = 1;
    std::vector<double> cumulative_;  ///< arc length at every quadrature piece boundary
};

/// Fits one smoothing spline per column of `values` at the given increasing
/// sites, minimising p sum (y - S(site))^2 + (1 - p) int S''^2 over natural
/// cubic splines. Sites are used as given (no normalisation).
SmoothingSpline fit_smoothing_spline(const std::vector<double>& sites, const RowMatrix& values, double p);

/// Fits a spline to an ordered point sequence parameterised by normalised
/// cumulative chord length. Consecutive duplicates are merged by averaging.
SmoothingSpline fit_smoothing_spline(const std::vector<Vector>& ordered_points, double p);

/// Normalised cumulative chord length of a point sequence.
std::vector<double> chord_parameters(const std::vector<Vector>& ordered_points);

}  // namespace pmanifold
