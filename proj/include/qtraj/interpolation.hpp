#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qtraj {

/// Piecewise cubic Hermite interpolant on strictly increasing knots.
///
/// Knot slopes come from five-point (fourth-order) finite differences on
/// the possibly non-uniform knots, so smooth data is reproduced to O(h^4)
/// and quartics are exact away from the ends.
class CubicHermite {
public:
    enum class Shape {
        free,      // unconstrained slopes
        monotone,  // Fritsch-Carlson limited slopes, linear end intervals
    };

    CubicHermite() = default;
    CubicHermite(std::vector<double> knots, std::vector<double> values, Shape shape = Shape::free);

    double operator()(double x) const;
    double derivative(double x) const;
    std::vector<double> operator()(std::span<const double> xs) const;

    double lower() const noexcept { return knots_.front(); }
    double upper() const noexcept { return knots_.back(); }
    bool in_range(double x) const noexcept { return x >= knots_.front() && x <= knots_.back(); }
    const std::vector<double>& knots() const noexcept { return knots_; }
    const std::vector<double>& values() const noexcept { return values_; }

private:
    std::size_t interval(double x) const;

    std::vector<double> knots_;
    std::vector<double> values_;
    std::vector<double> slopes_;
    Shape shape_ = Shape::free;
};

}  // namespace qtraj
