#pragma once

#include <cstddef>
#include <vector>

namespace qtraj {

/// Physical constants; both must be strictly positive.
struct PhysicalConstants {
    double hbar = 1.0;
    double mass = 1.0;

    void validate() const;
};

/// Uniform spatial grid including both endpoints.
class GridSpec {
public:
    static constexpr std::size_t min_points = 16;

    GridSpec() = default;
    GridSpec(double x_min, double x_max, std::size_t n_points);

    double x_min() const noexcept { return x_min_; }
    double x_max() const noexcept { return x_max_; }
    std::size_t size() const noexcept { return n_; }
    double spacing() const noexcept { return dx_; }
    double x(std::size_t i) const noexcept { return x_min_ + dx_ * static_cast<double>(i); }
    std::vector<double> points() const;

    bool contains(double x) const noexcept { return x >= x_min_ && x <= x_max_; }
    // Index of the grid point nearest to x (clamped).
    std::size_t nearest_index(double x) const noexcept;

    friend bool operator==(const GridSpec&, const GridSpec&) = default;

private:
    double x_min_ = 0.0;
    double x_max_ = 1.0;
    std::size_t n_ = 0;
    double dx_ = 0.0;
};

/// Uniform grid of trajectory labels a (the initial positions).
class LabelGrid {
public:
    static constexpr std::size_t min_labels = 32;

    LabelGrid() = default;
    LabelGrid(double a_min, double a_max, std::size_t n_labels);

    double a_min() const noexcept { return a_min_; }
    double a_max() const noexcept { return a_max_; }
    std::size_t size() const noexcept { return n_; }
    double spacing() const noexcept { return da_; }
    double a(std::size_t i) const noexcept { return a_min_ + da_ * static_cast<double>(i); }
    std::vector<double> points() const;

    friend bool operator==(const LabelGrid&, const LabelGrid&) = default;

private:
    double a_min_ = 0.0;
    double a_max_ = 1.0;
    std::size_t n_ = 0;
    double da_ = 0.0;
};

/// Composite trapezoid rule on a uniform grid.
double trapezoid(const std::vector<double>& f, double h);

}  // namespace qtraj
