#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace qtraj::fd {

// Finite-difference weights for the m-th derivative at z using the given
// nodes (Fornberg 1988). Returns one weight per node.
std::vector<double> fornberg_weights(double z, std::span<const double> nodes, int derivative);

/// Derivative operator on a uniform 1D grid.
///
/// Interior points use centred stencils of the requested (even) order;
/// points closer than the half-width to an edge use one-sided windows of
/// `order + derivative` points so the formal order is kept everywhere.
class DerivativeOperator {
public:
    DerivativeOperator(std::size_t n, double h, int derivative, int order);

    std::size_t size() const noexcept { return n_; }
    int derivative() const noexcept { return derivative_; }
    int order() const noexcept { return order_; }
    // Number of points at each edge that use a one-sided window.
    std::size_t boundary_width() const noexcept { return half_; }

    void apply(std::span<const double> f, std::span<double> out) const;
    std::vector<double> apply(std::span<const double> f) const;

private:
    // Row i reads f[start .. start+weights.size()).
    struct Row {
        std::size_t start;
        std::vector<double> weights;
    };

    std::size_t n_;
    int derivative_;
    int order_;
    std::size_t half_;
    std::vector<double> interior_;
    std::vector<Row> left_;
    std::vector<Row> right_;
};

// Derivative evaluated independently on every maximal run of unmasked
// points (mask[i] != 0 means excluded). Results at masked points, and on
// runs too short for even a first-order stencil, are NaN. Short runs fall
// back to the highest order their length supports.
std::vector<double> derivative_on_runs(std::span<const double> f, std::span<const std::uint8_t> mask,
                                       double h, int derivative, int order);

// Maximal runs [first, last] of unmasked indices.
struct Run {
    std::size_t first;
    std::size_t last;
    std::size_t length() const noexcept { return last - first + 1; }
};
std::vector<Run> unmasked_runs(std::span<const std::uint8_t> mask);

std::vector<double> differentiate(std::span<const double> f, double h, int derivative, int order);

}  // namespace qtraj::fd
