#include "qtraj/interpolation.hpp"

#include "qtraj/errors.hpp"
#include "qtraj/finite_difference.hpp"

#include <algorithm>
#include <cmath>

namespace qtraj {

CubicHermite::CubicHermite(std::vector<double> knots, std::vector<double> values, Shape shape)
    : knots_(std::move(knots)), values_(std::move(values)), shape_(shape) {
    const std::size_t n = knots_.size();
    if (n < 2 || values_.size() != n) {
        throw ShapeError("CubicHermite: need >= 2 knots and one value per knot");
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (!(knots_[i] > knots_[i - 1])) {
            throw DomainError("CubicHermite: knots must be strictly increasing");
        }
    }
    slopes_.assign(n, 0.0);
    const std::size_t width = std::min<std::size_t>(5, n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t start = i >= width / 2 ? i - width / 2 : 0;
        start = std::min(start, n - width);
        std::vector<double> nodes(width);
        for (std::size_t j = 0; j < width; ++j) nodes[j] = knots_[start + j] - knots_[i];
        const auto w = fd::fornberg_weights(0.0, nodes, 1);
        double s = 0.0;
        for (std::size_t j = 0; j < width; ++j) s += w[j] * values_[start + j];
        slopes_[i] = s;
    }
    if (shape_ == Shape::monotone) {
        // Fritsch-Carlson: slopes share the sign of adjacent secants and lie
        // inside the circle of radius 3; smooth resolved data is untouched.
        for (std::size_t k = 0; k + 1 < n; ++k) {
            const double delta = (values_[k + 1] - values_[k]) / (knots_[k + 1] - knots_[k]);
            if (delta == 0.0) {
                slopes_[k] = 0.0;
                slopes_[k + 1] = 0.0;
                continue;
            }
            if (slopes_[k] * delta < 0.0) slopes_[k] = 0.0;
            if (slopes_[k + 1] * delta < 0.0) slopes_[k + 1] = 0.0;
            const double alpha = slopes_[k] / delta;
            const double beta = slopes_[k + 1] / delta;
            const double r2 = alpha * alpha + beta * beta;
            if (r2 > 9.0) {
                const double tau = 3.0 / std::sqrt(r2);
                slopes_[k] = tau * alpha * delta;
                slopes_[k + 1] = tau * beta * delta;
            }
        }
    }
}

std::size_t CubicHermite::interval(double x) const {
    if (!(x >= knots_.front() && x <= knots_.back())) {
        throw DomainError("CubicHermite: evaluation point outside knot range");
    }
    auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
    std::size_t k = static_cast<std::size_t>(std::distance(knots_.begin(), it));
    if (k == 0) return 0;
    return std::min(k - 1, knots_.size() - 2);
}

double CubicHermite::operator()(double x) const {
    const std::size_t k = interval(x);
    const double h = knots_[k + 1] - knots_[k];
    const double t = (x - knots_[k]) / h;
    const bool linear_end = shape_ == Shape::monotone && (k == 0 || k + 2 == knots_.size());
    if (linear_end) return values_[k] + t * (values_[k + 1] - values_[k]);
    if (t == 0.0) return values_[k];
    if (t == 1.0) return values_[k + 1];
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    return h00 * values_[k] + h10 * h * slopes_[k] + h01 * values_[k + 1] + h11 * h * slopes_[k + 1];
}

double CubicHermite::derivative(double x) const {
    const std::size_t k = interval(x);
    const double h = knots_[k + 1] - knots_[k];
    const bool linear_end = shape_ == Shape::monotone && (k == 0 || k + 2 == knots_.size());
    if (linear_end) return (values_[k + 1] - values_[k]) / h;
    const double t = (x - knots_[k]) / h;
    const double t2 = t * t;
    const double d00 = 6 * t2 - 6 * t;
    const double d10 = 3 * t2 - 4 * t + 1;
    const double d01 = -6 * t2 + 6 * t;
    const double d11 = 3 * t2 - 2 * t;
    return (d00 * values_[k] + d01 * values_[k + 1]) / h + d10 * slopes_[k] + d11 * slopes_[k + 1];
}

std::vector<double> CubicHermite::operator()(std::span<const double> xs) const {
    std::vector<double> out(xs.size());
    std::transform(xs.begin(), xs.end(), out.begin(), [this](double x) { return (*this)(x); });
    return out;
}

}  // namespace qtraj
