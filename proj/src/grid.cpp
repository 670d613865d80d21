#include "qtraj/grid.hpp"

#include "qtraj/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qtraj {

ConfigError::ConfigError(std::vector<std::string> violations)
    : Error([&] {
          std::string msg = "invalid configuration:";
          for (const auto& v : violations) msg += "\n  - " + v;
          return msg;
      }()),
      violations_(std::move(violations)) {}

void PhysicalConstants::validate() const {
    if (!(hbar > 0.0) || !(mass > 0.0)) {
        throw ParameterError("physical constants hbar and mass must be strictly positive");
    }
}

GridSpec::GridSpec(double x_min, double x_max, std::size_t n_points)
    : x_min_(x_min), x_max_(x_max), n_(n_points) {
    if (!(x_min < x_max)) throw ParameterError("GridSpec: x_min must be below x_max");
    if (n_points < min_points) {
        throw ParameterError("GridSpec: at least " + std::to_string(min_points) + " points required");
    }
    dx_ = (x_max - x_min) / static_cast<double>(n_points - 1);
}

std::vector<double> GridSpec::points() const {
    std::vector<double> xs(n_);
    for (std::size_t i = 0; i < n_; ++i) xs[i] = x(i);
    return xs;
}

std::size_t GridSpec::nearest_index(double x) const noexcept {
    const double r = std::round((x - x_min_) / dx_);
    if (r <= 0.0) return 0;
    return std::min(static_cast<std::size_t>(r), n_ - 1);
}

LabelGrid::LabelGrid(double a_min, double a_max, std::size_t n_labels)
    : a_min_(a_min), a_max_(a_max), n_(n_labels) {
    if (!(a_min < a_max)) throw ParameterError("LabelGrid: a_min must be below a_max");
    if (n_labels < min_labels) {
        throw ParameterError("LabelGrid: at least " + std::to_string(min_labels) + " labels required");
    }
    da_ = (a_max - a_min) / static_cast<double>(n_labels - 1);
}

std::vector<double> LabelGrid::points() const {
    std::vector<double> as(n_);
    for (std::size_t i = 0; i < n_; ++i) as[i] = a(i);
    return as;
}

double trapezoid(const std::vector<double>& f, double h) {
    if (f.empty()) return 0.0;
    double s = 0.5 * (f.front() + f.back());
    for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
    return f.size() == 1 ? 0.0 : s * h;
}

}  // namespace qtraj
