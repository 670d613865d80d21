#pragma once

#include "qtraj/grid.hpp"
#include "qtraj/state.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace qtraj::test {

// Independent closed forms, written out here rather than taken from the
// library so the tests do not grade the code against itself.

inline double gaussian_density(double x, double x0, double sigma) {
    const double z = (x - x0) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

// Free packet width with hbar = m = 1.
inline double free_width(double sigma0, double t) {
    return sigma0 * std::sqrt(1.0 + t * t / (4.0 * std::pow(sigma0, 4)));
}

inline Wavefunction gaussian_packet(const GridSpec& g, double x0, double sigma, double k) {
    std::vector<Complex> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.x(i);
        v[i] = std::sqrt(gaussian_density(x, x0, sigma)) * std::polar(1.0, k * x);
    }
    return Wavefunction(g, std::move(v));
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b, std::size_t lo = 0,
                           std::size_t hi = 0) {
    if (hi == 0) hi = a.size();
    double m = 0.0;
    for (std::size_t i = lo; i < hi; ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace qtraj::test
