#include "qtraj/interpolation.hpp"

#include "doctest.h"

#include <cmath>

using namespace qtraj;

TEST_CASE("free Hermite interpolant is exact on cubics away from the ends") {
    std::vector<double> x, y;
    for (int i = 0; i <= 20; ++i) {
        const double t = -1.0 + 0.1 * i + 0.01 * std::sin(i);
        x.push_back(t);
        y.push_back(t * t * t - t);
    }
    CubicHermite c(x, y);
    for (double t = -0.7; t < 0.7; t += 0.013) {
        CHECK(c(t) == doctest::Approx(t * t * t - t).epsilon(1e-10));
        CHECK(c.derivative(t) == doctest::Approx(3 * t * t - 1).epsilon(1e-9));
    }
}

TEST_CASE("monotone interpolant never overshoots monotone data") {
    std::vector<double> x{0, 1, 2, 3, 4, 5, 6};
    std::vector<double> y{0, 0, 0, 1, 1, 1, 5};
    CubicHermite c(x, y, CubicHermite::Shape::monotone);
    double prev = c(0.0);
    for (double t = 0.0; t <= 6.0; t += 0.01) {
        const double v = c(t);
        CHECK(v >= prev - 1e-14);
        prev = v;
    }
    CHECK(c(1.5) == doctest::Approx(0.0));
    CHECK(c(4.5) == doctest::Approx(1.0));
}
