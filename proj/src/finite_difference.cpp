#include "qtraj/finite_difference.hpp"

#include "qtraj/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace qtraj::fd {

std::vector<double> fornberg_weights(double z, std::span<const double> nodes, int derivative) {
    const int n = static_cast<int>(nodes.size()) - 1;
    const int m = derivative;
    if (n < m) {
        throw ParameterError("fornberg_weights: need at least derivative+1 nodes");
    }
    // c[j][k]: weight of node j for the k-th derivative.
    std::vector<std::vector<double>> c(n + 1, std::vector<double>(m + 1, 0.0));
    double c1 = 1.0;
    double c4 = nodes[0] - z;
    c[0][0] = 1.0;
    for (int i = 1; i <= n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = nodes[i] - z;
        for (int j = 0; j < i; ++j) {
            const double c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) {
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) {
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n + 1);
    for (int j = 0; j <= n; ++j) w[j] = c[j][m];
    return w;
}

namespace {

std::vector<double> window_weights(std::size_t start, std::size_t width, std::size_t at, double h,
                                   int derivative) {
    std::vector<double> nodes(width);
    for (std::size_t j = 0; j < width; ++j) {
        nodes[j] = static_cast<double>(start + j) - static_cast<double>(at);
    }
    auto w = fornberg_weights(0.0, nodes, derivative);
    const double scale = std::pow(h, -derivative);
    for (auto& x : w) x *= scale;
    return w;
}

}  // namespace

DerivativeOperator::DerivativeOperator(std::size_t n, double h, int derivative, int order)
    : n_(n), derivative_(derivative), order_(order) {
    if (derivative < 1 || order < 2 || order % 2 != 0) {
        throw ParameterError("DerivativeOperator: derivative >= 1 and even order >= 2 required (got d=" +
                             std::to_string(derivative) + ", p=" + std::to_string(order) + ")");
    }
    if (!(h > 0.0)) throw ParameterError("DerivativeOperator: spacing must be positive");
    half_ = static_cast<std::size_t>((derivative + order - 1) / 2);
    const std::size_t one_sided = static_cast<std::size_t>(derivative + order);
    if (n < std::max(2 * half_ + 1, one_sided)) {
        throw ShapeError("DerivativeOperator: grid of " + std::to_string(n) +
                         " points too short for stencil");
    }
    interior_ = window_weights(0, 2 * half_ + 1, half_, h, derivative);
    for (std::size_t i = 0; i < half_; ++i) {
        left_.push_back({0, window_weights(0, one_sided, i, h, derivative)});
        const std::size_t ir = n - 1 - i;
        const std::size_t start = n - one_sided;
        right_.push_back({start, window_weights(start, one_sided, ir, h, derivative)});
    }
}

void DerivativeOperator::apply(std::span<const double> f, std::span<double> out) const {
    if (f.size() != n_ || out.size() != n_) {
        throw ShapeError("DerivativeOperator::apply: size mismatch");
    }
    const std::size_t w = interior_.size();
    for (std::size_t i = half_; i + half_ < n_; ++i) {
        const double* p = f.data() + (i - half_);
        double s = 0.0;
        for (std::size_t k = 0; k < w; ++k) s += interior_[k] * p[k];
        out[i] = s;
    }
    auto edge = [&](const Row& row, std::size_t i) {
        double s = 0.0;
        for (std::size_t k = 0; k < row.weights.size(); ++k) s += row.weights[k] * f[row.start + k];
        out[i] = s;
    };
    for (std::size_t i = 0; i < half_; ++i) {
        edge(left_[i], i);
        edge(right_[i], n_ - 1 - i);
    }
}

std::vector<double> DerivativeOperator::apply(std::span<const double> f) const {
    std::vector<double> out(n_);
    apply(f, out);
    return out;
}

std::vector<Run> unmasked_runs(std::span<const std::uint8_t> mask) {
    std::vector<Run> runs;
    std::size_t i = 0;
    while (i < mask.size()) {
        if (mask[i]) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < mask.size() && !mask[j + 1]) ++j;
        runs.push_back({i, j});
        i = j + 1;
    }
    return runs;
}

std::vector<double> derivative_on_runs(std::span<const double> f, std::span<const std::uint8_t> mask,
                                       double h, int derivative, int order) {
    if (f.size() != mask.size()) throw ShapeError("derivative_on_runs: mask size mismatch");
    std::vector<double> out(f.size(), std::numeric_limits<double>::quiet_NaN());
    for (const Run& run : unmasked_runs(mask)) {
        const std::size_t len = run.length();
        int p = order;
        while (p >= 2 && len < static_cast<std::size_t>(derivative + p)) p -= 2;
        if (p < 2) continue;
        DerivativeOperator op(len, h, derivative, p);
        op.apply(f.subspan(run.first, len), std::span<double>(out).subspan(run.first, len));
    }
    return out;
}

std::vector<double> differentiate(std::span<const double> f, double h, int derivative, int order) {
    return DerivativeOperator(f.size(), h, derivative, order).apply(f);
}

}  // namespace qtraj::fd
