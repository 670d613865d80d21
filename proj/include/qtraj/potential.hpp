#pragma once

#include "qtraj/grid.hpp"
#include "qtraj/interpolation.hpp"
#include "qtraj/state.hpp"

#include <memory>
#include <string>
#include <vector>

namespace qtraj {

/// External potential V(x): free, harmonic, or tabulated on a grid.
class PotentialSpec {
public:
    enum class Kind { free, harmonic, tabulated };

    PotentialSpec() = default;

    static PotentialSpec free();
    // V = m omega^2 x^2 / 2
    static PotentialSpec harmonic(double omega, double mass = 1.0);
    static PotentialSpec tabulated(GridSpec grid, std::vector<double> samples);

    Kind kind() const noexcept { return kind_; }
    std::string kind_name() const;
    double omega() const noexcept { return omega_; }
    const GridSpec& table_grid() const noexcept { return table_grid_; }
    const std::vector<double>& table() const noexcept { return samples_; }

    double value(double x) const;
    double gradient(double x) const;
    std::vector<double> sample(const GridSpec& grid) const;

private:
    Kind kind_ = Kind::free;
    double omega_ = 0.0;
    double mass_ = 1.0;
    GridSpec table_grid_;
    std::vector<double> samples_;
    std::shared_ptr<const CubicHermite> interp_;
};

}  // namespace qtraj
