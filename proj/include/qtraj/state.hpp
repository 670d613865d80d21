#pragma once

#include "qtraj/grid.hpp"

#include <complex>
#include <cstdint>
#include <vector>

namespace qtraj {

using Complex = std::complex<double>;
// Per-point exclusion flags; nonzero means the point is masked.
using Mask = std::vector<std::uint8_t>;

/// Numerical settings shared by the field-level operations.
struct FieldOptions {
    int stencil_order = 4;
    // Points with rho < node_floor * max(rho) are node-masked.
    double node_floor = 1e-12;
};

/// Complex amplitude sampled on a uniform grid.
struct Wavefunction {
    GridSpec grid;
    std::vector<Complex> values;

    Wavefunction() = default;
    Wavefunction(GridSpec g, std::vector<Complex> v);

    std::size_t size() const noexcept { return values.size(); }
    std::vector<double> density() const;
    // Trapezoid-rule integral of |psi|^2.
    double norm() const;
    Wavefunction normalized() const;
};

/// Eulerian (Madelung) fields. S and v are NaN at masked points.
struct HydroState {
    GridSpec grid;
    std::vector<double> rho;
    std::vector<double> S;
    std::vector<double> v;
    Mask mask;

    std::size_t size() const noexcept { return rho.size(); }
    std::size_t masked_count() const noexcept;
};

}  // namespace qtraj
