#pragma once

#include "qtraj/potential.hpp"
#include "qtraj/state.hpp"

#include <span>
#include <vector>

namespace qtraj {

// psi = sqrt(rho) exp(iS/hbar). The phase is unwrapped left to right; on
// re-entry after a masked run the branch nearest the last unmasked value
// is taken, so v = S'/m holds on each unmasked run.
HydroState polar_decompose(const Wavefunction& psi, const PhysicalConstants& consts,
                           const FieldOptions& opts = {});

// sqrt(rho) exp(iS/hbar) at unmasked points, 0 at masked ones.
Wavefunction recompose(const HydroState& state, const PhysicalConstants& consts);

// Mask of points with rho < floor * max(rho). Throws DegenerateStateError
// when every point is masked.
Mask node_mask(std::span<const double> rho, double node_floor);

// V_Q = -(hbar^2/2m) (sqrt rho)'' / sqrt rho, evaluated through the
// logarithmic density L = ln(rho/max rho) as -(hbar^2/4m)(L'' + L'^2/2).
// Masked points hold NaN.
std::vector<double> quantum_potential(const GridSpec& grid, std::span<const double> rho,
                                      const Mask& mask, const PhysicalConstants& consts,
                                      int stencil_order = 4);
std::vector<double> quantum_potential(const HydroState& state, const PhysicalConstants& consts,
                                      int stencil_order = 4);

// U = (hbar^2/8m) (rho'/rho)^2, NaN at masked points.
std::vector<double> internal_energy_density(const GridSpec& grid, std::span<const double> rho,
                                            const Mask& mask, const PhysicalConstants& consts,
                                            int stencil_order = 4);

// Probability current j = (hbar/m) Im(psi* psi'), straight from the amplitude.
std::vector<double> probability_current(const Wavefunction& psi, const PhysicalConstants& consts,
                                        int stencil_order = 4);

struct HydroResiduals {
    double continuity = 0.0;  // max |d_t rho + d_x(rho v)|
    double euler = 0.0;       // max |d_t v + v d_x v + d_x(V + V_Q)/m|
    std::size_t points = 0;   // samples that entered the norms
};

// Central differences in t (uniform spacing required) and x, restricted
// to points unmasked in every snapshot of each three-point window.
HydroResiduals hydro_residuals(std::span<const double> times, std::span<const HydroState> series,
                               const PotentialSpec& potential, const PhysicalConstants& consts,
                               int stencil_order = 4);

}  // namespace qtraj
