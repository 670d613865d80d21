#pragma once

#include "qtraj/grid.hpp"
#include "qtraj/lagrangian.hpp"
#include "qtraj/state.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace qtraj {

/// Eulerian fields recovered from a trajectory ensemble at one instant.
///
/// support_mask[i] != 0 where grid.x(i) lies in [q(a_min), q(a_max)];
/// every other field is zero off support. Q is the label field a(x), the
/// inverse of the displacement map, and J = 1 / (dQ/dx).
struct ReconstructedFields {
    GridSpec grid;
    double t = 0.0;
    std::vector<double> rho;
    std::vector<double> v;
    std::vector<double> Q;
    std::vector<double> jacobian;
    // Momentum-density potential P = -m rho v / (dQ/dx).
    std::vector<double> P;
    std::vector<std::uint8_t> support_mask;

    std::size_t supported_count() const noexcept;
};

ReconstructedFields fields_from_trajectories(const TrajectoryEnsemble& ens, const GridSpec& grid,
                                             const LagrangianOptions& opts = {});

// sum rho0 K(x - q) da and sum rho0 qdot K(x - q) da with a unit-mass
// Gaussian kernel of the given standard deviation.
struct KernelEstimate {
    GridSpec grid;
    std::vector<double> rho;
    std::vector<double> flux;
};
KernelEstimate kernel_density_estimate(const TrajectoryEnsemble& ens, const GridSpec& grid, double bandwidth);

// sqrt(rho) exp(iS/hbar) on support, zero elsewhere, normalized. S is the
// trapezoid integral of m v in x, offset so that at the anchor trajectory
// it equals the action carried by that trajectory. The action obeys
// dS/dt = m qdot^2/2 - V - V_Q along the flow, which pins the phase's
// time dependence without a separate solve.
Wavefunction reconstruct_wavefunction(const TrajectoryEnsemble& ens, const GridSpec& grid,
                                      const LagrangianOptions& opts = {});

// Phase field S(x) of the reconstruction (zero off support).
std::vector<double> reconstructed_phase(const TrajectoryEnsemble& ens, const ReconstructedFields& fields);

// max |dQ/dt + v dQ/dx| over points supported in every snapshot of each
// three-snapshot window; central differences in t and a centred x stencil
// of the given order. Snapshots must share a grid and be uniformly spaced.
double advection_residual(std::span<const ReconstructedFields> trace, int stencil_order = 2);

// P rebuilt as m rho J^2 dQ/dt, with dQ/dt from the neighbouring snapshots
// (central difference). NaN where any of the three lacks support.
std::vector<double> momentum_potential_from_advection(const ReconstructedFields& before,
                                                      const ReconstructedFields& at,
                                                      const ReconstructedFields& after, double mass);

// max |rho - (dQ/dx) rho0(Q)| over the central `core_fraction` of the
// support, with dQ/dx taken numerically on the grid.
double label_density_residual(const ReconstructedFields& fields, const TrajectoryEnsemble& ens,
                              double core_fraction = 0.8, int stencil_order = 4);

}  // namespace qtraj
