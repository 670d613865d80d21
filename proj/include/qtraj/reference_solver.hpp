#pragma once

#include "qtraj/potential.hpp"
#include "qtraj/state.hpp"

#include <cstddef>
#include <vector>

namespace qtraj {

/// Wavefunction snapshots at uniformly spaced times.
struct EvolutionTrace {
    std::vector<double> times;
    std::vector<Wavefunction> states;

    std::size_t size() const noexcept { return times.size(); }
    bool empty() const noexcept { return times.empty(); }
};

struct SplitStepOptions {
    // Largest |psi| tolerated at either grid edge before the periodic wrap
    // of the spectral kinetic step would contaminate the solution.
    double boundary_threshold = 1e-8;
};

// Strang-split spectral propagation: half kinetic step in wavenumber space,
// full potential step in position space, half kinetic step. The grid is
// treated as periodic with period n * dx. t_final must be a whole number
// of steps.
EvolutionTrace split_step_evolve(const Wavefunction& psi0, const PotentialSpec& potential,
                                 const PhysicalConstants& consts, double dt, double t_final,
                                 std::size_t output_every, const SplitStepOptions& opts = {});

// Largest dt satisfying dt max|V|/hbar < 0.05 and dt hbar k_max^2/2m < 0.5.
double default_time_step(const GridSpec& grid, const PotentialSpec& potential,
                         const PhysicalConstants& consts);

/// Closed-form states used as oracles.
struct AnalyticState {
    enum class Kind { free_gaussian, harmonic_ground, harmonic_coherent };

    Kind kind = Kind::free_gaussian;
    double x0 = 0.0;
    double sigma0 = 1.0;
    double k = 0.0;
    double omega = 1.0;

    static AnalyticState free_gaussian(double x0, double sigma0, double k);
    static AnalyticState harmonic_ground(double omega);
    // Ground state displaced to x0 and released from rest.
    static AnalyticState harmonic_coherent(double omega, double x0);

    void validate() const;
    // Width of the density at time t (sigma0 for the harmonic family is
    // the ground-state width sqrt(hbar/2 m omega)).
    double sigma_at(double t, const PhysicalConstants& consts) const;
    double mean_x_at(double t, const PhysicalConstants& consts) const;
};

// Closed-form solution at time t, sampled on the grid and normalized.
Wavefunction analytic_state(const AnalyticState& state, const PhysicalConstants& consts, double t,
                            const GridSpec& grid);

// |<a|b>| / (|a| |b|) with trapezoid quadrature.
double fidelity(const Wavefunction& a, const Wavefunction& b);

}  // namespace qtraj
