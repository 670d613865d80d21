#pragma once

#include "qtraj/lagrangian.hpp"
#include "qtraj/reference_solver.hpp"

#include <functional>
#include <string>
#include <vector>

namespace qtraj {

/// Apparatus momentum shifts recorded at one point after a protocol of
/// duration T: the time averages of rho and rho v weighted by g.
struct ProtectiveRecord {
    double x_point = 0.0;
    double shift_density = 0.0;
    double shift_current = 0.0;
    double T = 0.0;
};

/// Coupling profile g(t) on [0, T] with unit integral.
struct CouplingProfile {
    std::string name;
    double T = 0.0;
    std::function<double(double)> g;

    static CouplingProfile uniform(double T);
    // (2/T) sin^2(pi t / T)
    static CouplingProfile sine_squared(double T);
    // Symmetric triangle peaking at T/2.
    static CouplingProfile triangle(double T);
    static CouplingProfile by_name(const std::string& name, double T);
};

// Adiabatic-limit shifts at x_point (which must be a grid point) from the
// trace. The trace must span exactly [t0, t0 + T], and the time-trapezoid
// integral of g over its samples must equal 1 within 1e-10. The trace is
// only read.
ProtectiveRecord protective_run(const EvolutionTrace& trace, double x_point, const CouplingProfile& profile,
                                const PhysicalConstants& consts = {}, const FieldOptions& opts = {});

// protective_run at every grid point. Points that stay node-masked for the
// whole protocol get their averaged density and a zero current instead of
// an error.
std::vector<ProtectiveRecord> protective_scan(const EvolutionTrace& trace, const CouplingProfile& profile,
                                              const PhysicalConstants& consts = {},
                                              const FieldOptions& opts = {});

struct RecoveredState {
    Wavefunction psi;
    TrajectoryEnsemble ensemble;
    Mask mask;
};

// Deduce the state from one record per grid point: rho from the density
// shifts (renormalized), v = shift_current / shift_density, S by spatial
// integration of m v, then the ensemble q0 = a, qdot0 = v on `labels`.
RecoveredState state_from_records(const std::vector<ProtectiveRecord>& records, const GridSpec& grid,
                                  const LabelGrid& labels, const PhysicalConstants& consts = {},
                                  const LagrangianOptions& opts = {});

// Samples a closed-form state at the given times.
EvolutionTrace analytic_trace(const AnalyticState& state, const PhysicalConstants& consts, const GridSpec& grid,
                              const std::vector<double>& times);

}  // namespace qtraj
