#pragma once

#include "qtraj/grid.hpp"
#include "qtraj/potential.hpp"
#include "qtraj/state.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace qtraj {

enum class Integrator { velocity_verlet, rk4 };

struct LagrangianOptions {
    Integrator integrator = Integrator::velocity_verlet;
    int stencil_order = 4;
    // Savitzky-Golay smoothing of log rho in label space before the
    // quantum potential is formed. Off by default.
    bool smooth_log_density = false;
    double node_floor = 1e-12;
    // A trial step is rejected and retried with dt/2 when min J would fall
    // below this fraction of the reference minimum.
    double min_jacobian_fraction = 1e-6;
    int max_halvings = 8;
    // Relative energy change (w.r.t. the run's initial energy) treated as
    // an instability.
    double energy_jump_tolerance = 0.05;
    // Requested steps longer than this fraction of stable_time_step() are
    // split into equal substeps.
    double stability_safety = 0.8;
    // More substeps than this means the congruence is collapsing toward a
    // node; the step fails with an instability error instead.
    std::size_t max_substeps = 256;
};

/// Lagrangian state: the displacement function q(a, t) on a label grid.
///
/// rho0 is shared and immutable, so the label measure sum(rho0) da is
/// bitwise constant along any evolution. `action` is S(q(a,t), t), the
/// phase carried along each trajectory; it is integrated alongside q and
/// fixes the time-dependent phase offset on reconstruction.
struct TrajectoryEnsemble {
    LabelGrid labels;
    std::vector<double> q;
    std::vector<double> qdot;
    std::shared_ptr<const std::vector<double>> rho0;
    std::vector<double> action;
    double t = 0.0;
    PhysicalConstants consts;

    std::size_t size() const noexcept { return q.size(); }
    const std::vector<double>& label_density() const { return *rho0; }
    // sum rho0 * da
    double label_mass() const;
    bool strictly_increasing() const;
    // Index of the label at the median of the label measure.
    std::size_t anchor_index() const;
};

/// Label-space fields behind the force and the energy.
struct LabelFields {
    std::vector<double> jacobian;
    std::vector<double> rho;        // rho0 / J
    std::vector<double> dlogrho;    // d(ln rho)/dq
    std::vector<double> vq;         // quantum potential at q(a)
    std::vector<double> internal;   // U = (hbar^2/8m) (d ln rho/dq)^2
    std::vector<double> potential;  // V(q(a))
    std::vector<double> force;      // -d(V + V_Q)/dq
};

struct StepReport {
    double t = 0.0;
    double min_jacobian = 0.0;
    double energy = 0.0;
    double dt_used = 0.0;
};

TrajectoryEnsemble init_from_wavefunction(const Wavefunction& psi0, const LabelGrid& labels,
                                          const PhysicalConstants& consts,
                                          const LagrangianOptions& opts = {});

// J = dq/da. Throws CrossingError on J <= 0.
std::vector<double> jacobian(const TrajectoryEnsemble& ens, int stencil_order = 4);

// rho0 / J, the density at the particle positions.
std::vector<double> density_on_labels(const TrajectoryEnsemble& ens, int stencil_order = 4);

// All derivatives with respect to q are J^-1 d/da applied repeatedly and
// expanded by the chain rule, so label derivatives of q up to fourth order
// enter the force.
LabelFields label_fields(const TrajectoryEnsemble& ens, const PotentialSpec& potential,
                         const LagrangianOptions& opts = {});

std::vector<double> quantum_force(const TrajectoryEnsemble& ens, const PotentialSpec& potential,
                                  const LagrangianOptions& opts = {});

// Trajectory Hamiltonian: sum (m qdot^2/2 + U + V) rho0 da.
double trajectory_energy(const TrajectoryEnsemble& ens, const PotentialSpec& potential,
                         const LagrangianOptions& opts = {});

struct StepResult {
    TrajectoryEnsemble ensemble;
    StepReport report;
};

// One integrator step of length dt, subdivided by halving while the
// minimum Jacobian would drop below the safety threshold.
// `reference_energy` / `reference_min_jacobian` default to the pre-step
// values.
StepResult step(const TrajectoryEnsemble& ens, const PotentialSpec& potential, double dt,
                const LagrangianOptions& opts = {}, std::optional<double> reference_energy = {},
                std::optional<double> reference_min_jacobian = {});

struct EvolutionFailure {
    enum class Kind { crossing, instability };
    Kind kind = Kind::crossing;
    std::string message;
    double time = 0.0;
    std::optional<double> label;
    // Last accepted state; always strictly increasing in a.
    TrajectoryEnsemble last_good;
};

struct LagrangianRun {
    std::vector<TrajectoryEnsemble> frames;  // every output_every steps, from t=0
    std::vector<StepReport> reports;         // one per frame
    std::optional<EvolutionFailure> failure;

    bool ok() const noexcept { return !failure.has_value(); }
    // Rethrows the failure as CrossingError / InstabilityError.
    void throw_if_failed() const;
};

// Integrates to t_final; stops on the first crossing or instability and
// records the last accepted state rather than throwing.
LagrangianRun evolve(const TrajectoryEnsemble& ens, const PotentialSpec& potential, double dt,
                     double t_final, std::size_t output_every, const LagrangianOptions& opts = {});

/// Time-independent monotone relabelling a' = f(a).
struct LabelMap {
    std::function<double(double)> forward;
    std::function<double(double)> derivative;

    static LabelMap identity();
    static LabelMap scale(double c);
};

// q'(a') = q(a), rho0'(a') = rho0(a) / f'(a), resampled onto a uniform
// grid over [f(a_min), f(a_max)] with the same label count.
TrajectoryEnsemble relabel(const TrajectoryEnsemble& ens, const LabelMap& f,
                           const LagrangianOptions& opts = {});

// Largest dt for which the stiffest linearised label mode stays inside the
// velocity-Verlet bound omega dt < 2. The mode frequency is set by the
// fourth-derivative stencil on a grid locally stretched by min_jacobian.
double stable_time_step(const LabelGrid& labels, const PhysicalConstants& consts, int stencil_order = 4,
                        double min_jacobian = 1.0);

// Labels this close to either end of the label grid are left out of error
// norms: two widths of the centred fourth-derivative stencil.
std::size_t interior_margin(int stencil_order = 4);

}  // namespace qtraj
