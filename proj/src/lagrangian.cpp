#include "qtraj/lagrangian.hpp"

#include "qtraj/errors.hpp"
#include "qtraj/finite_difference.hpp"
#include "qtraj/hydro.hpp"
#include "qtraj/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace qtraj {

namespace {

std::string label_time(double a, double t) {
    return "label a=" + std::to_string(a) + " at t=" + std::to_string(t);
}

void require_finite(const TrajectoryEnsemble& ens) {
    for (std::size_t i = 0; i < ens.size(); ++i) {
        if (!std::isfinite(ens.q[i]) || !std::isfinite(ens.qdot[i])) {
            throw InstabilityError("non-finite trajectory state at " + label_time(ens.labels.a(i), ens.t), ens.t);
        }
    }
}

// Five-point quadratic Savitzky-Golay filter; the two outermost points on
// each side are left as they are.
std::vector<double> savitzky_golay5(const std::vector<double>& f) {
    std::vector<double> out = f;
    for (std::size_t i = 2; i + 2 < f.size(); ++i) {
        out[i] = (-3.0 * f[i - 2] + 12.0 * f[i - 1] + 17.0 * f[i] + 12.0 * f[i + 1] - 3.0 * f[i + 2]) / 35.0;
    }
    return out;
}

}  // namespace

double TrajectoryEnsemble::label_mass() const {
    const auto& r = *rho0;
    return std::accumulate(r.begin(), r.end(), 0.0) * labels.spacing();
}

bool TrajectoryEnsemble::strictly_increasing() const {
    for (std::size_t i = 1; i < q.size(); ++i) {
        if (!(q[i] > q[i - 1])) return false;
    }
    return true;
}

std::size_t TrajectoryEnsemble::anchor_index() const {
    const auto& r = *rho0;
    const double total = std::accumulate(r.begin(), r.end(), 0.0);
    double cumulative = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        cumulative += r[i];
        if (cumulative >= 0.5 * total) return i;
    }
    return r.size() / 2;
}

TrajectoryEnsemble init_from_wavefunction(const Wavefunction& psi0, const LabelGrid& labels,
                                          const PhysicalConstants& consts, const LagrangianOptions& opts) {
    consts.validate();
    const GridSpec& grid = psi0.grid;
    if (labels.a_min() < grid.x_min() || labels.a_max() > grid.x_max()) {
        throw InitializationError("label interval [" + std::to_string(labels.a_min()) + ", " +
                                  std::to_string(labels.a_max()) + "] is not covered by the wavefunction grid");
    }
    FieldOptions fopts;
    fopts.stencil_order = opts.stencil_order;
    fopts.node_floor = opts.node_floor;
    const HydroState hydro = polar_decompose(psi0, consts, fopts);

    // The grid points bracketing the label interval must all lie in one
    // unmasked run; anything else means labels reach into a node or tail.
    const double h = grid.spacing();
    const auto lo = static_cast<std::size_t>(std::floor((labels.a_min() - grid.x_min()) / h + 1e-9));
    auto hi = static_cast<std::size_t>(std::ceil((labels.a_max() - grid.x_min()) / h - 1e-9));
    hi = std::min(hi, grid.size() - 1);
    for (std::size_t i = lo; i <= hi; ++i) {
        if (hydro.mask[i]) {
            throw InitializationError("label interval reaches a node or tail region (x=" +
                                      std::to_string(grid.x(i)) + " below the density floor)");
        }
    }
    std::size_t first = lo;
    while (first > 0 && !hydro.mask[first - 1]) --first;
    std::size_t last = hi;
    while (last + 1 < grid.size() && !hydro.mask[last + 1]) ++last;

    std::vector<double> knots, logrho, phase, vel;
    for (std::size_t i = first; i <= last; ++i) {
        knots.push_back(grid.x(i));
        logrho.push_back(std::log(hydro.rho[i]));
        phase.push_back(hydro.S[i]);
        vel.push_back(hydro.v[i]);
    }
    if (knots.size() < 2) throw InitializationError("supported region too small for interpolation");
    const CubicHermite logrho_of(knots, std::move(logrho));
    const CubicHermite phase_of(knots, std::move(phase));
    const CubicHermite v_of(knots, std::move(vel));

    const std::size_t n = labels.size();
    TrajectoryEnsemble ens;
    ens.labels = labels;
    ens.consts = consts;
    ens.t = 0.0;
    ens.q = labels.points();
    ens.qdot.resize(n);
    std::vector<double> rho0(n);
    std::vector<double> S0(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = ens.q[i];
        rho0[i] = std::exp(logrho_of(a));
        ens.qdot[i] = v_of(a);
        S0[i] = phase_of(a);
    }
    const double mass = std::accumulate(rho0.begin(), rho0.end(), 0.0) * labels.spacing();
    if (!(mass > 0.0)) throw InitializationError("zero label mass");
    for (auto& r : rho0) r /= mass;
    ens.rho0 = std::make_shared<const std::vector<double>>(std::move(rho0));
    const double S_anchor = S0[ens.anchor_index()];
    ens.action.resize(n);
    for (std::size_t i = 0; i < n; ++i) ens.action[i] = S0[i] - S_anchor;
    return ens;
}

std::vector<double> jacobian(const TrajectoryEnsemble& ens, int stencil_order) {
    auto J = fd::differentiate(ens.q, ens.labels.spacing(), 1, stencil_order);
    for (std::size_t i = 0; i < J.size(); ++i) {
        if (!(J[i] > 0.0) || !std::isfinite(J[i])) {
            throw CrossingError("trajectory crossing: J=" + std::to_string(J[i]) + " at " +
                                    label_time(ens.labels.a(i), ens.t),
                                ens.labels.a(i), ens.t);
        }
    }
    return J;
}

std::vector<double> density_on_labels(const TrajectoryEnsemble& ens, int stencil_order) {
    const auto J = jacobian(ens, stencil_order);
    const auto& r0 = ens.label_density();
    std::vector<double> rho(J.size());
    for (std::size_t i = 0; i < J.size(); ++i) rho[i] = r0[i] / J[i];
    return rho;
}

LabelFields label_fields(const TrajectoryEnsemble& ens, const PotentialSpec& potential,
                         const LagrangianOptions& opts) {
    const std::size_t n = ens.size();
    const double da = ens.labels.spacing();
    const auto& r0 = ens.label_density();
    const double hbar = ens.consts.hbar;
    const double m = ens.consts.mass;

    LabelFields f;
    f.jacobian = jacobian(ens, opts.stencil_order);
    const auto& J = f.jacobian;
    std::vector<double> l0(n);
    f.rho.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(r0[i] > 0.0)) throw DomainError("label density must be positive");
        f.rho[i] = r0[i] / J[i];
        l0[i] = std::log(r0[i]);
    }
    if (opts.smooth_log_density) l0 = savitzky_golay5(l0);

    // Each label derivative gets its own stencil; nesting first-derivative
    // stencils four deep makes the one-sided edge rows unstable.
    auto d = [&](const std::vector<double>& g, int k) {
        return fd::differentiate(g, da, k, opts.stencil_order);
    };
    const auto J1 = d(ens.q, 2);
    const auto J2 = d(ens.q, 3);
    const auto J3 = d(ens.q, 4);
    const auto m1 = d(l0, 1);
    const auto m2 = d(l0, 2);
    const auto m3 = d(l0, 3);

    const double c = hbar * hbar / (4.0 * m);
    f.dlogrho.resize(n);
    f.vq.resize(n);
    f.internal.resize(n);
    f.potential.resize(n);
    f.force.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        // L = ln rho0 - ln J and its label derivatives.
        const double g = J1[i] / J[i];
        const double L1 = m1[i] - g;
        const double L2 = m2[i] - J2[i] / J[i] + g * g;
        const double L3 = m3[i] - J3[i] / J[i] + 3.0 * g * J2[i] / J[i] - 2.0 * g * g * g;
        // Convert with d/dq = J^-1 d/da.
        const double Lq = L1 / J[i];
        const double Lqq = (L2 - L1 * g) / (J[i] * J[i]);
        const double dLq = (L2 - L1 * g) / J[i];
        const double dLqq = (L3 - 3.0 * L2 * g + L1 * (3.0 * g * g - J2[i] / J[i])) / (J[i] * J[i]);
        f.dlogrho[i] = Lq;
        f.vq[i] = -c * (Lqq + 0.5 * Lq * Lq);
        f.internal[i] = 0.5 * c * Lq * Lq;
        f.potential[i] = potential.value(ens.q[i]);
        f.force[i] = -potential.gradient(ens.q[i]) + c * (dLqq + Lq * dLq) / J[i];
        if (!std::isfinite(f.force[i])) {
            throw InstabilityError("non-finite force at " + label_time(ens.labels.a(i), ens.t), ens.t);
        }
    }
    return f;
}

std::vector<double> quantum_force(const TrajectoryEnsemble& ens, const PotentialSpec& potential,
                                  const LagrangianOptions& opts) {
    return label_fields(ens, potential, opts).force;
}

namespace {

double energy_from(const TrajectoryEnsemble& ens, const LabelFields& f) {
    const auto& r0 = ens.label_density();
    const double m = ens.consts.mass;
    double e = 0.0;
    for (std::size_t i = 0; i < ens.size(); ++i) {
        e += (0.5 * m * ens.qdot[i] * ens.qdot[i] + f.internal[i] + f.potential[i]) * r0[i];
    }
    return e * ens.labels.spacing();
}

double energy_scale_from(const TrajectoryEnsemble& ens, const LabelFields& f) {
    const auto& r0 = ens.label_density();
    const double m = ens.consts.mass;
    double e = 0.0;
    for (std::size_t i = 0; i < ens.size(); ++i) {
        e += (0.5 * m * ens.qdot[i] * ens.qdot[i] + f.internal[i] + std::abs(f.potential[i])) * r0[i];
    }
    return e * ens.labels.spacing();
}

double min_of(const std::vector<double>& v) { return *std::min_element(v.begin(), v.end()); }

// Phase accumulated along a trajectory: dS/dt = m qdot^2/2 - V - V_Q.
double action_rate(double m, double qdot, double V, double vq) { return 0.5 * m * qdot * qdot - V - vq; }

struct Advanced {
    TrajectoryEnsemble ens;
    LabelFields fields;
};

Advanced verlet_step(const TrajectoryEnsemble& e0, const LabelFields& f0, const PotentialSpec& potential,
                     double dt, const LagrangianOptions& opts) {
    const std::size_t n = e0.size();
    const double m = e0.consts.mass;
    Advanced out{e0, {}};
    TrajectoryEnsemble& e1 = out.ens;
    std::vector<double> vhalf(n);
    for (std::size_t i = 0; i < n; ++i) {
        vhalf[i] = e0.qdot[i] + 0.5 * dt * f0.force[i] / m;
        e1.q[i] = e0.q[i] + dt * vhalf[i];
    }
    e1.t = e0.t + dt;
    require_finite(e1);
    out.fields = label_fields(e1, potential, opts);
    const LabelFields& f1 = out.fields;
    for (std::size_t i = 0; i < n; ++i) {
        e1.qdot[i] = vhalf[i] + 0.5 * dt * f1.force[i] / m;
        const double l0 = action_rate(m, e0.qdot[i], f0.potential[i], f0.vq[i]);
        const double l1 = action_rate(m, e1.qdot[i], f1.potential[i], f1.vq[i]);
        e1.action[i] = e0.action[i] + 0.5 * dt * (l0 + l1);
    }
    require_finite(e1);
    return out;
}

Advanced rk4_step(const TrajectoryEnsemble& e0, const LabelFields& f0, const PotentialSpec& potential,
                  double dt, const LagrangianOptions& opts) {
    const std::size_t n = e0.size();
    const double m = e0.consts.mass;
    struct Rate {
        std::vector<double> dq, dv, ds;
    };
    auto rate = [&](const TrajectoryEnsemble& e, const LabelFields& f) {
        Rate r{e.qdot, std::vector<double>(n), std::vector<double>(n)};
        for (std::size_t i = 0; i < n; ++i) {
            r.dv[i] = f.force[i] / m;
            r.ds[i] = action_rate(m, e.qdot[i], f.potential[i], f.vq[i]);
        }
        return r;
    };
    auto shifted = [&](const Rate& r, double h) {
        TrajectoryEnsemble e = e0;
        for (std::size_t i = 0; i < n; ++i) {
            e.q[i] += h * r.dq[i];
            e.qdot[i] += h * r.dv[i];
            e.action[i] += h * r.ds[i];
        }
        e.t = e0.t + h;
        require_finite(e);
        return e;
    };
    const Rate k1 = rate(e0, f0);
    const TrajectoryEnsemble e2 = shifted(k1, 0.5 * dt);
    const Rate k2 = rate(e2, label_fields(e2, potential, opts));
    const TrajectoryEnsemble e3 = shifted(k2, 0.5 * dt);
    const Rate k3 = rate(e3, label_fields(e3, potential, opts));
    const TrajectoryEnsemble e4 = shifted(k3, dt);
    const Rate k4 = rate(e4, label_fields(e4, potential, opts));
    Advanced out{e0, {}};
    for (std::size_t i = 0; i < n; ++i) {
        out.ens.q[i] += dt / 6.0 * (k1.dq[i] + 2 * k2.dq[i] + 2 * k3.dq[i] + k4.dq[i]);
        out.ens.qdot[i] += dt / 6.0 * (k1.dv[i] + 2 * k2.dv[i] + 2 * k3.dv[i] + k4.dv[i]);
        out.ens.action[i] += dt / 6.0 * (k1.ds[i] + 2 * k2.ds[i] + 2 * k3.ds[i] + k4.ds[i]);
    }
    out.ens.t = e0.t + dt;
    require_finite(out.ens);
    out.fields = label_fields(out.ens, potential, opts);
    return out;
}

struct AdvanceResult {
    Advanced state;
    double dt_min;
};

AdvanceResult advance(const TrajectoryEnsemble& e0, const LabelFields& f0, const PotentialSpec& potential,
                      double dt, const LagrangianOptions& opts, double min_jacobian_threshold, int depth) {
    std::optional<CrossingError> crossing;
    try {
        Advanced next = opts.integrator == Integrator::rk4 ? rk4_step(e0, f0, potential, dt, opts)
                                                           : verlet_step(e0, f0, potential, dt, opts);
        const double minJ = min_of(next.fields.jacobian);
        if (minJ >= min_jacobian_threshold) return {std::move(next), dt};
        const auto it = std::min_element(next.fields.jacobian.begin(), next.fields.jacobian.end());
        const auto idx = static_cast<std::size_t>(std::distance(next.fields.jacobian.begin(), it));
        crossing.emplace("Jacobian " + std::to_string(minJ) + " below the safety threshold at " +
                             label_time(e0.labels.a(idx), next.ens.t),
                         e0.labels.a(idx), next.ens.t);
    } catch (const CrossingError& err) {
        crossing.emplace(err);
    }
    if (depth >= opts.max_halvings) {
        throw CrossingError("step rejected after " + std::to_string(depth) + " halvings: " + crossing->what(),
                            crossing->label(), crossing->time());
    }
    AdvanceResult first = advance(e0, f0, potential, 0.5 * dt, opts, min_jacobian_threshold, depth + 1);
    AdvanceResult second = advance(first.state.ens, first.state.fields, potential, 0.5 * dt, opts,
                                   min_jacobian_threshold, depth + 1);
    second.dt_min = std::min(first.dt_min, second.dt_min);
    return second;
}

struct Stepped {
    Advanced state;
    StepReport report;
};

Stepped step_impl(const TrajectoryEnsemble& ens, const LabelFields& fields, const PotentialSpec& potential,
                  double dt, const LagrangianOptions& opts, double reference_energy, double energy_scale,
                  double reference_min_jacobian) {
    if (!(dt > 0.0)) throw ParameterError("step: dt must be positive");
    const double threshold = opts.min_jacobian_fraction * reference_min_jacobian;
    // Split dt into equal substeps that respect the stiffness bound of the
    // current configuration.
    const double limit = opts.stability_safety *
                         stable_time_step(ens.labels, ens.consts, opts.stencil_order, min_of(fields.jacobian));
    const auto substeps = static_cast<std::size_t>(std::max(1.0, std::ceil(dt / limit - 1e-12)));
    if (substeps > opts.max_substeps) {
        throw InstabilityError("step at t=" + std::to_string(ens.t) + " needs " + std::to_string(substeps) +
                                   " substeps (min J " + std::to_string(min_of(fields.jacobian)) + ")",
                               ens.t);
    }
    const double h = dt / static_cast<double>(substeps);
    AdvanceResult adv = advance(ens, fields, potential, h, opts, threshold, 0);
    for (std::size_t k = 1; k < substeps; ++k) {
        AdvanceResult next = advance(adv.state.ens, adv.state.fields, potential, h, opts, threshold, 0);
        next.dt_min = std::min(next.dt_min, adv.dt_min);
        adv = std::move(next);
    }
    // Fix the end time exactly so repeated substeps do not drift.
    adv.state.ens.t = ens.t + dt;
    const double energy = energy_from(adv.state.ens, adv.state.fields);
    const double scale = std::max(std::abs(reference_energy), energy_scale);
    if (!std::isfinite(energy) ||
        (scale > 0.0 && std::abs(energy - reference_energy) > opts.energy_jump_tolerance * scale)) {
        throw InstabilityError("energy jumped from " + std::to_string(reference_energy) + " to " +
                                   std::to_string(energy) + " at t=" + std::to_string(adv.state.ens.t),
                               adv.state.ens.t);
    }
    StepReport report{adv.state.ens.t, min_of(adv.state.fields.jacobian), energy, adv.dt_min};
    return {std::move(adv.state), report};
}

}  // namespace

double trajectory_energy(const TrajectoryEnsemble& ens, const PotentialSpec& potential,
                         const LagrangianOptions& opts) {
    return energy_from(ens, label_fields(ens, potential, opts));
}

StepResult step(const TrajectoryEnsemble& ens, const PotentialSpec& potential, double dt,
                const LagrangianOptions& opts, std::optional<double> reference_energy,
                std::optional<double> reference_min_jacobian) {
    const LabelFields fields = label_fields(ens, potential, opts);
    const double e0 = reference_energy.value_or(energy_from(ens, fields));
    const double j0 = reference_min_jacobian.value_or(min_of(fields.jacobian));
    Stepped s = step_impl(ens, fields, potential, dt, opts, e0, energy_scale_from(ens, fields), j0);
    return {std::move(s.state.ens), s.report};
}

void LagrangianRun::throw_if_failed() const {
    if (!failure) return;
    if (failure->kind == EvolutionFailure::Kind::crossing) {
        throw CrossingError(failure->message, failure->label.value_or(0.0), failure->time);
    }
    throw InstabilityError(failure->message, failure->time);
}

LagrangianRun evolve(const TrajectoryEnsemble& ens, const PotentialSpec& potential, double dt, double t_final,
                     std::size_t output_every, const LagrangianOptions& opts) {
    if (!(dt > 0.0)) throw ParameterError("evolve: dt must be positive");
    if (!(t_final >= 0.0)) throw ParameterError("evolve: t_final must be non-negative");
    if (output_every == 0) throw ParameterError("evolve: output_every must be positive");
    const double steps_real = t_final / dt;
    const auto n_steps = static_cast<std::size_t>(std::llround(steps_real));
    if (std::abs(steps_real - static_cast<double>(n_steps)) > 1e-6) {
        throw ParameterError("evolve: t_final must be a whole number of steps");
    }

    LagrangianRun run;
    LabelFields fields = label_fields(ens, potential, opts);
    const double e0 = energy_from(ens, fields);
    const double scale = energy_scale_from(ens, fields);
    const double j0 = min_of(fields.jacobian);
    const double t0 = ens.t;
    run.frames.push_back(ens);
    run.reports.push_back({ens.t, j0, e0, 0.0});

    TrajectoryEnsemble current = ens;
    double dt_min = dt;
    for (std::size_t k = 1; k <= n_steps; ++k) {
        try {
            Stepped s = step_impl(current, fields, potential, dt, opts, e0, scale, j0);
            s.state.ens.t = t0 + static_cast<double>(k) * dt;
            if (!s.state.ens.strictly_increasing()) {
                throw CrossingError("positions no longer increase with label at t=" + std::to_string(s.state.ens.t),
                                    current.labels.a(0), s.state.ens.t);
            }
            current = std::move(s.state.ens);
            fields = std::move(s.state.fields);
            dt_min = std::min(dt_min, s.report.dt_used);
            if (k % output_every == 0) {
                s.report.t = current.t;
                s.report.dt_used = dt_min;
                run.frames.push_back(current);
                run.reports.push_back(s.report);
                dt_min = dt;
            }
        } catch (const CrossingError& err) {
            run.failure = EvolutionFailure{EvolutionFailure::Kind::crossing, err.what(), err.time(), err.label(), current};
            break;
        } catch (const InstabilityError& err) {
            run.failure = EvolutionFailure{EvolutionFailure::Kind::instability, err.what(), err.time(), {}, current};
            break;
        } catch (const NumericalError& err) {
            run.failure = EvolutionFailure{EvolutionFailure::Kind::instability, err.what(), current.t, {}, current};
            break;
        }
    }
    return run;
}

LabelMap LabelMap::identity() {
    return {[](double a) { return a; }, [](double) { return 1.0; }};
}

LabelMap LabelMap::scale(double c) {
    if (!(c > 0.0)) throw ParameterError("LabelMap::scale: factor must be positive");
    return {[c](double a) { return c * a; }, [c](double) { return c; }};
}

TrajectoryEnsemble relabel(const TrajectoryEnsemble& ens, const LabelMap& f, const LagrangianOptions& opts) {
    (void)opts;
    if (!f.forward || !f.derivative) throw ParameterError("relabel: map and derivative required");
    const std::size_t n = ens.size();
    const auto a = ens.labels.points();
    std::vector<double> fa(n);
    for (std::size_t i = 0; i < n; ++i) {
        fa[i] = f.forward(a[i]);
        if (!(f.derivative(a[i]) > 0.0) || (i > 0 && !(fa[i] > fa[i - 1]))) {
            throw ParameterError("relabel: map must be strictly increasing on the label interval");
        }
    }
    const LabelGrid new_labels(fa.front(), fa.back(), n);

    // Invert f by bisection on the bracketing label interval.
    auto inverse = [&](double target) {
        auto it = std::lower_bound(fa.begin(), fa.end(), target);
        std::size_t hi = std::min<std::size_t>(static_cast<std::size_t>(std::distance(fa.begin(), it)), n - 1);
        if (fa[hi] == target) return a[hi];
        std::size_t lo = hi == 0 ? 0 : hi - 1;
        double left = a[lo];
        double right = a[hi];
        for (int iter = 0; iter < 200 && right - left > 1e-15 * std::max(1.0, std::abs(left)); ++iter) {
            const double mid = 0.5 * (left + right);
            if (f.forward(mid) < target) left = mid;
            else right = mid;
        }
        return 0.5 * (left + right);
    };

    const auto& r0 = ens.label_density();
    std::vector<double> logr0(n);
    for (std::size_t i = 0; i < n; ++i) logr0[i] = std::log(r0[i]);
    const CubicHermite q_of(a, ens.q);
    const CubicHermite qdot_of(a, ens.qdot);
    const CubicHermite logr0_of(a, std::move(logr0));
    const CubicHermite action_of(a, ens.action);

    TrajectoryEnsemble out;
    out.labels = new_labels;
    out.consts = ens.consts;
    out.t = ens.t;
    out.q.resize(n);
    out.qdot.resize(n);
    out.action.resize(n);
    std::vector<double> rho0(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double ap = new_labels.a(j);
        const double aj = j == 0 ? a.front() : (j + 1 == n ? a.back() : inverse(ap));
        out.q[j] = q_of(aj);
        out.qdot[j] = qdot_of(aj);
        out.action[j] = action_of(aj);
        rho0[j] = std::exp(logr0_of(aj)) / f.derivative(aj);
    }
    const double mass = std::accumulate(rho0.begin(), rho0.end(), 0.0) * new_labels.spacing();
    for (auto& r : rho0) r /= mass;
    out.rho0 = std::make_shared<const std::vector<double>>(std::move(rho0));
    if (!out.strictly_increasing()) {
        throw CrossingError("relabel: resampled positions are not increasing", new_labels.a_min(), ens.t);
    }
    return out;
}

double stable_time_step(const LabelGrid& labels, const PhysicalConstants& consts, int stencil_order,
                        double min_jacobian) {
    if (!(min_jacobian > 0.0)) throw ParameterError("stable_time_step: min_jacobian must be positive");
    // Largest symbol of the centred fourth-derivative stencil.
    const std::size_t half = static_cast<std::size_t>((4 + stencil_order - 1) / 2);
    std::vector<double> nodes(2 * half + 1);
    for (std::size_t j = 0; j < nodes.size(); ++j) nodes[j] = static_cast<double>(j) - static_cast<double>(half);
    const auto w = fd::fornberg_weights(0.0, nodes, 4);
    double symbol = 0.0;
    for (int s = 0; s <= 2000; ++s) {
        const double theta = std::numbers::pi * s / 2000.0;
        double k = 0.0;
        for (std::size_t j = 0; j < nodes.size(); ++j) k += w[j] * std::cos(nodes[j] * theta);
        symbol = std::max(symbol, std::abs(k));
    }
    const double h = labels.spacing() * min_jacobian;
    const double omega = consts.hbar / (2.0 * consts.mass) * std::sqrt(symbol) / (h * h);
    return 2.0 / omega;
}

std::size_t interior_margin(int stencil_order) {
    const auto half = static_cast<std::size_t>((4 + stencil_order - 1) / 2);
    return 2 * (2 * half + 1);
}

}  // namespace qtraj
