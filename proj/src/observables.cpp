#include "qtraj/observables.hpp"

#include "qtraj/errors.hpp"
#include "qtraj/hydro.hpp"

#include <algorithm>
#include <cmath>

namespace qtraj {

std::string picture_name(Picture p) { return p == Picture::wave ? "wave" : "trajectory"; }

ObservableReport expectations_wave(const Wavefunction& psi, const PotentialSpec& potential,
                                   const PhysicalConstants& consts, const FieldOptions& opts) {
    const double norm = psi.norm();
    if (std::abs(norm - 1.0) > 1e-6) {
        throw ParameterError("expectations_wave: state is not normalized (norm " + std::to_string(norm) + ")");
    }
    const HydroState h = polar_decompose(psi, consts, opts);
    const auto U = internal_energy_density(h.grid, h.rho, h.mask, consts, opts.stencil_order);
    const std::size_t n = h.size();
    std::vector<double> fx(n, 0.0), fp(n, 0.0), fk(n, 0.0), fv(n, 0.0);
    const double m = consts.mass;
    for (std::size_t i = 0; i < n; ++i) {
        if (h.mask[i]) continue;
        const double x = h.grid.x(i);
        const double r = h.rho[i];
        fx[i] = x * r;
        fp[i] = m * h.v[i] * r;
        fk[i] = (0.5 * m * h.v[i] * h.v[i] + U[i]) * r;
        fv[i] = potential.value(x) * r;
    }
    const double dx = h.grid.spacing();
    ObservableReport rep;
    rep.picture = Picture::wave;
    rep.mean_x = trapezoid(fx, dx);
    rep.mean_p = trapezoid(fp, dx);
    rep.kinetic = trapezoid(fk, dx);
    rep.potential = trapezoid(fv, dx);
    rep.total = rep.kinetic + rep.potential;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = h.grid.x(i) - rep.mean_x;
        fx[i] = h.mask[i] ? 0.0 : d * d * h.rho[i];
    }
    rep.spread_x = std::sqrt(trapezoid(fx, dx));
    return rep;
}

ObservableReport expectations_traj(const TrajectoryEnsemble& ens, const PotentialSpec& potential,
                                   const LagrangianOptions& opts) {
    const LabelFields f = label_fields(ens, potential, opts);
    const auto& r0 = ens.label_density();
    const double m = ens.consts.mass;
    ObservableReport rep;
    rep.picture = Picture::trajectory;
    for (std::size_t i = 0; i < ens.size(); ++i) {
        rep.mean_x += ens.q[i] * r0[i];
        rep.mean_p += m * ens.qdot[i] * r0[i];
        rep.kinetic += (0.5 * m * ens.qdot[i] * ens.qdot[i] + f.internal[i]) * r0[i];
        rep.potential += f.potential[i] * r0[i];
    }
    const double da = ens.labels.spacing();
    rep.mean_x *= da;
    rep.mean_p *= da;
    rep.kinetic *= da;
    rep.potential *= da;
    rep.total = rep.kinetic + rep.potential;
    double var = 0.0;
    for (std::size_t i = 0; i < ens.size(); ++i) {
        const double d = ens.q[i] - rep.mean_x;
        var += d * d * r0[i];
    }
    rep.spread_x = std::sqrt(var * da);
    return rep;
}

namespace {

double gap(double a, double b, double scale) {
    const double denom = std::max({std::abs(a), std::abs(b), scale});
    return denom > 0.0 ? std::abs(a - b) / denom : 0.0;
}

}  // namespace

double ObservableGaps::largest() const { return std::max({mean_x, mean_p, kinetic, potential}); }

ObservableGaps observable_gaps(const ObservableReport& a, const ObservableReport& b, double mass) {
    const double x_scale = std::max(a.spread_x, b.spread_x);
    const double p_scale = std::sqrt(2.0 * mass * std::max({a.kinetic, b.kinetic, 0.0}));
    const double e_scale = std::max(std::abs(a.kinetic) + std::abs(a.potential),
                                    std::abs(b.kinetic) + std::abs(b.potential));
    ObservableGaps g;
    g.mean_x = gap(a.mean_x, b.mean_x, x_scale);
    g.mean_p = gap(a.mean_p, b.mean_p, p_scale);
    g.kinetic = gap(a.kinetic, b.kinetic, e_scale);
    g.potential = gap(a.potential, b.potential, e_scale);
    return g;
}

bool VelocityScaleReport::passed(double scale_tol, double velocity_tol) const {
    return points > 0 && density_error <= scale_tol && current_error <= scale_tol && velocity_change <= velocity_tol;
}

VelocityScaleReport velocity_scale_check(const Wavefunction& psi, Complex c, const PhysicalConstants& consts,
                                         const FieldOptions& opts) {
    if (c == Complex(0.0, 0.0)) throw ParameterError("velocity_scale_check: c must be nonzero");
    Wavefunction scaled = psi;
    for (auto& z : scaled.values) z *= c;

    const auto rho = psi.density();
    const auto rho_c = scaled.density();
    const auto j = probability_current(psi, consts, opts.stencil_order);
    const auto j_c = probability_current(scaled, consts, opts.stencil_order);
    const Mask mask = node_mask(rho, opts.node_floor);
    const Mask mask_c = node_mask(rho_c, opts.node_floor);

    VelocityScaleReport rep;
    rep.factor = std::norm(c);
    double rho_max = 0.0, j_max = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        rho_max = std::max(rho_max, rep.factor * rho[i]);
        j_max = std::max(j_max, std::abs(rep.factor * j[i]));
    }
    for (std::size_t i = 0; i < rho.size(); ++i) {
        rep.density_error = std::max(rep.density_error, std::abs(rho_c[i] - rep.factor * rho[i]) / rho_max);
        if (j_max > 0.0) {
            rep.current_error = std::max(rep.current_error, std::abs(j_c[i] - rep.factor * j[i]) / j_max);
        }
        if (mask[i] || mask_c[i]) continue;
        const double v = j[i] / rho[i];
        const double v_c = j_c[i] / rho_c[i];
        rep.velocity_change = std::max(rep.velocity_change, std::abs(v_c - v));
        ++rep.points;
    }
    return rep;
}

}  // namespace qtraj
