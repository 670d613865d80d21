#include "qtraj/reconstruction.hpp"

#include "qtraj/errors.hpp"
#include "qtraj/finite_difference.hpp"
#include "qtraj/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace qtraj {

namespace {

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

std::vector<std::uint8_t> excluded(const std::vector<std::uint8_t>& support) {
    std::vector<std::uint8_t> out(support.size());
    for (std::size_t i = 0; i < support.size(); ++i) out[i] = support[i] ? 0 : 1;
    return out;
}

}  // namespace

std::size_t ReconstructedFields::supported_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(support_mask.begin(), support_mask.end(),
                                                  [](std::uint8_t s) { return s != 0; }));
}

ReconstructedFields fields_from_trajectories(const TrajectoryEnsemble& ens, const GridSpec& grid,
                                             const LagrangianOptions& opts) {
    if (!ens.strictly_increasing()) {
        throw CrossingError("positions do not increase with label", ens.labels.a_min(), ens.t);
    }
    const auto J = jacobian(ens, opts.stencil_order);
    const std::size_t n = ens.size();
    const auto a = ens.labels.points();
    const auto& r0 = ens.label_density();
    std::vector<double> logrho(n);
    for (std::size_t i = 0; i < n; ++i) logrho[i] = std::log(r0[i] / J[i]);

    const CubicHermite Q_of(ens.q, a, CubicHermite::Shape::monotone);
    const CubicHermite logrho_of(a, std::move(logrho));
    const CubicHermite qdot_of(a, ens.qdot);
    const CubicHermite J_of(a, J);

    ReconstructedFields f;
    f.grid = grid;
    f.t = ens.t;
    const std::size_t m = grid.size();
    f.rho.assign(m, 0.0);
    f.v.assign(m, 0.0);
    f.Q.assign(m, 0.0);
    f.jacobian.assign(m, 0.0);
    f.P.assign(m, 0.0);
    f.support_mask.assign(m, 0);
    const double mass = ens.consts.mass;
    for (std::size_t i = 0; i < m; ++i) {
        const double x = grid.x(i);
        if (x < ens.q.front() || x > ens.q.back()) continue;
        const double label = std::clamp(Q_of(x), a.front(), a.back());
        f.support_mask[i] = 1;
        f.Q[i] = label;
        f.rho[i] = std::exp(logrho_of(label));
        f.v[i] = qdot_of(label);
        f.jacobian[i] = J_of(label);
        f.P[i] = -mass * f.rho[i] * f.v[i] * f.jacobian[i];
    }
    return f;
}

KernelEstimate kernel_density_estimate(const TrajectoryEnsemble& ens, const GridSpec& grid, double bandwidth) {
    if (!(bandwidth >= 2.0 * grid.spacing())) {
        throw ParameterError("kernel_density_estimate: bandwidth must be at least two grid spacings");
    }
    KernelEstimate out{grid, std::vector<double>(grid.size(), 0.0), std::vector<double>(grid.size(), 0.0)};
    const auto& r0 = ens.label_density();
    const double da = ens.labels.spacing();
    const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * bandwidth);
    const double reach = 12.0 * bandwidth;
    for (std::size_t k = 0; k < ens.size(); ++k) {
        const double qk = ens.q[k];
        const double lo = std::max(grid.x_min(), qk - reach);
        const double hi = std::min(grid.x_max(), qk + reach);
        if (lo > hi) continue;
        const std::size_t i0 = grid.nearest_index(lo);
        const std::size_t i1 = grid.nearest_index(hi);
        const double w = r0[k] * da * norm;
        for (std::size_t i = i0; i <= i1; ++i) {
            const double u = (grid.x(i) - qk) / bandwidth;
            const double kern = w * std::exp(-0.5 * u * u);
            out.rho[i] += kern;
            out.flux[i] += kern * ens.qdot[k];
        }
    }
    return out;
}

std::vector<double> reconstructed_phase(const TrajectoryEnsemble& ens, const ReconstructedFields& fields) {
    const GridSpec& grid = fields.grid;
    const std::size_t anchor = ens.anchor_index();
    const double x_ref = ens.q[anchor];
    if (!grid.contains(x_ref)) throw ReconstructionError("anchor trajectory lies outside the grid");

    const auto first_it = std::find(fields.support_mask.begin(), fields.support_mask.end(), 1);
    if (first_it == fields.support_mask.end()) throw ReconstructionError("no grid point inside the support");
    const auto first = static_cast<std::size_t>(std::distance(fields.support_mask.begin(), first_it));
    std::size_t last = first;
    while (last + 1 < grid.size() && fields.support_mask[last + 1]) ++last;

    const double m = ens.consts.mass;
    const double h = grid.spacing();
    std::vector<double> S(grid.size(), 0.0);
    for (std::size_t i = first + 1; i <= last; ++i) {
        S[i] = S[i - 1] + 0.5 * h * m * (fields.v[i - 1] + fields.v[i]);
    }
    const std::size_t j = std::clamp(grid.nearest_index(x_ref), first, last);
    const double at_ref = S[j] + (x_ref - grid.x(j)) * 0.5 * m * (fields.v[j] + ens.qdot[anchor]);
    const double shift = ens.action[anchor] - at_ref;
    for (std::size_t i = first; i <= last; ++i) S[i] += shift;
    return S;
}

Wavefunction reconstruct_wavefunction(const TrajectoryEnsemble& ens, const GridSpec& grid,
                                      const LagrangianOptions& opts) {
    const ReconstructedFields fields = fields_from_trajectories(ens, grid, opts);
    const auto S = reconstructed_phase(ens, fields);
    const double hbar = ens.consts.hbar;
    std::vector<Complex> values(grid.size(), Complex(0.0, 0.0));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!fields.support_mask[i]) continue;
        values[i] = std::polar(std::sqrt(fields.rho[i]), S[i] / hbar);
    }
    Wavefunction psi(grid, std::move(values));
    if (!(psi.norm() > 0.0)) throw ReconstructionError("reconstructed state has zero norm");
    return psi.normalized();
}

double advection_residual(std::span<const ReconstructedFields> trace, int stencil_order) {
    if (trace.size() < 3) throw ParameterError("advection_residual: at least three snapshots required");
    const GridSpec& grid = trace.front().grid;
    const double dt = trace[1].t - trace[0].t;
    if (!(dt > 0.0)) throw ParameterError("advection_residual: snapshot times must increase");
    for (std::size_t k = 1; k < trace.size(); ++k) {
        if (!(trace[k].grid == grid)) throw ShapeError("advection_residual: snapshots on different grids");
        if (std::abs((trace[k].t - trace[k - 1].t) - dt) > 1e-9 * dt) {
            throw ParameterError("advection_residual: snapshots must be uniformly spaced");
        }
    }
    double worst = 0.0;
    std::size_t used = 0;
    for (std::size_t k = 1; k + 1 < trace.size(); ++k) {
        const auto& mid = trace[k];
        const auto dQdx = fd::derivative_on_runs(mid.Q, excluded(mid.support_mask), grid.spacing(), 1, stencil_order);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (!trace[k - 1].support_mask[i] || !mid.support_mask[i] || !trace[k + 1].support_mask[i]) continue;
            if (!std::isfinite(dQdx[i])) continue;
            const double dQdt = (trace[k + 1].Q[i] - trace[k - 1].Q[i]) / (2.0 * dt);
            worst = std::max(worst, std::abs(dQdt + mid.v[i] * dQdx[i]));
            ++used;
        }
    }
    if (used == 0) throw ReconstructionError("advection_residual: snapshots share no support");
    return worst;
}

std::vector<double> momentum_potential_from_advection(const ReconstructedFields& before,
                                                      const ReconstructedFields& at,
                                                      const ReconstructedFields& after, double mass) {
    if (!(before.grid == at.grid) || !(after.grid == at.grid)) {
        throw ShapeError("momentum_potential_from_advection: snapshots on different grids");
    }
    const double dt = 0.5 * (after.t - before.t);
    if (!(dt > 0.0)) throw ParameterError("momentum_potential_from_advection: snapshot times must increase");
    std::vector<double> P(at.grid.size(), nan_value);
    for (std::size_t i = 0; i < P.size(); ++i) {
        if (!before.support_mask[i] || !at.support_mask[i] || !after.support_mask[i]) continue;
        const double dQdt = (after.Q[i] - before.Q[i]) / (2.0 * dt);
        P[i] = mass * at.rho[i] * at.jacobian[i] * at.jacobian[i] * dQdt;
    }
    return P;
}

double label_density_residual(const ReconstructedFields& fields, const TrajectoryEnsemble& ens,
                              double core_fraction, int stencil_order) {
    if (!(core_fraction > 0.0 && core_fraction <= 1.0)) {
        throw ParameterError("label_density_residual: core_fraction must lie in (0, 1]");
    }
    const auto& r0 = ens.label_density();
    std::vector<double> logr0(r0.size());
    for (std::size_t i = 0; i < r0.size(); ++i) logr0[i] = std::log(r0[i]);
    const CubicHermite logr0_of(ens.labels.points(), std::move(logr0));

    const GridSpec& grid = fields.grid;
    const auto dQdx =
        fd::derivative_on_runs(fields.Q, excluded(fields.support_mask), grid.spacing(), 1, stencil_order);
    const double lo = ens.q.front();
    const double hi = ens.q.back();
    const double centre = 0.5 * (lo + hi);
    const double half = 0.5 * core_fraction * (hi - lo);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.x(i);
        if (!fields.support_mask[i] || std::abs(x - centre) > half || !std::isfinite(dQdx[i])) continue;
        const double label = std::clamp(fields.Q[i], logr0_of.lower(), logr0_of.upper());
        worst = std::max(worst, std::abs(fields.rho[i] - dQdx[i] * std::exp(logr0_of(label))));
    }
    return worst;
}

}  // namespace qtraj
