#include "qtraj/hydro.hpp"

#include "qtraj/errors.hpp"
#include "qtraj/finite_difference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace qtraj {

namespace {

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

void require_rho_positive(std::span<const double> rho, const Mask& mask) {
    for (std::size_t i = 0; i < rho.size(); ++i) {
        if (!mask[i] && !(rho[i] > 0.0)) {
            throw DomainError("density must be positive at unmasked point " + std::to_string(i));
        }
    }
}

std::vector<double> log_density(std::span<const double> rho, const Mask& mask) {
    double peak = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        if (!mask[i]) peak = std::max(peak, rho[i]);
    }
    std::vector<double> L(rho.size(), 0.0);
    for (std::size_t i = 0; i < rho.size(); ++i) {
        if (!mask[i]) L[i] = std::log(rho[i] / peak);
    }
    return L;
}

}  // namespace

Wavefunction::Wavefunction(GridSpec g, std::vector<Complex> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size()) throw ShapeError("Wavefunction: one value per grid point required");
}

std::vector<double> Wavefunction::density() const {
    std::vector<double> rho(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) rho[i] = std::norm(values[i]);
    return rho;
}

double Wavefunction::norm() const { return trapezoid(density(), grid.spacing()); }

Wavefunction Wavefunction::normalized() const {
    const double n = norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw DegenerateStateError("cannot normalize a zero wavefunction");
    Wavefunction out = *this;
    const double s = 1.0 / std::sqrt(n);
    for (auto& c : out.values) c *= s;
    return out;
}

std::size_t HydroState::masked_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(mask.begin(), mask.end(), [](auto m) { return m != 0; }));
}

Mask node_mask(std::span<const double> rho, double node_floor) {
    if (!(node_floor > 0.0)) throw ParameterError("node_floor must be positive");
    double peak = 0.0;
    for (double r : rho) {
        if (!std::isfinite(r)) throw NumericalError("non-finite density");
        peak = std::max(peak, r);
    }
    if (!(peak > 0.0)) throw DegenerateStateError("density vanishes everywhere");
    const double floor = node_floor * peak;
    Mask mask(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) mask[i] = rho[i] < floor ? 1 : 0;
    return mask;
}

HydroState polar_decompose(const Wavefunction& psi, const PhysicalConstants& consts,
                           const FieldOptions& opts) {
    consts.validate();
    HydroState out;
    out.grid = psi.grid;
    out.rho = psi.density();
    out.mask = node_mask(out.rho, opts.node_floor);
    const std::size_t n = psi.size();
    out.S.assign(n, nan_value);

    const double two_pi = 2.0 * std::numbers::pi;
    bool have_prev = false;
    double prev = 0.0;  // unwrapped phase / hbar at the last unmasked point
    for (std::size_t i = 0; i < n; ++i) {
        if (out.mask[i]) continue;
        double phase = std::arg(psi.values[i]);
        if (have_prev) {
            phase += two_pi * std::round((prev - phase) / two_pi);
        }
        out.S[i] = consts.hbar * phase;
        prev = phase;
        have_prev = true;
    }
    const auto dS = fd::derivative_on_runs(out.S, out.mask, psi.grid.spacing(), 1, opts.stencil_order);
    out.v.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.v[i] = dS[i] / consts.mass;
    return out;
}

Wavefunction recompose(const HydroState& state, const PhysicalConstants& consts) {
    std::vector<Complex> values(state.size(), Complex{});
    for (std::size_t i = 0; i < state.size(); ++i) {
        if (state.mask[i]) continue;
        values[i] = std::polar(std::sqrt(state.rho[i]), state.S[i] / consts.hbar);
    }
    return Wavefunction(state.grid, std::move(values));
}

std::vector<double> quantum_potential(const GridSpec& grid, std::span<const double> rho, const Mask& mask,
                                      const PhysicalConstants& consts, int stencil_order) {
    if (rho.size() != grid.size() || mask.size() != grid.size()) {
        throw ShapeError("quantum_potential: density, mask and grid sizes differ");
    }
    consts.validate();
    require_rho_positive(rho, mask);
    const auto L = log_density(rho, mask);
    const double h = grid.spacing();
    const auto L1 = fd::derivative_on_runs(L, mask, h, 1, stencil_order);
    const auto L2 = fd::derivative_on_runs(L, mask, h, 2, stencil_order);
    const double c = consts.hbar * consts.hbar / (4.0 * consts.mass);
    std::vector<double> vq(rho.size(), nan_value);
    for (std::size_t i = 0; i < rho.size(); ++i) {
        if (!mask[i]) vq[i] = -c * (L2[i] + 0.5 * L1[i] * L1[i]);
    }
    return vq;
}

std::vector<double> quantum_potential(const HydroState& state, const PhysicalConstants& consts,
                                      int stencil_order) {
    return quantum_potential(state.grid, state.rho, state.mask, consts, stencil_order);
}

std::vector<double> internal_energy_density(const GridSpec& grid, std::span<const double> rho,
                                            const Mask& mask, const PhysicalConstants& consts,
                                            int stencil_order) {
    if (rho.size() != grid.size() || mask.size() != grid.size()) {
        throw ShapeError("internal_energy_density: density, mask and grid sizes differ");
    }
    consts.validate();
    require_rho_positive(rho, mask);
    const auto L = log_density(rho, mask);
    const auto L1 = fd::derivative_on_runs(L, mask, grid.spacing(), 1, stencil_order);
    const double c = consts.hbar * consts.hbar / (8.0 * consts.mass);
    std::vector<double> u(rho.size(), nan_value);
    for (std::size_t i = 0; i < rho.size(); ++i) {
        if (!mask[i]) u[i] = c * L1[i] * L1[i];
    }
    return u;
}

std::vector<double> probability_current(const Wavefunction& psi, const PhysicalConstants& consts,
                                        int stencil_order) {
    const std::size_t n = psi.size();
    std::vector<double> re(n), im(n);
    for (std::size_t i = 0; i < n; ++i) {
        re[i] = psi.values[i].real();
        im[i] = psi.values[i].imag();
    }
    fd::DerivativeOperator d1(n, psi.grid.spacing(), 1, stencil_order);
    const auto dre = d1.apply(re);
    const auto dim = d1.apply(im);
    std::vector<double> j(n);
    for (std::size_t i = 0; i < n; ++i) {
        j[i] = consts.hbar / consts.mass * (re[i] * dim[i] - im[i] * dre[i]);
    }
    return j;
}

HydroResiduals hydro_residuals(std::span<const double> times, std::span<const HydroState> series,
                               const PotentialSpec& potential, const PhysicalConstants& consts,
                               int stencil_order) {
    if (series.size() < 3) throw ParameterError("hydro_residuals: at least 3 snapshots required");
    if (times.size() != series.size()) throw ShapeError("hydro_residuals: one time per snapshot required");
    const GridSpec& grid = series.front().grid;
    for (const auto& s : series) {
        if (!(s.grid == grid) || s.size() != grid.size()) {
            throw ShapeError("hydro_residuals: snapshots sampled on different grids");
        }
    }
    const double dt = times[1] - times[0];
    if (!(dt > 0.0)) throw ParameterError("hydro_residuals: times must increase");
    for (std::size_t k = 1; k < times.size(); ++k) {
        if (std::abs((times[k] - times[k - 1]) - dt) > 1e-9 * std::max(1.0, std::abs(dt))) {
            throw ParameterError("hydro_residuals: snapshot times must be uniformly spaced");
        }
    }
    const double h = grid.spacing();
    const auto V = potential.sample(grid);
    HydroResiduals out;
    for (std::size_t k = 1; k + 1 < series.size(); ++k) {
        const HydroState& prev = series[k - 1];
        const HydroState& cur = series[k];
        const HydroState& next = series[k + 1];
        const std::size_t n = grid.size();
        std::vector<double> flux(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            if (!cur.mask[i]) flux[i] = cur.rho[i] * cur.v[i];
        }
        const auto vq = quantum_potential(cur, consts, stencil_order);
        std::vector<double> energy(n, 0.0);
        std::vector<double> v = cur.v;
        for (std::size_t i = 0; i < n; ++i) {
            if (!cur.mask[i]) energy[i] = V[i] + vq[i];
            else v[i] = 0.0;
        }
        const auto dflux = fd::derivative_on_runs(flux, cur.mask, h, 1, stencil_order);
        const auto dv = fd::derivative_on_runs(v, cur.mask, h, 1, stencil_order);
        const auto denergy = fd::derivative_on_runs(energy, cur.mask, h, 1, stencil_order);
        for (std::size_t i = 0; i < n; ++i) {
            if (prev.mask[i] || cur.mask[i] || next.mask[i]) continue;
            if (!std::isfinite(dflux[i]) || !std::isfinite(denergy[i])) continue;
            const double cont = (next.rho[i] - prev.rho[i]) / (2 * dt) + dflux[i];
            const double euler = (next.v[i] - prev.v[i]) / (2 * dt) + cur.v[i] * dv[i] + denergy[i] / consts.mass;
            out.continuity = std::max(out.continuity, std::abs(cont));
            out.euler = std::max(out.euler, std::abs(euler));
            ++out.points;
        }
    }
    return out;
}

}  // namespace qtraj
