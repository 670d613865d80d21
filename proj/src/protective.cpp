#include "qtraj/protective.hpp"

#include "qtraj/errors.hpp"
#include "qtraj/hydro.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qtraj {

namespace {

void require_duration(double T) {
    if (!(T > 0.0) || !std::isfinite(T)) throw ParameterError("coupling profile: duration must be positive");
}

// Trapezoid weights for possibly non-uniform sample times.
std::vector<double> time_weights(const std::vector<double>& t) {
    std::vector<double> w(t.size(), 0.0);
    for (std::size_t k = 1; k < t.size(); ++k) {
        const double h = t[k] - t[k - 1];
        w[k - 1] += 0.5 * h;
        w[k] += 0.5 * h;
    }
    return w;
}

struct Protocol {
    std::vector<double> weights;  // g(t_k) times the quadrature weight
    std::vector<HydroState> fields;
};

Protocol prepare(const EvolutionTrace& trace, const CouplingProfile& profile, const PhysicalConstants& consts,
                 const FieldOptions& opts) {
    if (trace.size() < 2) throw ParameterError("protective_run: trace needs at least two snapshots");
    if (!profile.g) throw ParameterError("protective_run: coupling profile has no function");
    const double t0 = trace.times.front();
    const double span = trace.times.back() - t0;
    if (std::abs(span - profile.T) > 1e-9 * std::max(1.0, profile.T)) {
        throw ParameterError("protective_run: trace spans " + std::to_string(span) + " but the protocol lasts " +
                             std::to_string(profile.T));
    }
    Protocol p;
    p.weights = time_weights(trace.times);
    double integral = 0.0;
    for (std::size_t k = 0; k < trace.size(); ++k) {
        p.weights[k] *= profile.g(trace.times[k] - t0);
        integral += p.weights[k];
    }
    if (std::abs(integral - 1.0) > 1e-10) {
        throw ParameterError("protective_run: coupling profile integrates to " + std::to_string(integral) +
                             " instead of 1");
    }
    p.fields.reserve(trace.size());
    for (const auto& psi : trace.states) p.fields.push_back(polar_decompose(psi, consts, opts));
    return p;
}

struct Shift {
    double density = 0.0;
    double current = 0.0;
    bool measurable = false;
};

Shift shift_at(const Protocol& p, std::size_t i) {
    Shift s;
    for (std::size_t k = 0; k < p.fields.size(); ++k) {
        const HydroState& h = p.fields[k];
        s.density += p.weights[k] * h.rho[i];
        if (!h.mask[i]) {
            s.current += p.weights[k] * h.rho[i] * h.v[i];
            s.measurable = true;
        }
    }
    return s;
}

}  // namespace

CouplingProfile CouplingProfile::uniform(double T) {
    require_duration(T);
    return {"uniform", T, [T](double) { return 1.0 / T; }};
}

CouplingProfile CouplingProfile::sine_squared(double T) {
    require_duration(T);
    return {"sine_squared", T, [T](double t) {
                const double s = std::sin(std::numbers::pi * t / T);
                return 2.0 * s * s / T;
            }};
}

CouplingProfile CouplingProfile::triangle(double T) {
    require_duration(T);
    return {"triangle", T, [T](double t) { return 2.0 / T * (1.0 - std::abs(2.0 * t / T - 1.0)); }};
}

CouplingProfile CouplingProfile::by_name(const std::string& name, double T) {
    if (name == "uniform") return uniform(T);
    if (name == "sine_squared") return sine_squared(T);
    if (name == "triangle") return triangle(T);
    throw ParameterError("unknown coupling profile '" + name + "'");
}

ProtectiveRecord protective_run(const EvolutionTrace& trace, double x_point, const CouplingProfile& profile,
                                const PhysicalConstants& consts, const FieldOptions& opts) {
    if (trace.empty()) throw ParameterError("protective_run: empty trace");
    const GridSpec& grid = trace.states.front().grid;
    const std::size_t i = grid.nearest_index(x_point);
    if (std::abs(grid.x(i) - x_point) > 1e-9 * grid.spacing()) {
        throw ParameterError("protective_run: x_point " + std::to_string(x_point) + " is not a grid point");
    }
    const Protocol p = prepare(trace, profile, consts, opts);
    const Shift s = shift_at(p, i);
    if (!s.measurable) {
        throw UnmeasurablePointError("protective_run: x=" + std::to_string(x_point) +
                                     " is node-masked for the whole protocol");
    }
    return {grid.x(i), s.density, s.current, profile.T};
}

std::vector<ProtectiveRecord> protective_scan(const EvolutionTrace& trace, const CouplingProfile& profile,
                                              const PhysicalConstants& consts, const FieldOptions& opts) {
    if (trace.empty()) throw ParameterError("protective_scan: empty trace");
    const GridSpec& grid = trace.states.front().grid;
    const Protocol p = prepare(trace, profile, consts, opts);
    std::vector<ProtectiveRecord> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Shift s = shift_at(p, i);
        out[i] = {grid.x(i), s.density, s.measurable ? s.current : 0.0, profile.T};
    }
    return out;
}

RecoveredState state_from_records(const std::vector<ProtectiveRecord>& records, const GridSpec& grid,
                                  const LabelGrid& labels, const PhysicalConstants& consts,
                                  const LagrangianOptions& opts) {
    consts.validate();
    if (records.size() != grid.size()) throw ShapeError("state_from_records: one record per grid point required");
    std::vector<double> rho(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (std::abs(records[i].x_point - grid.x(i)) > 1e-9 * grid.spacing()) {
            throw ShapeError("state_from_records: record " + std::to_string(i) + " is not at its grid point");
        }
        if (!std::isfinite(records[i].shift_density) || !std::isfinite(records[i].shift_current)) {
            throw ReconstructionError("state_from_records: non-finite record");
        }
        rho[i] = std::max(records[i].shift_density, 0.0);
    }
    const double mass = trapezoid(rho, grid.spacing());
    if (!(mass > 0.0)) throw ReconstructionError("state_from_records: records carry no density");
    for (auto& r : rho) r /= mass;

    RecoveredState out;
    out.mask = node_mask(rho, opts.node_floor);
    const double m = consts.mass;
    std::vector<double> v(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!out.mask[i]) v[i] = records[i].shift_current / records[i].shift_density;
    }
    // S from m v; masked stretches keep the last value so the phase is
    // offset-matched across them.
    std::vector<double> S(grid.size(), 0.0);
    const double h = grid.spacing();
    for (std::size_t i = 1; i < grid.size(); ++i) {
        S[i] = S[i - 1];
        if (!out.mask[i] && !out.mask[i - 1]) S[i] += 0.5 * h * m * (v[i - 1] + v[i]);
    }
    std::vector<Complex> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) values[i] = std::polar(std::sqrt(rho[i]), S[i] / consts.hbar);
    out.psi = Wavefunction(grid, std::move(values)).normalized();
    out.ensemble = init_from_wavefunction(out.psi, labels, consts, opts);
    return out;
}

EvolutionTrace analytic_trace(const AnalyticState& state, const PhysicalConstants& consts, const GridSpec& grid,
                              const std::vector<double>& times) {
    EvolutionTrace trace;
    trace.times = times;
    trace.states.reserve(times.size());
    for (double t : times) trace.states.push_back(analytic_state(state, consts, t, grid));
    return trace;
}

}  // namespace qtraj
