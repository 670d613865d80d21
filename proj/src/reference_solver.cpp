#include "qtraj/reference_solver.hpp"

#include "qtraj/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>

namespace qtraj {

namespace {

// Owns an in-place forward/backward FFTW plan pair over one buffer.
class SpectralWorkspace {
public:
    explicit SpectralWorkspace(std::size_t n) : n_(n) {
        buffer_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
        if (!buffer_) throw std::bad_alloc();
        const int ni = static_cast<int>(n);
        forward_ = fftw_plan_dft_1d(ni, buffer_, buffer_, FFTW_FORWARD, FFTW_ESTIMATE);
        backward_ = fftw_plan_dft_1d(ni, buffer_, buffer_, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    SpectralWorkspace(const SpectralWorkspace&) = delete;
    SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;
    ~SpectralWorkspace() {
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
        fftw_free(buffer_);
    }

    Complex* data() noexcept { return reinterpret_cast<Complex*>(buffer_); }
    void forward() { fftw_execute(forward_); }
    void backward() { fftw_execute(backward_); }
    std::size_t size() const noexcept { return n_; }

private:
    std::size_t n_;
    fftw_complex* buffer_ = nullptr;
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
};

std::vector<double> wavenumbers(const GridSpec& grid) {
    const std::size_t n = grid.size();
    const double dk = 2.0 * std::numbers::pi / (static_cast<double>(n) * grid.spacing());
    std::vector<double> k(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double jj = j < (n + 1) / 2 ? static_cast<double>(j) : static_cast<double>(j) - static_cast<double>(n);
        k[j] = jj * dk;
    }
    return k;
}

void check_state(const Wavefunction& psi, double t, const SplitStepOptions& opts) {
    for (const auto& c : psi.values) {
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
            throw NumericalError("split_step_evolve: non-finite amplitude at t=" + std::to_string(t));
        }
    }
    const double edge = std::max(std::abs(psi.values.front()), std::abs(psi.values.back()));
    if (edge > opts.boundary_threshold) {
        throw BoundaryLeakError("split_step_evolve: |psi| = " + std::to_string(edge) +
                                    " at the grid edge exceeds the leak threshold at t=" + std::to_string(t),
                                t, edge);
    }
}

}  // namespace

EvolutionTrace split_step_evolve(const Wavefunction& psi0, const PotentialSpec& potential,
                                 const PhysicalConstants& consts, double dt, double t_final,
                                 std::size_t output_every, const SplitStepOptions& opts) {
    consts.validate();
    if (!(dt > 0.0)) throw ParameterError("split_step_evolve: dt must be positive");
    if (!(t_final >= 0.0)) throw ParameterError("split_step_evolve: t_final must be non-negative");
    if (output_every == 0) throw ParameterError("split_step_evolve: output_every must be positive");
    const double steps_real = t_final / dt;
    const auto n_steps = static_cast<std::size_t>(std::llround(steps_real));
    if (std::abs(steps_real - static_cast<double>(n_steps)) > 1e-6) {
        throw ParameterError("split_step_evolve: t_final must be a whole number of steps");
    }

    const GridSpec& grid = psi0.grid;
    const std::size_t n = grid.size();
    check_state(psi0, 0.0, opts);
    const auto k = wavenumbers(grid);
    std::vector<Complex> half_kinetic(n);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double phase = -consts.hbar * k[j] * k[j] * dt / (4.0 * consts.mass);
        half_kinetic[j] = std::polar(inv_n, phase);
    }
    const auto V = potential.sample(grid);
    std::vector<Complex> potential_phase(n);
    for (std::size_t i = 0; i < n; ++i) potential_phase[i] = std::polar(1.0, -V[i] * dt / consts.hbar);

    SpectralWorkspace ws(n);
    Complex* buf = ws.data();
    std::copy(psi0.values.begin(), psi0.values.end(), buf);

    EvolutionTrace trace;
    trace.times.push_back(0.0);
    trace.states.push_back(psi0);
    for (std::size_t step = 1; step <= n_steps; ++step) {
        ws.forward();
        for (std::size_t j = 0; j < n; ++j) buf[j] *= half_kinetic[j];
        ws.backward();
        for (std::size_t i = 0; i < n; ++i) buf[i] *= potential_phase[i];
        ws.forward();
        for (std::size_t j = 0; j < n; ++j) buf[j] *= half_kinetic[j];
        ws.backward();

        const double t = static_cast<double>(step) * dt;
        const double edge = std::max(std::abs(buf[0]), std::abs(buf[n - 1]));
        if (!std::isfinite(edge)) {
            throw NumericalError("split_step_evolve: non-finite amplitude at t=" + std::to_string(t));
        }
        if (edge > opts.boundary_threshold) {
            throw BoundaryLeakError("split_step_evolve: |psi| = " + std::to_string(edge) +
                                        " at the grid edge exceeds the leak threshold at t=" + std::to_string(t),
                                    t, edge);
        }
        if (step % output_every == 0) {
            Wavefunction snap(grid, std::vector<Complex>(buf, buf + n));
            check_state(snap, t, opts);
            trace.times.push_back(t);
            trace.states.push_back(std::move(snap));
        }
    }
    return trace;
}

double default_time_step(const GridSpec& grid, const PotentialSpec& potential,
                         const PhysicalConstants& consts) {
    const auto V = potential.sample(grid);
    double vmax = 0.0;
    for (double v : V) vmax = std::max(vmax, std::abs(v));
    const double kmax = std::numbers::pi / grid.spacing();
    double dt = 0.5 / (consts.hbar * kmax * kmax / (2.0 * consts.mass));
    if (vmax > 0.0) dt = std::min(dt, 0.05 * consts.hbar / vmax);
    // Stay strictly inside both bounds.
    return 0.99 * dt;
}

AnalyticState AnalyticState::free_gaussian(double x0, double sigma0, double k) {
    AnalyticState s;
    s.kind = Kind::free_gaussian;
    s.x0 = x0;
    s.sigma0 = sigma0;
    s.k = k;
    s.validate();
    return s;
}

AnalyticState AnalyticState::harmonic_ground(double omega) {
    AnalyticState s;
    s.kind = Kind::harmonic_ground;
    s.omega = omega;
    s.validate();
    return s;
}

AnalyticState AnalyticState::harmonic_coherent(double omega, double x0) {
    AnalyticState s;
    s.kind = Kind::harmonic_coherent;
    s.omega = omega;
    s.x0 = x0;
    s.validate();
    return s;
}

void AnalyticState::validate() const {
    if (kind == Kind::free_gaussian && !(sigma0 > 0.0)) {
        throw ParameterError("free_gaussian: sigma0 must be positive");
    }
    if (kind != Kind::free_gaussian && !(omega > 0.0)) {
        throw ParameterError("harmonic state: omega must be positive");
    }
}

double AnalyticState::sigma_at(double t, const PhysicalConstants& consts) const {
    if (kind == Kind::free_gaussian) {
        const double tau = consts.hbar * t / (2.0 * consts.mass * sigma0 * sigma0);
        return sigma0 * std::sqrt(1.0 + tau * tau);
    }
    return std::sqrt(consts.hbar / (2.0 * consts.mass * omega));
}

double AnalyticState::mean_x_at(double t, const PhysicalConstants& consts) const {
    switch (kind) {
        case Kind::free_gaussian: return x0 + consts.hbar * k / consts.mass * t;
        case Kind::harmonic_ground: return 0.0;
        case Kind::harmonic_coherent: return x0 * std::cos(omega * t);
    }
    return 0.0;
}

Wavefunction analytic_state(const AnalyticState& state, const PhysicalConstants& consts, double t,
                            const GridSpec& grid) {
    state.validate();
    consts.validate();
    const double hbar = consts.hbar;
    const double m = consts.mass;
    std::vector<Complex> values(grid.size());
    const Complex I(0.0, 1.0);
    switch (state.kind) {
        case AnalyticState::Kind::free_gaussian: {
            const double s0 = state.sigma0;
            const Complex alpha(1.0, hbar * t / (2.0 * m * s0 * s0));
            const double vel = hbar * state.k / m;
            const double omega_k = hbar * state.k * state.k / (2.0 * m);
            const Complex pref = std::pow(2.0 * std::numbers::pi * s0 * s0, -0.25) / std::sqrt(alpha);
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const double x = grid.x(i);
                const double d = x - state.x0 - vel * t;
                const Complex expo = -d * d / (4.0 * s0 * s0 * alpha) + I * (state.k * (x - state.x0) - omega_k * t);
                values[i] = pref * std::exp(expo);
            }
            break;
        }
        case AnalyticState::Kind::harmonic_ground:
        case AnalyticState::Kind::harmonic_coherent: {
            const double w = state.omega;
            const double x0 = state.kind == AnalyticState::Kind::harmonic_ground ? 0.0 : state.x0;
            const double xc = x0 * std::cos(w * t);
            const double pc = -m * w * x0 * std::sin(w * t);
            const double pref = std::pow(m * w / (std::numbers::pi * hbar), 0.25);
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const double x = grid.x(i);
                const double d = x - xc;
                const double phase = (pc * x - 0.5 * pc * xc) / hbar - 0.5 * w * t;
                values[i] = std::polar(pref * std::exp(-m * w * d * d / (2.0 * hbar)), phase);
            }
            break;
        }
    }
    return Wavefunction(grid, std::move(values)).normalized();
}

double fidelity(const Wavefunction& a, const Wavefunction& b) {
    if (!(a.grid == b.grid) || a.size() != b.size()) throw ShapeError("fidelity: states on different grids");
    const std::size_t n = a.size();
    Complex overlap{};
    for (std::size_t i = 0; i < n; ++i) {
        const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
        overlap += w * std::conj(a.values[i]) * b.values[i];
    }
    overlap *= a.grid.spacing();
    const double na = a.norm();
    const double nb = b.norm();
    if (!(na > 0.0) || !(nb > 0.0)) throw DegenerateStateError("fidelity: zero state");
    return std::min(1.0, std::abs(overlap) / std::sqrt(na * nb));
}

}  // namespace qtraj
