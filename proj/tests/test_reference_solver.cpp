#include "qtraj/errors.hpp"
#include "qtraj/observables.hpp"
#include "qtraj/reference_solver.hpp"

#include "doctest.h"
#include "support.hpp"

#include <cmath>
#include <numbers>

using namespace qtraj;

namespace {

double moment(const Wavefunction& psi, int power, double centre = 0.0) {
    std::vector<double> f(psi.size());
    const auto rho = psi.density();
    for (std::size_t i = 0; i < psi.size(); ++i) f[i] = std::pow(psi.grid.x(i) - centre, power) * rho[i];
    return trapezoid(f, psi.grid.spacing());
}

double max_error(const Wavefunction& a, const Wavefunction& b) {
    double e = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a.values[i] - b.values[i]));
    return e;
}

}  // namespace

TEST_CASE("harmonic ground state keeps its modulus") {
    const GridSpec g(-10, 10, 512);
    const PhysicalConstants c;
    const auto V = PotentialSpec::harmonic(1.0);
    const auto psi0 = analytic_state(AnalyticState::harmonic_ground(1.0), c, 0.0, g);
    const double T = 2.0 * std::numbers::pi;
    const auto steps = 8 * static_cast<std::size_t>(std::ceil(T / default_time_step(g, V, c) / 8));
    const auto trace = split_step_evolve(psi0, V, c, T / static_cast<double>(steps), T, steps / 8);
    REQUIRE(trace.size() == 9);
    for (const auto& s : trace.states) {
        for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(std::abs(s.values[i]) - std::abs(psi0.values[i])) < 1e-8);
    }
    const auto e0 = expectations_wave(trace.states.front(), V, c);
    const auto e1 = expectations_wave(trace.states.back(), V, c);
    CHECK(std::abs(e1.total - e0.total) / std::abs(e0.total) < 1e-8);
    CHECK(std::abs(trace.states.back().norm() - trace.states.front().norm()) < 1e-10);
}

TEST_CASE("free packet spreads by the analytic law") {
    const GridSpec g(-20, 20, 512);
    const PhysicalConstants c;
    const auto psi0 = test::gaussian_packet(g, 0.0, 1.0, 0.0);
    const auto trace = split_step_evolve(psi0, PotentialSpec::free(), c, 1e-3, 2.0, 500);
    const auto& last = trace.states.back();
    CHECK(std::abs(moment(last, 2) - 2.0) < 1e-4);
    CHECK(std::abs(last.norm() - 1.0) < 1e-10);
}

TEST_CASE("boosted free packet drifts at its group velocity") {
    const GridSpec g(-20, 20, 1024);
    const auto psi0 = test::gaussian_packet(g, -4.0, 1.0, 3.0);
    const auto trace = split_step_evolve(psi0, PotentialSpec::free(), {}, 1e-3, 2.0, 500);
    const double x0 = moment(trace.states.front(), 1);
    for (std::size_t k = 0; k < trace.size(); ++k) {
        CHECK(std::abs(moment(trace.states[k], 1) - (x0 + 3.0 * trace.times[k])) < 1e-4);
    }
}

TEST_CASE("Strang splitting is second order in dt") {
    const GridSpec g(-10, 10, 512);
    const PhysicalConstants c;
    const auto V = PotentialSpec::harmonic(1.0);
    const auto state = AnalyticState::harmonic_coherent(1.0, 1.5);
    const auto psi0 = analytic_state(state, c, 0.0, g);
    auto err = [&](double dt) {
        const auto tr = split_step_evolve(psi0, V, c, dt, 1.0, static_cast<std::size_t>(std::lround(1.0 / dt)));
        return max_error(tr.states.back(), analytic_state(state, c, 1.0, g));
    };
    CHECK(err(0.02) / err(0.01) >= 3.5);
}

TEST_CASE("edge amplitude above threshold is a boundary leak") {
    const GridSpec g(-10, 10, 256);
    const auto psi0 = test::gaussian_packet(g, 4.0, 1.0, 5.0);
    CHECK_THROWS_AS(split_step_evolve(psi0, PotentialSpec::free(), {}, 1e-2, 2.0, 10), BoundaryLeakError);
}

TEST_CASE("analytic states") {
    const GridSpec g(-20, 20, 1024);
    const PhysicalConstants c;
    const auto free0 = analytic_state(AnalyticState::free_gaussian(0.5, 1.0, 1.0), c, 0.0, g);
    // The closed form carries its plane-wave phase as k (x - x0).
    auto direct = test::gaussian_packet(g, 0.5, 1.0, 1.0).normalized();
    for (auto& z : direct.values) z *= std::polar(1.0, -0.5);
    CHECK(max_error(free0, direct) < 1e-12);

    const auto spread = analytic_state(AnalyticState::free_gaussian(0.0, 1.0, 0.0), c, 2.0, g);
    CHECK(std::abs(moment(spread, 2) - 2.0) < 1e-10);

    const auto h0 = analytic_state(AnalyticState::harmonic_ground(1.0), c, 0.0, g);
    const auto hT = analytic_state(AnalyticState::harmonic_ground(1.0), c, 2.0 * std::numbers::pi, g);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(std::abs(h0.values[i]) - std::abs(hT.values[i])) < 1e-14);

    CHECK_THROWS_AS(AnalyticState::free_gaussian(0.0, -1.0, 0.0).validate(), ParameterError);
}

TEST_CASE("fidelity") {
    const GridSpec g(-15, 15, 1024);
    const auto a = test::gaussian_packet(g, -1.0, 1.0, 0.0);
    const auto b = test::gaussian_packet(g, 1.0, 1.0, 0.0);
    CHECK(fidelity(a, a) == doctest::Approx(1.0).epsilon(1e-14));
    std::vector<Complex> rotated(a.values);
    for (auto& z : rotated) z *= std::polar(1.0, 0.7);
    CHECK(fidelity(a, Wavefunction(g, rotated)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(fidelity(a, b) == doctest::Approx(std::exp(-0.5)).epsilon(1e-10));
    CHECK_THROWS_AS(fidelity(a, test::gaussian_packet(GridSpec(-15, 15, 512), 0, 1, 0)), ShapeError);
}
