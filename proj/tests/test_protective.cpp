#include "qtraj/errors.hpp"
#include "qtraj/protective.hpp"

#include "doctest.h"
#include "support.hpp"

#include <cmath>
#include <numbers>

using namespace qtraj;

namespace {

std::vector<double> uniform_times(double T, std::size_t n) {
    std::vector<double> t(n);
    for (std::size_t k = 0; k < n; ++k) t[k] = T * static_cast<double>(k) / static_cast<double>(n - 1);
    return t;
}

EvolutionTrace ground_trace(const GridSpec& g, double T = 2.0, std::size_t n = 201) {
    const auto V = PotentialSpec::harmonic(1.0);
    const auto psi0 = analytic_state(AnalyticState::harmonic_ground(1.0), {}, 0.0, g);
    const std::size_t steps = (n - 1) * 20;
    return split_step_evolve(psi0, V, {}, T / static_cast<double>(steps), T, 20);
}

}  // namespace

TEST_CASE("coupling profiles have unit weight") {
    for (const char* name : {"uniform", "sine_squared", "triangle"}) {
        const auto p = CouplingProfile::by_name(name, 2.0);
        const auto t = uniform_times(2.0, 2001);
        std::vector<double> g(t.size());
        for (std::size_t k = 0; k < t.size(); ++k) g[k] = p.g(t[k]);
        CHECK(trapezoid(g, t[1] - t[0]) == doctest::Approx(1.0).epsilon(1e-10));
    }
    CHECK_THROWS_AS(CouplingProfile::by_name("boxcar", 1.0), ParameterError);
}

TEST_CASE("ground-state records") {
    const GridSpec g(-10, 10, 513);  // x = 0 is a grid point
    const auto trace = ground_trace(g);
    const auto before = trace.states.back().values;
    const auto rec = protective_run(trace, 0.0, CouplingProfile::uniform(2.0), {});
    CHECK(std::abs(rec.shift_density - 1.0 / std::sqrt(std::numbers::pi)) < 1e-6);
    CHECK(std::abs(rec.shift_current) < 1e-10);
    CHECK(rec.T == 2.0);
    CHECK(trace.states.back().values == before);

    CHECK_THROWS_AS(protective_run(trace, 0.01, CouplingProfile::uniform(2.0), {}), ParameterError);
    CHECK_THROWS_AS(protective_run(trace, 0.0, CouplingProfile::uniform(3.0), {}), ParameterError);
    CHECK_THROWS_AS(protective_run(trace, 10.0, CouplingProfile::uniform(2.0), {}), UnmeasurablePointError);
}

TEST_CASE("free packet record is the time-averaged density") {
    const GridSpec g(-20, 20, 1025);
    const double T = 2.0;
    const auto psi0 = analytic_state(AnalyticState::free_gaussian(0, 1, 0), {}, 0, g);
    const auto trace = split_step_evolve(psi0, PotentialSpec::free(), {}, 5e-3, T, 1);
    const auto rec = protective_run(trace, 0.0, CouplingProfile::uniform(T), {});
    // rho(0, t) = 1 / (sqrt(2 pi) sigma(t)) integrates in closed form
    const double oracle = 2.0 * std::asinh(T / 2.0) / (T * std::sqrt(2.0 * std::numbers::pi));
    CHECK(std::abs(rec.shift_density - oracle) < 1e-6);
}

TEST_CASE("stationary records do not depend on the coupling shape") {
    const GridSpec g(-10, 10, 257);
    const auto trace = analytic_trace(AnalyticState::harmonic_ground(1.0), {}, g, uniform_times(2.0, 201));
    const auto base = protective_scan(trace, CouplingProfile::uniform(2.0), {});
    for (const char* name : {"sine_squared", "triangle"}) {
        const auto other = protective_scan(trace, CouplingProfile::by_name(name, 2.0), {});
        for (std::size_t i = 0; i < g.size(); ++i) {
            CHECK(std::abs(other[i].shift_density - base[i].shift_density) < 1e-10);
            CHECK(std::abs(other[i].shift_current - base[i].shift_current) < 1e-10);
        }
    }
}

TEST_CASE("state recovered from records") {
    const GridSpec g(-10, 10, 512);
    const LabelGrid labels(-4.5, 4.5, 201);
    const auto trace = ground_trace(g);
    const auto records = protective_scan(trace, CouplingProfile::uniform(2.0), {});
    const auto rec = state_from_records(records, g, labels, {});
    const auto truth = analytic_state(AnalyticState::harmonic_ground(1.0), {}, 0, g);
    CHECK(fidelity(rec.psi, truth) >= 0.9999);

    std::vector<ProtectiveRecord> still(records);
    for (auto& r : still) r.shift_current = 0.0;
    const auto real = state_from_records(still, g, labels, {});
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(real.psi.values[i].imag() == 0.0);
    const double period = 2.0 * std::numbers::pi;
    const auto run = evolve(rec.ensemble, PotentialSpec::harmonic(1.0), period / 6000, period, 1000);
    REQUIRE(run.ok());
    double drift = 0.0;
    for (const auto& f : run.frames) {
        for (std::size_t i = 0; i < f.size(); ++i) drift = std::max(drift, std::abs(f.q[i] - f.labels.a(i)));
    }
    CHECK(drift < 1e-5);

    std::vector<ProtectiveRecord> empty(records);
    for (auto& r : empty) r.shift_density = r.shift_current = 0.0;
    CHECK_THROWS_AS(state_from_records(empty, g, labels, {}), ReconstructionError);
}
