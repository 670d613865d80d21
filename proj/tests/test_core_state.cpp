#include "qtraj/errors.hpp"
#include "qtraj/hydro.hpp"

#include "doctest.h"
#include "support.hpp"

#include <cmath>
#include <numbers>

using namespace qtraj;
using qtraj::test::gaussian_packet;

namespace {

// Spreading free packet centred at 0, hbar = m = 1, written out directly.
Wavefunction spreading_packet(const GridSpec& g, double sigma0, double t) {
    const Complex s = sigma0 * sigma0 * Complex(1.0, t / (2.0 * sigma0 * sigma0));
    const Complex pre = std::pow(2.0 * std::numbers::pi * sigma0 * sigma0, -0.25) * std::sqrt(sigma0 * sigma0 / s);
    std::vector<Complex> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.x(i);
        v[i] = pre * std::exp(-x * x / (4.0 * s));
    }
    return Wavefunction(g, std::move(v));
}

std::vector<HydroState> decompose_series(const GridSpec& g, double dt, int count) {
    std::vector<HydroState> out;
    for (int k = 0; k < count; ++k) out.push_back(polar_decompose(spreading_packet(g, 1.0, 0.5 + dt * k), {}));
    return out;
}

}  // namespace

TEST_CASE("polar decomposition of a real Gaussian has no phase and no flow") {
    const GridSpec g(-10, 10, 401);
    const auto h = polar_decompose(gaussian_packet(g, 0.0, 1.0, 0.0), {});
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (h.mask[i]) continue;
        CHECK(h.S[i] == 0.0);
        CHECK(std::abs(h.v[i]) < 1e-14);
    }
}

TEST_CASE("plane-wave phase gives the boost velocity") {
    const GridSpec g(-10, 10, 801);
    const auto h = polar_decompose(gaussian_packet(g, 0.0, 1.0, 3.0), {});
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (std::abs(g.x(i)) > 5.0) continue;
        CHECK(h.v[i] == doctest::Approx(3.0).epsilon(1e-9));
    }
}

TEST_CASE("node mask matches the density floor around the sign change") {
    const GridSpec g(-10, 10, 400);  // no grid point sits exactly on the node
    std::vector<Complex> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.x(i);
        v[i] = std::exp(-0.5 * (x + 3) * (x + 3)) - std::exp(-0.5 * (x - 3) * (x - 3));
    }
    const Wavefunction psi = Wavefunction(g, v).normalized();
    const double floor = 1e-3;
    const auto h = polar_decompose(psi, {}, {4, floor});

    std::size_t sign_change = 0;
    for (std::size_t i = 1; i < g.size(); ++i) {
        if (psi.values[i - 1].real() * psi.values[i].real() < 0.0) sign_change = i;
    }
    REQUIRE(sign_change > 0);
    const auto rho = psi.density();
    const double peak = *std::max_element(rho.begin(), rho.end());
    std::size_t near_node = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK((h.mask[i] != 0) == (rho[i] < floor * peak));
        if (h.mask[i] && std::abs(g.x(i) - g.x(sign_change)) < 0.5) ++near_node;
    }
    CHECK(near_node > 0);
    CHECK(h.mask[sign_change]);
    CHECK(h.mask[sign_change - 1]);
}

TEST_CASE("recomposition reproduces psi up to one global phase") {
    const GridSpec g(-10, 10, 512);
    std::vector<Complex> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.x(i);
        v[i] = std::exp(-0.5 * (x + 2) * (x + 2)) * std::polar(1.0, 3.0 * x + 0.4 * x * x) +
               0.5 * std::exp(-0.5 * (x - 2) * (x - 2)) * std::polar(1.0, -2.0 * x);
    }
    const Wavefunction psi = Wavefunction(g, v).normalized();
    const auto h = polar_decompose(psi, {});
    const auto back = recompose(h, {});
    std::size_t ref = g.size() / 2;
    const Complex phase = psi.values[ref] / back.values[ref];
    CHECK(std::abs(std::abs(phase) - 1.0) < 1e-12);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (h.mask[i]) continue;
        CHECK(std::abs(back.values[i] * phase - psi.values[i]) < 1e-10);
    }
}

TEST_CASE("every point below the floor is a degenerate state") {
    const GridSpec g(0, 1, 32);
    std::vector<double> rho(g.size(), 0.0);
    CHECK_THROWS_AS(node_mask(rho, 1e-12), DegenerateStateError);
}

TEST_CASE("quantum potential closed forms") {
    const GridSpec g(-10, 10, 2001);
    const Mask none(g.size(), 0);

    SUBCASE("uniform density") {
        std::vector<double> rho(g.size(), 0.05);
        for (double q : quantum_potential(g, rho, none, {})) CHECK(std::abs(q) < 1e-12);
    }
    SUBCASE("unit Gaussian") {
        std::vector<double> rho(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) rho[i] = test::gaussian_density(g.x(i), 0.0, 1.0);
        const auto mask = node_mask(rho, 1e-12);
        const auto vq = quantum_potential(g, rho, mask, {});
        CHECK(vq[1000] == doctest::Approx(0.25).epsilon(1e-9));
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double x = g.x(i);
            if (std::abs(x) > 6.0) continue;
            CHECK(std::abs(vq[i] - 0.5 * (0.5 - x * x / 4.0)) < 1e-6);
        }
        // The scale drops out of ln(rho / max rho) up to rounding, which the
        // second-difference stencil amplifies by 1/dx^2.
        std::vector<double> scaled(rho);
        for (double& r : scaled) r *= 7.25;
        const auto vq2 = quantum_potential(g, scaled, mask, {});
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (mask[i]) continue;
            CHECK(std::abs(vq2[i] - vq[i]) <= 64.0 * 1e-16 * 50.0 / (g.spacing() * g.spacing()));
        }
    }
    SUBCASE("harmonic ground state cancels the trap") {
        std::vector<double> rho(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) rho[i] = test::gaussian_density(g.x(i), 0.0, std::sqrt(0.5));
        const auto mask = node_mask(rho, 1e-12);
        const auto vq = quantum_potential(g, rho, mask, {});
        for (std::size_t i = g.size() / 10; i < g.size() - g.size() / 10; ++i) {
            if (mask[i]) continue;
            const double x = g.x(i);
            CHECK(std::abs(vq[i] + 0.5 * x * x - 0.5) < 1e-6);
        }
    }
    SUBCASE("non-positive density at an unmasked point") {
        std::vector<double> rho(g.size(), 1.0);
        rho[500] = 0.0;
        CHECK_THROWS_AS(quantum_potential(g, rho, none, {}), DomainError);
    }
}

TEST_CASE("internal energy density") {
    const GridSpec g(-10, 10, 2001);
    const Mask none(g.size(), 0);
    std::vector<double> flat(g.size(), 0.05);
    for (double u : internal_energy_density(g, flat, none, {})) CHECK(std::abs(u) < 1e-12);

    std::vector<double> rho(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) rho[i] = test::gaussian_density(g.x(i), 0.0, 1.0);
    const auto mask = node_mask(rho, 1e-12);
    const auto U = internal_energy_density(g, rho, mask, {});
    std::vector<double> rhoU(g.size(), 0.0), fisher(g.size(), 0.0);
    std::vector<double> drho(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) drho[i] = -g.x(i) * rho[i];
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (mask[i]) continue;
        const double x = g.x(i);
        if (std::abs(x) < 6.0) CHECK(std::abs(U[i] - x * x / 8.0) < 1e-8);
        rhoU[i] = rho[i] * U[i];
        fisher[i] = drho[i] * drho[i] / rho[i] / 8.0;
    }
    const double a = trapezoid(rhoU, g.spacing());
    const double b = trapezoid(fisher, g.spacing());
    CHECK(a == doctest::Approx(0.125).epsilon(1e-6));
    CHECK(a == doctest::Approx(b).epsilon(1e-8));
}

TEST_CASE("hydrodynamic residuals") {
    SUBCASE("stationary eigenstate") {
        const GridSpec g(-8, 8, 401);
        std::vector<HydroState> s;
        std::vector<double> t;
        for (int k = 0; k < 4; ++k) {
            std::vector<Complex> v(g.size());
            for (std::size_t i = 0; i < g.size(); ++i) {
                v[i] = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * g.x(i) * g.x(i)) * std::polar(1.0, -0.5 * 0.1 * k);
            }
            s.push_back(polar_decompose(Wavefunction(g, v), {}));
            t.push_back(0.1 * k);
        }
        const auto r = hydro_residuals(t, s, PotentialSpec::harmonic(1.0), {});
        CHECK(r.continuity < 1e-12);
        CHECK(r.euler < 1e-6);
        CHECK(r.points > 0);
    }
    SUBCASE("free packet converges at second order") {
        auto run = [](std::size_t n, double dt) {
            const GridSpec g(-6, 6, n);
            const auto series = decompose_series(g, dt, 3);
            const std::vector<double> t{0.5, 0.5 + dt, 0.5 + 2 * dt};
            return hydro_residuals(t, series, PotentialSpec::free(), {}, 2);
        };
        const auto coarse = run(121, 0.04);
        const auto fine = run(241, 0.02);
        CHECK(coarse.continuity / fine.continuity > 3.5);
        CHECK(coarse.euler / fine.euler > 3.5);
    }
    SUBCASE("an injected density error is detected") {
        const GridSpec g(-6, 6, 241);
        auto series = decompose_series(g, 0.02, 3);
        const std::vector<double> t{0.5, 0.52, 0.54};
        const auto clean = hydro_residuals(t, series, PotentialSpec::free(), {});
        series[2].rho[120] *= 1.01;
        const auto dirty = hydro_residuals(t, series, PotentialSpec::free(), {});
        CHECK(dirty.continuity > 100.0 * clean.continuity);
    }
    SUBCASE("grid mismatch") {
        auto a = decompose_series(GridSpec(-6, 6, 241), 0.02, 2);
        a.push_back(polar_decompose(spreading_packet(GridSpec(-6, 6, 121), 1.0, 0.54), {}));
        const std::vector<double> t{0.5, 0.52, 0.54};
        CHECK_THROWS_AS(hydro_residuals(t, a, PotentialSpec::free(), {}), ShapeError);
    }
}
