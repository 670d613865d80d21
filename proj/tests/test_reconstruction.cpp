#include "qtraj/errors.hpp"
#include "qtraj/reconstruction.hpp"
#include "qtraj/reference_solver.hpp"

#include "doctest.h"
#include "support.hpp"

#include <cmath>
#include <memory>
#include <numbers>

using namespace qtraj;

namespace {

TrajectoryEnsemble scaled_ensemble(double c) {
    const LabelGrid labels(-6, 6, 401);
    TrajectoryEnsemble e;
    e.labels = labels;
    std::vector<double> r0(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        e.q.push_back(c * labels.a(i));
        r0[i] = test::gaussian_density(labels.a(i), 0.0, 1.0);
    }
    e.qdot.assign(labels.size(), 0.0);
    e.action.assign(labels.size(), 0.0);
    e.rho0 = std::make_shared<const std::vector<double>>(std::move(r0));
    return e;
}

struct FreeRun {
    GridSpec grid{-20, 20, 512};
    TrajectoryEnsemble start;
    LagrangianRun run;
};

const FreeRun& free_run() {
    static const FreeRun r = [] {
        FreeRun f;
        const auto psi0 = test::gaussian_packet(GridSpec(-20, 20, 1024), 0.0, 1.0, 0.0);
        f.start = init_from_wavefunction(psi0, LabelGrid(-6, 6, 401), {});
        f.run = evolve(f.start, PotentialSpec::free(), 1e-3, 1.0, 50);
        return f;
    }();
    return r;
}

}  // namespace

TEST_CASE("fields of the identity and of a dilation") {
    const GridSpec g(-5, 5, 201);
    const auto id = fields_from_trajectories(scaled_ensemble(1.0), g);
    CHECK(id.supported_count() == g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.x(i);
        CHECK(id.rho[i] == doctest::Approx(test::gaussian_density(x, 0, 1)).epsilon(1e-8));
        CHECK(std::abs(id.v[i]) < 1e-15);
        CHECK(std::abs(id.Q[i] - x) < 1e-12);
    }
    const GridSpec wide(-15, 15, 301);
    const auto dil = fields_from_trajectories(scaled_ensemble(2.0), wide);
    for (std::size_t i = 0; i < wide.size(); ++i) {
        const double x = wide.x(i);
        CHECK((dil.support_mask[i] != 0) == (std::abs(x) <= 12.0));
        if (!dil.support_mask[i]) {
            CHECK(dil.rho[i] == 0.0);
            continue;
        }
        CHECK(std::abs(dil.Q[i] - x / 2) < 1e-12);
        CHECK(dil.rho[i] == doctest::Approx(test::gaussian_density(x / 2, 0, 1) / 2).epsilon(1e-8));
        CHECK(dil.jacobian[i] == doctest::Approx(2.0).epsilon(1e-11));
    }
}

TEST_CASE("map inversion is consistent on the labels") {
    const auto& e = free_run().run.frames.back();
    // A grid whose points are exactly the trajectory positions is not
    // uniform, so probe through a fine grid and the interpolant instead.
    const GridSpec g(e.q.front(), e.q.back(), 4001);
    const auto f = fields_from_trajectories(e, g);
    const CubicHermite Q(g.points(), f.Q);
    for (std::size_t i = 0; i < e.size(); i += 7) CHECK(std::abs(Q(e.q[i]) - e.labels.a(i)) < 1e-8);
}

TEST_CASE("round trip at initialization") {
    const GridSpec g(-10, 10, 512);
    for (double k : {0.0, 1.5}) {
        const auto psi = test::gaussian_packet(g, 0.3, 1.0, k).normalized();
        const auto e = init_from_wavefunction(psi, LabelGrid(-6, 6, 401), {});
        CHECK(fidelity(reconstruct_wavefunction(e, g), psi) >= 1.0 - 1e-8);
    }
}

TEST_CASE("reconstruction of the evolved free packet") {
    const auto& r = free_run();
    REQUIRE(r.run.ok());
    const auto& e = r.run.frames.back();
    const auto f = fields_from_trajectories(e, r.grid);
    CHECK(trapezoid(f.rho, r.grid.spacing()) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(label_density_residual(f, e) < 1e-6);

    // v against (1/m) dS/dx of the reconstructed phase, on the core of the support
    const auto S = reconstructed_phase(e, f);
    std::vector<double> grad(S.size());
    const double h = r.grid.spacing();
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < S.size(); ++i) {
        if (!f.support_mask[i - 1] || !f.support_mask[i + 1] || std::abs(r.grid.x(i)) > 6.0) continue;
        worst = std::max(worst, std::abs((S[i + 1] - S[i - 1]) / (2 * h) - f.v[i]));
    }
    CHECK(worst < 1e-3);

    const auto reference = analytic_state(AnalyticState::free_gaussian(0, 1, 0), {}, 1.0, r.grid);
    CHECK(fidelity(reconstruct_wavefunction(e, r.grid), reference) >= 0.999);
}

TEST_CASE("ground-state phase rotates at the zero-point energy") {
    const GridSpec g(-10, 10, 512);
    const auto psi0 = analytic_state(AnalyticState::harmonic_ground(1.0), {}, 0.0, g);
    const auto e0 = init_from_wavefunction(psi0, LabelGrid(-4.5, 4.5, 201), {});
    const auto run = evolve(e0, PotentialSpec::harmonic(1.0), 1e-3, 1.0, 1000);
    REQUIRE(run.ok());
    const auto& e1 = run.frames.back();
    const auto f0 = fields_from_trajectories(e0, g);
    const auto f1 = fields_from_trajectories(e1, g);
    const auto S0 = reconstructed_phase(e0, f0);
    const auto S1 = reconstructed_phase(e1, f1);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!f0.support_mask[i] || !f1.support_mask[i] || std::abs(g.x(i)) > 3.6) continue;
        CHECK(std::abs(S1[i] - S0[i] + 0.5) < 1e-5);
    }
}

TEST_CASE("kernel density estimate") {
    const GridSpec g(-8, 8, 801);
    const auto e = scaled_ensemble(1.0);
    auto err = [&](double b) {
        const auto k = kernel_density_estimate(e, g, b);
        double m = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (std::abs(g.x(i)) > 4.0) continue;
            m = std::max(m, std::abs(k.rho[i] - test::gaussian_density(g.x(i), 0, 1)));
        }
        return m;
    };
    const double e1 = err(0.2), e2 = err(0.1);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));

    SUBCASE("single label") {
        auto lone = scaled_ensemble(1.0);
        std::vector<double> r0(lone.size(), 0.0);
        r0[250] = 1.0 / lone.labels.spacing();
        lone.rho0 = std::make_shared<const std::vector<double>>(std::move(r0));
        const auto k = kernel_density_estimate(lone, g, 0.25);
        for (std::size_t i = 0; i < g.size(); ++i) {
            CHECK(k.rho[i] == doctest::Approx(test::gaussian_density(g.x(i), lone.q[250], 0.25)).epsilon(1e-12));
        }
    }
    SUBCASE("agrees with the interpolated fields") {
        const auto& r = free_run();
        const GridSpec fine(-12, 12, 1201);
        const double b = 0.1;
        const auto k = kernel_density_estimate(r.run.frames.back(), fine, b);
        const auto f = fields_from_trajectories(r.run.frames.back(), fine);
        std::vector<double> diff(fine.size());
        for (std::size_t i = 0; i < fine.size(); ++i) diff[i] = std::abs(k.rho[i] - f.rho[i]);
        CHECK(trapezoid(diff, fine.spacing()) < 5 * b * b);
    }
    CHECK_THROWS_AS(kernel_density_estimate(e, g, g.spacing()), ParameterError);
}

TEST_CASE("label advection residual") {
    SUBCASE("static ensemble") {
        const GridSpec g(-5, 5, 101);
        std::vector<ReconstructedFields> trace;
        for (int k = 0; k < 3; ++k) {
            auto e = scaled_ensemble(1.0);
            e.t = 0.1 * k;
            trace.push_back(fields_from_trajectories(e, g));
        }
        CHECK(advection_residual(trace) == 0.0);
    }
    SUBCASE("free packet, second order") {
        const auto& frames = free_run().run.frames;  // every 0.05
        auto residual = [&](std::size_t stride, std::size_t n) {
            const GridSpec g(-6, 6, n);
            std::vector<ReconstructedFields> trace;
            for (std::size_t k = 0; k < frames.size(); k += stride) trace.push_back(fields_from_trajectories(frames[k], g));
            return advection_residual(trace);
        };
        const double coarse = residual(4, 61), fine = residual(2, 121);
        CHECK(coarse / fine > 3.5);
    }
}

TEST_CASE("two momentum potentials agree") {
    const auto& frames = free_run().run.frames;
    const GridSpec g(-6, 6, 241);
    const auto before = fields_from_trajectories(frames[9], g);
    const auto at = fields_from_trajectories(frames[10], g);
    const auto after = fields_from_trajectories(frames[11], g);
    const auto P2 = momentum_potential_from_advection(before, at, after, 1.0);
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (std::isnan(P2[i])) continue;
        worst = std::max(worst, std::abs(P2[i] - at.P[i]));
        scale = std::max(scale, std::abs(at.P[i]));
    }
    CHECK(scale > 0.0);
    CHECK(worst / scale < 1e-3);
}
