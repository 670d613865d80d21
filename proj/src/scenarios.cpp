#include "qtraj/scenarios.hpp"

#include <algorithm>
#include <numbers>

namespace qtraj {

namespace {

using nlohmann::json;

json gaussian(double x0, double sigma, double k) {
    return {{"kind", "gaussian"}, {"x0", x0}, {"sigma", sigma}, {"k", k}};
}

json grid(double lo, double hi, int points) { return {{"x_min", lo}, {"x_max", hi}, {"points", points}}; }

json labels(double lo, double hi, int count) { return {{"a_min", lo}, {"a_max", hi}, {"count", count}}; }

json time(double dt, double t_final, int output_every) {
    return {{"dt", dt}, {"t_final", t_final}, {"output_every", output_every}};
}

std::vector<Scenario> build() {
    const double pi = std::numbers::pi;
    std::vector<Scenario> s;
    s.push_back({"free_gaussian", "spreading Gaussian packet, sigma0 = 1, at rest",
                 {{"potential", {{"kind", "free"}}},
                  {"initial_state", gaussian(0.0, 1.0, 0.0)},
                  {"grid", grid(-20.0, 20.0, 512)},
                  {"labels", labels(-6.0, 6.0, 401)},
                  {"time", time(1e-3, 1.0, 100)}}});
    s.push_back({"harmonic_ground", "oscillator ground state over three periods (stationary congruence)",
                 {{"potential", {{"kind", "harmonic"}, {"omega", 1.0}}},
                  {"initial_state", {{"kind", "harmonic_ground"}, {"omega", 1.0}}},
                  {"grid", grid(-10.0, 10.0, 512)},
                  {"labels", labels(-4.5, 4.5, 201)},
                  {"time", time(6.0 * pi / 18850.0, 6.0 * pi, 1885)},
                  {"protective", {{"reference_dt", 5e-5}}}}});
    s.push_back({"harmonic_coherent", "displaced ground state oscillating rigidly for one period",
                 {{"potential", {{"kind", "harmonic"}, {"omega", 1.0}}},
                  {"initial_state", {{"kind", "harmonic_coherent"}, {"omega", 1.0}, {"x0", 1.0}}},
                  {"grid", grid(-10.0, 10.0, 512)},
                  {"labels", labels(-3.5, 5.5, 201)},
                  {"time", time(2.0 * pi / 6280.0, 2.0 * pi, 628)}}});
    s.push_back({"boosted_gaussian", "Gaussian packet moving with k = 2",
                 {{"potential", {{"kind", "free"}}},
                  {"initial_state", gaussian(-2.0, 1.0, 2.0)},
                  {"grid", grid(-20.0, 20.0, 512)},
                  {"labels", labels(-8.0, 4.0, 401)},
                  {"time", time(1e-3, 2.0, 100)}}});
    s.push_back({"two_gaussian_superposition",
                 "two packets launched toward each other; interference nodes break the congruence",
                 {{"potential", {{"kind", "free"}}},
                  {"initial_state",
                   {{"kind", "superposition"},
                    {"components",
                     json::array({{{"x0", -4.0}, {"sigma", 1.0}, {"k", 3.0}, {"weight", 1.0}},
                                  {{"x0", 4.0}, {"sigma", 1.0}, {"k", -3.0}, {"weight", 1.0}}})}}},
                  {"grid", grid(-20.0, 20.0, 1024)},
                  {"labels", labels(-8.0, 8.0, 401)},
                  {"time", time(1e-3, 3.0, 50)}}});
    s.push_back({"tabulated_barrier", "packet approaching a tabulated Gaussian barrier",
                 {{"potential", {{"kind", "barrier"}, {"height", 2.0}, {"width", 0.5}, {"center", 0.0}}},
                  {"initial_state", gaussian(-6.0, 1.0, 2.0)},
                  {"grid", grid(-25.0, 25.0, 1024)},
                  {"labels", labels(-12.0, 0.0, 401)},
                  {"time", time(1e-3, 1.5, 50)}}});
    return s;
}

}  // namespace

const std::vector<Scenario>& scenario_registry() {
    static const std::vector<Scenario> registry = build();
    return registry;
}

const Scenario* find_scenario(const std::string& name) {
    const auto& r = scenario_registry();
    const auto it = std::find_if(r.begin(), r.end(), [&](const Scenario& s) { return s.name == name; });
    return it == r.end() ? nullptr : &*it;
}

}  // namespace qtraj
