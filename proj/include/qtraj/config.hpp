#pragma once

#include "qtraj/grid.hpp"
#include "qtraj/lagrangian.hpp"
#include "qtraj/potential.hpp"
#include "qtraj/reference_solver.hpp"

#include "json.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qtraj {

struct InitialStateSpec {
    enum class Kind { gaussian, harmonic_ground, harmonic_coherent, superposition };
    struct Component {
        double x0 = 0.0;
        double sigma = 1.0;
        double k = 0.0;
        double weight = 1.0;
    };

    Kind kind = Kind::gaussian;
    double x0 = 0.0;
    double sigma = 1.0;
    double k = 0.0;
    double omega = 1.0;
    std::vector<Component> components;
};

struct TimeSpec {
    double dt = 1e-3;
    double t_final = 1.0;
    std::size_t output_every = 100;
    // Split-step step; when absent the largest divisor of dt within the
    // solver's accuracy bound is used.
    std::optional<double> reference_dt;
};

struct SolverSpec {
    Integrator integrator = Integrator::velocity_verlet;
    int stencil_order = 4;
    double node_floor = 1e-12;
    bool smoothing = false;
};

struct ProtectiveSpec {
    double duration = 2.0;
    std::size_t snapshots = 201;
    std::string profile = "uniform";
    // Split-step step for the protocol trace. Profile independence is
    // only as good as the trace is stationary, and the splitting error in
    // |psi| falls as dt^2.
    std::optional<double> reference_dt;
    // Extra profiles whose records are compared against `profile`.
    std::vector<std::string> compare_profiles{"sine_squared", "triangle"};
};

struct SimConfig {
    std::string scenario;
    PhysicalConstants constants;
    PotentialSpec potential;
    InitialStateSpec initial_state;
    GridSpec grid;
    LabelGrid labels;
    TimeSpec time;
    SolverSpec solver;
    std::map<std::string, double> tolerances;
    ProtectiveSpec protective;
    // Fully resolved configuration, scenario defaults included.
    nlohmann::json resolved;

    LagrangianOptions lagrangian_options() const;
    FieldOptions field_options() const;
    double tolerance(const std::string& name) const;
};

// Threshold names accepted under "tolerances" with their defaults.
const std::map<std::string, double>& default_tolerances();

// Reads and validates a configuration file. Every violation is collected
// and reported together in a ConfigError, each prefixed by its field path.
SimConfig parse_config(const std::filesystem::path& path);

// Same, from an in-memory document; relative file references resolve
// against base_dir.
SimConfig parse_config_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});

// The initial wavefunction described by the configuration, normalized.
Wavefunction initial_wavefunction(const SimConfig& cfg);

// Closed-form solution for the configured state and potential, if there
// is one.
std::optional<AnalyticState> analytic_oracle(const SimConfig& cfg);

}  // namespace qtraj
