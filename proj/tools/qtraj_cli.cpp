// qtraj: run the reference solver, the trajectory solver, or both, from a
// JSON configuration.

#include "qtraj/config.hpp"
#include "qtraj/errors.hpp"
#include "qtraj/pipeline.hpp"
#include "qtraj/scenarios.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace {

struct CommonFlags {
    std::string config;
    std::string out = "qtraj_out";
    long long seed = 0;
    bool seed_given = false;
    bool quiet = false;
};

void print_summary(const qtraj::RunReport& r, std::ostream& os) {
    os << r.mode << " [" << r.scenario << "]: " << qtraj::status_name(r.status);
    if (!r.failed_stage.empty()) os << " in stage '" << r.failed_stage << "'";
    os << '\n';
    if (!r.message.empty()) os << "  " << r.message << '\n';
    for (const auto& [k, v] : r.metrics) os << "  " << k << " = " << v << '\n';
    for (const auto& c : r.checks) {
        os << "  check " << c.name << ": " << (c.passed ? "pass" : "FAIL") << " (" << c.value
           << (c.upper_bound ? " <= " : " >= ") << c.threshold << ")\n";
    }
}

int run_mode(const std::string& name, const CommonFlags& flags) {
    const auto mode = qtraj::parse_mode(name);
    qtraj::SimConfig cfg;
    try {
        cfg = flags.config.empty() ? qtraj::parse_config_json(nlohmann::json::object())
                                   : qtraj::parse_config(flags.config);
    } catch (const qtraj::ConfigError& e) {
        for (const auto& v : e.violations()) std::cerr << "config error: " << v << '\n';
        try {
            qtraj::write_config_failure(name, e.violations(), flags.out);
        } catch (const std::exception& io) {
            std::cerr << io.what() << '\n';
        }
        return 2;
    }
    std::optional<long long> seed;
    if (flags.seed_given) seed = flags.seed;
    qtraj::RunReport report;
    try {
        report = qtraj::run_pipeline(cfg, *mode, flags.out, seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    if (!flags.quiet || report.status != qtraj::RunReport::Status::ok) {
        print_summary(report, report.status == qtraj::RunReport::Status::ok ? std::cout : std::cerr);
    }
    return qtraj::exit_code(report);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum trajectory congruence solver"};
    app.require_subcommand(1);
    CommonFlags flags;

    const char* modes[][2] = {
        {"reference", "split-step propagation of the wavefunction"},
        {"trajectories", "evolve the trajectory congruence"},
        {"reconstruct", "evolve trajectories and rebuild the wavefunction"},
        {"compare", "run both solvers and check agreement (exit 4 on failure)"},
        {"protective", "simulate protective measurement records and recover the state"},
    };
    for (const auto& m : modes) {
        auto* sub = app.add_subcommand(m[0], m[1]);
        sub->add_option("--config", flags.config, "JSON configuration file")->check(CLI::ExistingFile);
        sub->add_option("--out", flags.out, "output directory")->capture_default_str();
        sub->add_option("--seed", flags.seed, "reserved; recorded in the report")
            ->each([&](const std::string&) { flags.seed_given = true; });
        sub->add_flag("--quiet", flags.quiet, "print nothing on success");
    }
    auto* list = app.add_subcommand("scenarios", "list built-in scenarios");
    std::string show;
    list->add_option("--show", show, "print the default configuration of one scenario");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (list->parsed()) {
        if (!show.empty()) {
            const auto* s = qtraj::find_scenario(show);
            if (!s) {
                std::cerr << "unknown scenario '" << show << "'\n";
                return 2;
            }
            nlohmann::json doc = s->defaults;
            doc["scenario"] = s->name;
            std::cout << doc.dump(2) << '\n';
            return 0;
        }
        for (const auto& s : qtraj::scenario_registry()) std::cout << s.name << "  " << s.description << '\n';
        return 0;
    }
    for (const auto* sub : app.get_subcommands()) return run_mode(sub->get_name(), flags);
    return 1;
}
