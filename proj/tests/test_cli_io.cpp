#include "qtraj/config.hpp"
#include "qtraj/errors.hpp"
#include "qtraj/output.hpp"
#include "qtraj/pipeline.hpp"
#include "qtraj/scenarios.hpp"

#include "doctest.h"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <sys/wait.h>

using namespace qtraj;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("qtraj_unit_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> violations_of(const json& doc) {
    try {
        (void)parse_config_json(doc);
    } catch (const ConfigError& e) {
        return e.violations();
    }
    return {};
}

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
    return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

SimConfig short_free_run() {
    return parse_config_json({{"scenario", "free_gaussian"},
                              {"time", {{"dt", 1e-3}, {"t_final", 0.1}, {"output_every", 20}}}});
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(QTRAJ_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("a minimal configuration is filled from the scenario") {
    const auto cfg = parse_config_json(json::object());
    CHECK(cfg.scenario == "free_gaussian");
    CHECK(cfg.constants.hbar == 1.0);
    CHECK(cfg.grid.size() == 512);
    CHECK(cfg.labels.size() == 401);
    CHECK(cfg.solver.stencil_order == 4);
    CHECK(cfg.solver.node_floor == 1e-12);
    CHECK(cfg.tolerance("fidelity_min") == 0.999);
    CHECK(cfg.resolved["grid"]["points"] == 512);

    const auto trap = parse_config_json({{"scenario", "harmonic_ground"}, {"potential", {{"omega", 2.0}}}});
    CHECK(trap.potential.kind() == PotentialSpec::Kind::harmonic);
    CHECK(trap.potential.omega() == 2.0);
}

TEST_CASE("configuration violations are collected with their paths") {
    const auto wide = violations_of({{"labels", {{"a_min", -25.0}, {"a_max", 25.0}, {"count", 101}}}});
    CHECK(mentions(wide, "labels.a_min"));
    CHECK(mentions(wide, "grid.x_min"));
    CHECK(mentions(wide, "labels.a_max"));
    CHECK(mentions(wide, "grid.x_max"));

    const auto typo = violations_of({{"grid", {{"pointz", 64}}}, {"colour", "red"}});
    CHECK(mentions(typo, "grid.pointz"));
    CHECK(mentions(typo, "'colour'"));

    const auto many = violations_of({{"time", {{"dt", -1.0}}}, {"solver", {{"stencil_order", 5}}}});
    CHECK(many.size() >= 2);
    CHECK(mentions(many, "time.dt"));
    CHECK(mentions(many, "solver.stencil_order"));

    CHECK(mentions(violations_of({{"scenario", "nope"}}), "unknown scenario"));
    CHECK(mentions(violations_of({{"potential", {{"kind", "tabulated"}, {"file", "/nonexistent/v.csv"}}}}),
                   "potential.file"));
    CHECK_THROWS_AS(parse_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("scenario registry") {
    std::set<std::string> names;
    for (const auto& s : scenario_registry()) {
        names.insert(s.name);
        CHECK_NOTHROW(parse_config_json({{"scenario", s.name}}));
    }
    CHECK(names == std::set<std::string>{"free_gaussian", "harmonic_ground", "harmonic_coherent", "boosted_gaussian",
                                         "two_gaussian_superposition", "tabulated_barrier"});
    CHECK(find_scenario("missing") == nullptr);
}

TEST_CASE("number formatting") {
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(-2.0) == "-2");
    CHECK(format_number(std::nan("")) == "nan");
    CHECK(format_number(-HUGE_VAL) == "-inf");
    CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("empty traces give header-only files") {
    const auto dir = scratch("empty");
    OutputDir out(dir);
    write_trajectories_csv(out.file("trajectories.csv"), {}, 4);
    write_fields_csv(out.file("fields.csv"), {});
    write_protective_csv(out.file("protective.csv"), {});
    CHECK(slurp(dir / "trajectories.csv") == "t,a,q,qdot,jacobian,rho\n");
    CHECK(slurp(dir / "fields.csv") == "t,x,re_psi,im_psi,rho,S,v,vq,mask\n");
    CHECK(slurp(dir / "protective.csv") == "x,shift_density,shift_current,T\n");
}

TEST_CASE("identical runs write identical data and a complete manifest") {
    const auto cfg = short_free_run();
    const auto a = scratch("det_a"), b = scratch("det_b");
    const auto ra = run_pipeline(cfg, Mode::reconstruct, a);
    const auto rb = run_pipeline(cfg, Mode::reconstruct, b);
    CHECK(ra.status == RunReport::Status::ok);
    CHECK(exit_code(rb) == 0);
    for (const char* f : {"trajectories.csv", "fields.csv", "config.json"}) {
        REQUIRE(fs::exists(a / f));
        CHECK(slurp(a / f) == slurp(b / f));
    }

    const auto manifest = json::parse(slurp(a / "manifest.json"));
    std::set<std::string> listed;
    for (const auto& e : manifest["files"]) {
        listed.insert(e["path"].get<std::string>());
        CHECK(e["sha256"].get<std::string>() == sha256_file(a / e["path"].get<std::string>()));
        CHECK(e["bytes"].get<std::uintmax_t>() == fs::file_size(a / e["path"].get<std::string>()));
    }
    for (const auto& entry : fs::directory_iterator(a)) {
        const auto name = entry.path().filename().string();
        if (name != "manifest.json") CHECK(listed.count(name) == 1);
    }
}

TEST_CASE("pipeline modes report their metrics") {
    SUBCASE("compare on the free packet") {
        auto cfg = short_free_run();
        const auto r = run_pipeline(cfg, Mode::compare, scratch("compare"));
        CHECK(r.status == RunReport::Status::ok);
        CHECK(r.metric("fidelity_min") >= 0.999);
        CHECK(r.checks_passed());
    }
    SUBCASE("protective on the ground state") {
        const auto cfg = parse_config_json({{"scenario", "harmonic_ground"}});
        const auto r = run_pipeline(cfg, Mode::protective, scratch("protective"));
        CHECK(r.metrics.count("recovered_fidelity") == 1);
        CHECK(r.metric("recovered_fidelity") >= 0.9999);
    }
    SUBCASE("a failing run still reports the stage") {
        const auto cfg = parse_config_json({{"scenario", "two_gaussian_superposition"}});
        const auto dir = scratch("abort");
        const auto r = run_pipeline(cfg, Mode::trajectories, dir);
        CHECK(r.status == RunReport::Status::aborted);
        CHECK(exit_code(r) == 3);
        CHECK(r.failed_stage == "trajectories");
        const auto doc = json::parse(slurp(dir / "report.json"));
        CHECK(doc["status"] == "aborted");
        CHECK(doc["failed_stage"] == "trajectories");
        CHECK(fs::exists(dir / "diagnostic_snapshot.csv"));
    }
}

TEST_CASE("exit codes") {
    RunReport r;
    CHECK(exit_code(r) == 0);
    r.status = RunReport::Status::config_error;
    CHECK(exit_code(r) == 2);
    r.status = RunReport::Status::aborted;
    CHECK(exit_code(r) == 3);
    r.status = RunReport::Status::acceptance_failed;
    CHECK(exit_code(r) == 4);
    r.status = RunReport::Status::error;
    CHECK(exit_code(r) == 1);
}

TEST_CASE("command line") {
    const auto dir = scratch("cli");
    fs::create_directories(dir);
    CHECK(run_cli("scenarios") == 0);
    CHECK(run_cli("scenarios --show harmonic_ground") == 0);
    CHECK(run_cli("frobnicate") == 2);

    std::ofstream(dir / "bad.json") << R"({"grid": {"x_min": 5, "x_max": -5}, "bogus": 1})";
    CHECK(run_cli("trajectories --config " + (dir / "bad.json").string() + " --out " + (dir / "bad").string()) == 2);
    const auto report = json::parse(slurp(dir / "bad" / "report.json"));
    CHECK(report["status"] == "config_error");
    CHECK(report["failed_stage"] == "config");

    std::ofstream(dir / "tiny.json") << R"({"time": {"dt": 0.001, "t_final": 0.05, "output_every": 10}})";
    CHECK(run_cli("trajectories --quiet --seed 7 --config " + (dir / "tiny.json").string() + " --out " +
                  (dir / "ok").string()) == 0);
    CHECK(json::parse(slurp(dir / "ok" / "report.json"))["seed"] == 7);
}
