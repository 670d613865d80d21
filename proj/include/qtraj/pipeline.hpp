#pragma once

#include "qtraj/config.hpp"

#include "json.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qtraj {

enum class Mode { reference, trajectories, reconstruct, compare, protective };

std::string mode_name(Mode m);
std::optional<Mode> parse_mode(const std::string& name);

struct Check {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool upper_bound = true;  // value <= threshold passes; otherwise value >= threshold
    bool passed = false;
};

struct RunReport {
    enum class Status { ok, config_error, aborted, acceptance_failed, error };

    std::string mode;
    std::string scenario;
    Status status = Status::ok;
    std::string failed_stage;
    std::string message;
    std::map<std::string, double> metrics;
    std::vector<Check> checks;
    std::vector<std::pair<std::string, double>> timings;  // seconds per stage, in run order
    std::optional<long long> seed;

    void check_at_most(const std::string& name, double value, double threshold);
    void check_at_least(const std::string& name, double value, double threshold);
    bool checks_passed() const;
    double metric(const std::string& name) const;
    nlohmann::json to_json() const;
};

std::string status_name(RunReport::Status s);

// 0 success, 2 configuration error, 3 crossing or instability abort,
// 4 failed acceptance check in compare mode, 1 anything else.
int exit_code(const RunReport& report);

// Runs one mode and writes its artifacts plus report.json and
// manifest.json into out_dir. Solver failures are captured in the report
// with the stage that raised them; only I/O problems with out_dir itself
// escape as exceptions.
RunReport run_pipeline(const SimConfig& cfg, Mode mode, const std::filesystem::path& out_dir,
                       std::optional<long long> seed = {});

// report.json and manifest.json for a configuration that did not validate.
RunReport write_config_failure(const std::string& mode, const std::vector<std::string>& violations,
                               const std::filesystem::path& out_dir);

}  // namespace qtraj
