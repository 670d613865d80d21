#include "qtraj/pipeline.hpp"

#include "qtraj/errors.hpp"
#include "qtraj/hydro.hpp"
#include "qtraj/observables.hpp"
#include "qtraj/output.hpp"
#include "qtraj/protective.hpp"
#include "qtraj/reconstruction.hpp"
#include "qtraj/reference_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <tuple>

namespace qtraj {

std::string mode_name(Mode m) {
    switch (m) {
        case Mode::reference: return "reference";
        case Mode::trajectories: return "trajectories";
        case Mode::reconstruct: return "reconstruct";
        case Mode::compare: return "compare";
        case Mode::protective: return "protective";
    }
    return "unknown";
}

std::optional<Mode> parse_mode(const std::string& name) {
    for (Mode m : {Mode::reference, Mode::trajectories, Mode::reconstruct, Mode::compare, Mode::protective}) {
        if (mode_name(m) == name) return m;
    }
    return std::nullopt;
}

std::string status_name(RunReport::Status s) {
    switch (s) {
        case RunReport::Status::ok: return "ok";
        case RunReport::Status::config_error: return "config_error";
        case RunReport::Status::aborted: return "aborted";
        case RunReport::Status::acceptance_failed: return "acceptance_failed";
        case RunReport::Status::error: return "error";
    }
    return "error";
}

void RunReport::check_at_most(const std::string& name, double value, double threshold) {
    checks.push_back({name, value, threshold, true, value <= threshold});
}

void RunReport::check_at_least(const std::string& name, double value, double threshold) {
    checks.push_back({name, value, threshold, false, value >= threshold});
}

bool RunReport::checks_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

double RunReport::metric(const std::string& name) const {
    const auto it = metrics.find(name);
    if (it == metrics.end()) throw ParameterError("report has no metric '" + name + "'");
    return it->second;
}

nlohmann::json RunReport::to_json() const {
    using nlohmann::json;
    auto num = [](double x) -> json { return std::isfinite(x) ? json(x) : json(format_number(x)); };
    json m = json::object();
    for (const auto& [k, v] : metrics) m[k] = num(v);
    json c = json::object();
    for (const auto& ch : checks) {
        c[ch.name] = {{"value", num(ch.value)},
                      {"threshold", num(ch.threshold)},
                      {"bound", ch.upper_bound ? "max" : "min"},
                      {"passed", ch.passed}};
    }
    json t = json::object();
    for (const auto& [k, v] : timings) t[k] = v;
    json doc = {{"mode", mode},       {"scenario", scenario}, {"status", status_name(status)},
                {"metrics", m},       {"checks", c},          {"all_checks_passed", checks_passed()},
                {"timings_s", t}};
    if (!failed_stage.empty()) doc["failed_stage"] = failed_stage;
    if (!message.empty()) doc["message"] = message;
    doc["seed"] = seed ? json(*seed) : json(nullptr);
    return doc;
}

int exit_code(const RunReport& report) {
    switch (report.status) {
        case RunReport::Status::ok: return 0;
        case RunReport::Status::config_error: return 2;
        case RunReport::Status::aborted: return 3;
        case RunReport::Status::acceptance_failed: return 4;
        case RunReport::Status::error: return 1;
    }
    return 1;
}

namespace {

class StageClock {
public:
    StageClock(RunReport& report, std::string& current, std::string name)
        : report_(report), name_(std::move(name)), start_(std::chrono::steady_clock::now()) {
        current = name_;
    }
    ~StageClock() {
        const std::chrono::duration<double> d = std::chrono::steady_clock::now() - start_;
        report_.timings.emplace_back(name_, d.count());
    }

private:
    RunReport& report_;
    std::string name_;
    std::chrono::steady_clock::time_point start_;
};

struct ReferenceRun {
    EvolutionTrace trace;
    double dt = 0.0;
};

// Split-step step: the configured one, or dt divided into the fewest equal
// parts that meet the accuracy bound, so both solvers share output times.
double reference_step(const SimConfig& cfg, double outer_dt, std::size_t& substeps,
                      const std::optional<double>& fixed, const char* key = "time.reference_dt") {
    if (fixed) {
        const double ratio = outer_dt / *fixed;
        substeps = static_cast<std::size_t>(std::llround(ratio));
        if (substeps == 0 || std::abs(ratio - static_cast<double>(substeps)) > 1e-6) {
            throw ParameterError(std::string(key) + " must divide the output spacing evenly");
        }
        return *fixed;
    }
    const double bound = default_time_step(cfg.grid, cfg.potential, cfg.constants);
    substeps = static_cast<std::size_t>(std::max(1.0, std::ceil(outer_dt / bound)));
    return outer_dt / static_cast<double>(substeps);
}

ReferenceRun run_reference(const SimConfig& cfg, const Wavefunction& psi0, RunReport& report) {
    std::size_t sub = 1;
    ReferenceRun r;
    r.dt = reference_step(cfg, cfg.time.dt, sub, cfg.time.reference_dt);
    r.trace = split_step_evolve(psi0, cfg.potential, cfg.constants, r.dt, cfg.time.t_final, cfg.time.output_every * sub);
    const double n0 = r.trace.states.front().norm();
    double drift = 0.0;
    for (const auto& s : r.trace.states) drift = std::max(drift, std::abs(s.norm() - n0));
    report.metrics["reference_dt"] = r.dt;
    report.metrics["reference_norm_drift"] = drift;
    report.check_at_most("reference_norm_drift", drift, cfg.tolerance("norm_drift"));
    return r;
}

std::vector<FieldFrame> frames_of(const EvolutionTrace& trace, const SimConfig& cfg) {
    std::vector<FieldFrame> out;
    out.reserve(trace.size());
    for (std::size_t k = 0; k < trace.size(); ++k) {
        out.push_back(field_frame(trace.times[k], trace.states[k], cfg.constants, cfg.field_options()));
    }
    return out;
}

// Closed-form displacement q(a, t) when the configured state has one.
std::optional<double> analytic_position(const AnalyticState& s, const PhysicalConstants& c, double a, double t) {
    switch (s.kind) {
        case AnalyticState::Kind::free_gaussian:
            return s.x0 + c.hbar * s.k / c.mass * t + (a - s.x0) * s.sigma_at(t, c) / s.sigma0;
        case AnalyticState::Kind::harmonic_ground:
            return a;
        case AnalyticState::Kind::harmonic_coherent:
            return a - s.x0 + s.mean_x_at(t, c);
    }
    return std::nullopt;
}

LagrangianRun run_trajectories(const SimConfig& cfg, const Wavefunction& psi0, OutputDir& out, RunReport& report) {
    const auto opts = cfg.lagrangian_options();
    const TrajectoryEnsemble ens = init_from_wavefunction(psi0, cfg.labels, cfg.constants, opts);
    LagrangianRun run = evolve(ens, cfg.potential, cfg.time.dt, cfg.time.t_final, cfg.time.output_every, opts);

    write_trajectories_csv(out.file("trajectories.csv"), run.frames, opts.stencil_order);
    const std::size_t margin = interior_margin(opts.stencil_order);
    double min_j = std::numeric_limits<double>::infinity();
    double max_disp = 0.0;
    double bad_frames = 0.0;
    for (const auto& r : run.reports) min_j = std::min(min_j, r.min_jacobian);
    for (const auto& f : run.frames) {
        if (!f.strictly_increasing()) bad_frames += 1.0;
        for (std::size_t i = margin; i + margin < f.size(); ++i) {
            max_disp = std::max(max_disp, std::abs(f.q[i] - f.labels.a(i)));
        }
    }
    report.metrics["label_mass"] = ens.label_mass();
    report.metrics["min_jacobian"] = min_j;
    report.metrics["max_displacement"] = max_disp;
    report.metrics["non_monotone_frames"] = bad_frames;
    report.metrics["frames"] = static_cast<double>(run.frames.size());

    const auto& last = run.frames.back();
    const double e0 = run.reports.front().energy;
    const double e1 = run.reports.back().energy;
    if (last.t > 0.0) {
        const double rate = std::abs(e1 - e0) / std::max(std::abs(e0), 1e-300) / last.t;
        report.metrics["energy_drift_rate"] = rate;
        if (run.ok()) report.check_at_most("energy_drift_rate", rate, cfg.tolerance("energy_drift_rate"));
    }
    if (cfg.initial_state.kind == InitialStateSpec::Kind::harmonic_ground &&
        cfg.potential.kind() == PotentialSpec::Kind::harmonic) {
        report.metrics["max_drift"] = max_disp;
        report.check_at_most("max_drift", max_disp, cfg.tolerance("max_drift"));
    }
    if (const auto oracle = analytic_oracle(cfg)) {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t i = margin; i + margin < last.size(); ++i) {
            const double e = last.q[i] - *analytic_position(*oracle, cfg.constants, last.labels.a(i), last.t);
            sum += e * e;
            ++count;
        }
        if (count > 0) report.metrics["congruence_rms_error"] = std::sqrt(sum / static_cast<double>(count));
    }
    if (!run.ok()) {
        const auto& fail = *run.failure;
        const TrajectoryEnsemble snapshot[] = {fail.last_good};
        write_trajectories_csv(out.file("diagnostic_snapshot.csv"), snapshot, opts.stencil_order);
        report.metrics["failure_time"] = fail.time;
        report.metrics["last_good_time"] = fail.last_good.t;
        if (fail.label) report.metrics["failure_label"] = *fail.label;
    }
    return run;
}

std::vector<FieldFrame> reconstructed_frames(const SimConfig& cfg, const LagrangianRun& run,
                                             std::vector<ReconstructedFields>* fields) {
    const auto opts = cfg.lagrangian_options();
    std::vector<FieldFrame> out;
    for (const auto& f : run.frames) {
        if (fields) fields->push_back(fields_from_trajectories(f, cfg.grid, opts));
        const Wavefunction psi = reconstruct_wavefunction(f, cfg.grid, opts);
        out.push_back(field_frame(f.t, psi, cfg.constants, cfg.field_options()));
    }
    return out;
}

void fail_abort(RunReport& report, const std::string& stage, const LagrangianRun& run) {
    report.status = RunReport::Status::aborted;
    report.failed_stage = stage;
    report.message = run.failure->message;
}

void mode_reference(const SimConfig& cfg, const Wavefunction& psi0, OutputDir& out, RunReport& report,
                    std::string& stage) {
    ReferenceRun ref;
    {
        StageClock clock(report, stage, "reference");
        ref = run_reference(cfg, psi0, report);
    }
    StageClock clock(report, stage, "output");
    write_fields_csv(out.file("fields.csv"), frames_of(ref.trace, cfg));
    if (const auto oracle = analytic_oracle(cfg)) {
        const auto exact = analytic_state(*oracle, cfg.constants, ref.trace.times.back(), cfg.grid);
        report.metrics["reference_oracle_fidelity"] = fidelity(ref.trace.states.back(), exact);
    }
}

void mode_trajectories(const SimConfig& cfg, const Wavefunction& psi0, OutputDir& out, RunReport& report,
                       std::string& stage) {
    StageClock clock(report, stage, "trajectories");
    const LagrangianRun run = run_trajectories(cfg, psi0, out, report);
    if (!run.ok()) fail_abort(report, "trajectories", run);
}

void mode_reconstruct(const SimConfig& cfg, const Wavefunction& psi0, OutputDir& out, RunReport& report,
                      std::string& stage) {
    LagrangianRun run;
    {
        StageClock clock(report, stage, "trajectories");
        run = run_trajectories(cfg, psi0, out, report);
    }
    StageClock clock(report, stage, "reconstruct");
    std::vector<ReconstructedFields> fields;
    const auto frames = reconstructed_frames(cfg, run, &fields);
    write_fields_csv(out.file("fields.csv"), frames);
    report.metrics["roundtrip_fidelity"] = fidelity(frames.front().psi, psi0);
    if (fields.size() >= 3) report.metrics["advection_residual"] = advection_residual(fields);
    if (!run.ok()) fail_abort(report, "trajectories", run);
}

void mode_compare(const SimConfig& cfg, const Wavefunction& psi0, OutputDir& out, RunReport& report,
                  std::string& stage) {
    LagrangianRun run;
    {
        StageClock clock(report, stage, "trajectories");
        run = run_trajectories(cfg, psi0, out, report);
    }
    if (!run.ok()) {
        fail_abort(report, "trajectories", run);
        return;
    }
    ReferenceRun ref;
    {
        StageClock clock(report, stage, "reference");
        ref = run_reference(cfg, psi0, report);
    }
    StageClock clock(report, stage, "compare");
    const auto frames = reconstructed_frames(cfg, run, nullptr);
    write_fields_csv(out.file("fields.csv"), frames_of(ref.trace, cfg));
    write_fields_csv(out.file("reconstructed_fields.csv"), frames);
    if (frames.size() != ref.trace.size()) throw ShapeError("solver output times do not line up");

    double fid_min = 1.0;
    for (std::size_t k = 0; k < frames.size(); ++k) {
        if (std::abs(frames[k].t - ref.trace.times[k]) > 1e-9 * std::max(1.0, frames[k].t)) {
            throw ShapeError("solver output times do not line up");
        }
        fid_min = std::min(fid_min, fidelity(frames[k].psi, ref.trace.states[k]));
    }
    const double fid_final = fidelity(frames.back().psi, ref.trace.states.back());
    report.metrics["fidelity_final"] = fid_final;
    report.metrics["fidelity_min"] = fid_min;
    report.check_at_least("fidelity", fid_min, cfg.tolerance("fidelity_min"));

    const auto wave = expectations_wave(ref.trace.states.back().normalized(), cfg.potential, cfg.constants,
                                        cfg.field_options());
    const auto traj = expectations_traj(run.frames.back(), cfg.potential, cfg.lagrangian_options());
    const double tol = cfg.tolerance("expectation_rel");
    const auto gaps = observable_gaps(wave, traj, cfg.constants.mass);
    const std::tuple<const char*, double, double, double> rows[] = {
        {"mean_x", wave.mean_x, traj.mean_x, gaps.mean_x},
        {"mean_p", wave.mean_p, traj.mean_p, gaps.mean_p},
        {"kinetic", wave.kinetic, traj.kinetic, gaps.kinetic},
        {"potential", wave.potential, traj.potential, gaps.potential},
    };
    for (const auto& [name, w, t, g] : rows) {
        const std::string base(name);
        report.metrics[base + "_wave"] = w;
        report.metrics[base + "_trajectory"] = t;
        report.check_at_most(base + "_relative_gap", g, tol);
    }
    if (!report.checks_passed()) {
        report.status = RunReport::Status::acceptance_failed;
        report.failed_stage = "compare";
        report.message = "one or more acceptance checks failed";
    }
}

void mode_protective(const SimConfig& cfg, const Wavefunction& psi0, OutputDir& out, RunReport& report,
                     std::string& stage) {
    const auto& p = cfg.protective;
    EvolutionTrace trace;
    {
        StageClock clock(report, stage, "reference");
        const double spacing = p.duration / static_cast<double>(p.snapshots - 1);
        std::size_t sub = 1;
        const double dt = reference_step(cfg, spacing, sub, p.reference_dt, "protective.reference_dt");
        trace = split_step_evolve(psi0, cfg.potential, cfg.constants, dt, p.duration, sub);
        report.metrics["reference_dt"] = dt;
    }
    StageClock clock(report, stage, "protective");
    const auto fopts = cfg.field_options();
    const auto records = protective_scan(trace, CouplingProfile::by_name(p.profile, p.duration), cfg.constants, fopts);
    write_protective_csv(out.file("protective.csv"), records);

    double spread = 0.0;
    for (const auto& name : p.compare_profiles) {
        const auto other = protective_scan(trace, CouplingProfile::by_name(name, p.duration), cfg.constants, fopts);
        for (std::size_t i = 0; i < records.size(); ++i) {
            spread = std::max(spread, std::abs(other[i].shift_density - records[i].shift_density));
            spread = std::max(spread, std::abs(other[i].shift_current - records[i].shift_current));
        }
    }
    if (!p.compare_profiles.empty()) {
        report.metrics["profile_spread"] = spread;
        report.check_at_most("profile_spread", spread, cfg.tolerance("profile_spread"));
    }

    const auto recovered = state_from_records(records, cfg.grid, cfg.labels, cfg.constants, cfg.lagrangian_options());
    const double fid = fidelity(recovered.psi, psi0);
    report.metrics["recovered_fidelity"] = fid;
    report.check_at_least("recovered_fidelity", fid, cfg.tolerance("recovered_fidelity_min"));
    write_fields_csv(out.file("fields.csv"),
                     std::vector<FieldFrame>{field_frame(0.0, recovered.psi, cfg.constants, fopts)});
}

}  // namespace

RunReport run_pipeline(const SimConfig& cfg, Mode mode, const std::filesystem::path& out_dir,
                       std::optional<long long> seed) {
    OutputDir out(out_dir);
    RunReport report;
    report.mode = mode_name(mode);
    report.scenario = cfg.scenario;
    report.seed = seed;
    write_json(out.file("config.json"), cfg.resolved);

    std::string stage = "setup";
    try {
        const Wavefunction psi0 = initial_wavefunction(cfg);
        switch (mode) {
            case Mode::reference: mode_reference(cfg, psi0, out, report, stage); break;
            case Mode::trajectories: mode_trajectories(cfg, psi0, out, report, stage); break;
            case Mode::reconstruct: mode_reconstruct(cfg, psi0, out, report, stage); break;
            case Mode::compare: mode_compare(cfg, psi0, out, report, stage); break;
            case Mode::protective: mode_protective(cfg, psi0, out, report, stage); break;
        }
    } catch (const CrossingError& e) {
        report.status = RunReport::Status::aborted;
        report.failed_stage = stage;
        report.message = e.what();
    } catch (const InstabilityError& e) {
        report.status = RunReport::Status::aborted;
        report.failed_stage = stage;
        report.message = e.what();
    } catch (const std::exception& e) {
        report.status = RunReport::Status::error;
        report.failed_stage = stage;
        report.message = e.what();
    }
    write_json(out.file("report.json"), report.to_json());
    out.write_manifest();
    return report;
}

RunReport write_config_failure(const std::string& mode, const std::vector<std::string>& violations,
                               const std::filesystem::path& out_dir) {
    OutputDir out(out_dir);
    RunReport report;
    report.mode = mode;
    report.status = RunReport::Status::config_error;
    report.failed_stage = "config";
    for (const auto& v : violations) report.message += (report.message.empty() ? "" : "; ") + v;
    write_json(out.file("report.json"), report.to_json());
    out.write_manifest();
    return report;
}

}  // namespace qtraj
