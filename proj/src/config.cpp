#include "qtraj/config.hpp"

#include "qtraj/errors.hpp"
#include "qtraj/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace qtraj {

using nlohmann::json;

namespace {

class Violations {
public:
    void add(const std::string& path, const std::string& msg) { list_.push_back(path + ": " + msg); }
    bool empty() const noexcept { return list_.empty(); }
    std::vector<std::string> take() { return std::move(list_); }

private:
    std::vector<std::string> list_;
};

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

// Typed access to one JSON object; every key read is remembered so the
// leftovers can be reported as unknown.
class Section {
public:
    Section(const json* obj, std::string path, Violations& errs) : obj_(obj), path_(std::move(path)), errs_(errs) {
        if (obj_ && !obj_->is_object()) {
            errs_.add(path_, "expected an object");
            obj_ = nullptr;
        }
    }

    bool present() const noexcept { return obj_ != nullptr; }
    bool has(const std::string& key) const { return obj_ && obj_->contains(key); }
    std::string path(const std::string& key) const { return join(path_, key); }

    double number(const std::string& key, double fallback) {
        const json* v = get(key);
        if (!v) return fallback;
        if (!v->is_number()) {
            errs_.add(path(key), "expected a number");
            return fallback;
        }
        const double x = v->get<double>();
        if (!std::isfinite(x)) errs_.add(path(key), "must be finite");
        return x;
    }

    long long integer(const std::string& key, long long fallback) {
        const json* v = get(key);
        if (!v) return fallback;
        if (!v->is_number_integer()) {
            errs_.add(path(key), "expected an integer");
            return fallback;
        }
        return v->get<long long>();
    }

    bool boolean(const std::string& key, bool fallback) {
        const json* v = get(key);
        if (!v) return fallback;
        if (!v->is_boolean()) {
            errs_.add(path(key), "expected true or false");
            return fallback;
        }
        return v->get<bool>();
    }

    std::string string(const std::string& key, const std::string& fallback) {
        const json* v = get(key);
        if (!v) return fallback;
        if (!v->is_string()) {
            errs_.add(path(key), "expected a string");
            return fallback;
        }
        return v->get<std::string>();
    }

    const json* raw(const std::string& key) { return get(key); }

    void finish() {
        if (!obj_) return;
        for (const auto& [key, value] : obj_->items()) {
            (void)value;
            if (!seen_.count(key)) errs_.add(path(key), "unknown key '" + key + "'");
        }
    }

private:
    const json* get(const std::string& key) {
        seen_[key] = true;
        if (!obj_) return nullptr;
        const auto it = obj_->find(key);
        return it == obj_->end() ? nullptr : &*it;
    }

    const json* obj_;
    std::string path_;
    Violations& errs_;
    std::map<std::string, bool> seen_;
};

const json* child(const json& doc, const char* key) {
    const auto it = doc.find(key);
    return it == doc.end() ? nullptr : &*it;
}

// Scenario defaults overlaid by the user's document. A section that names
// a different "kind" replaces the default section instead of merging with
// it, so parameters of the old kind do not leak in.
json overlay(const json& base, const json& user) {
    json out = base;
    for (const auto& [key, value] : user.items()) {
        const auto it = out.find(key);
        if (it != out.end() && it->is_object() && value.is_object()) {
            const bool kind_changed = value.contains("kind") && it->contains("kind") && (*it)["kind"] != value["kind"];
            if (!kind_changed) {
                for (const auto& [k, v] : value.items()) (*it)[k] = v;
                continue;
            }
        }
        out[key] = value;
    }
    return out;
}

std::vector<double> read_potential_table(const std::filesystem::path& file, double& x_min, double& x_max,
                                         std::string& problem) {
    std::ifstream in(file);
    std::vector<double> xs, vs;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        double x = 0.0, v = 0.0;
        if (!(row >> x >> v)) {
            if (xs.empty()) continue;  // header
            problem = "unparseable row '" + line + "'";
            return {};
        }
        xs.push_back(x);
        vs.push_back(v);
    }
    if (xs.size() < GridSpec::min_points) {
        problem = "needs at least " + std::to_string(GridSpec::min_points) + " rows";
        return {};
    }
    const double h = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (std::abs(xs[i] - (xs.front() + h * static_cast<double>(i))) > 1e-9 * std::max(1.0, std::abs(h))) {
            problem = "x column must be uniformly spaced";
            return {};
        }
    }
    x_min = xs.front();
    x_max = xs.back();
    return vs;
}

}  // namespace

const std::map<std::string, double>& default_tolerances() {
    static const std::map<std::string, double> t{
        {"fidelity_min", 0.999},          {"max_drift", 1e-6},
        {"energy_drift_rate", 1e-6},      {"norm_drift", 1e-10},
        {"expectation_rel", 1e-3},        {"recovered_fidelity_min", 0.9999},
        {"profile_spread", 1e-10},
    };
    return t;
}

LagrangianOptions SimConfig::lagrangian_options() const {
    LagrangianOptions o;
    o.integrator = solver.integrator;
    o.stencil_order = solver.stencil_order;
    o.node_floor = solver.node_floor;
    o.smooth_log_density = solver.smoothing;
    return o;
}

FieldOptions SimConfig::field_options() const {
    FieldOptions o;
    o.stencil_order = solver.stencil_order;
    o.node_floor = solver.node_floor;
    return o;
}

double SimConfig::tolerance(const std::string& name) const {
    const auto it = tolerances.find(name);
    if (it == tolerances.end()) throw ParameterError("no tolerance named '" + name + "'");
    return it->second;
}

SimConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({path.string() + ": cannot open configuration file"});
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError({path.string() + ": " + e.what()});
    }
    return parse_config_json(doc, path.parent_path());
}

SimConfig parse_config_json(const json& user, const std::filesystem::path& base_dir) {
    Violations errs;
    if (!user.is_object()) throw ConfigError({"<root>: expected an object"});

    std::string scenario_name = "free_gaussian";
    if (const json* s = child(user, "scenario")) {
        if (s->is_string()) scenario_name = s->get<std::string>();
        else errs.add("scenario", "expected a string");
    }
    const Scenario* scenario = find_scenario(scenario_name);
    if (!scenario) {
        errs.add("scenario", "unknown scenario '" + scenario_name + "'");
        scenario = find_scenario("free_gaussian");
    }
    const json doc = overlay(scenario->defaults, user);

    SimConfig cfg;
    cfg.scenario = scenario->name;
    cfg.resolved = doc;
    cfg.resolved["scenario"] = scenario->name;

    Section root(&doc, "", errs);
    root.string("scenario", "");
    root.string("description", "");
    root.string("$schema", "");

    {
        Section c(root.raw("constants"), "constants", errs);
        cfg.constants.hbar = c.number("hbar", 1.0);
        cfg.constants.mass = c.number("mass", 1.0);
        if (!(cfg.constants.hbar > 0.0)) errs.add("constants.hbar", "must be positive");
        if (!(cfg.constants.mass > 0.0)) errs.add("constants.mass", "must be positive");
        c.finish();
    }

    bool grid_ok = false;
    {
        Section g(root.raw("grid"), "grid", errs);
        const double lo = g.number("x_min", -20.0);
        const double hi = g.number("x_max", 20.0);
        const long long n = g.integer("points", 512);
        bool ok = true;
        if (!(hi > lo)) {
            errs.add("grid.x_max", "must exceed grid.x_min");
            ok = false;
        }
        if (n < static_cast<long long>(GridSpec::min_points)) {
            errs.add("grid.points", "must be at least " + std::to_string(GridSpec::min_points));
            ok = false;
        }
        if (ok) {
            cfg.grid = GridSpec(lo, hi, static_cast<std::size_t>(n));
            grid_ok = true;
        }
        g.finish();
    }

    {
        Section l(root.raw("labels"), "labels", errs);
        const double lo = l.number("a_min", -6.0);
        const double hi = l.number("a_max", 6.0);
        const long long n = l.integer("count", 401);
        bool ok = true;
        if (!(hi > lo)) {
            errs.add("labels.a_max", "must exceed labels.a_min");
            ok = false;
        }
        if (n < static_cast<long long>(LabelGrid::min_labels)) {
            errs.add("labels.count", "must be at least " + std::to_string(LabelGrid::min_labels));
            ok = false;
        }
        if (grid_ok) {
            if (lo < cfg.grid.x_min()) {
                errs.add("labels.a_min", "value " + std::to_string(lo) + " lies below grid.x_min = " +
                                             std::to_string(cfg.grid.x_min()));
                ok = false;
            }
            if (hi > cfg.grid.x_max()) {
                errs.add("labels.a_max", "value " + std::to_string(hi) + " lies above grid.x_max = " +
                                             std::to_string(cfg.grid.x_max()));
                ok = false;
            }
        }
        if (ok) cfg.labels = LabelGrid(lo, hi, static_cast<std::size_t>(n));
        l.finish();
    }

    {
        Section t(root.raw("time"), "time", errs);
        cfg.time.dt = t.number("dt", 1e-3);
        cfg.time.t_final = t.number("t_final", 1.0);
        const long long every = t.integer("output_every", 100);
        if (t.has("reference_dt")) cfg.time.reference_dt = t.number("reference_dt", 0.0);
        if (!(cfg.time.dt > 0.0)) errs.add("time.dt", "must be positive");
        if (!(cfg.time.t_final >= 0.0)) errs.add("time.t_final", "must be non-negative");
        if (every < 1) errs.add("time.output_every", "must be at least 1");
        else cfg.time.output_every = static_cast<std::size_t>(every);
        if (cfg.time.dt > 0.0 && cfg.time.t_final >= 0.0) {
            const double steps = cfg.time.t_final / cfg.time.dt;
            if (std::abs(steps - std::round(steps)) > 1e-6) {
                errs.add("time.t_final", "must be a whole number of time.dt steps");
            }
        }
        if (cfg.time.reference_dt && !(*cfg.time.reference_dt > 0.0)) {
            errs.add("time.reference_dt", "must be positive");
        }
        t.finish();
    }

    {
        Section s(root.raw("solver"), "solver", errs);
        const std::string integ = s.string("integrator", "velocity_verlet");
        if (integ == "velocity_verlet") cfg.solver.integrator = Integrator::velocity_verlet;
        else if (integ == "rk4") cfg.solver.integrator = Integrator::rk4;
        else errs.add("solver.integrator", "expected 'velocity_verlet' or 'rk4', got '" + integ + "'");
        const long long order = s.integer("stencil_order", 4);
        if (order != 2 && order != 4 && order != 6 && order != 8) errs.add("solver.stencil_order", "must be 2, 4, 6 or 8");
        else cfg.solver.stencil_order = static_cast<int>(order);
        cfg.solver.node_floor = s.number("node_floor", 1e-12);
        if (!(cfg.solver.node_floor > 0.0 && cfg.solver.node_floor < 1.0)) {
            errs.add("solver.node_floor", "must lie in (0, 1)");
        }
        cfg.solver.smoothing = s.boolean("smoothing", false);
        s.finish();
    }

    {
        cfg.tolerances = default_tolerances();
        const json* t = root.raw("tolerances");
        if (t && !t->is_object()) {
            errs.add("tolerances", "expected an object");
        } else if (t) {
            for (const auto& [key, value] : t->items()) {
                const std::string p = join("tolerances", key);
                if (!cfg.tolerances.count(key)) errs.add(p, "unknown key '" + key + "'");
                else if (!value.is_number()) errs.add(p, "expected a number");
                else if (!(value.get<double>() > 0.0)) errs.add(p, "must be positive");
                else cfg.tolerances[key] = value.get<double>();
            }
        }
    }

    {
        Section p(root.raw("protective"), "protective", errs);
        cfg.protective.duration = p.number("duration", 2.0);
        const long long snaps = p.integer("snapshots", 201);
        cfg.protective.profile = p.string("profile", "uniform");
        if (p.has("reference_dt")) {
            cfg.protective.reference_dt = p.number("reference_dt", 0.0);
            if (!(*cfg.protective.reference_dt > 0.0)) errs.add("protective.reference_dt", "must be positive");
        }
        if (const json* list = p.raw("compare_profiles")) {
            cfg.protective.compare_profiles.clear();
            if (!list->is_array()) {
                errs.add("protective.compare_profiles", "expected an array of profile names");
            } else {
                for (const auto& item : *list) {
                    if (item.is_string()) cfg.protective.compare_profiles.push_back(item.get<std::string>());
                    else errs.add("protective.compare_profiles", "entries must be strings");
                }
            }
        }
        if (!(cfg.protective.duration > 0.0)) errs.add("protective.duration", "must be positive");
        if (snaps < 3) errs.add("protective.snapshots", "must be at least 3");
        else cfg.protective.snapshots = static_cast<std::size_t>(snaps);
        auto known = [](const std::string& n) { return n == "uniform" || n == "sine_squared" || n == "triangle"; };
        if (!known(cfg.protective.profile)) {
            errs.add("protective.profile", "unknown profile '" + cfg.protective.profile + "'");
        }
        for (const auto& n : cfg.protective.compare_profiles) {
            if (!known(n)) errs.add("protective.compare_profiles", "unknown profile '" + n + "'");
        }
        p.finish();
    }

    {
        Section s(root.raw("initial_state"), "initial_state", errs);
        const std::string kind = s.string("kind", "gaussian");
        auto& st = cfg.initial_state;
        if (kind == "gaussian") {
            st.kind = InitialStateSpec::Kind::gaussian;
            st.x0 = s.number("x0", 0.0);
            st.sigma = s.number("sigma", 1.0);
            st.k = s.number("k", 0.0);
            if (!(st.sigma > 0.0)) errs.add("initial_state.sigma", "must be positive");
        } else if (kind == "harmonic_ground" || kind == "harmonic_coherent") {
            st.kind = kind == "harmonic_ground" ? InitialStateSpec::Kind::harmonic_ground
                                                : InitialStateSpec::Kind::harmonic_coherent;
            st.omega = s.number("omega", 1.0);
            if (st.kind == InitialStateSpec::Kind::harmonic_coherent) st.x0 = s.number("x0", 0.0);
            if (!(st.omega > 0.0)) errs.add("initial_state.omega", "must be positive");
        } else if (kind == "superposition") {
            st.kind = InitialStateSpec::Kind::superposition;
            const json* comps = s.raw("components");
            if (!comps || !comps->is_array() || comps->empty()) {
                errs.add("initial_state.components", "expected a non-empty array");
            } else {
                for (std::size_t i = 0; i < comps->size(); ++i) {
                    Section c(&(*comps)[i], "initial_state.components[" + std::to_string(i) + "]", errs);
                    InitialStateSpec::Component comp;
                    comp.x0 = c.number("x0", 0.0);
                    comp.sigma = c.number("sigma", 1.0);
                    comp.k = c.number("k", 0.0);
                    comp.weight = c.number("weight", 1.0);
                    if (!(comp.sigma > 0.0)) errs.add(c.path("sigma"), "must be positive");
                    c.finish();
                    st.components.push_back(comp);
                }
            }
        } else {
            errs.add("initial_state.kind", "unknown kind '" + kind + "'");
        }
        s.finish();
    }

    {
        Section p(root.raw("potential"), "potential", errs);
        const std::string kind = p.string("kind", "free");
        if (kind == "free") {
            cfg.potential = PotentialSpec::free();
        } else if (kind == "harmonic") {
            const double omega = p.number("omega", 1.0);
            if (!(omega > 0.0)) errs.add("potential.omega", "must be positive");
            else cfg.potential = PotentialSpec::harmonic(omega, cfg.constants.mass > 0.0 ? cfg.constants.mass : 1.0);
        } else if (kind == "barrier") {
            const double height = p.number("height", 1.0);
            const double width = p.number("width", 0.5);
            const double centre = p.number("center", 0.0);
            if (!(width > 0.0)) errs.add("potential.width", "must be positive");
            else if (grid_ok) {
                std::vector<double> samples(cfg.grid.size());
                for (std::size_t i = 0; i < samples.size(); ++i) {
                    const double u = (cfg.grid.x(i) - centre) / width;
                    samples[i] = height * std::exp(-0.5 * u * u);
                }
                cfg.potential = PotentialSpec::tabulated(cfg.grid, std::move(samples));
            }
        } else if (kind == "tabulated") {
            const bool from_file = p.has("file");
            const bool inline_values = p.has("values");
            if (from_file == inline_values) {
                errs.add("potential", "tabulated potential needs exactly one of 'file' or 'values'");
            }
            if (from_file) {
                std::filesystem::path file = p.string("file", "");
                if (file.is_relative()) file = base_dir / file;
                if (!std::filesystem::exists(file)) {
                    errs.add("potential.file", "file '" + file.string() + "' does not exist");
                } else {
                    double lo = 0.0, hi = 0.0;
                    std::string problem;
                    auto values = read_potential_table(file, lo, hi, problem);
                    if (!problem.empty()) errs.add("potential.file", problem);
                    else cfg.potential = PotentialSpec::tabulated(GridSpec(lo, hi, values.size()), std::move(values));
                }
            }
            if (inline_values) {
                const double lo = p.number("x_min", grid_ok ? cfg.grid.x_min() : 0.0);
                const double hi = p.number("x_max", grid_ok ? cfg.grid.x_max() : 1.0);
                const json* vals = p.raw("values");
                std::vector<double> values;
                if (!vals->is_array()) {
                    errs.add("potential.values", "expected an array of numbers");
                } else {
                    for (const auto& v : *vals) {
                        if (!v.is_number()) {
                            errs.add("potential.values", "entries must be numbers");
                            break;
                        }
                        values.push_back(v.get<double>());
                    }
                }
                if (!(hi > lo)) errs.add("potential.x_max", "must exceed potential.x_min");
                else if (values.size() < GridSpec::min_points) {
                    errs.add("potential.values", "needs at least " + std::to_string(GridSpec::min_points) + " samples");
                } else {
                    cfg.potential = PotentialSpec::tabulated(GridSpec(lo, hi, values.size()), std::move(values));
                }
            } else {
                p.raw("x_min");
                p.raw("x_max");
            }
            const bool built = cfg.potential.kind() == PotentialSpec::Kind::tabulated;
            if (built && grid_ok &&
                (cfg.potential.table_grid().x_min() > cfg.grid.x_min() + 1e-12 ||
                 cfg.potential.table_grid().x_max() < cfg.grid.x_max() - 1e-12)) {
                errs.add("potential", "table must cover grid.x_min .. grid.x_max");
            }
        } else {
            errs.add("potential.kind", "unknown kind '" + kind + "'");
        }
        p.finish();
    }

    root.finish();

    if (!errs.empty()) throw ConfigError(errs.take());
    return cfg;
}

Wavefunction initial_wavefunction(const SimConfig& cfg) {
    const auto& st = cfg.initial_state;
    switch (st.kind) {
        case InitialStateSpec::Kind::gaussian:
            return analytic_state(AnalyticState::free_gaussian(st.x0, st.sigma, st.k), cfg.constants, 0.0, cfg.grid);
        case InitialStateSpec::Kind::harmonic_ground:
            return analytic_state(AnalyticState::harmonic_ground(st.omega), cfg.constants, 0.0, cfg.grid);
        case InitialStateSpec::Kind::harmonic_coherent:
            return analytic_state(AnalyticState::harmonic_coherent(st.omega, st.x0), cfg.constants, 0.0, cfg.grid);
        case InitialStateSpec::Kind::superposition: {
            std::vector<Complex> sum(cfg.grid.size(), Complex(0.0, 0.0));
            for (const auto& c : st.components) {
                const auto part =
                    analytic_state(AnalyticState::free_gaussian(c.x0, c.sigma, c.k), cfg.constants, 0.0, cfg.grid);
                for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += c.weight * part.values[i];
            }
            Wavefunction psi(cfg.grid, std::move(sum));
            if (!(psi.norm() > 0.0)) throw DegenerateStateError("superposition cancels to zero");
            return psi.normalized();
        }
    }
    throw ParameterError("unhandled initial state kind");
}

std::optional<AnalyticState> analytic_oracle(const SimConfig& cfg) {
    const auto& st = cfg.initial_state;
    const auto kind = cfg.potential.kind();
    switch (st.kind) {
        case InitialStateSpec::Kind::gaussian:
            if (kind == PotentialSpec::Kind::free) return AnalyticState::free_gaussian(st.x0, st.sigma, st.k);
            break;
        case InitialStateSpec::Kind::harmonic_ground:
            if (kind == PotentialSpec::Kind::harmonic && cfg.potential.omega() == st.omega) {
                return AnalyticState::harmonic_ground(st.omega);
            }
            break;
        case InitialStateSpec::Kind::harmonic_coherent:
            if (kind == PotentialSpec::Kind::harmonic && cfg.potential.omega() == st.omega) {
                return AnalyticState::harmonic_coherent(st.omega, st.x0);
            }
            break;
        case InitialStateSpec::Kind::superposition:
            break;
    }
    return std::nullopt;
}

}  // namespace qtraj
