// SPDX-License-Identifier: Apache-2.0
#include "phicsl/errors.hpp"
#include "phicsl/harness.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace phicsl {

namespace {

struct RawValue {
    std::string value;
    std::size_t line = 0;
    bool used = false;
};

// Keys accepted per section; [scenario] takes any scenario parameter name.
const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> s{
        {"experiment", {"scenario", "dynamics", "lambda", "n_trajectories", "master_seed", "output", "collapse_threshold"}},
        {"time", {"t_final", "grid_points", "times", "dt", "steps", "record_every"}},
        {"grw", {"rate", "r_c"}},
        {"scenario", {}},
        {"state", {"spec"}},
        {"operator", {"source", "eigenvalues", "basis", "degeneracy_tol"}},
    };
    return s;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

class RawConfig {
public:
    RawConfig(const std::string& text) {
        std::istringstream in(text);
        std::string line;
        std::size_t n = 0;
        std::string section;
        std::set<std::string> seen_sections;
        while (std::getline(in, line)) {
            ++n;
            // Inline comments start at a '#' preceded by whitespace.
            for (std::size_t i = 1; i < line.size(); ++i) {
                if (line[i] == '#' && (line[i - 1] == ' ' || line[i - 1] == '\t')) {
                    line.resize(i);
                    break;
                }
            }
            const std::string t = trim(line);
            if (t.empty() || t[0] == '#' || t[0] == ';') continue;
            if (t.front() == '[') {
                if (t.back() != ']') throw ConfigError("malformed section header '" + t + "'", n);
                section = trim(std::string_view(t).substr(1, t.size() - 2));
                if (!schema().count(section)) throw ConfigError("unknown section [" + section + "]", n, section);
                if (!seen_sections.insert(section).second) throw ConfigError("duplicate section [" + section + "]", n, section);
                continue;
            }
            const auto eq = t.find('=');
            if (eq == std::string::npos) throw ConfigError("expected 'key = value', got '" + t + "'", n);
            const std::string key = trim(std::string_view(t).substr(0, eq));
            const std::string value = trim(std::string_view(t).substr(eq + 1));
            if (key.empty()) throw ConfigError("empty key", n);
            if (section.empty()) throw ConfigError("key '" + key + "' outside any section", n, key);
            const std::string full = section + "." + key;
            if (section != "scenario" && !schema().at(section).count(key))
                throw ConfigError("unknown key '" + full + "'", n, full);
            if (value.empty()) throw ConfigError("key '" + full + "' has an empty value", n, full);
            auto& sec = values_[section];
            if (sec.count(key)) throw ConfigError("duplicate key '" + full + "'", n, full);
            sec.emplace(key, RawValue{value, n, false});
        }
    }

    RawValue* find(const std::string& section, const std::string& key) {
        auto s = values_.find(section);
        if (s == values_.end()) return nullptr;
        auto k = s->second.find(key);
        if (k == s->second.end()) return nullptr;
        k->second.used = true;
        return &k->second;
    }

    RawValue& require(const std::string& section, const std::string& key, const std::string& why) {
        RawValue* v = find(section, key);
        if (!v) throw ConfigError("missing required key '" + section + "." + key + "'" + why, 0, section + "." + key);
        return *v;
    }

    std::map<std::string, RawValue>* section(const std::string& name) {
        auto s = values_.find(name);
        return s == values_.end() ? nullptr : &s->second;
    }

    // Keys that exist in the schema but were not consumed for this experiment.
    void reject_unused(const std::string& context) const {
        for (const auto& [sec, keys] : values_)
            for (const auto& [key, v] : keys)
                if (!v.used) throw ConfigError("key '" + sec + "." + key + "' does not apply to this experiment (" + context + ")", v.line, sec + "." + key);
    }

private:
    std::map<std::string, std::map<std::string, RawValue>> values_;
};

double as_double(const RawValue& v, const std::string& key) {
    double out = 0.0;
    const char* end = v.value.data() + v.value.size();
    auto [ptr, ec] = std::from_chars(v.value.data(), end, out);
    if (ec != std::errc() || ptr != end || !std::isfinite(out))
        throw ConfigError("key '" + key + "': expected a finite number, got '" + v.value + "'", v.line, key);
    return out;
}

std::uint64_t as_uint(const RawValue& v, const std::string& key) {
    std::uint64_t out = 0;
    const char* end = v.value.data() + v.value.size();
    auto [ptr, ec] = std::from_chars(v.value.data(), end, out);
    if (ec != std::errc() || ptr != end)
        throw ConfigError("key '" + key + "': expected a nonnegative integer, got '" + v.value + "'", v.line, key);
    return out;
}

std::vector<double> as_list(const RawValue& v, const std::string& key) {
    std::vector<double> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = v.value.find(',', start);
        RawValue item{trim(std::string_view(v.value).substr(start, pos == std::string::npos ? std::string::npos : pos - start)),
                      v.line, true};
        out.push_back(as_double(item, key));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

double positive(const RawValue& v, const std::string& key) {
    const double x = as_double(v, key);
    if (!(x > 0.0)) throw ConfigError("key '" + key + "' must be > 0", v.line, key);
    return x;
}

// Location for errors raised while building: the scenario or state key line.
struct Anchor {
    std::size_t line = 0;
    std::string key;
};

}  // namespace

std::string to_string(DynamicsKind kind) {
    switch (kind) {
        case DynamicsKind::csl_closed: return "csl-closed";
        case DynamicsKind::csl_sde: return "csl-sde";
        case DynamicsKind::grw: return "grw";
    }
    return "?";
}

std::filesystem::path ExperimentConfig::output_path() const {
    std::filesystem::path p(output);
    if (p.is_relative() && !base_dir.empty()) return base_dir / p;
    return p;
}

ExperimentConfig parse_config(const std::string& text, const std::string& source, const std::filesystem::path& base_dir) {
    RawConfig raw(text);
    ExperimentConfig c;
    c.source = source;
    c.base_dir = base_dir;

    // [experiment]
    RawValue& dyn = raw.require("experiment", "dynamics", "");
    if (dyn.value == "csl-closed")
        c.dynamics = DynamicsKind::csl_closed;
    else if (dyn.value == "csl-sde")
        c.dynamics = DynamicsKind::csl_sde;
    else if (dyn.value == "grw")
        c.dynamics = DynamicsKind::grw;
    else
        throw ConfigError("key 'experiment.dynamics': expected csl-closed, csl-sde or grw, got '" + dyn.value + "'",
                          dyn.line, "experiment.dynamics");
    const bool csl = c.dynamics != DynamicsKind::grw;
    const std::string applies = "dynamics " + dyn.value;

    if (csl) c.lambda = positive(raw.require("experiment", "lambda", " for CSL dynamics"), "experiment.lambda");

    {
        RawValue& v = raw.require("experiment", "n_trajectories", "");
        c.n_trajectories = as_uint(v, "experiment.n_trajectories");
        if (c.n_trajectories == 0) throw ConfigError("key 'experiment.n_trajectories' must be >= 1", v.line, "experiment.n_trajectories");
    }
    c.master_seed = as_uint(raw.require("experiment", "master_seed", ""), "experiment.master_seed");
    c.output = raw.require("experiment", "output", "").value;
    if (RawValue* v = raw.find("experiment", "collapse_threshold")) {
        c.collapse_threshold = as_double(*v, "experiment.collapse_threshold");
        if (!(c.collapse_threshold > 0.0 && c.collapse_threshold < 1.0))
            throw ConfigError("key 'experiment.collapse_threshold' must lie in (0, 1)", v->line, "experiment.collapse_threshold");
    }

    // Initial state: a named scenario or an inline state, never both.
    RawValue* scen = raw.find("experiment", "scenario");
    RawValue* state = raw.find("state", "spec");
    Anchor anchor;
    std::optional<SubsystemLayout> layout;
    if (scen && state) throw ConfigError("give either experiment.scenario or [state] spec, not both", state->line, "state.spec");
    if (!scen && !state) throw ConfigError("missing required key 'experiment.scenario' (or [state] spec)", 0, "experiment.scenario");
    if (scen) {
        c.scenario = scen->value;
        anchor = {scen->line, "experiment.scenario"};
        const ScenarioInfo* info = nullptr;
        for (const auto& s : scenario_catalog())
            if (s.name == scen->value) info = &s;
        if (!info) throw ConfigError("unknown scenario '" + scen->value + "'", scen->line, "experiment.scenario");
        if (auto* params = raw.section("scenario")) {
            for (auto& [key, v] : *params) {
                bool known = false;
                for (const auto& [name, _] : info->parameters) known = known || name == key;
                if (!known)
                    throw ConfigError("unknown key 'scenario." + key + "' for scenario '" + info->name + "'", v.line, "scenario." + key);
                v.used = true;
                c.scenario_parameters[key] = as_double(v, "scenario." + key);
            }
        }
        try {
            layout = build_named_scenario(info->name, c.scenario_parameters, 1.0).layout;
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what(), scen->line, "experiment.scenario");
        }
    } else {
        c.state_spec = state->value;
        anchor = {state->line, "state.spec"};
        try {
            layout = parse_state_spec(state->value).layout();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what(), state->line, "state.spec");
        }
    }

    // [operator]
    if (RawValue* v = raw.find("operator", "source")) {
        if (v->value == "scenario")
            c.operator_source = OperatorSource::scenario;
        else if (v->value == "diagonal")
            c.operator_source = OperatorSource::diagonal;
        else if (v->value == "phi-basis")
            c.operator_source = OperatorSource::phi_basis;
        else
            throw ConfigError("key 'operator.source': expected scenario, diagonal or phi-basis, got '" + v->value + "'", v->line,
                              "operator.source");
        if (c.operator_source == OperatorSource::scenario && !c.scenario)
            throw ConfigError("operator.source = scenario needs experiment.scenario", v->line, "operator.source");
    } else if (!c.scenario) {
        throw ConfigError("missing required key 'operator.source' for an inline state", 0, "operator.source");
    }
    if (c.operator_source == OperatorSource::diagonal) {
        RawValue& v = raw.require("operator", "eigenvalues", " for source = diagonal");
        c.eigenvalues = as_list(v, "operator.eigenvalues");
        if (c.eigenvalues.size() != layout->total_dim())
            throw ConfigError("key 'operator.eigenvalues': expected " + std::to_string(layout->total_dim()) + " values, got " +
                                  std::to_string(c.eigenvalues.size()),
                              v.line, "operator.eigenvalues");
    }
    if (c.operator_source == OperatorSource::phi_basis) {
        RawValue* v = raw.find("operator", "basis");
        if (v) c.phi_basis = v->value;
        try {
            (void)named_basis(c.phi_basis, *layout);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what(), v ? v->line : 0, "operator.basis");
        }
    }
    if (RawValue* v = raw.find("operator", "degeneracy_tol")) {
        c.degeneracy_tol = as_double(*v, "operator.degeneracy_tol");
        if (*c.degeneracy_tol < 0.0) throw ConfigError("key 'operator.degeneracy_tol' must be >= 0", v->line, "operator.degeneracy_tol");
    }

    // [time]
    switch (c.dynamics) {
        case DynamicsKind::csl_closed: {
            RawValue* times = raw.find("time", "times");
            if (times) {
                c.grid = as_list(*times, "time.times");
                for (std::size_t k = 0; k < c.grid.size(); ++k)
                    if (!(c.grid[k] > (k ? c.grid[k - 1] : 0.0)))
                        throw ConfigError("key 'time.times' must be positive and strictly increasing", times->line, "time.times");
            } else {
                c.t_final = positive(raw.require("time", "t_final", " (or time.times) for csl-closed"), "time.t_final");
                RawValue& gp = raw.require("time", "grid_points", " for csl-closed");
                const std::uint64_t n = as_uint(gp, "time.grid_points");
                if (n == 0) throw ConfigError("key 'time.grid_points' must be >= 1", gp.line, "time.grid_points");
                for (std::uint64_t k = 1; k <= n; ++k) c.grid.push_back(c.t_final * double(k) / double(n));
            }
            break;
        }
        case DynamicsKind::csl_sde: {
            c.dt = positive(raw.require("time", "dt", " for csl-sde"), "time.dt");
            RawValue& st = raw.require("time", "steps", " for csl-sde");
            c.steps = as_uint(st, "time.steps");
            if (c.steps == 0) throw ConfigError("key 'time.steps' must be >= 1", st.line, "time.steps");
            if (RawValue* v = raw.find("time", "record_every")) {
                c.record_every = as_uint(*v, "time.record_every");
                if (c.record_every == 0) throw ConfigError("key 'time.record_every' must be >= 1", v->line, "time.record_every");
            }
            break;
        }
        case DynamicsKind::grw: {
            c.t_final = positive(raw.require("time", "t_final", " for grw"), "time.t_final");
            c.dt = positive(raw.require("time", "dt", " for grw"), "time.dt");
            RawValue& rate = raw.require("grw", "rate", " for grw");
            c.grw_rate = as_double(rate, "grw.rate");
            if (c.grw_rate < 0.0) throw ConfigError("key 'grw.rate' must be >= 0", rate.line, "grw.rate");
            c.grw_r_c = positive(raw.require("grw", "r_c", " for grw"), "grw.r_c");
            break;
        }
    }

    if (auto* params = raw.section("scenario"); params && !c.scenario) {
        const auto& [key, v] = *params->begin();
        throw ConfigError("key 'scenario." + key + "' needs experiment.scenario", v.line, "scenario." + key);
    }
    raw.reject_unused(applies);

    try {
        (void)build_trajectory_spec(c);
    } catch (const ConfigError& e) {
        if (e.line()) throw;
        throw ConfigError(e.what(), anchor.line, anchor.key);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what(), anchor.line, anchor.key);
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string(), path.parent_path());
}

}  // namespace phicsl
