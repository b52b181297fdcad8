// SPDX-License-Identifier: Apache-2.0
#include "phicsl/phicsl.h"

#include "phicsl/errors.hpp"
#include "phicsl/harness.hpp"

#include <new>
#include <sstream>

struct phicsl_state {
    phicsl::StateVector value;
};

struct phicsl_config {
    phicsl::ExperimentConfig value;
    std::string output_path;
};

struct phicsl_run {
    phicsl::RunOutput value;
    mutable std::string csv;
    mutable std::string summary;
};

struct phicsl_phi_report {
    phicsl::PhiReport value;
    std::string csv;
    std::string text;
};

namespace {

thread_local std::string g_last_error;

phicsl_status fail(phicsl_status s, const std::string& message) {
    g_last_error = message;
    return s;
}

template <class F>
phicsl_status guarded(F&& body) {
    try {
        body();
        return PHICSL_OK;
    } catch (const phicsl::ConfigError& e) {
        return fail(PHICSL_ERR_CONFIG, e.what());
    } catch (const phicsl::NumericalError& e) {
        return fail(PHICSL_ERR_NUMERIC, e.what());
    } catch (const phicsl::IoError& e) {
        return fail(PHICSL_ERR_IO, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(PHICSL_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::bad_alloc&) {
        return fail(PHICSL_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(PHICSL_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(PHICSL_ERR_INTERNAL, "unknown error");
    }
}

#define PHICSL_REQUIRE(cond, what) \
    if (!(cond)) return fail(PHICSL_ERR_INVALID_ARGUMENT, what)

}  // namespace

extern "C" {

const char* phicsl_version(void) { return "1.0.0"; }
const char* phicsl_last_error(void) { return g_last_error.c_str(); }

const char* phicsl_status_name(phicsl_status status) {
    switch (status) {
        case PHICSL_OK: return "ok";
        case PHICSL_ERR_INVALID_ARGUMENT: return "invalid argument";
        case PHICSL_ERR_CONFIG: return "config error";
        case PHICSL_ERR_NUMERIC: return "numeric failure";
        case PHICSL_ERR_IO: return "i/o error";
        case PHICSL_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

// ---------------------------------------------------------------------------

phicsl_status phicsl_state_parse(const char* spec, phicsl_state** out) {
    PHICSL_REQUIRE(spec && out, "phicsl_state_parse: null argument");
    *out = nullptr;
    return guarded([&] { *out = new phicsl_state{phicsl::parse_state_spec(spec)}; });
}

phicsl_status phicsl_state_create(const size_t* dims, size_t n_subsystems, const double* amplitudes, phicsl_state** out) {
    PHICSL_REQUIRE(dims && amplitudes && out && n_subsystems > 0, "phicsl_state_create: null argument or no subsystems");
    *out = nullptr;
    return guarded([&] {
        phicsl::SubsystemLayout layout(std::vector<std::size_t>(dims, dims + n_subsystems));
        phicsl::CVector v(static_cast<Eigen::Index>(layout.total_dim()));
        for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = phicsl::cplx(amplitudes[2 * k], amplitudes[2 * k + 1]);
        *out = new phicsl_state{phicsl::StateVector::normalized(layout, v)};
    });
}

void phicsl_state_destroy(phicsl_state* state) { delete state; }

phicsl_status phicsl_state_dimension(const phicsl_state* state, size_t* out) {
    PHICSL_REQUIRE(state && out, "phicsl_state_dimension: null argument");
    *out = state->value.dim();
    return PHICSL_OK;
}

phicsl_status phicsl_state_subsystems(const phicsl_state* state, size_t* out) {
    PHICSL_REQUIRE(state && out, "phicsl_state_subsystems: null argument");
    *out = state->value.layout().size();
    return PHICSL_OK;
}

// ---------------------------------------------------------------------------

phicsl_status phicsl_phi_max(const phicsl_state* state, double* out) {
    PHICSL_REQUIRE(state && out, "phicsl_phi_max: null argument");
    return guarded([&] { *out = phicsl::phi_max(state->value).phi; });
}

phicsl_status phicsl_entanglement_entropy(const phicsl_state* state, const size_t* side, size_t n_side, double* out) {
    PHICSL_REQUIRE(state && side && out, "phicsl_entanglement_entropy: null argument");
    return guarded([&] {
        std::vector<std::size_t> s(side, side + n_side);
        *out = phicsl::entanglement_entropy(state->value, s);
    });
}

phicsl_status phicsl_phi_report_create(const phicsl_state* state, phicsl_phi_report** out) {
    PHICSL_REQUIRE(state && out, "phicsl_phi_report_create: null argument");
    *out = nullptr;
    return guarded([&] {
        auto r = phicsl::phi_report(state->value);
        std::string csv = r.to_csv(), text = r.to_text();
        *out = new phicsl_phi_report{std::move(r), std::move(csv), std::move(text)};
    });
}

void phicsl_phi_report_destroy(phicsl_phi_report* report) { delete report; }

phicsl_status phicsl_phi_report_rows(const phicsl_phi_report* report, size_t* out) {
    PHICSL_REQUIRE(report && out, "phicsl_phi_report_rows: null argument");
    *out = report->value.grains.size();
    return PHICSL_OK;
}

phicsl_status phicsl_phi_report_row(const phicsl_phi_report* report, size_t index, const char** grain,
                                    const char** bipartition, double* phi) {
    PHICSL_REQUIRE(report, "phicsl_phi_report_row: null report");
    PHICSL_REQUIRE(index < report->value.grains.size(), "phicsl_phi_report_row: index out of range");
    const auto& row = report->value.grains[index];
    if (grain) *grain = row.grain.c_str();
    if (bipartition) *bipartition = row.bipartition.c_str();
    if (phi) *phi = row.phi;
    return PHICSL_OK;
}

phicsl_status phicsl_phi_report_max(const phicsl_phi_report* report, const char** grain, const char** bipartition,
                                    double* phi) {
    PHICSL_REQUIRE(report, "phicsl_phi_report_max: null report");
    const auto& row = report->value.max;
    if (grain) *grain = row.grain.c_str();
    if (bipartition) *bipartition = row.bipartition.c_str();
    if (phi) *phi = row.phi;
    return PHICSL_OK;
}

phicsl_status phicsl_phi_report_csv(const phicsl_phi_report* report, const char** out) {
    PHICSL_REQUIRE(report && out, "phicsl_phi_report_csv: null argument");
    *out = report->csv.c_str();
    return PHICSL_OK;
}

phicsl_status phicsl_phi_report_text(const phicsl_phi_report* report, const char** out) {
    PHICSL_REQUIRE(report && out, "phicsl_phi_report_text: null argument");
    *out = report->text.c_str();
    return PHICSL_OK;
}

// ---------------------------------------------------------------------------

phicsl_status phicsl_config_load(const char* path, phicsl_config** out) {
    PHICSL_REQUIRE(path && out, "phicsl_config_load: null argument");
    *out = nullptr;
    return guarded([&] {
        auto c = phicsl::load_config(path);
        std::string p = c.output_path().string();
        *out = new phicsl_config{std::move(c), std::move(p)};
    });
}

phicsl_status phicsl_config_parse(const char* text, const char* base_dir, phicsl_config** out) {
    PHICSL_REQUIRE(text && out, "phicsl_config_parse: null argument");
    *out = nullptr;
    return guarded([&] {
        auto c = phicsl::parse_config(text, "<config>", base_dir ? std::filesystem::path(base_dir) : std::filesystem::path());
        std::string p = c.output_path().string();
        *out = new phicsl_config{std::move(c), std::move(p)};
    });
}

void phicsl_config_destroy(phicsl_config* config) { delete config; }

phicsl_status phicsl_config_output_path(const phicsl_config* config, const char** out) {
    PHICSL_REQUIRE(config && out, "phicsl_config_output_path: null argument");
    *out = config->output_path.c_str();
    return PHICSL_OK;
}

// ---------------------------------------------------------------------------

phicsl_status phicsl_run_config(const phicsl_config* config, unsigned threads, phicsl_run** out) {
    PHICSL_REQUIRE(config && out, "phicsl_run_config: null argument");
    *out = nullptr;
    return guarded([&] { *out = new phicsl_run{phicsl::run_config(config->value, threads), {}, {}}; });
}

void phicsl_run_destroy(phicsl_run* run) { delete run; }

phicsl_status phicsl_run_write(const phicsl_run* run) {
    PHICSL_REQUIRE(run, "phicsl_run_write: null run");
    return guarded([&] { phicsl::write_outputs(run->value, run->value.config.output_path()); });
}

phicsl_status phicsl_run_write_to(const phicsl_run* run, const char* csv_path) {
    PHICSL_REQUIRE(run && csv_path, "phicsl_run_write_to: null argument");
    return guarded([&] { phicsl::write_outputs(run->value, csv_path); });
}

phicsl_status phicsl_run_class_count(const phicsl_run* run, size_t* out) {
    PHICSL_REQUIRE(run && out, "phicsl_run_class_count: null argument");
    *out = run->value.class_eigenvalues.size();
    return PHICSL_OK;
}

phicsl_status phicsl_run_counts(const phicsl_run* run, uint64_t* counts, size_t n) {
    PHICSL_REQUIRE(run && counts, "phicsl_run_counts: null argument");
    const auto& c = run->value.result.stats.counts;
    PHICSL_REQUIRE(n == c.size(), "phicsl_run_counts: buffer size must equal the class count");
    for (std::size_t k = 0; k < n; ++k) counts[k] = c[k];
    return PHICSL_OK;
}

phicsl_status phicsl_run_born(const phicsl_run* run, double* born, size_t n) {
    PHICSL_REQUIRE(run && born, "phicsl_run_born: null argument");
    const auto& b = run->value.result.stats.born_probabilities;
    PHICSL_REQUIRE(n == b.size(), "phicsl_run_born: buffer size must equal the class count");
    for (std::size_t k = 0; k < n; ++k) born[k] = b[k];
    return PHICSL_OK;
}

phicsl_status phicsl_run_chi_square(const phicsl_run* run, double* statistic, size_t* dof, double* p_value) {
    PHICSL_REQUIRE(run, "phicsl_run_chi_square: null run");
    const auto& s = run->value.result.stats;
    if (statistic) *statistic = s.chi_square;
    if (dof) *dof = s.dof;
    if (p_value) *p_value = s.p_value;
    return PHICSL_OK;
}

phicsl_status phicsl_run_collapsed(const phicsl_run* run, size_t* out) {
    PHICSL_REQUIRE(run && out, "phicsl_run_collapsed: null argument");
    *out = run->value.result.stats.n_collapsed;
    return PHICSL_OK;
}

phicsl_status phicsl_run_warning_count(const phicsl_run* run, size_t* out) {
    PHICSL_REQUIRE(run && out, "phicsl_run_warning_count: null argument");
    *out = run->value.warnings.size();
    return PHICSL_OK;
}

phicsl_status phicsl_run_warning(const phicsl_run* run, size_t index, const char** out) {
    PHICSL_REQUIRE(run && out, "phicsl_run_warning: null argument");
    PHICSL_REQUIRE(index < run->value.warnings.size(), "phicsl_run_warning: index out of range");
    *out = run->value.warnings[index].c_str();
    return PHICSL_OK;
}

phicsl_status phicsl_run_csv(const phicsl_run* run, const char** out) {
    PHICSL_REQUIRE(run && out, "phicsl_run_csv: null argument");
    return guarded([&] {
        if (run->csv.empty()) {
            std::ostringstream os;
            phicsl::write_result_csv(os, run->value);
            run->csv = os.str();
        }
        *out = run->csv.c_str();
    });
}

phicsl_status phicsl_run_summary_json(const phicsl_run* run, const char** out) {
    PHICSL_REQUIRE(run && out, "phicsl_run_summary_json: null argument");
    return guarded([&] {
        if (run->summary.empty()) run->summary = phicsl::summary_json(run->value);
        *out = run->summary.c_str();
    });
}

// ---------------------------------------------------------------------------

size_t phicsl_scenario_count(void) { return phicsl::scenario_catalog().size(); }

phicsl_status phicsl_scenario_name(size_t index, const char** out) {
    PHICSL_REQUIRE(out && index < phicsl::scenario_catalog().size(), "phicsl_scenario_name: index out of range");
    *out = phicsl::scenario_catalog()[index].name.c_str();
    return PHICSL_OK;
}

phicsl_status phicsl_scenario_description(size_t index, const char** out) {
    PHICSL_REQUIRE(out && index < phicsl::scenario_catalog().size(), "phicsl_scenario_description: index out of range");
    *out = phicsl::scenario_catalog()[index].description.c_str();
    return PHICSL_OK;
}

phicsl_status phicsl_scenario_parameter_count(size_t index, size_t* out) {
    PHICSL_REQUIRE(out && index < phicsl::scenario_catalog().size(), "phicsl_scenario_parameter_count: index out of range");
    *out = phicsl::scenario_catalog()[index].parameters.size();
    return PHICSL_OK;
}

phicsl_status phicsl_scenario_parameter(size_t index, size_t parameter, const char** name, double* default_value) {
    PHICSL_REQUIRE(index < phicsl::scenario_catalog().size(), "phicsl_scenario_parameter: index out of range");
    const auto& params = phicsl::scenario_catalog()[index].parameters;
    PHICSL_REQUIRE(parameter < params.size(), "phicsl_scenario_parameter: parameter out of range");
    if (name) *name = params[parameter].first.c_str();
    if (default_value) *default_value = params[parameter].second;
    return PHICSL_OK;
}

}  // extern "C"
