// SPDX-License-Identifier: Apache-2.0
//
// phicsl command-line front end. Links only the C API.
//
//   phicsl run <config> [-o out.csv]   exit 0 ok, 1 config/io error, 2 numeric failure
//   phicsl phi <state-spec> [--csv]
//   phicsl scenarios
//   phicsl validate <config>
//
// PHICSL_THREADS sets the worker count for `run` (unset or 0: all hardware threads).

#include "phicsl/phicsl.h"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumeric = 2;

// Shortest of %.15g / %.17g that reads back exactly.
std::string shortest(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    if (std::strtod(buf, nullptr) != v) std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int report(phicsl_status s, const char* context) {
    std::fprintf(stderr, "phicsl %s: %s: %s\n", context, phicsl_status_name(s), phicsl_last_error());
    return s == PHICSL_ERR_NUMERIC ? kExitNumeric : kExitConfig;
}

bool thread_count(unsigned& out) {
    const char* env = std::getenv("PHICSL_THREADS");
    out = 0;
    if (!env || !*env) return true;
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (*end != '\0' || env[0] == '-' || v > 4096) {
        std::fprintf(stderr, "phicsl: PHICSL_THREADS must be an integer in [0, 4096], got '%s'\n", env);
        return false;
    }
    out = static_cast<unsigned>(v);
    return true;
}

int cmd_run(const std::string& path, const std::string& output_override) {
    unsigned threads = 0;
    if (!thread_count(threads)) return kExitConfig;

    phicsl_config* cfg = nullptr;
    if (auto s = phicsl_config_load(path.c_str(), &cfg); s != PHICSL_OK) return report(s, "run");

    phicsl_run* run = nullptr;
    phicsl_status s = phicsl_run_config(cfg, threads, &run);
    if (s == PHICSL_OK) {
        const char* out = nullptr;
        phicsl_config_output_path(cfg, &out);
        const std::string csv = output_override.empty() ? out : output_override;
        s = phicsl_run_write_to(run, csv.c_str());
        if (s == PHICSL_OK) {
            size_t warnings = 0;
            phicsl_run_warning_count(run, &warnings);
            for (size_t i = 0; i < warnings; ++i) {
                const char* w = nullptr;
                phicsl_run_warning(run, i, &w);
                std::fprintf(stderr, "warning: %s\n", w);
            }
            size_t k = 0;
            phicsl_run_class_count(run, &k);
            std::vector<uint64_t> counts(k);
            std::vector<double> born(k);
            phicsl_run_counts(run, counts.data(), k);
            phicsl_run_born(run, born.data(), k);
            double chi = 0.0, p = 0.0;
            size_t dof = 0;
            phicsl_run_chi_square(run, &chi, &dof, &p);
            std::printf("wrote %s\n", csv.c_str());
            for (size_t c = 0; c < k; ++c)
                std::printf("class %zu: count %llu, born %.6f\n", c, static_cast<unsigned long long>(counts[c]), born[c]);
            std::printf("chi-square %.6g (dof %zu), p = %.6g\n", chi, dof, p);
        }
    }
    const int code = s == PHICSL_OK ? kExitOk : report(s, "run");
    phicsl_run_destroy(run);
    phicsl_config_destroy(cfg);
    return code;
}

int cmd_phi(const std::string& spec, bool csv) {
    phicsl_state* state = nullptr;
    if (auto s = phicsl_state_parse(spec.c_str(), &state); s != PHICSL_OK) return report(s, "phi");
    phicsl_phi_report* rep = nullptr;
    phicsl_status s = phicsl_phi_report_create(state, &rep);
    if (s == PHICSL_OK) {
        const char* text = nullptr;
        s = csv ? phicsl_phi_report_csv(rep, &text) : phicsl_phi_report_text(rep, &text);
        if (s == PHICSL_OK) std::fputs(text, stdout);
    }
    const int code = s == PHICSL_OK ? kExitOk : report(s, "phi");
    phicsl_phi_report_destroy(rep);
    phicsl_state_destroy(state);
    return code;
}

int cmd_scenarios() {
    for (size_t i = 0; i < phicsl_scenario_count(); ++i) {
        const char *name = nullptr, *desc = nullptr;
        phicsl_scenario_name(i, &name);
        phicsl_scenario_description(i, &desc);
        std::printf("%s\n    %s\n", name, desc);
        size_t np = 0;
        phicsl_scenario_parameter_count(i, &np);
        for (size_t j = 0; j < np; ++j) {
            const char* pname = nullptr;
            double def = 0.0;
            phicsl_scenario_parameter(i, j, &pname, &def);
            std::printf("    %s = %s\n", pname, shortest(def).c_str());
        }
    }
    return kExitOk;
}

int cmd_validate(const std::string& path) {
    phicsl_config* cfg = nullptr;
    if (auto s = phicsl_config_load(path.c_str(), &cfg); s != PHICSL_OK) return report(s, "validate");
    std::printf("%s: ok\n", path.c_str());
    phicsl_config_destroy(cfg);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Consciousness-based CSL collapse simulator"};
    app.set_version_flag("--version", std::string(phicsl_version()));
    app.require_subcommand(1);

    std::string run_config, output, phi_spec, validate_config;
    bool phi_csv = false;

    auto* run = app.add_subcommand("run", "run an experiment config and write CSV + summary");
    run->add_option("config", run_config, "experiment config file")->required();
    run->add_option("-o,--output", output, "override the configured CSV output path");

    auto* phi = app.add_subcommand("phi", "report Phi per grain and Phi^Max of a state");
    phi->add_option("state-spec", phi_spec, "state spec, e.g. bell, ghz:3, dims=2,2;amps=1,0,0,1")->required();
    phi->add_flag("--csv", phi_csv, "emit CSV instead of text");

    auto* scen = app.add_subcommand("scenarios", "list named scenarios and their parameters");
    auto* val = app.add_subcommand("validate", "check a config without running it");
    val->add_option("config", validate_config, "experiment config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (run->parsed()) return cmd_run(run_config, output);
    if (phi->parsed()) return cmd_phi(phi_spec, phi_csv);
    if (scen->parsed()) return cmd_scenarios();
    if (val->parsed()) return cmd_validate(validate_config);
    return kExitConfig;
}
