// SPDX-License-Identifier: Apache-2.0
#pragma once

// Experiment configs, inline state specs, result tables and Phi reports.
// The config schema is documented in configs/README.md.

#include "phicsl/dynamics.hpp"
#include "phicsl/phi.hpp"
#include "phicsl/scenarios.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace phicsl {

// ---------------------------------------------------------------------------
// State specs
//
//   bell | ghz:N | w:N | product:N | plus:N | two-bell-pairs
//   dims=2,2;amps=1,0,0,1            amplitudes re or re:im, normalized on parse
//   dims=2,2;labels=A,B;amps=...

// Throws std::invalid_argument on malformed input.
StateVector parse_state_spec(const std::string& spec);

// ---------------------------------------------------------------------------
// Experiment configs

enum class DynamicsKind { csl_closed, csl_sde, grw };
enum class OperatorSource { scenario, diagonal, phi_basis };

std::string to_string(DynamicsKind kind);

struct ExperimentConfig {
    std::string source = "<config>";
    std::filesystem::path base_dir;  // relative output paths resolve against this

    std::optional<std::string> scenario;
    std::map<std::string, double> scenario_parameters;
    std::optional<std::string> state_spec;

    DynamicsKind dynamics = DynamicsKind::csl_closed;
    double lambda = 1.0;
    std::size_t n_trajectories = 0;
    std::uint64_t master_seed = 0;
    std::string output;
    double collapse_threshold = 1e-6;

    // csl-closed: grid; csl-sde: dt, steps, record_every; grw: t_final, dt.
    std::vector<double> grid;
    double dt = 0.0;
    std::size_t steps = 0;
    std::size_t record_every = 1;
    double t_final = 0.0;

    double grw_rate = 0.0;
    double grw_r_c = 0.0;

    OperatorSource operator_source = OperatorSource::scenario;
    std::vector<double> eigenvalues;    // diagonal source
    std::string phi_basis = "computational";
    std::optional<double> degeneracy_tol;

    std::filesystem::path output_path() const;
};

// Strict parsing: unknown sections, unknown or duplicate keys, keys that do not
// apply to the chosen dynamics, and malformed values throw ConfigError naming
// the line and key. Semantic checks (scenario parameters, state spec, operator
// dimensions) run here too, so a config that parses will build.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>",
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

// Throws ConfigError when the config does not describe a runnable experiment.
TrajectorySpec build_trajectory_spec(const ExperimentConfig& config);

// Phi-basis operator from a named basis: computational, bell (Bell basis on
// consecutive qubit pairs), ghz ((|x> +- |~x>)/sqrt2 for all qubits).
std::vector<StateVector> named_basis(const std::string& name, const SubsystemLayout& layout);

struct RunOutput {
    ExperimentConfig config;
    std::vector<double> class_eigenvalues;
    EnsembleResult result;
    std::vector<std::string> warnings;  // distinct, in first-seen order
};

// Runs the ensemble. NumericalError propagates with the trajectory named.
RunOutput run_config(const ExperimentConfig& config, unsigned threads = 1);

// trajectory_id,time,w_0..w_{k-1},B,outcome with numbers at 17 significant digits.
void write_result_csv(std::ostream& out, const RunOutput& run);
std::string summary_json(const RunOutput& run);

// Writes the CSV to `csv_path` and the summary to `csv_path` + ".summary.json".
void write_outputs(const RunOutput& run, const std::filesystem::path& csv_path);

// "%.17g"; non-finite values print as nan, inf, -inf.
std::string format_number(double value);

// ---------------------------------------------------------------------------
// Phi report

struct PhiReportRow {
    std::string grain;
    std::string bipartition;
    double phi = 0.0;
};

struct PhiReport {
    std::vector<PhiReportRow> grains;  // canonical grain order
    PhiReportRow max;                  // Phi^Max with its grain and minimizing cut
    std::string note;                  // diagnostic for single-subsystem states

    std::string to_csv() const;   // kind,grain,bipartition,phi
    std::string to_text() const;
};

PhiReport phi_report(const StateVector& state);

}  // namespace phicsl
