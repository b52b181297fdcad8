// SPDX-License-Identifier: Apache-2.0
#include "phicsl/errors.hpp"
#include "phicsl/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace phicsl {

namespace {

void require_qubit_layout(const SubsystemLayout& layout, const std::string& basis) {
    for (auto d : layout.dims())
        if (d != 2) throw std::invalid_argument("phi basis '" + basis + "' needs an all-qubit layout");
}

}  // namespace

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::vector<StateVector> named_basis(const std::string& name, const SubsystemLayout& layout) {
    const std::size_t dim = layout.total_dim();
    std::vector<StateVector> out;
    const double r = 1.0 / std::sqrt(2.0);
    if (name == "computational") {
        for (std::size_t k = 0; k < dim; ++k) out.push_back(StateVector::basis(layout, k));
        return out;
    }
    if (name == "bell") {
        require_qubit_layout(layout, name);
        if (layout.size() % 2) throw std::invalid_argument("phi basis 'bell' needs an even number of qubits");
        // Pair states in order Phi+, Phi-, Psi+, Psi-.
        const cplx pair[4][4] = {{r, 0, 0, r}, {r, 0, 0, -r}, {0, r, r, 0}, {0, r, -r, 0}};
        const std::size_t pairs = layout.size() / 2;
        for (std::size_t k = 0; k < dim; ++k) {
            CVector v = CVector::Ones(1);
            for (std::size_t p = 0; p < pairs; ++p) {
                const std::size_t which = (k >> (2 * (pairs - 1 - p))) & 3;
                CVector f(4);
                for (int j = 0; j < 4; ++j) f(j) = pair[which][j];
                CVector next(v.size() * 4);
                for (Eigen::Index a = 0; a < v.size(); ++a) next.segment(a * 4, 4) = v(a) * f;
                v = std::move(next);
            }
            out.emplace_back(layout, v);
        }
        return out;
    }
    if (name == "ghz") {
        require_qubit_layout(layout, name);
        if (layout.size() < 2) throw std::invalid_argument("phi basis 'ghz' needs at least two qubits");
        for (std::size_t x = 0; x < dim / 2; ++x) {
            for (double sign : {1.0, -1.0}) {
                CVector v = CVector::Zero(static_cast<Eigen::Index>(dim));
                v(static_cast<Eigen::Index>(x)) = r;
                v(static_cast<Eigen::Index>(dim - 1 - x)) = sign * r;
                out.emplace_back(layout, v);
            }
        }
        return out;
    }
    throw std::invalid_argument("unknown phi basis '" + name + "' (computational, bell, ghz)");
}

TrajectorySpec build_trajectory_spec(const ExperimentConfig& c) {
    const bool csl = c.dynamics != DynamicsKind::grw;
    const double lambda = csl ? c.lambda : 1.0;

    std::optional<StateVector> psi;
    std::optional<HermitianOperator> hamiltonian, collapse;
    if (c.scenario) {
        ScenarioSpec s = build_named_scenario(*c.scenario, c.scenario_parameters, lambda);
        psi = s.tracked_state();
        hamiltonian = s.hamiltonian;
        collapse = s.collapse_op();
    } else if (c.state_spec) {
        psi = parse_state_spec(*c.state_spec);
        hamiltonian = HermitianOperator::zero(psi->layout());
    } else {
        throw ConfigError("no scenario or inline state");
    }
    const SubsystemLayout& layout = psi->layout();

    switch (c.operator_source) {
        case OperatorSource::scenario:
            if (!c.scenario) throw ConfigError("operator source 'scenario' needs a scenario");
            break;
        case OperatorSource::diagonal:
            if (c.eigenvalues.size() != layout.total_dim())
                throw ConfigError("operator.eigenvalues has " + std::to_string(c.eigenvalues.size()) +
                                      " entries, state dimension is " + std::to_string(layout.total_dim()),
                                  0, "operator.eigenvalues");
            collapse = HermitianOperator::diagonal(layout, c.eigenvalues);
            break;
        case OperatorSource::phi_basis:
            collapse = build_phi_operator(PhiBasisSpec{layout, named_basis(c.phi_basis, layout)}, c.degeneracy_tol);
            break;
    }

    TrajectorySpec spec{ClosedSpec{*psi, CslParams(lambda, *collapse, c.degeneracy_tol), c.grid}, {}};
    spec.options.collapse_threshold = c.collapse_threshold;
    spec.options.record_every = c.record_every;
    switch (c.dynamics) {
        case DynamicsKind::csl_closed:
            if (hamiltonian->operator_norm() > 0.0)
                throw ConfigError("csl-closed requires H = 0 but the scenario has a Hamiltonian; use csl-sde");
            break;
        case DynamicsKind::csl_sde:
            spec.model = SdeSpec{*psi, *hamiltonian, CslParams(lambda, *collapse, c.degeneracy_tol), c.dt, c.steps};
            break;
        case DynamicsKind::grw:
            spec.model = GrwSpec{*psi, *hamiltonian, GrwParams(c.grw_rate, c.grw_r_c, *collapse, c.degeneracy_tol),
                                 c.t_final, c.dt};
            break;
    }
    return spec;
}

RunOutput run_config(const ExperimentConfig& config, unsigned threads) {
    TrajectorySpec spec = build_trajectory_spec(config);
    RunOutput out;
    out.config = config;
    const Spectrum& s = spec.spectrum();
    for (std::size_t c = 0; c < s.class_count(); ++c) out.class_eigenvalues.push_back(s.class_value(c));
    out.result = run_ensemble(spec, config.n_trajectories, config.master_seed, threads);
    for (const auto& t : out.result.trajectories)
        for (const auto& w : t.warnings)
            if (std::find(out.warnings.begin(), out.warnings.end(), w) == out.warnings.end()) out.warnings.push_back(w);
    return out;
}

void write_result_csv(std::ostream& out, const RunOutput& run) {
    const std::size_t k = run.class_eigenvalues.size();
    out << "trajectory_id,time";
    for (std::size_t c = 0; c < k; ++c) out << ",w_" << c;
    out << ",B,outcome\n";
    const auto& trajectories = run.result.trajectories;
    for (std::size_t i = 0; i < trajectories.size(); ++i) {
        const TrajectoryRecord& t = trajectories[i];
        const std::string outcome = t.outcome ? std::to_string(*t.outcome) : "";
        for (std::size_t r = 0; r < t.times.size(); ++r) {
            out << i << ',' << format_number(t.times[r]);
            for (double w : t.branch_weights[r]) out << ',' << format_number(w);
            out << ',' << format_number(t.noise[r]) << ',' << outcome << '\n';
        }
    }
}

std::string summary_json(const RunOutput& run) {
    using json = nlohmann::ordered_json;
    const ExperimentConfig& c = run.config;
    const EnsembleStats& st = run.result.stats;
    json j;
    if (c.scenario)
        j["scenario"] = *c.scenario;
    else
        j["state"] = *c.state_spec;
    j["dynamics"] = to_string(c.dynamics);
    if (c.dynamics != DynamicsKind::grw) j["lambda"] = c.lambda;
    j["n_trajectories"] = st.n_trajectories;
    j["master_seed"] = c.master_seed;
    j["collapse_threshold"] = c.collapse_threshold;
    std::size_t rows = 0;
    for (const auto& t : run.result.trajectories) rows += t.times.size();
    j["rows"] = rows;
    json classes = json::array();
    for (std::size_t k = 0; k < run.class_eigenvalues.size(); ++k) {
        classes.push_back({{"index", k},
                           {"eigenvalue", run.class_eigenvalues[k]},
                           {"born", st.born_probabilities[k]},
                           {"count", st.counts[k]},
                           {"empirical", st.empirical_probabilities[k]}});
    }
    j["classes"] = std::move(classes);
    j["chi_square"] = st.chi_square;
    j["dof"] = st.dof;
    j["p_value"] = st.p_value;
    j["n_collapsed"] = st.n_collapsed;
    j["warnings"] = run.warnings;
    return j.dump(2) + "\n";
}

void write_outputs(const RunOutput& run, const std::filesystem::path& csv_path) {
    std::error_code ec;
    if (csv_path.has_parent_path()) std::filesystem::create_directories(csv_path.parent_path(), ec);
    {
        std::ofstream csv(csv_path, std::ios::binary | std::ios::trunc);
        if (!csv) throw IoError("cannot write '" + csv_path.string() + "'");
        write_result_csv(csv, run);
        if (!csv) throw IoError("write failed for '" + csv_path.string() + "'");
    }
    const std::filesystem::path summary = csv_path.string() + ".summary.json";
    std::ofstream js(summary, std::ios::binary | std::ios::trunc);
    if (!js) throw IoError("cannot write '" + summary.string() + "'");
    js << summary_json(run);
    if (!js) throw IoError("write failed for '" + summary.string() + "'");
}

}  // namespace phicsl
