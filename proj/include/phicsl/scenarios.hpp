// SPDX-License-Identifier: Apache-2.0
#pragma once

// Measurement set-ups: particle, apparatus, observer and environment qubits.
//
// Every subsystem is a qubit. Pointer states are |+> = |0> and |-> = |1>;
// ready states are |R> = |0>. Tracking maps |R>|s> -> |s>|s> are completed to
// unitaries by controlled copies (CNOT). Kets are written observer first.

#include "phicsl/dynamics.hpp"
#include "phicsl/hilbert.hpp"
#include "phicsl/phi.hpp"

#include <map>
#include <string>
#include <vector>

namespace phicsl {

struct ScenarioSpec {
    std::string name;
    SubsystemLayout layout;
    StateVector initial_state;
    CMatrix tracking_unitary;
    CslParams params;               // carries the collapse operator
    HermitianOperator hamiltonian;  // zero unless the scenario has its own unitary dynamics
    // Designated branch states (pointer branches, tracked bases) for diagnostics.
    std::vector<StateVector> branches;

    const HermitianOperator& collapse_op() const { return params.collapse_op(); }
    // tracking_unitary * initial_state: the state the collapse dynamics starts from.
    StateVector tracked_state() const;
};

// Permutation unitary flipping `target` when `control` is |1>. Qubit layouts only.
CMatrix controlled_not(const SubsystemLayout& layout, std::size_t control, std::size_t target);

// Particle in alpha|+> + beta|->, apparatus (and observer) ready. Tracking
// yields alpha|+>_M|+>_p + beta|->_M|->_p, or with the observer
// alpha|+>_O|+>_M|+>_p + beta|->_O|->_M|->_p. The collapse operator is the
// Phi operator of the computational (pointer) basis: both branches are
// product states, so they share the eigenvalue 0.
ScenarioSpec build_measurement_scenario(cplx alpha, cplx beta, bool with_observer, double lambda = 1.0);

// Appends n_env environment qubits in |0>. In the branch where `pointer` reads
// |-> every environment qubit is rotated to cos(theta)|0> + sin(theta)|1>, so
// the branch environments overlap by cos(theta)^n_env. Qubit pointers only.
// Dense output; limited to 2^14 amplitudes.
StateVector couple_environment(const StateVector& state, std::size_t n_env, double theta, std::size_t pointer = 0);

// <E_+|E_-> = cos(theta)^n_env, by the product formula over environment qubits.
double environment_overlap(std::size_t n_env, double theta);

// Observer record of one environment qubit rotated by `angle`: a CNOT from the
// environment qubit onto a fresh record qubit, giving cos|00> + sin|11>.
StateVector environment_record(double angle);

// Phi^Max of the record pair of a branch whose environment is rotated by `angle`.
double dressed_branch_phi(double angle);

// Two dressed branches alpha|b_+> + beta|b_->, where b_- carries n_env
// rotated environment qubits. The state is expressed in the orthonormal
// dressed-branch basis (one two-level subsystem), which is all the collapse
// dynamics sees; the Phi operator is diag(dressed_branch_phi(0),
// dressed_branch_phi(theta)), degenerate exactly when theta = 0.
ScenarioSpec build_environment_scenario(cplx alpha, cplx beta, std::size_t n_env, double theta, double lambda = 1.0);

enum class ReadyMode { tracks_pointer, tracks_superposition, superposed_ready };

// Observer with a mode qubit (|0> = R, |1> = R*) and a percept qubit, looking
// at apparatus + particle already in |S>_{M+p} = alpha|++> + beta|-->.
// R copies the pointer onto the percept; R* flips the percept iff M+p is in
// |S>, so |R*>|S> -> |S>_O|S> with |S>_O = |1 1>. superposed_ready starts in
// (|R> + |R*>)/sqrt2. The Phi operator separates the two tracked bases:
// eigenvalue 0 on the percept-tracks-pointer branches, Phi^Max(|S>_O|S>) on
// the tracked-superposition branch.
ScenarioSpec build_ready_state_variants(ReadyMode mode, cplx alpha = cplx(1.0 / std::sqrt(2.0)),
                                        cplx beta = cplx(1.0 / std::sqrt(2.0)), double lambda = 1.0);

// Single qubit sqrt(w0)|0> + sqrt(1-w0)|1>, collapse operator diag(a0, a1), H = omega * sigma_x.
ScenarioSpec build_two_branch_scenario(double weight0, double a0, double a1, double omega, double lambda = 1.0);

// |0> under H = omega * sigma_x with collapse operator diag(0, delta_a).
ScenarioSpec build_zeno_scenario(double omega, double delta_a, double lambda = 1.0);

// ---------------------------------------------------------------------------
// Catalog addressable by name

struct ScenarioInfo {
    std::string name;
    std::string description;
    std::vector<std::pair<std::string, double>> parameters;  // name, default
};

const std::vector<ScenarioInfo>& scenario_catalog();

// Throws std::invalid_argument for unknown scenarios or parameters.
ScenarioSpec build_named_scenario(const std::string& name, const std::map<std::string, double>& parameters,
                                  double lambda);

}  // namespace phicsl
