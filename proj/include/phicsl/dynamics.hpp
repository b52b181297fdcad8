// SPDX-License-Identifier: Apache-2.0
#pragma once

// Collapse dynamics over the discrete spectrum of a collapse operator A.
//
// Closed form (H = 0): for |psi(0)> = sum_i c_i |a_i>,
//     |psi(t)>_B = sum_i c_i exp(-(B - 2 lambda t a_i)^2 / (4 lambda t)) |a_i>
// with B(t) drawn from the mixture sum_i |c_i|^2 Normal(2 lambda t a_i, lambda t).
//
// General H: the norm-preserving unraveling
//     d psi = [-i H dt + sqrt(lambda) (A - <A>) dW - (lambda/2) (A - <A>)^2 dt] psi
// whose H = 0 statistics coincide with the closed form. The noise record is
// dB = 2 lambda <A> dt + sqrt(lambda) dW.
//
// Branches are eigenvalue classes of A ordered by ascending eigenvalue.

#include "phicsl/hilbert.hpp"
#include "phicsl/random.hpp"
#include "phicsl/stats.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace phicsl {

class CslParams {
public:
    CslParams(double lambda, HermitianOperator collapse_op, std::optional<double> degeneracy_tol = std::nullopt);

    double lambda() const { return lambda_; }
    const HermitianOperator& collapse_op() const { return collapse_op_; }
    const Spectrum& spectrum() const { return *spectrum_; }

private:
    double lambda_;
    HermitianOperator collapse_op_;
    std::shared_ptr<const Spectrum> spectrum_;
};

// Jump rate and smearing width (in eigenvalue units) of the discrete GRW process.
class GrwParams {
public:
    GrwParams(double rate, double r_c, HermitianOperator collapse_op, std::optional<double> degeneracy_tol = std::nullopt);

    double rate() const { return rate_; }
    double r_c() const { return r_c_; }
    const HermitianOperator& collapse_op() const { return collapse_op_; }
    const Spectrum& spectrum() const { return *spectrum_; }

private:
    double rate_;
    double r_c_;
    HermitianOperator collapse_op_;
    std::shared_ptr<const Spectrum> spectrum_;
};

struct NoiseSample {
    std::vector<double> times;   // starts at 0, strictly increasing
    std::vector<double> values;  // values[0] == 0

    void validate() const;
};

// Per-class branch amplitudes ||P_i psi0|| exp(-(B - 2 lambda t a_i)^2 / (4 lambda t)),
// kept in log form so that strongly suppressed branches stay representable.
struct BranchAmplitudes {
    std::vector<double> log_magnitude;  // -inf for classes absent from psi0

    std::vector<double> magnitudes() const;
    // |amplitude|^2 normalized to sum 1.
    std::vector<double> weights() const;
};

struct TrajectoryOptions {
    // A trajectory counts as collapsed when its dominant branch weight exceeds 1 - threshold.
    double collapse_threshold = 1e-6;
    bool keep_states = false;
};

struct TrajectoryRecord {
    std::uint64_t seed = 0;
    std::vector<double> times;
    std::vector<double> noise;                        // B(t) at each time; NaN for GRW
    std::vector<std::vector<double>> branch_weights;  // [time][class]
    std::optional<std::size_t> outcome;               // argmax class at the final time
    bool collapsed = false;
    std::optional<StateVector> final_state;
    std::vector<StateVector> states;                  // per time, only with keep_states
    std::size_t jumps = 0;                            // GRW localization events
    std::vector<std::string> warnings;
};

BranchAmplitudes closed_form_weights(const StateVector& psi0, const CslParams& params, double t, double b);
StateVector closed_form_state(const StateVector& psi0, const CslParams& params, double t, double b);

struct NoiseDraw {
    std::size_t branch = 0;  // mixture component that produced the value
    double value = 0.0;
};

NoiseDraw draw_noise(const StateVector& psi0, const CslParams& params, double t, Rng& rng);
double sample_noise(const StateVector& psi0, const CslParams& params, double t, Rng& rng);

// Brownian path with diffusion constant lambda pinned at (0, 0) and
// (grid.back(), final_value); interior points sampled by exact bridge conditioning.
NoiseSample brownian_bridge(std::span<const double> grid, double final_value, double lambda, Rng& rng);

TrajectoryRecord trajectory_closed(const StateVector& psi0, const CslParams& params, std::span<const double> grid,
                                   Rng& rng, const TrajectoryOptions& options = {});

struct SdeOptions : TrajectoryOptions {
    std::size_t record_every = 1;
    double step_warning_threshold = 0.1;  // on dt * ||H||
};

TrajectoryRecord trajectory_sde(const StateVector& psi0, const HermitianOperator& hamiltonian, const CslParams& params,
                                double dt, std::size_t n_steps, Rng& rng, const SdeOptions& options = {});

// Records at k * dt for k = 1..round(t_final / dt); jumps occur at exact Poisson times.
TrajectoryRecord trajectory_grw(const StateVector& psi0, const HermitianOperator& hamiltonian, const GrwParams& params,
                                double t_final, double dt, Rng& rng, const TrajectoryOptions& options = {});

// ---------------------------------------------------------------------------
// Ensembles

struct ClosedSpec {
    StateVector psi0;
    CslParams params;
    std::vector<double> grid;
};

struct SdeSpec {
    StateVector psi0;
    HermitianOperator hamiltonian;
    CslParams params;
    double dt;
    std::size_t steps;
};

struct GrwSpec {
    StateVector psi0;
    HermitianOperator hamiltonian;
    GrwParams params;
    double t_final;
    double dt;
};

struct TrajectorySpec {
    std::variant<ClosedSpec, SdeSpec, GrwSpec> model;
    SdeOptions options;  // record_every and the step warning apply to SDE only

    const Spectrum& spectrum() const;
    const StateVector& initial_state() const;
    std::vector<double> born_weights() const;
    std::size_t class_count() const { return spectrum().class_count(); }
};

TrajectoryRecord run_trajectory(const TrajectorySpec& spec, std::uint64_t seed);

struct EnsembleStats {
    std::size_t n_trajectories = 0;
    std::vector<std::uint64_t> counts;
    std::vector<double> empirical_probabilities;
    std::vector<double> born_probabilities;
    double chi_square = 0.0;
    std::size_t dof = 0;
    double p_value = 1.0;
    std::size_t n_collapsed = 0;

    bool operator==(const EnsembleStats&) const = default;
};

EnsembleStats summarize(std::span<const TrajectoryRecord> records, std::span<const double> born);

struct EnsembleResult {
    EnsembleStats stats;
    std::vector<TrajectoryRecord> trajectories;
};

// Trajectory i uses seed derive_seed(master_seed, i). Results do not depend on
// the thread count or completion order.
EnsembleResult run_ensemble(const TrajectorySpec& spec, std::size_t n, std::uint64_t master_seed, unsigned threads = 1);

}  // namespace phicsl
