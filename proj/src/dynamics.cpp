// SPDX-License-Identifier: Apache-2.0
#include "phicsl/dynamics.hpp"

#include "phicsl/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace phicsl {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_normalized(const StateVector& psi, const char* where) {
    if (!psi.is_normalized()) throw std::invalid_argument(std::string(where) + ": initial state is not normalized");
}

void require_dims(const StateVector& psi, std::size_t dim, const char* where) {
    if (psi.dim() != dim) throw std::invalid_argument(std::string(where) + ": state/operator dimension mismatch");
}

std::size_t argmax(const std::vector<double>& v) {
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

std::vector<double> class_weights_of(const Spectrum& s, const CVector& psi) {
    const CVector c = s.eigenvectors.adjoint() * psi;
    std::vector<double> w(s.class_count(), 0.0);
    for (std::size_t k = 0; k < s.size(); ++k) w[s.class_of[k]] += std::norm(c(static_cast<Eigen::Index>(k)));
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& x : w) x /= total;
    return w;
}

void finish_record(TrajectoryRecord& rec, const TrajectoryOptions& options) {
    const auto& last = rec.branch_weights.back();
    rec.outcome = argmax(last);
    rec.collapsed = last[*rec.outcome] > 1.0 - options.collapse_threshold;
}

std::vector<double> validated_grid(std::span<const double> grid) {
    if (grid.empty()) throw std::invalid_argument("trajectory: empty time grid");
    if (!(grid.front() > 0.0)) throw std::invalid_argument("trajectory: time grid must start after 0");
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (!(grid[k] > grid[k - 1])) throw std::invalid_argument("trajectory: time grid must be strictly increasing");
    return {grid.begin(), grid.end()};
}

// Cached eigendecomposition of H for exact propagation between events.
class Propagator {
public:
    explicit Propagator(const HermitianOperator& h) : trivial_(h.matrix().isZero(0.0)) {
        if (!trivial_) {
            Eigen::SelfAdjointEigenSolver<CMatrix> solver(h.matrix());
            energies_ = solver.eigenvalues();
            basis_ = solver.eigenvectors();
        }
    }

    void apply(CVector& psi, double tau) const {
        if (trivial_ || tau == 0.0) return;
        CVector c = basis_.adjoint() * psi;
        for (Eigen::Index i = 0; i < c.size(); ++i) c(i) *= std::polar(1.0, -energies_(i) * tau);
        psi = basis_ * c;
    }

private:
    bool trivial_;
    RVector energies_;
    CMatrix basis_;
};

}  // namespace

// ---------------------------------------------------------------------------

CslParams::CslParams(double lambda, HermitianOperator collapse_op, std::optional<double> degeneracy_tol)
    : lambda_(lambda), collapse_op_(std::move(collapse_op)) {
    if (!(lambda_ > 0.0) || !std::isfinite(lambda_)) throw std::invalid_argument("CslParams: lambda must be > 0");
    spectrum_ = std::make_shared<const Spectrum>(eig(collapse_op_, degeneracy_tol));
}

GrwParams::GrwParams(double rate, double r_c, HermitianOperator collapse_op, std::optional<double> degeneracy_tol)
    : rate_(rate), r_c_(r_c), collapse_op_(std::move(collapse_op)) {
    if (!(rate_ >= 0.0) || !std::isfinite(rate_)) throw std::invalid_argument("GrwParams: rate must be >= 0");
    if (!(r_c_ > 0.0) || !std::isfinite(r_c_)) throw std::invalid_argument("GrwParams: r_c must be > 0");
    spectrum_ = std::make_shared<const Spectrum>(eig(collapse_op_, degeneracy_tol));
}

void NoiseSample::validate() const {
    if (times.empty() || times.size() != values.size()) throw std::invalid_argument("NoiseSample: size mismatch");
    if (times.front() != 0.0 || values.front() != 0.0) throw std::invalid_argument("NoiseSample: must start at B(0) = 0");
    for (std::size_t k = 1; k < times.size(); ++k)
        if (!(times[k] > times[k - 1])) throw std::invalid_argument("NoiseSample: times must be strictly increasing");
}

std::vector<double> BranchAmplitudes::magnitudes() const {
    std::vector<double> out(log_magnitude.size());
    std::transform(log_magnitude.begin(), log_magnitude.end(), out.begin(), [](double l) { return std::exp(l); });
    return out;
}

std::vector<double> BranchAmplitudes::weights() const {
    const double peak = *std::max_element(log_magnitude.begin(), log_magnitude.end());
    std::vector<double> out(log_magnitude.size());
    double total = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = log_magnitude[i] == kNegInf ? 0.0 : std::exp(2.0 * (log_magnitude[i] - peak));
        total += out[i];
    }
    for (auto& w : out) w /= total;
    return out;
}

BranchAmplitudes closed_form_weights(const StateVector& psi0, const CslParams& params, double t, double b) {
    if (!(t > 0.0)) throw std::invalid_argument("closed_form_weights: t must be > 0");
    require_normalized(psi0, "closed_form_weights");
    const Spectrum& s = params.spectrum();
    require_dims(psi0, s.size(), "closed_form_weights");

    const double lambda = params.lambda();
    const std::vector<double> born = s.class_weights(psi0);
    BranchAmplitudes out;
    out.log_magnitude.resize(s.class_count());
    for (std::size_t i = 0; i < s.class_count(); ++i) {
        if (born[i] <= 0.0) {
            out.log_magnitude[i] = kNegInf;
            continue;
        }
        const double d = b - 2.0 * lambda * t * s.class_value(i);
        out.log_magnitude[i] = 0.5 * std::log(born[i]) - d * d / (4.0 * lambda * t);
    }
    return out;
}

StateVector closed_form_state(const StateVector& psi0, const CslParams& params, double t, double b) {
    const BranchAmplitudes amps = closed_form_weights(psi0, params, t, b);
    const Spectrum& s = params.spectrum();
    const double lambda = params.lambda();
    const double peak = *std::max_element(amps.log_magnitude.begin(), amps.log_magnitude.end());

    CVector c = s.coefficients(psi0);
    for (std::size_t k = 0; k < s.size(); ++k) {
        const double d = b - 2.0 * lambda * t * s.class_value(s.class_of[k]);
        c(static_cast<Eigen::Index>(k)) *= std::exp(-d * d / (4.0 * lambda * t) - peak);
    }
    return StateVector::normalized(psi0.layout(), s.eigenvectors * c);
}

NoiseDraw draw_noise(const StateVector& psi0, const CslParams& params, double t, Rng& rng) {
    if (!(t > 0.0)) throw std::invalid_argument("sample_noise: t must be > 0");
    require_normalized(psi0, "sample_noise");
    const Spectrum& s = params.spectrum();
    require_dims(psi0, s.size(), "sample_noise");

    const std::vector<double> born = s.class_weights(psi0);
    std::discrete_distribution<std::size_t> pick(born.begin(), born.end());
    NoiseDraw draw;
    draw.branch = pick(rng);
    const double lt = params.lambda() * t;
    std::normal_distribution<double> gauss(2.0 * lt * s.class_value(draw.branch), std::sqrt(lt));
    draw.value = gauss(rng);
    return draw;
}

double sample_noise(const StateVector& psi0, const CslParams& params, double t, Rng& rng) {
    return draw_noise(psi0, params, t, rng).value;
}

NoiseSample brownian_bridge(std::span<const double> grid, double final_value, double lambda, Rng& rng) {
    const std::vector<double> g = validated_grid(grid);
    NoiseSample out;
    out.times.reserve(g.size() + 1);
    out.times.push_back(0.0);
    out.times.insert(out.times.end(), g.begin(), g.end());
    out.values.assign(out.times.size(), 0.0);
    out.values.back() = final_value;

    std::normal_distribution<double> gauss(0.0, 1.0);
    // Walk backwards: B(t_k) | B(t_{k+1}), B(0) = 0.
    for (std::size_t k = out.times.size() - 2; k >= 1; --k) {
        const double tk = out.times[k];
        const double tn = out.times[k + 1];
        const double mean = out.values[k + 1] * tk / tn;
        const double var = lambda * tk * (tn - tk) / tn;
        out.values[k] = mean + std::sqrt(var) * gauss(rng);
    }
    return out;
}

TrajectoryRecord trajectory_closed(const StateVector& psi0, const CslParams& params, std::span<const double> grid,
                                   Rng& rng, const TrajectoryOptions& options) {
    const std::vector<double> g = validated_grid(grid);
    require_normalized(psi0, "trajectory_closed");

    const NoiseDraw draw = draw_noise(psi0, params, g.back(), rng);
    const NoiseSample path = brownian_bridge(g, draw.value, params.lambda(), rng);

    TrajectoryRecord rec;
    rec.times = g;
    rec.noise.assign(path.values.begin() + 1, path.values.end());
    rec.branch_weights.reserve(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        rec.branch_weights.push_back(closed_form_weights(psi0, params, g[k], rec.noise[k]).weights());
        if (options.keep_states) rec.states.push_back(closed_form_state(psi0, params, g[k], rec.noise[k]));
    }
    rec.final_state = closed_form_state(psi0, params, g.back(), rec.noise.back());
    finish_record(rec, options);
    return rec;
}

TrajectoryRecord trajectory_sde(const StateVector& psi0, const HermitianOperator& hamiltonian, const CslParams& params,
                                double dt, std::size_t n_steps, Rng& rng, const SdeOptions& options) {
    if (!(dt > 0.0)) throw std::invalid_argument("trajectory_sde: dt must be > 0");
    if (n_steps == 0) throw std::invalid_argument("trajectory_sde: need at least one step");
    if (options.record_every == 0) throw std::invalid_argument("trajectory_sde: record_every must be >= 1");
    require_normalized(psi0, "trajectory_sde");
    const Spectrum& s = params.spectrum();
    require_dims(psi0, s.size(), "trajectory_sde");
    require_dims(psi0, hamiltonian.dim(), "trajectory_sde");

    TrajectoryRecord rec;
    const double h_norm = hamiltonian.operator_norm();
    if (dt * h_norm > options.step_warning_threshold)
        rec.warnings.push_back("dt * ||H|| = " + std::to_string(dt * h_norm) + " exceeds " +
                               std::to_string(options.step_warning_threshold));

    const CMatrix& a = params.collapse_op().matrix();
    const CMatrix& h = hamiltonian.matrix();
    const bool has_h = !h.isZero(0.0);
    const double lambda = params.lambda();
    const double sqrt_lambda = std::sqrt(lambda);
    const double sqrt_dt = std::sqrt(dt);
    std::normal_distribution<double> gauss(0.0, 1.0);

    CVector psi = psi0.amplitudes();
    double b = 0.0;
    for (std::size_t step = 1; step <= n_steps; ++step) {
        const CVector a_psi = a * psi;
        const double mean_a = psi.dot(a_psi).real();
        const CVector centered = a_psi - mean_a * psi;
        const CVector centered2 = a * centered - mean_a * centered;
        const double dw = sqrt_dt * gauss(rng);

        CVector next = psi + sqrt_lambda * dw * centered - (0.5 * lambda * dt) * centered2;
        if (has_h) next -= cplx(0.0, dt) * (h * psi);
        const double n = next.norm();
        if (!std::isfinite(n) || n == 0.0 || !next.allFinite())
            throw NumericalError("trajectory_sde: non-finite state at step " + std::to_string(step) +
                                 " (t = " + std::to_string(static_cast<double>(step) * dt) + ")");
        psi = next / n;
        b += 2.0 * lambda * mean_a * dt + sqrt_lambda * dw;

        if (step % options.record_every == 0 || step == n_steps) {
            rec.times.push_back(static_cast<double>(step) * dt);
            rec.noise.push_back(b);
            rec.branch_weights.push_back(class_weights_of(s, psi));
            if (options.keep_states) rec.states.emplace_back(psi0.layout(), psi);
        }
    }
    rec.final_state = StateVector(psi0.layout(), psi);
    finish_record(rec, options);
    return rec;
}

TrajectoryRecord trajectory_grw(const StateVector& psi0, const HermitianOperator& hamiltonian, const GrwParams& params,
                                double t_final, double dt, Rng& rng, const TrajectoryOptions& options) {
    if (!(t_final > 0.0) || !(dt > 0.0)) throw std::invalid_argument("trajectory_grw: t_final and dt must be > 0");
    require_normalized(psi0, "trajectory_grw");
    const Spectrum& s = params.spectrum();
    require_dims(psi0, s.size(), "trajectory_grw");
    require_dims(psi0, hamiltonian.dim(), "trajectory_grw");

    const std::size_t n_points = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(t_final / dt)));
    const Propagator propagate(hamiltonian);
    const double width2 = params.r_c() * params.r_c();
    std::exponential_distribution<double> waiting(params.rate() > 0.0 ? params.rate() : 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    auto localize = [&](CVector& psi) {
        CVector c = s.eigenvectors.adjoint() * psi;
        std::vector<double> w(s.class_count(), 0.0);
        for (std::size_t k = 0; k < s.size(); ++k) w[s.class_of[k]] += std::norm(c(static_cast<Eigen::Index>(k)));
        // Center density ~ post-jump norm^2: mixture of Normal(a_i, r_c^2) with weights |c_i|^2.
        std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
        const double center = s.class_value(pick(rng)) + params.r_c() * gauss(rng);

        std::vector<double> log_f(s.class_count());
        double peak = kNegInf;
        for (std::size_t i = 0; i < s.class_count(); ++i) {
            const double d = s.class_value(i) - center;
            log_f[i] = -d * d / (4.0 * width2);
            if (w[i] > 0.0) peak = std::max(peak, log_f[i]);
        }
        for (std::size_t k = 0; k < s.size(); ++k)
            c(static_cast<Eigen::Index>(k)) *= std::exp(log_f[s.class_of[k]] - peak);
        psi = s.eigenvectors * c;
        const double n = psi.norm();
        if (!std::isfinite(n) || n == 0.0) throw NumericalError("trajectory_grw: localization produced a null state");
        psi /= n;
    };

    TrajectoryRecord rec;
    CVector psi = psi0.amplitudes();
    double now = 0.0;
    double next_jump = params.rate() > 0.0 ? waiting(rng) : std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= n_points; ++k) {
        const double t = static_cast<double>(k) * dt;
        while (next_jump <= t) {
            propagate.apply(psi, next_jump - now);
            now = next_jump;
            localize(psi);
            ++rec.jumps;
            next_jump += waiting(rng);
        }
        propagate.apply(psi, t - now);
        now = t;
        psi /= psi.norm();

        rec.times.push_back(t);
        rec.noise.push_back(std::numeric_limits<double>::quiet_NaN());
        rec.branch_weights.push_back(class_weights_of(s, psi));
        if (options.keep_states) rec.states.emplace_back(psi0.layout(), psi);
    }
    rec.final_state = StateVector(psi0.layout(), psi);
    finish_record(rec, options);
    return rec;
}

// ---------------------------------------------------------------------------
// Ensembles

const Spectrum& TrajectorySpec::spectrum() const {
    return std::visit(
        [](const auto& m) -> const Spectrum& { return m.params.spectrum(); }, model);
}

const StateVector& TrajectorySpec::initial_state() const {
    return std::visit([](const auto& m) -> const StateVector& { return m.psi0; }, model);
}

std::vector<double> TrajectorySpec::born_weights() const { return spectrum().class_weights(initial_state()); }

TrajectoryRecord run_trajectory(const TrajectorySpec& spec, std::uint64_t seed) {
    Rng rng(seed);
    TrajectoryRecord rec = std::visit(
        [&](const auto& m) -> TrajectoryRecord {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ClosedSpec>) {
                return trajectory_closed(m.psi0, m.params, m.grid, rng, spec.options);
            } else if constexpr (std::is_same_v<T, SdeSpec>) {
                return trajectory_sde(m.psi0, m.hamiltonian, m.params, m.dt, m.steps, rng, spec.options);
            } else {
                return trajectory_grw(m.psi0, m.hamiltonian, m.params, m.t_final, m.dt, rng, spec.options);
            }
        },
        spec.model);
    rec.seed = seed;
    return rec;
}

EnsembleStats summarize(std::span<const TrajectoryRecord> records, std::span<const double> born) {
    EnsembleStats st;
    st.n_trajectories = records.size();
    st.counts.assign(born.size(), 0);
    st.born_probabilities.assign(born.begin(), born.end());
    for (const auto& r : records) {
        if (r.outcome) {
            if (*r.outcome >= born.size()) throw std::invalid_argument("summarize: outcome outside class range");
            ++st.counts[*r.outcome];
        }
        if (r.collapsed) ++st.n_collapsed;
    }
    st.empirical_probabilities.resize(born.size());
    for (std::size_t i = 0; i < born.size(); ++i)
        st.empirical_probabilities[i] =
            st.n_trajectories ? static_cast<double>(st.counts[i]) / static_cast<double>(st.n_trajectories) : 0.0;
    const ChiSquare chi = chi_square_goodness_of_fit(st.counts, st.born_probabilities);
    st.chi_square = chi.statistic;
    st.dof = chi.dof;
    st.p_value = chi.p_value;
    return st;
}

EnsembleResult run_ensemble(const TrajectorySpec& spec, std::size_t n, std::uint64_t master_seed, unsigned threads) {
    if (n == 0) throw std::invalid_argument("run_ensemble: need at least one trajectory");
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));

    std::vector<std::optional<TrajectoryRecord>> slots(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
            const std::uint64_t seed = derive_seed(master_seed, i);
            try {
                slots[i] = run_trajectory(spec, seed);
            } catch (const NumericalError& e) {
                errors[i] = std::make_exception_ptr(NumericalError(
                    "trajectory " + std::to_string(i) + " (seed " + std::to_string(seed) + "): " + e.what(), i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    // Lowest failing index wins so the diagnostic does not depend on scheduling.
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    EnsembleResult out;
    out.trajectories.reserve(n);
    for (auto& s : slots) out.trajectories.push_back(std::move(*s));
    out.stats = summarize(out.trajectories, spec.born_weights());
    return out;
}

}  // namespace phicsl
