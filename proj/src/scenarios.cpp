// SPDX-License-Identifier: Apache-2.0
#include "phicsl/scenarios.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace phicsl {

namespace {

constexpr std::size_t kMaxDenseDim = std::size_t{1} << 14;

void require_qubits(const SubsystemLayout& layout, const char* who) {
    for (auto d : layout.dims())
        if (d != 2) throw std::invalid_argument(std::string(who) + ": every subsystem must be a qubit");
}

StateVector qubit(cplx a0, cplx a1, const std::string& label) {
    CVector v(2);
    v << a0, a1;
    return StateVector(SubsystemLayout({2}, {label}), v);
}

StateVector ket(const SubsystemLayout& layout, std::initializer_list<std::size_t> digits) {
    std::vector<std::size_t> d(digits);
    return StateVector::basis(layout, layout.flat_index(d));
}

void check_amplitudes(cplx alpha, cplx beta) {
    const double n = std::norm(alpha) + std::norm(beta);
    if (std::abs(n - 1.0) > 1e-12)
        throw std::invalid_argument("scenario: |alpha|^2 + |beta|^2 must equal 1 (got " + std::to_string(n) + ")");
}

std::vector<StateVector> computational_basis(const SubsystemLayout& layout) {
    std::vector<StateVector> out;
    for (std::size_t k = 0; k < layout.total_dim(); ++k) out.push_back(StateVector::basis(layout, k));
    return out;
}

HermitianOperator sigma_x(double omega, const SubsystemLayout& layout) {
    CMatrix h(2, 2);
    h << 0.0, omega, omega, 0.0;
    return HermitianOperator(layout, h);
}

std::pair<cplx, cplx> amplitudes_from_weight(double weight0, double phase) {
    if (!(weight0 >= 0.0 && weight0 <= 1.0)) throw std::invalid_argument("scenario: weight0 must lie in [0, 1]");
    return {cplx(std::sqrt(weight0)), std::polar(std::sqrt(1.0 - weight0), phase)};
}

}  // namespace

StateVector ScenarioSpec::tracked_state() const {
    return StateVector(layout, tracking_unitary * initial_state.amplitudes());
}

CMatrix controlled_not(const SubsystemLayout& layout, std::size_t control, std::size_t target) {
    require_qubits(layout, "controlled_not");
    if (control >= layout.size() || target >= layout.size() || control == target)
        throw std::invalid_argument("controlled_not: invalid control/target");
    const auto dim = static_cast<Eigen::Index>(layout.total_dim());
    CMatrix u = CMatrix::Zero(dim, dim);
    for (std::size_t k = 0; k < layout.total_dim(); ++k) {
        auto d = layout.digits(k);
        if (d[control] == 1) d[target] ^= 1;
        u(static_cast<Eigen::Index>(layout.flat_index(d)), static_cast<Eigen::Index>(k)) = 1.0;
    }
    return u;
}

ScenarioSpec build_measurement_scenario(cplx alpha, cplx beta, bool with_observer, double lambda) {
    check_amplitudes(alpha, beta);
    const SubsystemLayout layout = with_observer ? SubsystemLayout({2, 2, 2}, {"observer", "apparatus", "particle"})
                                                 : SubsystemLayout({2, 2}, {"apparatus", "particle"});
    const std::size_t p = layout.size() - 1;
    const std::size_t m = p - 1;

    std::vector<StateVector> factors;
    for (std::size_t s = 0; s < p; ++s) factors.push_back(qubit(1.0, 0.0, layout.label(s)));
    factors.push_back(qubit(alpha, beta, "particle"));
    StateVector initial = tensor(factors);
    initial = StateVector(layout, initial.amplitudes());

    CMatrix u = controlled_not(layout, p, m);
    if (with_observer) u = controlled_not(layout, m, 0) * u;

    std::vector<StateVector> branches;
    branches.push_back(StateVector::basis(layout, 0));
    branches.push_back(StateVector::basis(layout, layout.total_dim() - 1));

    HermitianOperator phi_op = build_phi_operator(PhiBasisSpec{layout, computational_basis(layout)});
    return ScenarioSpec{with_observer ? "measurement-observer" : "measurement",
                        layout,
                        std::move(initial),
                        std::move(u),
                        CslParams(lambda, std::move(phi_op)),
                        HermitianOperator::zero(layout),
                        std::move(branches)};
}

StateVector couple_environment(const StateVector& state, std::size_t n_env, double theta, std::size_t pointer) {
    const SubsystemLayout& in = state.layout();
    if (pointer >= in.size() || in.dim(pointer) != 2)
        throw std::invalid_argument("couple_environment: pointer must be a qubit subsystem");
    if (n_env >= 63 || in.total_dim() > (kMaxDenseDim >> n_env))
        throw std::invalid_argument("couple_environment: dense state would exceed 2^14 amplitudes; use environment_overlap");

    std::vector<std::size_t> dims = in.dims();
    std::vector<std::string> labels = in.labels();
    for (std::size_t e = 0; e < n_env; ++e) {
        dims.push_back(2);
        labels.push_back("env" + std::to_string(e));
    }
    SubsystemLayout out_layout(dims, labels);
    const std::size_t env_dim = std::size_t{1} << n_env;

    // Rotated environment product state, index = environment digits.
    const double c = std::cos(theta), s = std::sin(theta);
    std::vector<double> rotated(env_dim);
    for (std::size_t k = 0; k < env_dim; ++k) {
        const int ones = std::popcount(k);
        rotated[k] = std::pow(c, static_cast<double>(n_env - ones)) * std::pow(s, static_cast<double>(ones));
    }

    CVector amps = CVector::Zero(static_cast<Eigen::Index>(out_layout.total_dim()));
    for (std::size_t k = 0; k < in.total_dim(); ++k) {
        const cplx a = state[k];
        if (a == cplx(0.0)) continue;
        if (in.digits(k)[pointer] == 0) {
            amps(static_cast<Eigen::Index>(k * env_dim)) = a;
        } else {
            for (std::size_t e = 0; e < env_dim; ++e) amps(static_cast<Eigen::Index>(k * env_dim + e)) = a * rotated[e];
        }
    }
    return StateVector(out_layout, amps);
}

double environment_overlap(std::size_t n_env, double theta) {
    // Per qubit <0| (cos|0> + sin|1>) = cos.
    double overlap = 1.0;
    for (std::size_t e = 0; e < n_env; ++e) overlap *= std::cos(theta);
    return overlap;
}

StateVector environment_record(double angle) {
    const SubsystemLayout layout({2, 2}, {"env", "record"});
    CVector v = CVector::Zero(4);
    v(0) = std::cos(angle);
    v(3) = std::sin(angle);
    return StateVector(layout, v);
}

double dressed_branch_phi(double angle) { return phi_max(environment_record(angle)).phi; }

ScenarioSpec build_environment_scenario(cplx alpha, cplx beta, std::size_t n_env, double theta, double lambda) {
    check_amplitudes(alpha, beta);
    (void)n_env;  // the dressed branches stay orthogonal for every n_env
    const SubsystemLayout layout({2}, {"dressed-branch"});
    CVector v(2);
    v << alpha, beta;
    const std::vector<double> phis{dressed_branch_phi(0.0), dressed_branch_phi(theta)};
    std::vector<StateVector> basis = computational_basis(layout);
    HermitianOperator phi_op = HermitianOperator::from_spectrum(layout, phis, basis);
    return ScenarioSpec{"environment",
                        layout,
                        StateVector(layout, v),
                        CMatrix::Identity(2, 2),
                        CslParams(lambda, std::move(phi_op)),
                        HermitianOperator::zero(layout),
                        std::move(basis)};
}

ScenarioSpec build_ready_state_variants(ReadyMode mode, cplx alpha, cplx beta, double lambda) {
    check_amplitudes(alpha, beta);
    const SubsystemLayout layout({2, 2, 2, 2}, {"observer.mode", "observer.percept", "apparatus", "particle"});

    CVector s = CVector::Zero(4), s_perp = CVector::Zero(4);
    s(0) = alpha;
    s(3) = beta;
    s_perp(0) = -std::conj(beta);
    s_perp(3) = std::conj(alpha);

    // U = |0><0|_mode (x) CNOT(M -> percept) + |1><1|_mode (x) [X_percept (x) P_S + I (x) (I - P_S)]
    const CMatrix p_s = s * s.adjoint();
    CMatrix x(2, 2);
    x << 0.0, 1.0, 1.0, 0.0;
    const CMatrix id2 = CMatrix::Identity(2, 2), id4 = CMatrix::Identity(4, 4);
    const CMatrix flip_on_s = Eigen::kroneckerProduct(x, p_s).eval() + Eigen::kroneckerProduct(id2, id4 - p_s).eval();
    CMatrix p0 = CMatrix::Zero(2, 2), p1 = CMatrix::Zero(2, 2);
    p0(0, 0) = 1.0;
    p1(1, 1) = 1.0;
    const SubsystemLayout obs3({2, 2, 2}, {"observer.percept", "apparatus", "particle"});
    const CMatrix copy_pointer = controlled_not(obs3, 1, 0);
    const CMatrix u = Eigen::kroneckerProduct(p0, copy_pointer).eval() + Eigen::kroneckerProduct(p1, flip_on_s).eval();

    CVector observer = CVector::Zero(4);  // mode (x) percept
    switch (mode) {
        case ReadyMode::tracks_pointer: observer(0) = 1.0; break;
        case ReadyMode::tracks_superposition: observer(2) = 1.0; break;
        case ReadyMode::superposed_ready:
            observer(0) = 1.0 / std::sqrt(2.0);
            observer(2) = 1.0 / std::sqrt(2.0);
            break;
    }
    StateVector initial(layout, Eigen::kroneckerProduct(observer, s).eval());

    // Phi basis: computational, with |11>_O (x) {|00>, |11>} replaced by |11>_O (x) {S, S_perp}.
    std::vector<StateVector> basis = computational_basis(layout);
    CVector o11 = CVector::Zero(4);
    o11(3) = 1.0;
    const std::size_t i00 = layout.flat_index(std::vector<std::size_t>{1, 1, 0, 0});
    const std::size_t i11 = layout.flat_index(std::vector<std::size_t>{1, 1, 1, 1});
    basis[i00] = StateVector(layout, Eigen::kroneckerProduct(o11, s).eval());
    basis[i11] = StateVector(layout, Eigen::kroneckerProduct(o11, s_perp).eval());
    HermitianOperator phi_op = build_phi_operator(PhiBasisSpec{layout, basis});

    std::vector<StateVector> branches;
    branches.push_back(ket(layout, {0, 0, 0, 0}));
    branches.push_back(ket(layout, {0, 1, 1, 1}));
    branches.push_back(basis[i00]);

    static const char* names[] = {"ready-pointer", "ready-superposition", "ready-superposed"};
    return ScenarioSpec{names[static_cast<int>(mode)],
                        layout,
                        std::move(initial),
                        u,
                        CslParams(lambda, std::move(phi_op)),
                        HermitianOperator::zero(layout),
                        std::move(branches)};
}

ScenarioSpec build_two_branch_scenario(double weight0, double a0, double a1, double omega, double lambda) {
    const auto [alpha, beta] = amplitudes_from_weight(weight0, 0.0);
    const SubsystemLayout layout({2}, {"system"});
    CVector v(2);
    v << alpha, beta;
    const std::vector<double> a{a0, a1};
    HermitianOperator op = HermitianOperator::diagonal(layout, a);
    return ScenarioSpec{"two-branch",
                        layout,
                        StateVector(layout, v),
                        CMatrix::Identity(2, 2),
                        CslParams(lambda, std::move(op)),
                        sigma_x(omega, layout),
                        computational_basis(layout)};
}

ScenarioSpec build_zeno_scenario(double omega, double delta_a, double lambda) {
    const SubsystemLayout layout({2}, {"system"});
    const std::vector<double> a{0.0, delta_a};
    return ScenarioSpec{"zeno",
                        layout,
                        StateVector::basis(layout, 0),
                        CMatrix::Identity(2, 2),
                        CslParams(lambda, HermitianOperator::diagonal(layout, a)),
                        sigma_x(omega, layout),
                        computational_basis(layout)};
}

// ---------------------------------------------------------------------------

const std::vector<ScenarioInfo>& scenario_catalog() {
    static const std::vector<ScenarioInfo> catalog{
        {"two-branch", "single qubit, collapse operator diag(a0, a1), H = omega sigma_x",
         {{"weight0", 0.3}, {"a0", 0.0}, {"a1", 1.0}, {"omega", 0.0}}},
        {"zeno", "qubit in |0> under H = omega sigma_x, collapse operator diag(0, delta_a)",
         {{"omega", 1.0}, {"delta_a", 10.0}}},
        {"measurement", "particle + apparatus (+ observer) after tracking; Phi operator of the pointer basis",
         {{"weight0", 0.5}, {"phase", 0.0}, {"observer", 1.0}}},
        {"environment", "dressed pointer branches with n_env rotated environment qubits",
         {{"weight0", 0.5}, {"n_env", 20.0}, {"theta", std::numbers::pi / 4}}},
        {"ready-pointer", "observer ready state R tracks the pointer basis", {{"weight0", 0.5}}},
        {"ready-superposition", "observer ready state R* tracks the superposition S", {{"weight0", 0.5}}},
        {"ready-superposed", "observer in (R + R*)/sqrt2; Phi operator separates the tracked bases",
         {{"weight0", 0.5}}},
    };
    return catalog;
}

ScenarioSpec build_named_scenario(const std::string& name, const std::map<std::string, double>& parameters,
                                  double lambda) {
    const ScenarioInfo* info = nullptr;
    for (const auto& s : scenario_catalog())
        if (s.name == name) info = &s;
    if (!info) throw std::invalid_argument("unknown scenario '" + name + "'");

    std::map<std::string, double> p;
    for (const auto& [k, v] : info->parameters) p[k] = v;
    for (const auto& [k, v] : parameters) {
        if (!p.count(k)) throw std::invalid_argument("scenario '" + name + "' has no parameter '" + k + "'");
        if (!std::isfinite(v)) throw std::invalid_argument("scenario parameter '" + k + "' must be finite");
        p[k] = v;
    }

    auto count = [&](const char* key) {
        const double v = p[key];
        if (v < 0 || v != std::floor(v)) throw std::invalid_argument(std::string("scenario parameter '") + key + "' must be a nonnegative integer");
        return static_cast<std::size_t>(v);
    };

    if (name == "two-branch") return build_two_branch_scenario(p["weight0"], p["a0"], p["a1"], p["omega"], lambda);
    if (name == "zeno") return build_zeno_scenario(p["omega"], p["delta_a"], lambda);
    const auto [alpha, beta] = amplitudes_from_weight(p["weight0"], p.count("phase") ? p["phase"] : 0.0);
    if (name == "measurement") {
        const std::size_t obs = count("observer");
        if (obs > 1) throw std::invalid_argument("scenario parameter 'observer' must be 0 or 1");
        return build_measurement_scenario(alpha, beta, obs == 1, lambda);
    }
    if (name == "environment") return build_environment_scenario(alpha, beta, count("n_env"), p["theta"], lambda);
    if (name == "ready-pointer") return build_ready_state_variants(ReadyMode::tracks_pointer, alpha, beta, lambda);
    if (name == "ready-superposition")
        return build_ready_state_variants(ReadyMode::tracks_superposition, alpha, beta, lambda);
    return build_ready_state_variants(ReadyMode::superposed_ready, alpha, beta, lambda);
}

}  // namespace phicsl
