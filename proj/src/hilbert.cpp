// SPDX-License-Identifier: Apache-2.0
#include "phicsl/hilbert.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace phicsl {

namespace {

double hermiticity_defect(const CMatrix& m) {
    if (m.rows() == 0) return 0.0;
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

std::vector<std::size_t> validated_keep(const SubsystemLayout& layout, std::span<const std::size_t> keep) {
    std::vector<std::size_t> sorted(keep.begin(), keep.end());
    std::sort(sorted.begin(), sorted.end());
    if (sorted.empty()) throw std::invalid_argument("partial_trace: keep set is empty");
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::invalid_argument("partial_trace: duplicate subsystem in keep set");
    if (sorted.back() >= layout.size())
        throw std::invalid_argument("partial_trace: subsystem index out of range");
    if (sorted.size() == layout.size())
        throw std::invalid_argument("partial_trace: keep set must be a strict subset of the subsystems");
    return sorted;
}

// For every flat index of the full space: (flat index over kept, flat index over traced).
struct SplitIndex {
    std::vector<std::size_t> kept;
    std::vector<std::size_t> traced;
    std::size_t kept_dim = 1;
    std::size_t traced_dim = 1;
};

SplitIndex split_indices(const SubsystemLayout& layout, const std::vector<std::size_t>& keep) {
    std::vector<bool> is_kept(layout.size(), false);
    for (auto k : keep) is_kept[k] = true;

    SplitIndex out;
    for (std::size_t s = 0; s < layout.size(); ++s) (is_kept[s] ? out.kept_dim : out.traced_dim) *= layout.dim(s);

    const std::size_t total = layout.total_dim();
    out.kept.resize(total);
    out.traced.resize(total);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rem = flat, k_idx = 0, t_idx = 0, k_stride = 1, t_stride = 1;
        for (std::size_t s = layout.size(); s-- > 0;) {
            const std::size_t d = layout.dim(s);
            const std::size_t digit = rem % d;
            rem /= d;
            if (is_kept[s]) {
                k_idx += digit * k_stride;
                k_stride *= d;
            } else {
                t_idx += digit * t_stride;
                t_stride *= d;
            }
        }
        out.kept[flat] = k_idx;
        out.traced[flat] = t_idx;
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// SubsystemLayout

SubsystemLayout::SubsystemLayout(std::vector<std::size_t> dims, std::vector<std::string> labels)
    : dims_(std::move(dims)), labels_(std::move(labels)) {
    if (dims_.empty()) throw std::invalid_argument("SubsystemLayout: at least one subsystem required");
    if (!labels_.empty() && labels_.size() != dims_.size())
        throw std::invalid_argument("SubsystemLayout: label count does not match subsystem count");
    for (auto d : dims_) {
        if (d < 2) throw std::invalid_argument("SubsystemLayout: local dimensions must be >= 2");
        total_ *= d;
    }
}

SubsystemLayout SubsystemLayout::qubits(std::size_t n) { return SubsystemLayout(std::vector<std::size_t>(n, 2)); }

std::string SubsystemLayout::label(std::size_t subsystem) const {
    if (subsystem >= dims_.size()) throw std::out_of_range("SubsystemLayout::label");
    if (!labels_.empty() && !labels_[subsystem].empty()) return labels_[subsystem];
    return std::to_string(subsystem);
}

SubsystemLayout SubsystemLayout::concat(const SubsystemLayout& other) const {
    std::vector<std::size_t> dims = dims_;
    dims.insert(dims.end(), other.dims_.begin(), other.dims_.end());
    std::vector<std::string> labels;
    if (!labels_.empty() || !other.labels_.empty()) {
        for (std::size_t i = 0; i < size(); ++i) labels.push_back(labels_.empty() ? std::string{} : labels_[i]);
        for (std::size_t i = 0; i < other.size(); ++i)
            labels.push_back(other.labels_.empty() ? std::string{} : other.labels_[i]);
    }
    return SubsystemLayout(std::move(dims), std::move(labels));
}

SubsystemLayout SubsystemLayout::subset(std::span<const std::size_t> keep) const {
    std::vector<std::size_t> sorted(keep.begin(), keep.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> dims;
    std::vector<std::string> labels;
    for (auto k : sorted) {
        dims.push_back(dim(k));
        if (!labels_.empty()) labels.push_back(labels_[k]);
    }
    return SubsystemLayout(std::move(dims), std::move(labels));
}

std::vector<std::size_t> SubsystemLayout::digits(std::size_t flat) const {
    std::vector<std::size_t> out(dims_.size());
    for (std::size_t s = dims_.size(); s-- > 0;) {
        out[s] = flat % dims_[s];
        flat /= dims_[s];
    }
    return out;
}

std::size_t SubsystemLayout::flat_index(std::span<const std::size_t> digits) const {
    if (digits.size() != dims_.size()) throw std::invalid_argument("flat_index: digit count mismatch");
    std::size_t flat = 0;
    for (std::size_t s = 0; s < dims_.size(); ++s) {
        if (digits[s] >= dims_[s]) throw std::invalid_argument("flat_index: digit out of range");
        flat = flat * dims_[s] + digits[s];
    }
    return flat;
}

// ---------------------------------------------------------------------------
// StateVector

StateVector::StateVector(SubsystemLayout layout, CVector amplitudes)
    : layout_(std::move(layout)), amplitudes_(std::move(amplitudes)) {
    if (static_cast<std::size_t>(amplitudes_.size()) != layout_.total_dim())
        throw std::invalid_argument("StateVector: amplitude count " + std::to_string(amplitudes_.size()) +
                                    " does not match layout dimension " + std::to_string(layout_.total_dim()));
    if (!amplitudes_.allFinite()) throw std::invalid_argument("StateVector: non-finite amplitude");
    normalized_ = std::abs(amplitudes_.norm() - 1.0) <= kNormTolerance;
}

StateVector StateVector::normalized(SubsystemLayout layout, CVector amplitudes) {
    const double n = amplitudes.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("StateVector: cannot normalize a zero vector");
    return StateVector(std::move(layout), amplitudes / n);
}

StateVector StateVector::basis(SubsystemLayout layout, std::size_t index) {
    CVector v = CVector::Zero(static_cast<Eigen::Index>(layout.total_dim()));
    if (index >= layout.total_dim()) throw std::invalid_argument("StateVector::basis: index out of range");
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return StateVector(std::move(layout), std::move(v));
}

StateVector StateVector::renormalized() const { return normalized(layout_, amplitudes_); }

cplx StateVector::inner(const StateVector& other) const {
    if (other.dim() != dim()) throw std::invalid_argument("inner: dimension mismatch");
    return amplitudes_.dot(other.amplitudes_);
}

// ---------------------------------------------------------------------------
// HermitianOperator

HermitianOperator::HermitianOperator(SubsystemLayout layout, CMatrix matrix)
    : layout_(std::move(layout)), matrix_(std::move(matrix)) {
    const auto n = static_cast<Eigen::Index>(layout_.total_dim());
    if (matrix_.rows() != n || matrix_.cols() != n)
        throw std::invalid_argument("HermitianOperator: matrix shape does not match layout dimension");
    if (!matrix_.allFinite()) throw std::invalid_argument("HermitianOperator: non-finite entry");
    const double defect = hermiticity_defect(matrix_);
    if (defect > kHermiticityTolerance)
        throw std::invalid_argument("HermitianOperator: matrix is not Hermitian (max |M - M^dagger| = " +
                                    std::to_string(defect) + ")");
}

HermitianOperator HermitianOperator::zero(SubsystemLayout layout) {
    const auto n = static_cast<Eigen::Index>(layout.total_dim());
    return HermitianOperator(std::move(layout), CMatrix::Zero(n, n));
}

HermitianOperator HermitianOperator::diagonal(SubsystemLayout layout, std::span<const double> values) {
    if (values.size() != layout.total_dim()) throw std::invalid_argument("diagonal: value count mismatch");
    const auto n = static_cast<Eigen::Index>(values.size());
    CMatrix m = CMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) m(i, i) = values[static_cast<std::size_t>(i)];
    return HermitianOperator(std::move(layout), std::move(m));
}

HermitianOperator HermitianOperator::from_spectrum(SubsystemLayout layout, std::span<const double> values,
                                                   std::span<const StateVector> basis) {
    if (values.size() != basis.size()) throw std::invalid_argument("from_spectrum: value/basis count mismatch");
    const auto n = static_cast<Eigen::Index>(layout.total_dim());
    CMatrix m = CMatrix::Zero(n, n);
    for (std::size_t k = 0; k < basis.size(); ++k) {
        if (basis[k].dim() != layout.total_dim()) throw std::invalid_argument("from_spectrum: basis dimension mismatch");
        m += values[k] * basis[k].amplitudes() * basis[k].amplitudes().adjoint();
    }
    CMatrix sym = 0.5 * (m + m.adjoint());
    return HermitianOperator(std::move(layout), std::move(sym));
}

double HermitianOperator::operator_norm() const {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(matrix_, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Spectrum

double Spectrum::class_value(std::size_t c) const {
    const auto& members = classes.at(c);
    double sum = 0.0;
    for (auto k : members) sum += eigenvalues(static_cast<Eigen::Index>(k));
    return sum / static_cast<double>(members.size());
}

CVector Spectrum::coefficients(const StateVector& psi) const {
    if (psi.dim() != size()) throw std::invalid_argument("Spectrum::coefficients: dimension mismatch");
    return eigenvectors.adjoint() * psi.amplitudes();
}

std::vector<double> Spectrum::class_weights(const StateVector& psi) const {
    const CVector c = coefficients(psi);
    std::vector<double> w(class_count(), 0.0);
    for (std::size_t k = 0; k < size(); ++k) w[class_of[k]] += std::norm(c(static_cast<Eigen::Index>(k)));
    return w;
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(SubsystemLayout layout, CMatrix matrix)
    : layout_(std::move(layout)), matrix_(std::move(matrix)) {
    const auto n = static_cast<Eigen::Index>(layout_.total_dim());
    if (matrix_.rows() != n || matrix_.cols() != n)
        throw std::invalid_argument("DensityMatrix: matrix shape does not match layout dimension");
    if (hermiticity_defect(matrix_) > kHermiticityTolerance)
        throw std::invalid_argument("DensityMatrix: matrix is not Hermitian");
    if (std::abs(matrix_.trace().real() - 1.0) > kNormTolerance)
        throw std::invalid_argument("DensityMatrix: trace differs from 1");
    if (eigenvalues().minCoeff() < -kNormTolerance)
        throw std::invalid_argument("DensityMatrix: matrix is not positive semidefinite");
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
    if (!psi.is_normalized()) throw std::invalid_argument("DensityMatrix::pure: state is not normalized");
    return DensityMatrix(psi.layout(), psi.amplitudes() * psi.amplitudes().adjoint());
}

double DensityMatrix::purity() const { return (matrix_ * matrix_).trace().real(); }

RVector DensityMatrix::eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(matrix_, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

double DensityMatrix::von_neumann_entropy() const {
    const RVector p = eigenvalues();
    double s = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i)
        if (p(i) > 0.0) s -= p(i) * std::log(p(i));
    return std::max(0.0, s);
}

// ---------------------------------------------------------------------------
// Free functions

StateVector tensor(std::span<const StateVector> factors) {
    if (factors.empty()) throw std::invalid_argument("tensor: empty factor list");
    for (const auto& f : factors)
        if (!f.is_normalized()) throw std::invalid_argument("tensor: factor is not normalized");

    SubsystemLayout layout = factors.front().layout();
    CVector amps = factors.front().amplitudes();
    for (std::size_t i = 1; i < factors.size(); ++i) {
        const CVector& b = factors[i].amplitudes();
        CVector next(amps.size() * b.size());
        for (Eigen::Index x = 0; x < amps.size(); ++x) next.segment(x * b.size(), b.size()) = amps(x) * b;
        amps = std::move(next);
        layout = layout.concat(factors[i].layout());
    }
    return StateVector::normalized(std::move(layout), std::move(amps));
}

StateVector tensor(const StateVector& a, const StateVector& b) {
    const StateVector factors[] = {a, b};
    return tensor(std::span<const StateVector>(factors));
}

DensityMatrix partial_trace(const StateVector& state, std::span<const std::size_t> keep) {
    const auto kept = validated_keep(state.layout(), keep);
    const auto split = split_indices(state.layout(), kept);

    CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(split.kept_dim), static_cast<Eigen::Index>(split.traced_dim));
    for (std::size_t flat = 0; flat < state.dim(); ++flat)
        m(static_cast<Eigen::Index>(split.kept[flat]), static_cast<Eigen::Index>(split.traced[flat])) = state[flat];

    CMatrix rho = m * m.adjoint();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace().real();
    return DensityMatrix(state.layout().subset(kept), std::move(rho));
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep) {
    const auto kept = validated_keep(rho.layout(), keep);
    const auto split = split_indices(rho.layout(), kept);

    // Invert the split: full index for every (kept, traced) pair.
    std::vector<std::size_t> full(split.kept_dim * split.traced_dim);
    for (std::size_t flat = 0; flat < rho.dim(); ++flat) full[split.kept[flat] * split.traced_dim + split.traced[flat]] = flat;

    const auto kd = static_cast<Eigen::Index>(split.kept_dim);
    CMatrix out = CMatrix::Zero(kd, kd);
    for (std::size_t i = 0; i < split.kept_dim; ++i)
        for (std::size_t ip = 0; ip < split.kept_dim; ++ip) {
            cplx acc = 0.0;
            for (std::size_t j = 0; j < split.traced_dim; ++j)
                acc += rho.matrix()(static_cast<Eigen::Index>(full[i * split.traced_dim + j]),
                                    static_cast<Eigen::Index>(full[ip * split.traced_dim + j]));
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(ip)) = acc;
        }
    out = 0.5 * (out + out.adjoint()).eval();
    return DensityMatrix(rho.layout().subset(kept), std::move(out));
}

Spectrum eig(const HermitianOperator& op, std::optional<double> degeneracy_tol) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(op.matrix());
    if (solver.info() != Eigen::Success) throw std::runtime_error("eig: eigensolver failed to converge");

    Spectrum s;
    s.eigenvalues = solver.eigenvalues();
    s.eigenvectors = solver.eigenvectors();

    // Phase convention: largest-magnitude component real and positive (first one on near-ties).
    for (Eigen::Index k = 0; k < s.eigenvectors.cols(); ++k) {
        auto col = s.eigenvectors.col(k);
        const double peak = col.cwiseAbs().maxCoeff();
        Eigen::Index pivot = 0;
        while (std::abs(col(pivot)) < peak * (1.0 - 1e-9)) ++pivot;
        col *= std::conj(col(pivot)) / std::abs(col(pivot));
        col(pivot) = std::abs(col(pivot));
    }

    const Eigen::Index n = s.eigenvalues.size();
    // Relative to the spectral range, floored by the spectral radius so that a
    // multiple of the identity is one class despite rounding.
    const double range = n > 0 ? s.eigenvalues(n - 1) - s.eigenvalues(0) : 0.0;
    const double radius = n > 0 ? s.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
    s.degeneracy_tol = degeneracy_tol.value_or(1e-9 * std::max(range, radius));
    if (s.degeneracy_tol < 0.0) throw std::invalid_argument("eig: negative degeneracy tolerance");

    s.class_of.resize(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k) {
        if (k == 0 || s.eigenvalues(k) - s.eigenvalues(k - 1) > s.degeneracy_tol) s.classes.emplace_back();
        s.classes.back().push_back(static_cast<std::size_t>(k));
        s.class_of[static_cast<std::size_t>(k)] = s.classes.size() - 1;
    }
    return s;
}

double expectation(const HermitianOperator& op, const StateVector& state) {
    if (op.dim() != state.dim()) throw std::invalid_argument("expectation: dimension mismatch");
    if (!state.is_normalized()) throw std::invalid_argument("expectation: state is not normalized");
    return state.amplitudes().dot(op.matrix() * state.amplitudes()).real();
}

CMatrix unitary_evolution(const HermitianOperator& hamiltonian, double t) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(hamiltonian.matrix());
    const RVector& e = solver.eigenvalues();
    CVector phases(e.size());
    for (Eigen::Index i = 0; i < e.size(); ++i) phases(i) = std::polar(1.0, -e(i) * t);
    return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
}

double unitarity_residual(const CMatrix& u) {
    if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
    return (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

bool is_unitary(const CMatrix& u, double tol) { return unitarity_residual(u) <= tol; }

}  // namespace phicsl
