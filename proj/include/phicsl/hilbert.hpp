// SPDX-License-Identifier: Apache-2.0
#pragma once

// Dense linear algebra over small tensor-product Hilbert spaces.
//
// Subsystem 0 is the most significant digit of the flat basis index, so the
// ket |i0 i1 ... i(n-1)> sits at index ((i0*d1 + i1)*d2 + ...). All values
// are immutable after construction.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace phicsl {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kHermiticityTolerance = 1e-12;

class SubsystemLayout {
public:
    explicit SubsystemLayout(std::vector<std::size_t> dims, std::vector<std::string> labels = {});

    static SubsystemLayout qubits(std::size_t n);

    std::size_t size() const { return dims_.size(); }
    std::size_t dim(std::size_t subsystem) const { return dims_.at(subsystem); }
    std::size_t total_dim() const { return total_; }
    const std::vector<std::size_t>& dims() const { return dims_; }
    const std::vector<std::string>& labels() const { return labels_; }
    std::string label(std::size_t subsystem) const;

    SubsystemLayout concat(const SubsystemLayout& other) const;
    // Kept subsystems in ascending index order.
    SubsystemLayout subset(std::span<const std::size_t> keep) const;

    // Mixed-radix digits of a flat index, subsystem 0 first.
    std::vector<std::size_t> digits(std::size_t flat) const;
    std::size_t flat_index(std::span<const std::size_t> digits) const;

    bool operator==(const SubsystemLayout& other) const { return dims_ == other.dims_; }

private:
    std::vector<std::size_t> dims_;
    std::vector<std::string> labels_;
    std::size_t total_ = 1;
};

class StateVector {
public:
    StateVector(SubsystemLayout layout, CVector amplitudes);

    // Rescales to unit norm; throws on a zero vector.
    static StateVector normalized(SubsystemLayout layout, CVector amplitudes);
    static StateVector basis(SubsystemLayout layout, std::size_t index);

    const CVector& amplitudes() const { return amplitudes_; }
    const SubsystemLayout& layout() const { return layout_; }
    std::size_t dim() const { return static_cast<std::size_t>(amplitudes_.size()); }
    cplx operator[](std::size_t i) const { return amplitudes_(static_cast<Eigen::Index>(i)); }

    double norm() const { return amplitudes_.norm(); }
    bool is_normalized() const { return normalized_; }
    StateVector renormalized() const;

    cplx inner(const StateVector& other) const;  // <this|other>

private:
    SubsystemLayout layout_;
    CVector amplitudes_;
    bool normalized_ = false;
};

class HermitianOperator {
public:
    // Throws std::invalid_argument unless matrix == matrix^dagger entrywise within 1e-12.
    HermitianOperator(SubsystemLayout layout, CMatrix matrix);

    static HermitianOperator zero(SubsystemLayout layout);
    static HermitianOperator diagonal(SubsystemLayout layout, std::span<const double> values);
    // sum_k values[k] |basis[k]><basis[k]|
    static HermitianOperator from_spectrum(SubsystemLayout layout, std::span<const double> values,
                                           std::span<const StateVector> basis);

    const CMatrix& matrix() const { return matrix_; }
    const SubsystemLayout& layout() const { return layout_; }
    std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
    double operator_norm() const;  // spectral norm (max |eigenvalue|)

private:
    SubsystemLayout layout_;
    CMatrix matrix_;
};

struct Spectrum {
    RVector eigenvalues;                             // ascending
    CMatrix eigenvectors;                            // columns |a_k>
    std::vector<std::vector<std::size_t>> classes;   // indices grouped by equal eigenvalue
    std::vector<std::size_t> class_of;               // eigenvector index -> class index
    double degeneracy_tol = 0.0;

    std::size_t size() const { return static_cast<std::size_t>(eigenvalues.size()); }
    std::size_t class_count() const { return classes.size(); }
    // Mean eigenvalue of the class.
    double class_value(std::size_t c) const;
    // Coefficients <a_k|psi> in eigenvector order.
    CVector coefficients(const StateVector& psi) const;
    // Born weight of each class: sum over the class of |<a_k|psi>|^2.
    std::vector<double> class_weights(const StateVector& psi) const;
};

class DensityMatrix {
public:
    DensityMatrix(SubsystemLayout layout, CMatrix matrix);

    static DensityMatrix pure(const StateVector& psi);

    const CMatrix& matrix() const { return matrix_; }
    const SubsystemLayout& layout() const { return layout_; }
    std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }

    double trace() const { return matrix_.trace().real(); }
    double purity() const;
    RVector eigenvalues() const;
    // -Tr rho ln rho in nats.
    double von_neumann_entropy() const;

private:
    SubsystemLayout layout_;
    CMatrix matrix_;
};

StateVector tensor(std::span<const StateVector> factors);
StateVector tensor(const StateVector& a, const StateVector& b);

DensityMatrix partial_trace(const StateVector& state, std::span<const std::size_t> keep);
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep);

// Default degeneracy tolerance: 1e-9 * max(spectral range, spectral radius).
Spectrum eig(const HermitianOperator& op, std::optional<double> degeneracy_tol = std::nullopt);

double expectation(const HermitianOperator& op, const StateVector& state);

// exp(-i H t) via the spectral decomposition of H.
CMatrix unitary_evolution(const HermitianOperator& hamiltonian, double t);

bool is_unitary(const CMatrix& u, double tol);
double unitarity_residual(const CMatrix& u);

}  // namespace phicsl
