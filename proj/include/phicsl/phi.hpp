// SPDX-License-Identifier: Apache-2.0
#pragma once

// Integrated information of pure states, proxied by entanglement entropy.
//
// A grain groups the elementary subsystems into blocks. Phi at a grain is the
// smallest entanglement entropy over all two-block splits of its blocks, and
// Phi^Max is the largest grain value. Entropies are in nats.
//
// Canonical order (used for every tie-break):
//   grains        restricted-growth strings in lexicographic order, the
//                 single-block partition excluded; block j holds the
//                 subsystems labelled j, so blocks are ordered by first member;
//   bipartitions  side_a always holds block 0; for mask m = 1 .. 2^(k-1) - 1
//                 block j >= 1 goes to side_b iff bit j-1 of m is set; m ascending.

#include "phicsl/hilbert.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace phicsl {

struct Grain {
    std::vector<std::vector<std::size_t>> blocks;

    void validate(const SubsystemLayout& layout) const;
    std::string to_string() const;  // "{0 1}{2}"
    bool operator==(const Grain&) const = default;
};

// Sides are sets of block indices into a grain.
struct Bipartition {
    std::vector<std::size_t> side_a;
    std::vector<std::size_t> side_b;

    std::vector<std::size_t> subsystems_a(const Grain& grain) const;
    std::vector<std::size_t> subsystems_b(const Grain& grain) const;
    std::string to_string(const Grain& grain) const;  // "{0 1}|{2}" in subsystem indices
    bool operator==(const Bipartition&) const = default;
};

struct PhiResult {
    double phi = 0.0;
    Grain grain;               // empty for single-subsystem layouts
    Bipartition bipartition;   // minimizing split of `grain`
};

// Entanglement measure of the split (side, complement) of a pure state.
using EntanglementMeasure = std::function<double(const StateVector&, std::span<const std::size_t> side)>;

// Von Neumann entropy of the reduced state across (side, complement). The value
// depends only on the unordered split: it is always computed on the side of
// smaller dimension (ties: the side holding subsystem 0).
double entanglement_entropy(const StateVector& state, std::span<const std::size_t> side);

// Named measures. "entanglement_entropy" is registered by default; mixed-state
// measures can be added here without touching the search code.
void register_measure(const std::string& name, EntanglementMeasure measure);
std::optional<EntanglementMeasure> find_measure(const std::string& name);
std::vector<std::string> measure_names();

// Empty for single-subsystem layouts (Phi is 0 by convention); the reason is
// written to `diagnostic` when given.
std::vector<Grain> enumerate_grains(const SubsystemLayout& layout, std::string* diagnostic = nullptr);
std::vector<Bipartition> enumerate_bipartitions(const Grain& grain);

PhiResult min_bipartition_entropy(const StateVector& state, const Grain& grain,
                                  const EntanglementMeasure& measure = entanglement_entropy);

// One result per grain, in canonical grain order.
std::vector<PhiResult> phi_per_grain(const StateVector& state, const EntanglementMeasure& measure = entanglement_entropy);

PhiResult phi_max(const StateVector& state, const EntanglementMeasure& measure = entanglement_entropy);

struct PhiBasisSpec {
    SubsystemLayout layout;
    std::vector<StateVector> basis_states;

    // Complete and orthonormal: Gram matrix equals identity within 1e-10.
    void validate() const;
};

// Phi^Max of every basis state; values closer than `degeneracy_tol` (default
// 1e-9 nats) to the first member of their cluster are set equal to it.
std::vector<double> phi_eigenvalues(const PhiBasisSpec& spec, std::optional<double> degeneracy_tol = std::nullopt);

// sum_k phi_k |e_k><e_k| with phi_k = phi_max(e_k).
HermitianOperator build_phi_operator(const PhiBasisSpec& spec, std::optional<double> degeneracy_tol = std::nullopt);

}  // namespace phicsl
