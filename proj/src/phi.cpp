// SPDX-License-Identifier: Apache-2.0
#include "phicsl/phi.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace phicsl {

namespace {

std::string set_string(const std::vector<std::size_t>& members) {
    std::string out = "{";
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (i) out += ' ';
        out += std::to_string(members[i]);
    }
    return out + "}";
}

std::vector<std::size_t> gather(const Grain& grain, const std::vector<std::size_t>& block_ids) {
    std::vector<std::size_t> out;
    for (auto b : block_ids) {
        if (b >= grain.blocks.size()) throw std::invalid_argument("Bipartition: block index outside grain");
        out.insert(out.end(), grain.blocks[b].begin(), grain.blocks[b].end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Restricted-growth strings in lexicographic order.
void grow(std::vector<std::size_t>& rgs, std::size_t pos, std::size_t max_label, std::vector<Grain>& out) {
    if (pos == rgs.size()) {
        if (max_label == 0) return;  // single block
        Grain g;
        g.blocks.resize(max_label + 1);
        for (std::size_t i = 0; i < rgs.size(); ++i) g.blocks[rgs[i]].push_back(i);
        out.push_back(std::move(g));
        return;
    }
    for (std::size_t label = 0; label <= max_label + 1; ++label) {
        rgs[pos] = label;
        grow(rgs, pos + 1, std::max(max_label, label), out);
    }
}

struct Registry {
    std::mutex mutex;
    std::map<std::string, EntanglementMeasure> measures{{"entanglement_entropy", EntanglementMeasure(entanglement_entropy)}};
};

Registry& registry() {
    static Registry r;
    return r;
}

// Entropies keyed by the side-a subsystem mask, shared across grains of one search.
class EntropyCache {
public:
    EntropyCache(const StateVector& state, const EntanglementMeasure& measure) : state_(state), measure_(measure) {}

    double operator()(const std::vector<std::size_t>& side) {
        std::uint64_t mask = 0;
        for (auto s : side) mask |= std::uint64_t{1} << s;
        auto it = cache_.find(mask);
        if (it != cache_.end()) return it->second;
        const double v = measure_(state_, side);
        cache_.emplace(mask, v);
        return v;
    }

private:
    const StateVector& state_;
    const EntanglementMeasure& measure_;
    std::map<std::uint64_t, double> cache_;
};

PhiResult min_over_bipartitions(const Grain& grain, EntropyCache& entropy) {
    PhiResult best;
    best.phi = std::numeric_limits<double>::infinity();
    best.grain = grain;
    for (auto& bip : enumerate_bipartitions(grain)) {
        const double s = entropy(bip.subsystems_a(grain));
        if (s < best.phi) {
            best.phi = s;
            best.bipartition = std::move(bip);
        }
    }
    return best;
}

void require_searchable(const StateVector& state) {
    if (!state.is_normalized()) throw std::invalid_argument("phi: state is not normalized");
    if (state.layout().size() > 64) throw std::invalid_argument("phi: at most 64 subsystems supported");
}

}  // namespace

// ---------------------------------------------------------------------------

void Grain::validate(const SubsystemLayout& layout) const {
    if (blocks.size() < 2) throw std::invalid_argument("Grain: at least two blocks required");
    std::vector<int> seen(layout.size(), 0);
    for (const auto& b : blocks) {
        if (b.empty()) throw std::invalid_argument("Grain: empty block");
        for (auto s : b) {
            if (s >= layout.size()) throw std::invalid_argument("Grain: subsystem index out of range");
            if (seen[s]++) throw std::invalid_argument("Grain: blocks overlap");
        }
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end())
        throw std::invalid_argument("Grain: blocks do not cover every subsystem");
}

std::string Grain::to_string() const {
    std::string out;
    for (const auto& b : blocks) out += set_string(b);
    return out;
}

std::vector<std::size_t> Bipartition::subsystems_a(const Grain& grain) const { return gather(grain, side_a); }
std::vector<std::size_t> Bipartition::subsystems_b(const Grain& grain) const { return gather(grain, side_b); }

std::string Bipartition::to_string(const Grain& grain) const {
    return set_string(subsystems_a(grain)) + "|" + set_string(subsystems_b(grain));
}

double entanglement_entropy(const StateVector& state, std::span<const std::size_t> side) {
    const SubsystemLayout& layout = state.layout();
    std::vector<bool> in_side(layout.size(), false);
    for (auto s : side) {
        if (s >= layout.size()) throw std::invalid_argument("entanglement_entropy: subsystem index out of range");
        in_side[s] = true;
    }
    std::vector<std::size_t> a, b;
    std::size_t dim_a = 1, dim_b = 1;
    for (std::size_t s = 0; s < layout.size(); ++s) {
        if (in_side[s]) {
            a.push_back(s);
            dim_a *= layout.dim(s);
        } else {
            b.push_back(s);
            dim_b *= layout.dim(s);
        }
    }
    if (a.empty() || b.empty()) throw std::invalid_argument("entanglement_entropy: both sides must be nonempty");

    const bool a_has_zero = in_side[0];
    const bool use_a = dim_a < dim_b || (dim_a == dim_b && a_has_zero);
    return partial_trace(state, use_a ? a : b).von_neumann_entropy();
}

void register_measure(const std::string& name, EntanglementMeasure measure) {
    if (!measure) throw std::invalid_argument("register_measure: empty measure");
    auto& r = registry();
    std::lock_guard lock(r.mutex);
    r.measures[name] = std::move(measure);
}

std::optional<EntanglementMeasure> find_measure(const std::string& name) {
    auto& r = registry();
    std::lock_guard lock(r.mutex);
    auto it = r.measures.find(name);
    if (it == r.measures.end()) return std::nullopt;
    return it->second;
}

std::vector<std::string> measure_names() {
    auto& r = registry();
    std::lock_guard lock(r.mutex);
    std::vector<std::string> out;
    for (const auto& [name, _] : r.measures) out.push_back(name);
    return out;
}

std::vector<Grain> enumerate_grains(const SubsystemLayout& layout, std::string* diagnostic) {
    std::vector<Grain> out;
    if (layout.size() < 2) {
        if (diagnostic) *diagnostic = "single-subsystem layout has no grain with two or more blocks; Phi is 0 by convention";
        return out;
    }
    std::vector<std::size_t> rgs(layout.size(), 0);
    grow(rgs, 1, 0, out);
    return out;
}

std::vector<Bipartition> enumerate_bipartitions(const Grain& grain) {
    const std::size_t k = grain.blocks.size();
    if (k < 2) throw std::invalid_argument("enumerate_bipartitions: grain needs at least two blocks");
    if (k > 63) throw std::invalid_argument("enumerate_bipartitions: too many blocks");
    std::vector<Bipartition> out;
    const std::uint64_t limit = std::uint64_t{1} << (k - 1);
    out.reserve(limit - 1);
    for (std::uint64_t m = 1; m < limit; ++m) {
        Bipartition bip;
        bip.side_a.push_back(0);
        for (std::size_t j = 1; j < k; ++j) ((m >> (j - 1)) & 1 ? bip.side_b : bip.side_a).push_back(j);
        out.push_back(std::move(bip));
    }
    return out;
}

PhiResult min_bipartition_entropy(const StateVector& state, const Grain& grain, const EntanglementMeasure& measure) {
    require_searchable(state);
    grain.validate(state.layout());
    EntropyCache cache(state, measure);
    return min_over_bipartitions(grain, cache);
}

std::vector<PhiResult> phi_per_grain(const StateVector& state, const EntanglementMeasure& measure) {
    require_searchable(state);
    EntropyCache cache(state, measure);
    std::vector<PhiResult> out;
    for (const auto& g : enumerate_grains(state.layout())) out.push_back(min_over_bipartitions(g, cache));
    return out;
}

PhiResult phi_max(const StateVector& state, const EntanglementMeasure& measure) {
    PhiResult best;
    for (auto& r : phi_per_grain(state, measure)) {
        if (best.grain.blocks.empty() || r.phi > best.phi) best = std::move(r);
    }
    return best;
}

void PhiBasisSpec::validate() const {
    const std::size_t dim = layout.total_dim();
    if (basis_states.size() != dim)
        throw std::invalid_argument("PhiBasisSpec: basis has " + std::to_string(basis_states.size()) +
                                    " states, space dimension is " + std::to_string(dim));
    CMatrix v(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t k = 0; k < dim; ++k) {
        if (!(basis_states[k].layout() == layout)) throw std::invalid_argument("PhiBasisSpec: basis state layout mismatch");
        v.col(static_cast<Eigen::Index>(k)) = basis_states[k].amplitudes();
    }
    const double defect = (v.adjoint() * v - CMatrix::Identity(v.cols(), v.cols())).cwiseAbs().maxCoeff();
    if (defect > 1e-10)
        throw std::invalid_argument("PhiBasisSpec: basis is not orthonormal (Gram defect " + std::to_string(defect) + ")");
}

std::vector<double> phi_eigenvalues(const PhiBasisSpec& spec, std::optional<double> degeneracy_tol) {
    spec.validate();
    const double tol = degeneracy_tol.value_or(1e-9);
    std::vector<double> phis;
    phis.reserve(spec.basis_states.size());
    for (const auto& e : spec.basis_states) phis.push_back(phi_max(e).phi);

    std::vector<std::size_t> order(phis.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return phis[x] < phis[y]; });
    double anchor = 0.0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        double& v = phis[order[i]];
        if (i == 0 || v - anchor > tol)
            anchor = v;
        else
            v = anchor;
    }
    return phis;
}

HermitianOperator build_phi_operator(const PhiBasisSpec& spec, std::optional<double> degeneracy_tol) {
    const std::vector<double> phis = phi_eigenvalues(spec, degeneracy_tol);
    return HermitianOperator::from_spectrum(spec.layout, phis, spec.basis_states);
}

}  // namespace phicsl
