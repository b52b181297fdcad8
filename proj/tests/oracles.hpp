// SPDX-License-Identifier: Apache-2.0
#pragma once

// Test-only reference implementations, written without the library's
// linear-algebra paths: index-loop partial traces, a Jacobi eigensolver,
// Taylor matrix exponentials, brute-force partition enumeration.

#include "phicsl/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <set>
#include <vector>

namespace oracle {

using phicsl::cplx;
using phicsl::CMatrix;
using phicsl::CVector;

// Mixed-radix digits, subsystem 0 most significant.
inline std::vector<std::size_t> digits_of(std::size_t flat, const std::vector<std::size_t>& dims) {
    std::vector<std::size_t> d(dims.size());
    for (std::size_t s = dims.size(); s-- > 0;) {
        d[s] = flat % dims[s];
        flat /= dims[s];
    }
    return d;
}

// rho_keep[i][j] = sum over traced digits t of psi(i, t) conj(psi(j, t)).
inline CMatrix partial_trace(const CVector& psi, const std::vector<std::size_t>& dims, const std::vector<std::size_t>& keep) {
    std::vector<bool> kept(dims.size(), false);
    for (auto k : keep) kept[k] = true;
    std::size_t dk = 1;
    for (std::size_t s = 0; s < dims.size(); ++s)
        if (kept[s]) dk *= dims[s];
    CMatrix rho = CMatrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
    const std::size_t total = static_cast<std::size_t>(psi.size());
    for (std::size_t a = 0; a < total; ++a) {
        const auto da = digits_of(a, dims);
        for (std::size_t b = 0; b < total; ++b) {
            const auto db = digits_of(b, dims);
            bool same_traced = true;
            std::size_t ia = 0, ib = 0;
            for (std::size_t s = 0; s < dims.size(); ++s) {
                if (kept[s]) {
                    ia = ia * dims[s] + da[s];
                    ib = ib * dims[s] + db[s];
                } else if (da[s] != db[s]) {
                    same_traced = false;
                    break;
                }
            }
            if (same_traced) rho(static_cast<Eigen::Index>(ia), static_cast<Eigen::Index>(ib)) += psi(a) * std::conj(psi(b));
        }
    }
    return rho;
}

// Cyclic Jacobi on a real symmetric matrix; returns eigenvalues ascending.
inline std::vector<double> jacobi_symmetric(std::vector<std::vector<double>> a) {
    const std::size_t n = a.size();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = a[i][i];
    std::sort(ev.begin(), ev.end());
    return ev;
}

// Hermitian A = X + iY through the real embedding [[X, -Y], [Y, X]], whose
// spectrum is that of A with every eigenvalue doubled.
inline std::vector<double> hermitian_eigenvalues(const CMatrix& m) {
    const std::size_t n = static_cast<std::size_t>(m.rows());
    std::vector<std::vector<double>> e(2 * n, std::vector<double>(2 * n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const cplx z = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            e[i][j] = z.real();
            e[i][j + n] = -z.imag();
            e[i + n][j] = z.imag();
            e[i + n][j + n] = z.real();
        }
    const auto doubled = jacobi_symmetric(std::move(e));
    std::vector<double> ev;
    for (std::size_t i = 0; i < doubled.size(); i += 2) ev.push_back(0.5 * (doubled[i] + doubled[i + 1]));
    return ev;
}

inline double entropy_of(const std::vector<double>& p) {
    double s = 0.0;
    for (double x : p)
        if (x > 1e-300) s -= x * std::log(x);
    return s;
}

// Entanglement entropy of the reduced state on `side`.
inline double entropy(const CVector& psi, const std::vector<std::size_t>& dims, const std::vector<std::size_t>& side) {
    return entropy_of(hermitian_eigenvalues(partial_trace(psi, dims, side)));
}

// exp(M) by scaling and squaring with a long Taylor series.
inline CMatrix expm(const CMatrix& m) {
    double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    while (norm > 0.5) {
        norm /= 2;
        ++squarings;
    }
    const CMatrix a = m / std::pow(2.0, squarings);
    CMatrix result = CMatrix::Identity(m.rows(), m.cols());
    CMatrix term = result;
    for (int k = 1; k <= 30; ++k) {
        term = term * a / double(k);
        result += term;
    }
    for (int i = 0; i < squarings; ++i) result = result * result;
    return result;
}

// ---------------------------------------------------------------------------
// Partitions

using Blocks = std::vector<std::vector<std::size_t>>;

// Every labelling of n items with labels 0..n-1, canonicalized by first
// appearance and deduplicated; sorted by canonical label string.
inline std::vector<Blocks> all_grains(std::size_t n) {
    std::set<std::vector<std::size_t>> canon;
    std::vector<std::size_t> f(n, 0);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == n) {
            std::vector<std::size_t> relabel(n, n), c(n);
            std::size_t next = 0;
            for (std::size_t k = 0; k < n; ++k) {
                if (relabel[f[k]] == n) relabel[f[k]] = next++;
                c[k] = relabel[f[k]];
            }
            if (next >= 2) canon.insert(c);
            return;
        }
        for (std::size_t l = 0; l < n; ++l) {
            f[i] = l;
            rec(i + 1);
        }
    };
    rec(0);
    std::vector<Blocks> out;
    for (const auto& c : canon) {
        const std::size_t k = *std::max_element(c.begin(), c.end()) + 1;
        Blocks b(k);
        for (std::size_t i = 0; i < n; ++i) b[c[i]].push_back(i);
        out.push_back(b);
    }
    return out;
}

struct Split {
    std::vector<std::size_t> side_a_subsystems;
    std::vector<std::size_t> side_b_subsystems;
};

// All splits of the blocks with block 0 on side a, ordered by the binary
// number whose bit j-1 marks block j on side b.
inline std::vector<Split> all_splits(const Blocks& g) {
    const std::size_t k = g.size();
    std::vector<Split> out;
    for (std::size_t m = 1; m < (std::size_t{1} << (k - 1)); ++m) {
        Split s;
        for (std::size_t j = 0; j < k; ++j) {
            const bool on_b = j > 0 && ((m >> (j - 1)) & 1);
            auto& side = on_b ? s.side_b_subsystems : s.side_a_subsystems;
            side.insert(side.end(), g[j].begin(), g[j].end());
        }
        std::sort(s.side_a_subsystems.begin(), s.side_a_subsystems.end());
        std::sort(s.side_b_subsystems.begin(), s.side_b_subsystems.end());
        out.push_back(s);
    }
    return out;
}

struct NaivePhi {
    double phi = 0.0;
    std::size_t grain = 0;  // index into all_grains(n)
    Split cut;
};

// Max over grains of the min over splits, first-wins on ties.
inline NaivePhi phi_max_naive(const CVector& psi, const std::vector<std::size_t>& dims) {
    const auto grains = all_grains(dims.size());
    NaivePhi best;
    for (std::size_t g = 0; g < grains.size(); ++g) {
        double gmin = 0.0;
        Split gcut;
        bool first = true;
        for (const auto& split : all_splits(grains[g])) {
            const double e = entropy(psi, dims, split.side_a_subsystems);
            if (first || e < gmin) {
                gmin = e;
                gcut = split;
                first = false;
            }
        }
        if (g == 0 || gmin > best.phi) best = {gmin, g, gcut};
    }
    return best;
}

// ---------------------------------------------------------------------------
// Ensemble-averaged dynamics

// d rho/dt = -i[H, rho] - (lambda/2)[A, [A, rho]], classical RK4 from rho(0);
// returns rho at each multiple of `every` steps.
inline std::vector<CMatrix> lindblad_dephasing(const CMatrix& h, const CMatrix& a, double lambda, const CMatrix& rho0,
                                               double dt, std::size_t steps, std::size_t every) {
    const cplx i(0, 1);
    auto rhs = [&](const CMatrix& r) -> CMatrix {
        const CMatrix ar = a * r - r * a;
        return -i * (h * r - r * h) - 0.5 * lambda * (a * ar - ar * a);
    };
    std::vector<CMatrix> out;
    CMatrix r = rho0;
    for (std::size_t s = 1; s <= steps; ++s) {
        const CMatrix k1 = rhs(r);
        const CMatrix k2 = rhs(r + 0.5 * dt * k1);
        const CMatrix k3 = rhs(r + 0.5 * dt * k2);
        const CMatrix k4 = rhs(r + dt * k3);
        r += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (s % every == 0) out.push_back(r);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Random inputs (hand-rolled generators for property tests)

inline CVector random_vector(std::size_t dim, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    CVector v(static_cast<Eigen::Index>(dim));
    for (auto& x : v) x = cplx(n(rng), n(rng));
    return v / v.norm();
}

inline CMatrix random_hermitian(std::size_t dim, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    CMatrix m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = cplx(n(rng), n(rng));
    CMatrix h = (m + m.adjoint()) / 2.0;
    for (Eigen::Index i = 0; i < h.rows(); ++i) h(i, i) = h(i, i).real();
    return h;
}

inline CMatrix random_unitary(std::size_t dim, std::mt19937_64& rng) {
    return expm(cplx(0, 1) * random_hermitian(dim, rng));
}

inline std::vector<std::size_t> random_dims(std::size_t n, std::size_t max_dim, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> d(2, max_dim);
    std::vector<std::size_t> dims(n);
    for (auto& x : dims) x = d(rng);
    return dims;
}

}  // namespace oracle
