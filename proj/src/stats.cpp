// SPDX-License-Identifier: Apache-2.0
#include "phicsl/stats.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace phicsl {

double chi_square_survival(double statistic, std::size_t dof) {
    if (std::isnan(statistic)) return std::numeric_limits<double>::quiet_NaN();
    if (std::isinf(statistic)) return 0.0;  // counts in a cell of zero probability
    if (dof == 0 || statistic <= 0.0) return 1.0;
    return boost::math::gamma_q(0.5 * static_cast<double>(dof), 0.5 * statistic);
}

ChiSquare chi_square_goodness_of_fit(std::span<const std::uint64_t> counts, std::span<const double> probabilities) {
    if (counts.size() != probabilities.size()) throw std::invalid_argument("chi_square: size mismatch");
    const double n = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}));
    ChiSquare out;
    if (n == 0.0) return out;

    std::size_t cells = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double expected = n * probabilities[i];
        if (expected <= 0.0) {
            if (counts[i] > 0) out.statistic = std::numeric_limits<double>::infinity();
            continue;
        }
        ++cells;
        const double d = static_cast<double>(counts[i]) - expected;
        out.statistic += d * d / expected;
    }
    out.dof = cells > 0 ? cells - 1 : 0;
    out.p_value = chi_square_survival(out.statistic, out.dof);
    return out;
}

ChiSquare chi_square_two_sample(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
    if (a.size() != b.size()) throw std::invalid_argument("chi_square_two_sample: size mismatch");
    const double na = static_cast<double>(std::accumulate(a.begin(), a.end(), std::uint64_t{0}));
    const double nb = static_cast<double>(std::accumulate(b.begin(), b.end(), std::uint64_t{0}));
    ChiSquare out;
    if (na == 0.0 || nb == 0.0) return out;

    const double total = na + nb;
    std::size_t columns = 0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double col = static_cast<double>(a[j] + b[j]);
        if (col == 0.0) continue;
        ++columns;
        const double ea = na * col / total;
        const double eb = nb * col / total;
        const double da = static_cast<double>(a[j]) - ea;
        const double db = static_cast<double>(b[j]) - eb;
        out.statistic += da * da / ea + db * db / eb;
    }
    out.dof = columns > 0 ? columns - 1 : 0;
    out.p_value = chi_square_survival(out.statistic, out.dof);
    return out;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need at least two paired points");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissa");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    return fit;
}

}  // namespace phicsl
