// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace phicsl {

struct ChiSquare {
    double statistic = 0.0;
    std::size_t dof = 0;
    double p_value = 1.0;
};

// Upper tail of the chi-square distribution.
double chi_square_survival(double statistic, std::size_t dof);

// Goodness of fit of observed counts to probabilities. Cells with zero
// expected probability are dropped unless they received counts, which makes
// the statistic infinite.
ChiSquare chi_square_goodness_of_fit(std::span<const std::uint64_t> counts, std::span<const double> probabilities);

// Homogeneity test for two count vectors over the same categories (2 x k table).
ChiSquare chi_square_two_sample(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

// Ordinary least squares y = slope * x + intercept.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace phicsl
