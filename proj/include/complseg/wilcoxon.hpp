#pragma once

#include <vector>

namespace complseg {

struct WilcoxonResult {
    double p_value = 1.0;
    int n = 0;           // effective pairs after zero-difference removal
    double w_plus = 0.0; // rank sum of positive differences
    bool exact = false;  // exact null distribution vs normal approximation
};

// Two-sided Wilcoxon signed-rank test on paired samples. Zero differences are
// dropped before ranking; ties receive average ranks. For n <= 25 the exact
// sign-flip null distribution is used, otherwise a normal approximation with
// continuity and tie corrections. Throws TooFewPairsError below 5 effective
// pairs.
WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b);

} // namespace complseg
