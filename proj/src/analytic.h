#pragma once

#include <vector>

namespace ftc::analytic {

// Number of k+1 element subsets of a_lc locations, the count entering the
// sparse-failure union bound.
double fault_combinations(int a_lc, int k);

// Largest elementary rate for which the sparse-failure recursion can be
// driven to zero: 1 / (r * C(a_lc, k+1))^(1/k).
double gamma_crit(int r, int a_lc, int k);

struct BoundReport {
    double p_lower = 0.0;            // certified lower bound on P(n)
    double delta = 0.0;              // doubling-exponent margin used by the lemma
    std::vector<double> p_levels;    // P(1) .. P(n)
};

// Lower-bounds the probability that n levels of concatenation leave no more
// than k faults in any rectangle, for elementary rate gamma0 < gamma_crit.
// Also certifies the doubly exponential decay ln q(n) < (1+delta)^n ln gamma0
// level by level.
BoundReport sparse_prob_lower_bound(double gamma0, int r, int a_lc, int k, int n);

}  // namespace ftc::analytic
