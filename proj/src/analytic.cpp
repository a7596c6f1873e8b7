#include "analytic.h"

#include <cmath>

#include "errors.h"

namespace ftc::analytic {

namespace {

void check_shape(int r, int a_lc, int k, const char* fn) {
    if (k < 1)
        throw domain_error(std::string(fn) + ": need k >= 1 tolerated faults");
    if (r < 1) throw domain_error(std::string(fn) + ": need r >= 1 rectangles");
    if (a_lc < k + 1)
        throw domain_error(std::string(fn) + ": fewer locations than k+1 faults");
}

}  // namespace

double fault_combinations(int a_lc, int k) {
    if (k < 0 || a_lc < k + 1)
        throw domain_error("fault_combinations: need 0 <= k < a_lc");
    const int m = k + 1;
    double c = 1.0;
    for (int i = 1; i <= m; ++i)
        c = c * static_cast<double>(a_lc - m + i) / static_cast<double>(i);
    return c;
}

double gamma_crit(int r, int a_lc, int k) {
    check_shape(r, a_lc, k, "gamma_crit");
    const double rc = static_cast<double>(r) * fault_combinations(a_lc, k);
    return std::pow(rc, -1.0 / static_cast<double>(k));
}

BoundReport sparse_prob_lower_bound(double gamma0, int r, int a_lc, int k, int n) {
    check_shape(r, a_lc, k, "sparse_prob_lower_bound");
    if (n < 1) throw domain_error("sparse_prob_lower_bound: need n >= 1 levels");
    if (!(gamma0 >= 0.0 && gamma0 < 1.0))
        throw domain_error("sparse_prob_lower_bound: gamma0 outside [0,1)");
    const double gcrit = gamma_crit(r, a_lc, k);
    if (gamma0 >= gcrit)
        throw domain_error("sparse_prob_lower_bound: gamma0 at or above gamma_crit");

    const double c = fault_combinations(a_lc, k);
    const double log_g0 = std::log(gamma0);
    const double log_rc = std::log(static_cast<double>(r) * c);

    BoundReport rep;
    // The recursion shrinks ln q by a factor of at least k+1 - ln(rC)/|ln q|
    // per level; the worst level is the first, giving the margin below.
    rep.delta = 0.99 * (static_cast<double>(k) + log_rc / log_g0);

    rep.p_levels.reserve(static_cast<std::size_t>(n));
    double q = -std::expm1(static_cast<double>(r) *
                           std::log1p(-c * std::pow(gamma0, k + 1)));
    for (int level = 1; level <= n; ++level) {
        if (level > 1)
            q = -std::expm1(static_cast<double>(r) *
                            std::log1p(-c * std::pow(q, k + 1)));
        rep.p_levels.push_back(1.0 - q);
        if (q > 0.0) {
            const double lhs = std::log(q);
            const double rhs = std::pow(1.0 + rep.delta, level) * log_g0;
            if (!(lhs < rhs + 1e-9 * std::abs(rhs)))
                throw numerical_error(
                    "sparse_prob_lower_bound: decay certificate failed");
        }
    }
    rep.p_lower = rep.p_levels.back();
    return rep;
}

}  // namespace ftc::analytic
