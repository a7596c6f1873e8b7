#include "prob.h"

#include <cmath>

#include "errors.h"

namespace ftc::prob {

double clamp01(double x) {
    if (x < 0.0) return 0.0;
    if (x > 1.0) return 1.0;
    return x;
}

double ratio_clamped(double num, double den) {
    if (den <= 0.0) return 0.0;
    double r = num / den;
    return r < 1.0 ? r : 1.0;
}

namespace {

void check_prob_args(double delta, int n, const char* fn) {
    if (!(delta >= 0.0 && delta <= 1.0))
        throw domain_error(std::string(fn) + ": delta outside [0,1]");
    if (n < 0) throw domain_error(std::string(fn) + ": negative count");
}

}  // namespace

double p_one_plus(double delta, int n) {
    check_prob_args(delta, n, "p_one_plus");
    return clamp01(1.0 - std::pow(1.0 - delta, n));
}

double p_two_plus(double delta, int n) {
    check_prob_args(delta, n, "p_two_plus");
    if (n < 2) return 0.0;
    return clamp01(1.0 - std::pow(1.0 - delta, n) -
                   n * delta * std::pow(1.0 - delta, n - 1));
}

double source_p_one_plus(const Source& src) {
    double prod = 1.0;
    for (int i = 0; i < src.ngroups; ++i) {
        const auto& g = src.groups[static_cast<std::size_t>(i)];
        prod *= std::pow(1.0 - g.delta, g.count);
    }
    return 1.0 - prod;
}

double source_p_two_plus(const Source& src) {
    double prod_all = 1.0;
    for (int i = 0; i < src.ngroups; ++i) {
        const auto& g = src.groups[static_cast<std::size_t>(i)];
        prod_all *= std::pow(1.0 - g.delta, g.count);
    }
    double exactly1 = 0.0;
    for (int i = 0; i < src.ngroups; ++i) {
        const auto& g = src.groups[static_cast<std::size_t>(i)];
        if (g.count < 1) continue;
        double rest = 1.0;
        for (int j = 0; j < src.ngroups; ++j) {
            if (j == i) continue;
            const auto& h = src.groups[static_cast<std::size_t>(j)];
            rest *= std::pow(1.0 - h.delta, h.count);
        }
        exactly1 += g.count * g.delta * std::pow(1.0 - g.delta, g.count - 1) * rest;
    }
    return clamp01(1.0 - prod_all - exactly1);
}

double rect_failure(const SourceTable& table) {
    std::array<double, 8> p1{};
    for (int i = 0; i < table.n; ++i)
        p1[static_cast<std::size_t>(i)] =
            source_p_one_plus(table.rows[static_cast<std::size_t>(i)]);
    double tot = 0.0;
    for (int i = 0; i < table.n; ++i)
        for (int j = 0; j < i; ++j)
            tot += p1[static_cast<std::size_t>(i)] * p1[static_cast<std::size_t>(j)];
    for (int i = 0; i < table.n; ++i)
        tot += source_p_two_plus(table.rows[static_cast<std::size_t>(i)]);
    return clamp01(tot);
}

}  // namespace ftc::prob
