#include "prob.h"

#include <cmath>
#include <vector>

#include "doctest.h"
#include "errors.h"

using namespace ftc;

namespace {

// Independent binomial oracle: P(exactly j of n) summed termwise.
double binom(int n, int j) {
    double c = 1.0;
    for (int i = 1; i <= j; ++i)
        c = c * static_cast<double>(n - j + i) / static_cast<double>(i);
    return c;
}

double pmf(int n, int j, double d) {
    return binom(n, j) * std::pow(d, j) * std::pow(1.0 - d, n - j);
}

double oracle_one_plus(double d, int n) {
    double total = 0.0;
    for (int j = 1; j <= n; ++j) total += pmf(n, j, d);
    return total;
}

double oracle_two_plus(double d, int n) {
    double total = 0.0;
    for (int j = 2; j <= n; ++j) total += pmf(n, j, d);
    return total;
}

}  // namespace

TEST_CASE("clamp01 and ratio_clamped edge behavior") {
    CHECK(prob::clamp01(-0.5) == 0.0);
    CHECK(prob::clamp01(1.5) == 1.0);
    CHECK(prob::clamp01(0.25) == 0.25);
    CHECK(prob::ratio_clamped(0.5, 0.0) == 0.0);
    CHECK(prob::ratio_clamped(0.5, -1.0) == 0.0);
    CHECK(prob::ratio_clamped(2.0, 1.0) == 1.0);
    CHECK(prob::ratio_clamped(0.25, 0.5) == doctest::Approx(0.5));
}

TEST_CASE("p_one_plus and p_two_plus match a termwise binomial oracle") {
    const std::vector<double> deltas{0.0, 1e-6, 1e-4, 0.013, 0.1, 0.3, 0.7, 1.0};
    for (double d : deltas) {
        for (int n = 0; n <= 20; ++n) {
            CAPTURE(d);
            CAPTURE(n);
            CHECK(prob::p_one_plus(d, n) ==
                  doctest::Approx(oracle_one_plus(d, n)).epsilon(1e-12));
            CHECK(prob::p_two_plus(d, n) ==
                  doctest::Approx(oracle_two_plus(d, n)).epsilon(1e-12));
        }
    }
}

TEST_CASE("counting-probability special values") {
    CHECK(prob::p_one_plus(0.0, 5) == 0.0);
    CHECK(prob::p_one_plus(0.1, 1) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(prob::p_two_plus(0.5, 1) == 0.0);
    CHECK(prob::p_two_plus(0.0, 100) == 0.0);
    CHECK(prob::p_one_plus(0.013, 11) ==
          doctest::Approx(1.34058249197953394e-01).epsilon(1e-12));
    CHECK(prob::p_two_plus(0.3, 7) ==
          doctest::Approx(6.70582800000000034e-01).epsilon(1e-12));
    CHECK(prob::p_two_plus(0.013, 11) ==
          doctest::Approx(8.59759026716042096e-03).epsilon(1e-12));
}

TEST_CASE("counting probabilities reject bad arguments") {
    CHECK_THROWS_AS(prob::p_one_plus(-0.1, 3), domain_error);
    CHECK_THROWS_AS(prob::p_one_plus(1.1, 3), domain_error);
    CHECK_THROWS_AS(prob::p_two_plus(0.5, -1), domain_error);
    CHECK_THROWS_AS(prob::p_one_plus(std::nan(""), 3), domain_error);
}

TEST_CASE("grouped sources match the two-group binomial oracle") {
    const auto src = prob::Source::pair(0.01, 5, 0.002, 9);
    CHECK(prob::source_p_one_plus(src) ==
          doctest::Approx(6.59914655829613173e-02).epsilon(1e-12));
    CHECK(prob::source_p_two_plus(src) ==
          doctest::Approx(1.97347206995363011e-03).epsilon(1e-12));

    // Independent combination of the per-group pmfs.
    const double p00 = pmf(5, 0, 0.01) * pmf(9, 0, 0.002);
    const double p1 = pmf(5, 1, 0.01) * pmf(9, 0, 0.002) +
                      pmf(5, 0, 0.01) * pmf(9, 1, 0.002);
    CHECK(prob::source_p_one_plus(src) == doctest::Approx(1.0 - p00).epsilon(1e-12));
    CHECK(prob::source_p_two_plus(src) ==
          doctest::Approx(1.0 - p00 - p1).epsilon(1e-12));
}

TEST_CASE("a grouped source with equal rates merges into one group") {
    const auto merged = prob::Source::single(0.004, 12);
    const auto split = prob::Source::pair(0.004, 5, 0.004, 7);
    CHECK(prob::source_p_one_plus(split) ==
          doctest::Approx(prob::source_p_one_plus(merged)).epsilon(1e-14));
    CHECK(prob::source_p_two_plus(split) ==
          doctest::Approx(prob::source_p_two_plus(merged)).epsilon(1e-14));
}

TEST_CASE("rectangle failure combines sources pairwise plus per-source doubles") {
    prob::SourceTable t;
    t.push(prob::Source::single(0.01, 3));
    t.push(prob::Source::pair(0.004, 5, 0.007, 2));
    t.push(prob::Source::single(0.02, 1));
    CHECK(prob::rect_failure(t) ==
          doctest::Approx(3.03907519993126471e-03).epsilon(1e-12));

    prob::SourceTable empty;
    CHECK(prob::rect_failure(empty) == 0.0);

    prob::SourceTable one;
    one.push(prob::Source::pair(0.004, 5, 0.007, 2));
    CHECK(prob::rect_failure(one) ==
          doctest::Approx(prob::source_p_two_plus(one.rows[0])).epsilon(1e-15));
}

TEST_CASE("two-or-more never exceeds one-or-more") {
    for (double d : {0.0, 1e-5, 0.02, 0.4, 0.99}) {
        for (int n : {0, 1, 2, 7, 19}) {
            const double one = prob::p_one_plus(d, n);
            const double two = prob::p_two_plus(d, n);
            CHECK(two <= one + 1e-15);
            CHECK(one <= 1.0);
            CHECK(two >= 0.0);
        }
    }
}
