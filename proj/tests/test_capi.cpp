#include "ftcalc.h"

#include <cstring>

#include "doctest.h"
#include "json.hpp"

namespace {

struct ModelGuard {
    ftc_model* m;
    explicit ModelGuard(ftc_model* p) : m(p) {}
    ~ModelGuard() { ftc_model_destroy(m); }
    ModelGuard(const ModelGuard&) = delete;
    ModelGuard& operator=(const ModelGuard&) = delete;
};

constexpr double x1[5] = {1e-4, 1e-4, 1e-5, 2e-4, 1e-4};

}  // namespace

TEST_CASE("version and default options are stable") {
    CHECK(std::strcmp(ftc_version(), "1.0.0") == 0);
    ftc_flow_options opts;
    ftc_flow_options_default(&opts);
    CHECK(opts.max_iter == 200);
    CHECK(opts.convergence_floor == 1e-12);
    CHECK(opts.divergence_ceiling == 0.3);
    ftc_flow_options_default(nullptr);  // must not crash
}

TEST_CASE("model lifecycle and dimensions") {
    ftc_model* nl = ftc_model_create_nonlocal();
    REQUIRE(nl != nullptr);
    CHECK(ftc_model_dim(nl) == 5);
    ftc_model_destroy(nl);

    ftc_model* lc = ftc_model_create_local(20, 2, 1.0);
    REQUIRE(lc != nullptr);
    CHECK(ftc_model_dim(lc) == 8);
    ftc_model_destroy(lc);

    CHECK(ftc_model_create_local(2, 3, 1.0) == nullptr);
    CHECK(std::strlen(ftc_last_error()) > 0);
    CHECK(ftc_model_create_local(5, 1, -0.5) == nullptr);
    CHECK(ftc_model_create_local(0, 0, 1.0) == nullptr);

    CHECK(ftc_model_dim(nullptr) == 0);
    ftc_model_destroy(nullptr);  // must be a no-op
}

TEST_CASE("null arguments are reported, not dereferenced") {
    ModelGuard g(ftc_model_create_nonlocal());
    double out[5];
    CHECK(ftc_model_step(nullptr, x1, out) == FTC_ERR_ARGUMENT);
    CHECK(ftc_model_step(g.m, nullptr, out) == FTC_ERR_ARGUMENT);
    CHECK(ftc_model_step(g.m, x1, nullptr) == FTC_ERR_ARGUMENT);
    CHECK(std::strlen(ftc_last_error()) > 0);
    int cls;
    CHECK(ftc_classify(g.m, nullptr, nullptr, &cls, nullptr) == FTC_ERR_ARGUMENT);
    double a, d;
    CHECK(ftc_model_stats(g.m, x1, &a, nullptr, &d) == FTC_ERR_ARGUMENT);
}

TEST_CASE("stepping through the C interface matches the pinned values") {
    ModelGuard g(ftc_model_create_nonlocal());
    double out[5];
    REQUIRE(ftc_model_step(g.m, x1, out) == FTC_OK);
    const double want[5] = {7.60106636131282727e-06, 1.49813822115080209e-05,
                            5.34622150452940811e-06, 1.05037411802448635e-05,
                            7.60106636131282727e-06};
    for (int i = 0; i < 5; ++i)
        CHECK(out[i] == doctest::Approx(want[i]).epsilon(1e-12));

    const double bad[5] = {0.5, -0.1, 0, 0, 0};
    CHECK(ftc_model_step(g.m, bad, out) == FTC_ERR_DOMAIN);
}

TEST_CASE("local stepping matches the pinned values") {
    ModelGuard g(ftc_model_create_local(20, 2, 1.0));
    const double ry1[8] = {1e-4, 1e-4, 1e-5, 1e-5, 5e-4, 5e-5, 2e-4, 1e-4};
    double out[8];
    REQUIRE(ftc_model_step(g.m, ry1, out) == FTC_OK);
    const double want[8] = {7.64131441765622956e-06, 1.27545510628768177e-04,
                            5.38163500963408178e-06, 3.07576416143096054e-05,
                            4.35481395500314505e-04, 1.26874276525690277e-04,
                            1.05493578988759326e-05, 7.64131441765622956e-06};
    for (int i = 0; i < 8; ++i)
        CHECK(out[i] == doctest::Approx(want[i]).epsilon(1e-12));
}

TEST_CASE("ancilla statistics cross the interface intact") {
    ModelGuard g(ftc_model_create_nonlocal());
    const double x2[5] = {3.4e-4, 3.4e-4, 3.4e-5, 6.8e-4, 3.4e-4};
    double alpha, beta, danc;
    REQUIRE(ftc_model_stats(g.m, x2, &alpha, &beta, &danc) == FTC_OK);
    CHECK(alpha == doctest::Approx(9.88029592813825297e-01).epsilon(1e-12));
    CHECK(beta == doctest::Approx(9.83980781434739993e-01).epsilon(1e-12));
    CHECK(danc == doctest::Approx(1.19585472688243932e-03).epsilon(1e-12));
}

TEST_CASE("standard rate profiles scale the documented ray") {
    ModelGuard nl(ftc_model_create_nonlocal());
    double out[5];
    REQUIRE(ftc_model_standard_rates(nl.m, 3.4e-4, out) == FTC_OK);
    CHECK(out[0] == doctest::Approx(3.4e-4).epsilon(1e-14));
    CHECK(out[1] == doctest::Approx(3.4e-4).epsilon(1e-14));
    CHECK(out[2] == doctest::Approx(3.4e-5).epsilon(1e-14));
    CHECK(out[3] == doctest::Approx(6.8e-4).epsilon(1e-14));
    CHECK(out[4] == doctest::Approx(3.4e-4).epsilon(1e-14));

    ModelGuard lc(ftc_model_create_local(20, 2, 0.5));
    double lout[8];
    REQUIRE(ftc_model_standard_rates(lc.m, 1e-5, lout) == FTC_OK);
    CHECK(lout[1] == doctest::Approx(1e-5).epsilon(1e-14));
    CHECK(lout[2] == doctest::Approx(1e-6).epsilon(1e-14));
    CHECK(lout[4] == doctest::Approx(0.5 * 10.0 * 1e-5).epsilon(1e-14));
    CHECK(lout[5] == doctest::Approx(0.1 * 10.0 * 1e-5).epsilon(1e-14));
    CHECK(lout[6] == doctest::Approx(2e-5).epsilon(1e-14));

    CHECK(ftc_model_standard_rates(nl.m, -1.0, out) == FTC_ERR_DOMAIN);
}

TEST_CASE("classification through the C interface") {
    ModelGuard g(ftc_model_create_nonlocal());
    int cls = -1, used = -1;
    REQUIRE(ftc_classify(g.m, x1, nullptr, &cls, &used) == FTC_OK);
    CHECK(cls == FTC_FLOW_BELOW);
    CHECK(used == 5);

    double hot[5];
    REQUIRE(ftc_model_standard_rates(g.m, 4e-4, hot) == FTC_OK);
    REQUIRE(ftc_classify(g.m, hot, nullptr, &cls, &used) == FTC_OK);
    CHECK(cls == FTC_FLOW_ABOVE);
    CHECK(used == 7);

    ftc_flow_options opts;
    ftc_flow_options_default(&opts);
    opts.max_iter = 3;
    double warm[5];
    REQUIRE(ftc_model_standard_rates(g.m, 3e-4, warm) == FTC_OK);
    REQUIRE(ftc_classify(g.m, warm, &opts, &cls, &used) == FTC_OK);
    CHECK(cls == FTC_FLOW_UNDECIDED);
    CHECK(used == 3);
}

TEST_CASE("threshold search through the C interface") {
    ModelGuard g(ftc_model_create_nonlocal());
    const double base[5] = {0, 0, 0, 0, 0};
    const double dir[5] = {1.0, 1.0, 0.1, 2.0, 1.0};
    double scale = 0.0;
    int undecided = -1;
    REQUIRE(ftc_threshold(g.m, base, dir, 1e-5, 1e-2, 1e-3, nullptr, &scale,
                          &undecided) == FTC_OK);
    CHECK(scale == doctest::Approx(3.394127e-4).epsilon(2e-3));
    CHECK(scale > 2.5e-4);
    CHECK(scale < 4.5e-4);
    CHECK(undecided == 0);

    CHECK(ftc_threshold(g.m, base, dir, 0.0, 1e-2, 1e-3, nullptr, &scale,
                        nullptr) == FTC_ERR_DOMAIN);
    CHECK(std::strlen(ftc_last_error()) > 0);
}

TEST_CASE("pseudothreshold through the C interface") {
    ModelGuard g(ftc_model_create_nonlocal());
    const double base[5] = {0, 0, 0, 0, 0};
    const double dir[5] = {1.0, 1.0, 0.1, 2.0, 1.0};
    double scale = 0.0;
    REQUIRE(ftc_pseudothreshold(g.m, base, dir, 0, 1e-5, 5e-2, 1e-3, &scale) ==
            FTC_OK);
    CHECK(scale == doctest::Approx(1.127101e-3).epsilon(2e-3));
    CHECK(ftc_pseudothreshold(g.m, base, dir, 7, 1e-5, 5e-2, 1e-3, &scale) ==
          FTC_ERR_DOMAIN);
}

TEST_CASE("fixed point report through the C interface") {
    ModelGuard g(ftc_model_create_nonlocal());
    const double guess[5] = {7e-5, 1.5e-4, 7e-5, 7e-5, 7e-5};
    double loc[5], mags[5], residual = 1.0;
    int unstable = -1;
    REQUIRE(ftc_fixed_point(g.m, guess, loc, &residual, mags, &unstable) == FTC_OK);
    CHECK(residual < 1e-12);
    CHECK(loc[1] / loc[0] == doctest::Approx(2.18963).epsilon(1e-3));
    CHECK(mags[0] == doctest::Approx(2.01846668414760977).epsilon(1e-3));
    CHECK(unstable == 1);

    const double edge[5] = {0.0, 0.5, 0.5, 0.5, 0.5};
    CHECK(ftc_fixed_point(g.m, edge, loc, &residual, nullptr, nullptr) ==
          FTC_ERR_DOMAIN);
}

TEST_CASE("tau optimization through the C interface") {
    int tau_star = 0;
    double threshold = 0.0;
    REQUIRE(ftc_optimize_tau(8, 1.0, 1, 0, 1e-7, 1e-2, 1e-3, nullptr, &tau_star,
                             &threshold) == FTC_OK);
    CHECK(tau_star == 1);
    CHECK(threshold == doctest::Approx(1.383051e-4).epsilon(5e-3));

    CHECK(ftc_optimize_tau(8, 1.0, 0, 0, 1e-7, 1e-2, 1e-3, nullptr, &tau_star,
                           &threshold) == FTC_ERR_DOMAIN);
}

TEST_CASE("analytic bound through the C interface") {
    double gc = 0.0;
    REQUIRE(ftc_gamma_crit(1, 2, 1, &gc) == FTC_OK);
    CHECK(gc == 1.0);
    CHECK(ftc_gamma_crit(10, 514, 0, &gc) == FTC_ERR_DOMAIN);

    double levels[4], delta = 0.0;
    REQUIRE(ftc_sparse_prob_lower_bound(1e-6, 20, 100, 1, 4, levels, &delta) ==
            FTC_OK);
    CHECK(delta > 0.0);
    CHECK(levels[3] >= levels[0]);
    CHECK(levels[0] > 0.999);

    REQUIRE(ftc_gamma_crit(1, 514, 1, &gc) == FTC_OK);
    CHECK(ftc_sparse_prob_lower_bound(gc, 1, 514, 1, 4, levels, &delta) ==
          FTC_ERR_DOMAIN);
    CHECK(std::strstr(ftc_last_error(), "gamma_crit") != nullptr);
}

TEST_CASE("catalog numbers through the C interface") {
    int out = 0;
    REQUIRE(ftc_ec_footprint(3, 0.9, &out) == FTC_OK);
    CHECK(out == 87);
    REQUIRE(ftc_ec_footprint(3, 1.0, &out) == FTC_OK);
    CHECK(out == 67);
    CHECK(ftc_ec_footprint(3, 2.0, &out) == FTC_ERR_DOMAIN);

    REQUIRE(ftc_local_rect_location_count(3, 4, &out) == FTC_OK);
    CHECK(out == 514);
    CHECK(ftc_local_rect_location_count(0, 4, &out) == FTC_ERR_DOMAIN);
}

TEST_CASE("catalog export parses as JSON with the expected shape") {
    char* doc = ftc_catalog_json();
    REQUIRE(doc != nullptr);
    const auto j = nlohmann::json::parse(doc);
    ftc_string_free(doc);
    CHECK(j["routines"]["S"]["two_qubit_gates"] == 7);
    CHECK(j["derived"]["local_rect_location_count"] == 514);
    CHECK(j["derived"]["ec_footprint_at_alpha_0.9"] == 87);
    CHECK(j["consistency"]["all_pass"] == true);
}
