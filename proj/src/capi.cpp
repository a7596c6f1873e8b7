#include "ftcalc.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "analytic.h"
#include "catalog.h"
#include "errors.h"
#include "flow.h"
#include "local_model.h"
#include "model_core.h"
#include "wiring.h"

namespace {

thread_local std::string g_last_error;

template <typename Fn>
ftc_status guarded(Fn&& fn) {
    try {
        fn();
        return FTC_OK;
    } catch (const ftc::domain_error& e) {
        g_last_error = e.what();
        return FTC_ERR_DOMAIN;
    } catch (const ftc::numerical_error& e) {
        g_last_error = e.what();
        return FTC_ERR_NUMERICAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return FTC_ERR_NUMERICAL;
    }
}

ftc_status bad_argument(const char* what) {
    g_last_error = what;
    return FTC_ERR_ARGUMENT;
}

ftc::flow::FlowOptions to_options(const ftc_flow_options* opts) {
    ftc::flow::FlowOptions o;
    if (opts) {
        o.max_iter = opts->max_iter;
        o.convergence_floor = opts->convergence_floor;
        o.divergence_ceiling = opts->divergence_ceiling;
    }
    return o;
}

}  // namespace

struct ftc_model {
    bool is_local = false;
    ftc::local::Geometry geometry;
    ftc::model::Protocol protocol;

    int dim() const { return is_local ? 8 : 5; }

    ftc::flow::Map map() const {
        return is_local ? ftc::wiring::local_map(geometry, protocol)
                        : ftc::wiring::nonlocal_map(protocol);
    }

    ftc::flow::Ray ray() const {
        return is_local ? ftc::wiring::local_ray(geometry)
                        : ftc::wiring::nonlocal_ray();
    }
};

extern "C" {

const char* ftc_last_error(void) { return g_last_error.c_str(); }

const char* ftc_version(void) { return "1.0.0"; }

ftc_model* ftc_model_create_nonlocal(void) {
    auto* m = new (std::nothrow) ftc_model;
    return m;
}

ftc_model* ftc_model_create_local(int r, int tau, double epsilon) {
    if (r < 1 || tau < 1 || tau > r || epsilon < 0.0) {
        g_last_error = "ftc_model_create_local: need 1 <= tau <= r and epsilon >= 0";
        return nullptr;
    }
    auto* m = new (std::nothrow) ftc_model;
    if (m) {
        m->is_local = true;
        m->geometry = {r, tau, epsilon};
    }
    return m;
}

void ftc_model_destroy(ftc_model* model) { delete model; }

int ftc_model_dim(const ftc_model* model) { return model ? model->dim() : 0; }

ftc_status ftc_model_step(const ftc_model* model, const double* rates, double* out) {
    if (!model || !rates || !out) return bad_argument("ftc_model_step: null argument");
    return guarded([&] {
        const ftc::flow::Vec in(rates, rates + model->dim());
        const ftc::flow::Vec res = model->map()(in);
        std::memcpy(out, res.data(), res.size() * sizeof(double));
    });
}

ftc_status ftc_model_stats(const ftc_model* model, const double* rates, double* alpha,
                           double* beta, double* delta_anc) {
    if (!model || !rates || !alpha || !beta || !delta_anc)
        return bad_argument("ftc_model_stats: null argument");
    return guarded([&] {
        ftc::model::AncillaStats st;
        if (model->is_local) {
            ftc::local::Rates g;
            std::memcpy(g.data(), rates, g.size() * sizeof(double));
            st = ftc::local::ancilla_stats(g, model->protocol);
        } else {
            ftc::model::Rates g;
            std::memcpy(g.data(), rates, g.size() * sizeof(double));
            st = ftc::model::ancilla_stats(g, model->protocol);
        }
        *alpha = st.alpha;
        *beta = st.beta;
        *delta_anc = st.delta_anc;
    });
}

ftc_status ftc_model_standard_rates(const ftc_model* model, double scale, double* out) {
    if (!model || !out) return bad_argument("ftc_model_standard_rates: null argument");
    return guarded([&] {
        const ftc::flow::Vec v = model->ray().at(scale);
        std::memcpy(out, v.data(), v.size() * sizeof(double));
    });
}

void ftc_flow_options_default(ftc_flow_options* opts) {
    if (!opts) return;
    const ftc::flow::FlowOptions d;
    opts->max_iter = d.max_iter;
    opts->convergence_floor = d.convergence_floor;
    opts->divergence_ceiling = d.divergence_ceiling;
}

ftc_status ftc_classify(const ftc_model* model, const double* start,
                        const ftc_flow_options* opts, int* classification,
                        int* iterations_used) {
    if (!model || !start || !classification)
        return bad_argument("ftc_classify: null argument");
    return guarded([&] {
        const ftc::flow::Vec v(start, start + model->dim());
        const auto res = ftc::flow::iterate_flow(model->map(), v, to_options(opts));
        switch (res.classification) {
            case ftc::flow::Classification::below: *classification = FTC_FLOW_BELOW; break;
            case ftc::flow::Classification::above: *classification = FTC_FLOW_ABOVE; break;
            case ftc::flow::Classification::undecided:
                *classification = FTC_FLOW_UNDECIDED;
                break;
        }
        if (iterations_used) *iterations_used = res.iterations_used;
    });
}

ftc_status ftc_threshold(const ftc_model* model, const double* base,
                         const double* direction, double lo, double hi, double rel_tol,
                         const ftc_flow_options* opts, double* scale,
                         int* undecided_seen) {
    if (!model || !base || !direction || !scale)
        return bad_argument("ftc_threshold: null argument");
    return guarded([&] {
        const ftc::flow::Ray ray{ftc::flow::Vec(base, base + model->dim()),
                                 ftc::flow::Vec(direction, direction + model->dim())};
        const auto res = ftc::flow::bisect_threshold(model->map(), ray, lo, hi,
                                                     rel_tol, to_options(opts));
        *scale = res.scale;
        if (undecided_seen) *undecided_seen = res.undecided_seen ? 1 : 0;
    });
}

ftc_status ftc_pseudothreshold(const ftc_model* model, const double* base,
                               const double* direction, int component, double lo,
                               double hi, double rel_tol, double* scale) {
    if (!model || !base || !direction || !scale)
        return bad_argument("ftc_pseudothreshold: null argument");
    return guarded([&] {
        const ftc::flow::Ray ray{ftc::flow::Vec(base, base + model->dim()),
                                 ftc::flow::Vec(direction, direction + model->dim())};
        *scale = ftc::flow::pseudothreshold(model->map(), ray, component, lo, hi,
                                            rel_tol);
    });
}

ftc_status ftc_fixed_point(const ftc_model* model, const double* guess,
                           double* location, double* residual,
                           double* eigenvalue_magnitudes, int* unstable_count) {
    if (!model || !guess || !location || !residual)
        return bad_argument("ftc_fixed_point: null argument");
    return guarded([&] {
        const ftc::flow::Vec g(guess, guess + model->dim());
        const auto rep = ftc::flow::find_fixed_point(model->map(), g);
        std::memcpy(location, rep.location.data(),
                    rep.location.size() * sizeof(double));
        *residual = rep.residual;
        if (eigenvalue_magnitudes)
            std::memcpy(eigenvalue_magnitudes, rep.eigenvalue_magnitudes.data(),
                        rep.eigenvalue_magnitudes.size() * sizeof(double));
        if (unstable_count) *unstable_count = rep.unstable_count;
    });
}

ftc_status ftc_optimize_tau(int r, double epsilon, int tau_lo, int tau_hi, double lo,
                            double hi, double rel_tol, const ftc_flow_options* opts,
                            int* tau_star, double* threshold) {
    if (!tau_star || !threshold) return bad_argument("ftc_optimize_tau: null argument");
    return guarded([&] {
        const auto res = ftc::wiring::optimize_tau_local(r, epsilon, tau_lo, tau_hi,
                                                         lo, hi, rel_tol,
                                                         to_options(opts), {});
        *tau_star = res.tau_star;
        *threshold = res.threshold;
    });
}

ftc_status ftc_gamma_crit(int r, int a_lc, int k, double* out) {
    if (!out) return bad_argument("ftc_gamma_crit: null argument");
    return guarded([&] { *out = ftc::analytic::gamma_crit(r, a_lc, k); });
}

ftc_status ftc_sparse_prob_lower_bound(double gamma0, int r, int a_lc, int k, int n,
                                       double* p_levels, double* delta) {
    if (!p_levels || !delta)
        return bad_argument("ftc_sparse_prob_lower_bound: null argument");
    return guarded([&] {
        const auto rep = ftc::analytic::sparse_prob_lower_bound(gamma0, r, a_lc, k, n);
        std::memcpy(p_levels, rep.p_levels.data(), rep.p_levels.size() * sizeof(double));
        *delta = rep.delta;
    });
}

ftc_status ftc_ec_footprint(int s, double alpha, int* out) {
    if (!out) return bad_argument("ftc_ec_footprint: null argument");
    return guarded([&] { *out = ftc::catalog::ec_footprint(s, alpha); });
}

ftc_status ftc_local_rect_location_count(int s, int nrep, int* out) {
    if (!out) return bad_argument("ftc_local_rect_location_count: null argument");
    return guarded([&] { *out = ftc::catalog::local_rect_location_count(s, nrep); });
}

char* ftc_catalog_json(void) {
    try {
        const std::string j = ftc::catalog::to_json();
        char* s = static_cast<char*>(std::malloc(j.size() + 1));
        if (s) std::memcpy(s, j.c_str(), j.size() + 1);
        return s;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return nullptr;
    }
}

void ftc_string_free(char* s) { std::free(s); }

}  // extern "C"
