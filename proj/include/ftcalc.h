#ifndef FTCALC_H
#define FTCALC_H

/* C interface to the concatenated-[[7,1,3]] threshold calculus.
 *
 * All functions returning ftc_status leave their outputs untouched on
 * failure; ftc_last_error() describes the most recent failure on the
 * calling thread. Rate vectors are caller-allocated arrays of length
 * ftc_model_dim(): 5 for the nonlocal model (one-qubit, two-qubit, wait,
 * measure, prepare), 8 for the local one (one-qubit, two-qubit, short wait,
 * long wait, move-data, wait-data, measure, prepare).
 */

#ifdef __cplusplus
extern "C" {
#endif

#ifndef FTC_API
#if defined(_WIN32)
#define FTC_API __declspec(dllexport)
#else
#define FTC_API __attribute__((visibility("default")))
#endif
#endif

typedef enum ftc_status {
    FTC_OK = 0,
    FTC_ERR_DOMAIN = 1,    /* inputs outside the documented domain */
    FTC_ERR_NUMERICAL = 2, /* a solver failed to converge or certify */
    FTC_ERR_ARGUMENT = 3   /* null pointer or dimension mismatch */
} ftc_status;

FTC_API const char* ftc_last_error(void);
FTC_API const char* ftc_version(void);

/* ---- models ---- */

typedef struct ftc_model ftc_model;

FTC_API ftc_model* ftc_model_create_nonlocal(void);
FTC_API ftc_model* ftc_model_create_local(int r, int tau, double epsilon);
FTC_API void ftc_model_destroy(ftc_model* model);
FTC_API int ftc_model_dim(const ftc_model* model);

/* One concatenation step: out = map(rates). */
FTC_API ftc_status ftc_model_step(const ftc_model* model, const double* rates,
                                  double* out);

/* Ancilla acceptance alpha, zero-syndrome probability beta, and residual
 * accepted-ancilla error rate. */
FTC_API ftc_status ftc_model_stats(const ftc_model* model, const double* rates,
                                   double* alpha, double* beta, double* delta_anc);

/* Standard experiment profile at the given scale: nonlocal
 * (g, g, 0.1g, 2g, g); local gates likewise with movement at
 * epsilon*(r/tau)*g and data waiting at 0.1*(r/tau)*g. */
FTC_API ftc_status ftc_model_standard_rates(const ftc_model* model, double scale,
                                            double* out);

/* ---- flow and thresholds ---- */

typedef struct ftc_flow_options {
    int max_iter;              /* default 200 */
    double convergence_floor;  /* default 1e-12 */
    double divergence_ceiling; /* default 0.3 */
} ftc_flow_options;

FTC_API void ftc_flow_options_default(ftc_flow_options* opts);

enum {
    FTC_FLOW_BELOW = 0,
    FTC_FLOW_ABOVE = 1,
    FTC_FLOW_UNDECIDED = 2
};

FTC_API ftc_status ftc_classify(const ftc_model* model, const double* start,
                                const ftc_flow_options* opts, int* classification,
                                int* iterations_used);

/* Threshold scale along scale*direction + base; undecided probes count as
 * above and set *undecided_seen. opts may be NULL for defaults. */
FTC_API ftc_status ftc_threshold(const ftc_model* model, const double* base,
                                 const double* direction, double lo, double hi,
                                 double rel_tol, const ftc_flow_options* opts,
                                 double* scale, int* undecided_seen);

/* Scale where one application of the map stops decreasing the selected
 * component along the ray. */
FTC_API ftc_status ftc_pseudothreshold(const ftc_model* model, const double* base,
                                       const double* direction, int component,
                                       double lo, double hi, double rel_tol,
                                       double* scale);

/* Damped-Newton fixed point. location and eigenvalue_magnitudes hold
 * ftc_model_dim() entries; magnitudes come out sorted descending. */
FTC_API ftc_status ftc_fixed_point(const ftc_model* model, const double* guess,
                                   double* location, double* residual,
                                   double* eigenvalue_magnitudes,
                                   int* unstable_count);

/* Best EC-insertion period for the local model at separation r: scans
 * integer tau in [tau_lo, tau_hi] (pass tau_hi = 0 for [1, min(r,16)]) and
 * returns the argmax of the threshold, ties toward smaller tau. */
FTC_API ftc_status ftc_optimize_tau(int r, double epsilon, int tau_lo, int tau_hi,
                                    double lo, double hi, double rel_tol,
                                    const ftc_flow_options* opts, int* tau_star,
                                    double* threshold);

/* ---- analytic bound ---- */

FTC_API ftc_status ftc_gamma_crit(int r, int a_lc, int k, double* out);

/* Lower bounds on the sparseness probability for levels 1..n (p_levels
 * holds n entries) together with the certified decay margin delta. Fails
 * with FTC_ERR_DOMAIN when gamma0 >= gamma_crit. */
FTC_API ftc_status ftc_sparse_prob_lower_bound(double gamma0, int r, int a_lc,
                                               int k, int n, double* p_levels,
                                               double* delta);

/* ---- circuit catalog ---- */

FTC_API ftc_status ftc_ec_footprint(int s, double alpha, int* out);
FTC_API ftc_status ftc_local_rect_location_count(int s, int nrep, int* out);

/* Catalog as a JSON document (routine counts, schedule lengths, derived
 * quantities, consistency identities). Free with ftc_string_free. */
FTC_API char* ftc_catalog_json(void);
FTC_API void ftc_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* FTCALC_H */
