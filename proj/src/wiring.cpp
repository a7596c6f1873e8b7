#include "wiring.h"

#include <algorithm>

#include "errors.h"

namespace ftc::wiring {

flow::Ray nonlocal_ray(double w_factor) {
    if (w_factor < 0.0) throw domain_error("nonlocal_ray: negative wait factor");
    return {flow::Vec(5, 0.0), {1.0, 1.0, w_factor, 2.0, 1.0}};
}

model::Rates nonlocal_start(double gamma_else, double w_factor) {
    const flow::Vec v = nonlocal_ray(w_factor).at(gamma_else);
    return {v[0], v[1], v[2], v[3], v[4]};
}

flow::Ray local_ray(const local::Geometry& geo) {
    if (geo.epsilon < 0.0) throw domain_error("local_ray: negative epsilon");
    const double hops = static_cast<double>(geo.r) / static_cast<double>(geo.tau);
    return {flow::Vec(8, 0.0),
            {1.0, 1.0, 0.1, 0.1, geo.epsilon * hops, 0.1 * hops, 2.0, 1.0}};
}

local::Rates local_start(double gamma_2, const local::Geometry& geo) {
    const flow::Vec v = local_ray(geo).at(gamma_2);
    local::Rates g;
    std::copy(v.begin(), v.end(), g.begin());
    return g;
}

flow::Map nonlocal_map(const model::Protocol& proto) {
    return [proto](const flow::Vec& x) {
        if (x.size() != 5)
            throw domain_error("nonlocal map: expected a 5-component rate vector");
        const model::Rates in{x[0], x[1], x[2], x[3], x[4]};
        const model::Rates out = model::step(in, proto);
        return flow::Vec(out.begin(), out.end());
    };
}

flow::Map local_map(const local::Geometry& geo, const model::Protocol& proto,
                    bool reduce_moves) {
    return [geo, proto, reduce_moves](const flow::Vec& x) {
        if (x.size() != 8)
            throw domain_error("local map: expected an 8-component rate vector");
        local::Rates in;
        std::copy(x.begin(), x.end(), in.begin());
        const local::Rates out = local::step(in, geo, proto, reduce_moves);
        return flow::Vec(out.begin(), out.end());
    };
}

flow::ThresholdResult local_threshold(const local::Geometry& geo, double lo, double hi,
                                      double rel_tol, const flow::FlowOptions& opts,
                                      const model::Protocol& proto) {
    return flow::bisect_threshold(local_map(geo, proto), local_ray(geo), lo, hi,
                                  rel_tol, opts);
}

flow::TauScanResult optimize_tau_local(int r, double epsilon, int tau_lo, int tau_hi,
                                       double lo, double hi, double rel_tol,
                                       const flow::FlowOptions& opts,
                                       const model::Protocol& proto) {
    if (tau_lo < 1) throw domain_error("optimize_tau_local: tau_lo must be at least 1");
    if (tau_hi == 0) {
        tau_lo = 1;
        tau_hi = std::min(r, 16);
    }
    return flow::optimize_tau(
        [&](int tau) {
            const local::Geometry geo{r, tau, epsilon};
            return local_threshold(geo, lo, hi, rel_tol, opts, proto);
        },
        tau_lo, tau_hi);
}

}  // namespace ftc::wiring
