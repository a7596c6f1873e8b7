#pragma once

#include "flow.h"
#include "local_model.h"
#include "model_core.h"

namespace ftc::wiring {

// Standard rate profile for the nonlocal machine: gamma_1 = gamma_2 =
// gamma_p = gamma_else, measurements at 2x, waits scaled down by w_factor.
flow::Ray nonlocal_ray(double w_factor = 0.1);
model::Rates nonlocal_start(double gamma_else, double w_factor = 0.1);

// Standard rate profile for the movement-constrained machine: gates, plus
// movement at epsilon*(r/tau) and data waiting at 0.1*(r/tau) relative to
// gamma_2.
flow::Ray local_ray(const local::Geometry& geo);
local::Rates local_start(double gamma_2, const local::Geometry& geo);

flow::Map nonlocal_map(const model::Protocol& proto = {});
flow::Map local_map(const local::Geometry& geo, const model::Protocol& proto = {},
                    bool reduce_moves = false);

flow::ThresholdResult local_threshold(const local::Geometry& geo, double lo, double hi,
                                      double rel_tol = 1e-3,
                                      const flow::FlowOptions& opts = {},
                                      const model::Protocol& proto = {});

// Scans tau over [tau_lo, tau_hi]; pass tau_hi = 0 for the default range
// [1, min(r, 16)].
flow::TauScanResult optimize_tau_local(int r, double epsilon, int tau_lo, int tau_hi,
                                       double lo, double hi, double rel_tol = 1e-3,
                                       const flow::FlowOptions& opts = {},
                                       const model::Protocol& proto = {});

}  // namespace ftc::wiring
