#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>
#include <vector>

namespace ftc::flow {

using Vec = std::vector<double>;
using Map = std::function<Vec(const Vec&)>;

enum class Classification { below, above, undecided };

const char* to_string(Classification c);

struct FlowOptions {
    int max_iter = 200;
    double convergence_floor = 1e-12;
    double divergence_ceiling = 0.3;
    bool record_trajectory = false;
};

struct FlowResult {
    Classification classification = Classification::undecided;
    int iterations_used = 0;  // number of points examined, start included
    std::vector<Vec> trajectory;
};

FlowResult iterate_flow(const Map& map, const Vec& start, const FlowOptions& opts = {});

struct Ray {
    Vec base_point;
    Vec direction;

    Vec at(double scale) const;  // scale * direction + base_point
};

struct ThresholdResult {
    double scale = 0.0;
    bool undecided_seen = false;
    // Every probe evaluated, bracket endpoints included, in evaluation order.
    std::vector<std::pair<double, Classification>> probes;
};

ThresholdResult bisect_threshold(const Map& map, const Ray& ray, double lo, double hi,
                                 double rel_tol = 1e-3, const FlowOptions& opts = {});

double pseudothreshold(const Map& map, const Ray& ray, int component, double lo,
                       double hi, double rel_tol = 1e-3);

Eigen::MatrixXd jacobian(const Map& map, const Vec& x);

struct FixedPointReport {
    Vec location;
    double residual = 0.0;
    std::vector<double> eigenvalue_magnitudes;  // sorted descending
    int unstable_count = 0;
};

FixedPointReport find_fixed_point(const Map& map, const Vec& initial_guess);

struct TauScanPoint {
    int tau = 0;
    double threshold = 0.0;
    bool undecided_seen = false;
};

struct TauScanResult {
    int tau_star = 0;
    double threshold = 0.0;
    std::vector<TauScanPoint> scanned;
};

// Evaluates threshold_for_tau on every integer in [tau_lo, tau_hi] and picks
// the argmax, ties broken toward smaller tau.
TauScanResult optimize_tau(const std::function<ThresholdResult(int)>& threshold_for_tau,
                           int tau_lo, int tau_hi);

}  // namespace ftc::flow
