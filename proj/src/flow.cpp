#include "flow.h"

#include <algorithm>
#include <cmath>

#include "errors.h"

namespace ftc::flow {

namespace {

double max_abs(const Vec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

Vec apply_map(const Map& map, const Vec& x) {
    Vec y = map(x);
    if (y.size() != x.size())
        throw numerical_error("flow: map changed the vector dimension");
    return y;
}

}  // namespace

const char* to_string(Classification c) {
    switch (c) {
        case Classification::below: return "below";
        case Classification::above: return "above";
        case Classification::undecided: return "undecided";
    }
    return "?";
}

FlowResult iterate_flow(const Map& map, const Vec& start, const FlowOptions& opts) {
    if (opts.max_iter < 1) throw domain_error("iterate_flow: max_iter must be >= 1");
    FlowResult res;
    Vec g = start;
    for (int i = 1; i <= opts.max_iter; ++i) {
        if (opts.record_trajectory) res.trajectory.push_back(g);
        const double m = *std::max_element(g.begin(), g.end());
        res.iterations_used = i;
        if (m < opts.convergence_floor) {
            res.classification = Classification::below;
            return res;
        }
        if (m > opts.divergence_ceiling) {
            res.classification = Classification::above;
            return res;
        }
        g = apply_map(map, g);
    }
    res.classification = Classification::undecided;
    res.iterations_used = opts.max_iter;
    return res;
}

Vec Ray::at(double scale) const {
    if (base_point.size() != direction.size())
        throw domain_error("Ray: base point and direction dimensions differ");
    Vec v(base_point.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = scale * direction[i] + base_point[i];
        if (!(v[i] >= 0.0 && v[i] <= 1.0))
            throw domain_error("Ray: point leaves the unit cube");
    }
    return v;
}

ThresholdResult bisect_threshold(const Map& map, const Ray& ray, double lo, double hi,
                                 double rel_tol, const FlowOptions& opts) {
    if (!(lo > 0.0 && hi > lo))
        throw domain_error("bisect_threshold: need 0 < lo < hi");
    if (!(rel_tol > 0.0)) throw domain_error("bisect_threshold: rel_tol must be > 0");
    if (max_abs(ray.direction) == 0.0)
        throw domain_error("bisect_threshold: ray direction is zero");

    ThresholdResult res;
    auto probe = [&](double scale) {
        Classification c = iterate_flow(map, ray.at(scale), opts).classification;
        if (c == Classification::undecided) {
            res.undecided_seen = true;
            c = Classification::above;  // conservative
        }
        res.probes.emplace_back(scale, c);
        return c;
    };

    if (probe(lo) != Classification::below)
        throw domain_error("bisect_threshold: lower bracket does not classify below");
    if (probe(hi) != Classification::above)
        throw domain_error("bisect_threshold: upper bracket does not classify above");

    while (hi - lo > rel_tol * lo) {
        const double mid = 0.5 * (lo + hi);
        if (probe(mid) == Classification::below)
            lo = mid;
        else
            hi = mid;
    }
    res.scale = 0.5 * (lo + hi);
    return res;
}

double pseudothreshold(const Map& map, const Ray& ray, int component, double lo,
                       double hi, double rel_tol) {
    if (!(lo > 0.0 && hi > lo))
        throw domain_error("pseudothreshold: need 0 < lo < hi");
    if (component < 0 || static_cast<std::size_t>(component) >= ray.direction.size())
        throw domain_error("pseudothreshold: component out of range");

    auto f = [&](double scale) {
        const Vec x = ray.at(scale);
        return apply_map(map, x)[static_cast<std::size_t>(component)] -
               x[static_cast<std::size_t>(component)];
    };
    if (!(f(lo) < 0.0 && f(hi) > 0.0))
        throw domain_error("pseudothreshold: no sign change in bracket");
    while (hi - lo > rel_tol * lo) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

Eigen::MatrixXd jacobian(const Map& map, const Vec& x) {
    const auto n = static_cast<Eigen::Index>(x.size());
    const Vec f0 = apply_map(map, x);
    Eigen::MatrixXd jac(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto ks = static_cast<std::size_t>(k);
        const double h = std::max(1e-4 * std::abs(x[ks]), 1e-10);
        Vec xp = x;
        xp[ks] += h;
        const Vec fp = apply_map(map, xp);
        for (Eigen::Index i = 0; i < n; ++i)
            jac(i, k) = (fp[static_cast<std::size_t>(i)] -
                         f0[static_cast<std::size_t>(i)]) / h;
    }
    return jac;
}

FixedPointReport find_fixed_point(const Map& map, const Vec& initial_guess) {
    for (double x : initial_guess)
        if (!(x > 0.0 && x < 1.0))
            throw domain_error("find_fixed_point: guess must lie in the open unit cube");

    const auto n = static_cast<Eigen::Index>(initial_guess.size());
    Vec x = initial_guess;

    auto residual_of = [&](const Vec& p) {
        const Vec fp = apply_map(map, p);
        double r = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i)
            r = std::max(r, std::abs(fp[i] - p[i]));
        return r;
    };

    double res = residual_of(x);
    for (int it = 0; it < 100 && res >= 1e-12; ++it) {
        const Vec fx = apply_map(map, x);
        Eigen::VectorXd f(n);
        for (Eigen::Index i = 0; i < n; ++i)
            f(i) = fx[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i)];
        Eigen::MatrixXd jac = jacobian(map, x);
        jac -= Eigen::MatrixXd::Identity(n, n);
        const Eigen::VectorXd dx = jac.fullPivLu().solve(-f);

        // Backtrack until the residual actually drops.
        double lambda = 1.0;
        Vec best = x;
        double best_res = res;
        for (int half = 0; half < 30; ++half) {
            Vec trial = x;
            for (Eigen::Index i = 0; i < n; ++i) {
                const auto is = static_cast<std::size_t>(i);
                trial[is] = std::clamp(trial[is] + lambda * dx(i), 0.0, 1.0);
            }
            const double tr = residual_of(trial);
            if (tr < best_res) {
                best = trial;
                best_res = tr;
                break;
            }
            lambda *= 0.5;
        }
        if (best_res >= res && res >= 1e-12)
            throw numerical_error("find_fixed_point: Newton step made no progress");
        x = best;
        res = best_res;
    }
    if (res >= 1e-12)
        throw numerical_error("find_fixed_point: no convergence after 100 Newton steps");

    FixedPointReport rep;
    rep.location = x;
    rep.residual = res;
    const Eigen::MatrixXd jac = jacobian(map, x);
    const Eigen::VectorXcd ev = Eigen::EigenSolver<Eigen::MatrixXd>(jac, false).eigenvalues();
    rep.eigenvalue_magnitudes.resize(static_cast<std::size_t>(ev.size()));
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        rep.eigenvalue_magnitudes[static_cast<std::size_t>(i)] = std::abs(ev(i));
    std::sort(rep.eigenvalue_magnitudes.rbegin(), rep.eigenvalue_magnitudes.rend());
    rep.unstable_count = static_cast<int>(std::count_if(
        rep.eigenvalue_magnitudes.begin(), rep.eigenvalue_magnitudes.end(),
        [](double m) { return m > 1.0; }));
    return rep;
}

TauScanResult optimize_tau(const std::function<ThresholdResult(int)>& threshold_for_tau,
                           int tau_lo, int tau_hi) {
    if (tau_lo < 1 || tau_hi < tau_lo)
        throw domain_error("optimize_tau: empty or invalid tau range");
    TauScanResult res;
    for (int tau = tau_lo; tau <= tau_hi; ++tau) {
        const ThresholdResult t = threshold_for_tau(tau);
        res.scanned.push_back({tau, t.scale, t.undecided_seen});
        if (res.scanned.size() == 1 || t.scale > res.threshold) {
            res.tau_star = tau;
            res.threshold = t.scale;
        }
    }
    return res;
}

}  // namespace ftc::flow
