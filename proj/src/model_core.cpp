#include "model_core.h"

#include <algorithm>
#include <cmath>

#include "catalog.h"
#include "errors.h"

namespace ftc::model {

using prob::clamp01;
using prob::ratio_clamped;
using prob::Source;
using prob::SourceTable;

namespace {

void check_rates(const Rates& g, const char* fn) {
    for (double x : g)
        if (!(x >= 0.0 && x <= 1.0))
            throw domain_error(std::string(fn) + ": rate outside [0,1]");
}

double routine_pass(const catalog::RoutineCounts& c, const Rates& g, double strength) {
    return std::pow(1.0 - strength * g[r_g1], c.g1) *
           std::pow(1.0 - strength * g[r_g2], c.g2) *
           std::pow(1.0 - strength * g[r_gw], c.waits()) *
           std::pow(1.0 - strength * g[r_g1m], c.m1) *
           std::pow(1.0 - strength * g[r_gp], c.p);
}

double solve_beta(double a, double q1, double w, int s) {
    double beta = 1.0;
    for (int it = 0; it < 1000; ++it) {
        double nb = a * (beta * q1 * w + (1.0 - beta) * std::pow(q1, s));
        if (std::abs(nb - beta) < 1e-12) return nb;
        beta = nb;
    }
    throw numerical_error("beta_zero_syndrome: no convergence after 1000 iterations");
}

}  // namespace

AncillaStats ancilla_stats(const Rates& g, const Protocol& proto) {
    check_rates(g, "ancilla_stats");
    const auto cg = catalog::counts(catalog::Routine::G);
    const double g_full = routine_pass(cg, g, 1.0);
    const double g_23 = routine_pass(cg, g, 2.0 / 3.0);

    AncillaStats st;
    st.p_no_z = std::pow(1.0 - g[r_gp], early_prep) * std::pow(1.0 - g[r_g1], 4) *
                std::pow(1.0 - 2.0 * g[r_g1m] / 3.0, verify_measure) * g_full *
                std::pow(1.0 - 2.0 * g[r_gw] / 3.0, zanc_wait_23) *
                std::pow(1.0 - g[r_gw], zanc_wait_full) *
                std::pow(1.0 - g[r_g2], late_two_qubit);
    st.p_no_x = std::pow(1.0 - 2.0 * g[r_gp] / 3.0, early_prep) *
                std::pow(1.0 - 2.0 * g[r_g1] / 3.0, 4) *
                std::pow(1.0 - 2.0 * g[r_g1m] / 3.0, verify_measure) * g_23 *
                std::pow(1.0 - 2.0 * g[r_gw] / 3.0, xanc_wait_23) *
                std::pow(1.0 - g[r_g2], late_two_qubit);

    const auto cv = catalog::counts(catalog::Routine::V);
    const catalog::RoutineCounts gv{cg.g1 + cv.g1, cg.g2 + cv.g2, cg.w1 + cv.w1,
                                    cg.w2 + cv.w2, cg.m1 + cv.m1, cg.p + cv.p};
    st.p_no_xz = routine_pass(gv, g, 1.0);

    const double raw = st.p_no_x + st.p_no_z - st.p_no_xz;
    if (raw < -1e-9 || raw > 1.0 + 1e-9)
        throw domain_error("ancilla_stats: acceptance probability left [0,1]");
    st.alpha = clamp01(raw);
    st.delta_anc = 1.0 - ratio_clamped(st.p_no_x, st.alpha);

    const double gmax = *std::max_element(g.begin(), g.end());
    const double a = ratio_clamped(st.p_no_z, st.alpha) *
                     std::pow(1.0 - 2.0 * g[r_g2] / 3.0, syndrome_two_qubit) *
                     std::pow(1.0 - 2.0 * g[r_g1m] / 3.0, syndrome_measure) *
                     std::pow(1.0 - 2.0 * gmax / 3.0, 7);
    const double q1 = std::pow(1.0 - 2.0 * g[r_g2] / 3.0, syndrome_two_qubit) *
                      ratio_clamped(st.p_no_x, st.alpha);
    const double w = std::pow(1.0 - 2.0 * g[r_gw] / 3.0, 21 * (proto.s - 1));
    st.beta = solve_beta(a, q1, w, proto.s);
    return st;
}

SourceTable source_table(LocType l, int sx, int sz, const Rates& g,
                         double delta_anc, const Protocol& proto, bool include_gate) {
    const int s = proto.s;
    if (sx < 1 || sx > s || sz < 1 || sz > s)
        throw domain_error("source_table: syndrome counts must lie in [1,s]");
    const int dzs = sz == s ? 1 : 0;
    const int dxs = sx == s ? 1 : 0;
    const int dz1 = sz == 1 ? 1 : 0;
    const int dx1 = sx == 1 ? 1 : 0;

    SourceTable t;
    t.push(Source::single(delta_anc, sx + sz));
    t.push(Source::single(g[r_g2], syndrome_two_qubit * (sx + sz)));
    t.push(Source::single(g[r_gw], syndrome_short_wait * (sx + sz)));
    t.push(Source::single(g[r_gw], recovery_wait * (dzs + dxs)));
    t.push(Source::single(g[r_g1] + proto.gamma_ws, dzs + dxs));
    t.push(Source::single(g[r_gw], 21 * (s - 1) * (dz1 + dx1)));
    t.push(Source::single(g[r_gw], 21 * s * (s - 1) * (dzs + dxs) / 2));
    if (include_gate) {
        double gl = 0.0;
        switch (l) {
            case LocType::one: gl = g[r_g1]; break;
            case LocType::two: gl = g[r_g2]; break;
            case LocType::wait: gl = g[r_gw]; break;
            case LocType::measure: gl = g[r_g1m]; break;
            case LocType::prep: gl = g[r_gp]; break;
        }
        t.push(Source::single(gl, 7));
    }
    return t;
}

double gamma_single(LocType l, const Rates& g, const AncillaStats& st,
                    const Protocol& proto) {
    const int s = proto.s;
    const double f11 =
        prob::rect_failure(source_table(l, 1, 1, g, st.delta_anc, proto));
    const double fs1 =
        prob::rect_failure(source_table(l, s, 1, g, st.delta_anc, proto));
    const double fss =
        prob::rect_failure(source_table(l, s, s, g, st.delta_anc, proto));
    const double b = st.beta;
    return clamp01(b * b * f11 + 2.0 * b * (1.0 - b) * fs1 +
                   (1.0 - b) * (1.0 - b) * fss);
}

double gamma_two(const Rates& g, const AncillaStats& st, const Protocol& proto) {
    const int s = proto.s;
    const double g2 = g[r_g2];
    const std::array<std::pair<int, int>, 4> cfgs{{{1, 1}, {s, 1}, {1, s}, {s, s}}};

    // Per-config no-fault probability of each non-gate source, and the
    // rectangle failure over non-gate sources alone.
    std::array<std::array<double, 8>, 4> no_fault{};
    std::array<double, 4> f_non_gate{};
    int nsrc = 0;
    for (std::size_t c = 0; c < cfgs.size(); ++c) {
        const auto t = source_table(LocType::one, cfgs[c].first, cfgs[c].second, g,
                                    st.delta_anc, proto, false);
        nsrc = t.n;
        for (int i = 0; i < t.n; ++i)
            no_fault[c][static_cast<std::size_t>(i)] =
                1.0 - prob::source_p_one_plus(t.rows[static_cast<std::size_t>(i)]);
        f_non_gate[c] = prob::rect_failure(t);
    }

    const double b = st.beta;
    double total = 0.0;
    for (std::size_t c1 = 0; c1 < cfgs.size(); ++c1) {
        for (std::size_t c2 = 0; c2 < cfgs.size(); ++c2) {
            const int m = (cfgs[c1].first == 1) + (cfgs[c1].second == 1) +
                          (cfgs[c2].first == 1) + (cfgs[c2].second == 1);
            const double w = std::pow(b, m) * std::pow(1.0 - b, 4 - m);
            double sum_p1 = 0.0;
            for (int i = 0; i < nsrc; ++i)
                sum_p1 += 1.0 - no_fault[c1][static_cast<std::size_t>(i)] *
                                    no_fault[c2][static_cast<std::size_t>(i)];
            const double f = prob::p_two_plus(g2, 7) +
                             7.0 * g2 * std::pow(1.0 - g2, 6) * sum_p1 +
                             std::pow(1.0 - g2, 7) * (f_non_gate[c1] + f_non_gate[c2]);
            total += w * clamp01(f);
        }
    }
    return clamp01(total);
}

Rates step(const Rates& g, const Protocol& proto) {
    const auto st = ancilla_stats(g, proto);
    const double o1 = gamma_single(LocType::one, g, st, proto);
    const double o2 = gamma_two(g, st, proto);
    const double ow = gamma_single(LocType::wait, g, st, proto);
    const double o1m = gamma_single(LocType::measure, g, st, proto);
    // Preparations renormalize exactly like one-qubit gates.
    return {o1, o2, ow, o1m, o1};
}

}  // namespace ftc::model
