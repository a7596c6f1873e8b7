#include "local_model.h"

#include <algorithm>
#include <cmath>

#include "catalog.h"
#include "errors.h"

namespace ftc::local {

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

void check_geometry(const Geometry& geo, const char* fn) {
    if (geo.r < 1 || geo.tau < 1)
        throw domain_error(std::string(fn) + ": separation and tau must be >= 1");
    if (geo.tau > geo.r)
        throw domain_error(std::string(fn) + ": tau cannot exceed the separation");
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

std::vector<Replacement> replacement(LocType composite, const Geometry& geo) {
    check_geometry(geo, "replacement");
    switch (composite) {
        case LocType::two:
            return {{LocType::move_data, 2 * geo.tau},
                    {LocType::wait_data, 2 * geo.tau},
                    {LocType::two, 1}};
        case LocType::wait_long:
            return {{LocType::wait_data, 2 * geo.tau}, {LocType::wait_long, 1}};
        case LocType::move_data:
            return {{LocType::move_data, geo.r}};
        case LocType::wait_data:
            return {{LocType::wait_data, geo.r}};
        default:
            return {{composite, 1}};
    }
}

AncillaStats ancilla_stats(const Rates& g, const Protocol& proto) {
    check_rates(g, "ancilla_stats");
    const auto cg = catalog::counts(catalog::Routine::G);
    const double g_full = std::pow(1.0 - g[r_g1], cg.g1) *
                          std::pow(1.0 - g[r_g2], cg.g2) *
                          std::pow(1.0 - g[r_gw1], cg.w1) *
                          std::pow(1.0 - g[r_gw2], cg.w2) *
                          std::pow(1.0 - g[r_gp], cg.p);
    const double g_23 = std::pow(1.0 - 2.0 * g[r_g1] / 3.0, cg.g1) *
                        std::pow(1.0 - 2.0 * g[r_g2] / 3.0, cg.g2) *
                        std::pow(1.0 - 2.0 * g[r_gw1] / 3.0, cg.w1) *
                        std::pow(1.0 - 2.0 * g[r_gw2] / 3.0, cg.w2) *
                        std::pow(1.0 - 2.0 * g[r_gp] / 3.0, cg.p);

    AncillaStats st;
    st.p_no_z = std::pow(1.0 - g[r_gp], model::early_prep) *
                std::pow(1.0 - g[r_g1], 4) *
                std::pow(1.0 - 2.0 * g[r_g1m] / 3.0, model::verify_measure) * g_full *
                std::pow(1.0 - 2.0 * g[r_gw2] / 3.0, zanc_w2_23) *
                std::pow(1.0 - 2.0 * g[r_gw1] / 3.0, zanc_w1_23) *
                std::pow(1.0 - g[r_gw2], zanc_w2_full) *
                std::pow(1.0 - g[r_g2], model::late_two_qubit);
    st.p_no_x = std::pow(1.0 - 2.0 * g[r_gp] / 3.0, model::early_prep) *
                std::pow(1.0 - 2.0 * g[r_g1] / 3.0, 4) *
                std::pow(1.0 - 2.0 * g[r_g1m] / 3.0, model::verify_measure) * g_23 *
                std::pow(1.0 - 2.0 * g[r_gw2] / 3.0, xanc_w2_23) *
                std::pow(1.0 - 2.0 * g[r_gw1] / 3.0, xanc_w1_23) *
                std::pow(1.0 - g[r_g2], model::late_two_qubit);

    const auto cv = catalog::counts(catalog::Routine::V);
    st.p_no_xz = std::pow(1.0 - g[r_g1], cg.g1 + cv.g1) *
                 std::pow(1.0 - g[r_g2], cg.g2 + cv.g2) *
                 std::pow(1.0 - g[r_gw1], cg.w1 + cv.w1) *
                 std::pow(1.0 - g[r_gw2], cg.w2 + cv.w2) *
                 std::pow(1.0 - g[r_g1m], cg.m1 + cv.m1) *
                 std::pow(1.0 - g[r_gp], cg.p + cv.p);

    const double raw = st.p_no_x + st.p_no_z - st.p_no_xz;
    if (raw < -1e-9 || raw > 1.0 + 1e-9)
        throw domain_error("ancilla_stats: acceptance probability left [0,1]");
    st.alpha = clamp01(raw);
    st.delta_anc = 1.0 - ratio_clamped(st.p_no_x, st.alpha);

    const double gmax = *std::max_element(g.begin(), g.end());
    const double a = ratio_clamped(st.p_no_z, st.alpha) *
                     std::pow(1.0 - 2.0 * g[r_g2] / 3.0, model::syndrome_two_qubit) *
                     std::pow(1.0 - 2.0 * g[r_g1m] / 3.0, model::syndrome_measure) *
                     std::pow(1.0 - 2.0 * gmax / 3.0, 7);
    const double q1 = std::pow(1.0 - 2.0 * g[r_g2] / 3.0, model::syndrome_two_qubit) *
                      ratio_clamped(st.p_no_x, st.alpha);
    const double w = std::pow(1.0 - 2.0 * g[r_gw1] / 3.0, 14 * (proto.s - 1)) *
                     std::pow(1.0 - 2.0 * g[r_gw2] / 3.0, 7 * (proto.s - 1));
    st.beta = solve_beta(a, q1, w, proto.s);
    return st;
}

SourceTable source_table(LocType j, int sx, int sz, const Rates& g,
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
    t.push(Source::single(g[r_g2], model::syndrome_two_qubit * (sx + sz)));
    t.push(Source::single(g[r_gw1], model::syndrome_short_wait * (sx + sz)));
    t.push(Source::single(g[r_gw1], model::recovery_wait * (dzs + dxs)));
    t.push(Source::single(g[r_g1] + proto.gamma_ws, dzs + dxs));
    t.push(Source::pair(g[r_gw1], 14 * (s - 1) * (dz1 + dx1),
                        g[r_gw2], 7 * (s - 1) * (dz1 + dx1)));
    t.push(Source::pair(g[r_gw1], 14 * s * (s - 1) * (dzs + dxs) / 2,
                        g[r_gw2], 7 * s * (s - 1) * (dzs + dxs) / 2));
    if (include_gate) {
        double gj = 0.0;
        switch (j) {
            case LocType::one: gj = g[r_g1]; break;
            case LocType::two: gj = g[r_g2]; break;
            case LocType::wait_short: gj = g[r_gw1]; break;
            case LocType::wait_long: gj = g[r_gw2]; break;
            case LocType::move_data: gj = g[r_gmd]; break;
            case LocType::wait_data: gj = g[r_gwd]; break;
            case LocType::measure: gj = g[r_g1m]; break;
            case LocType::prep: gj = g[r_gp]; break;
        }
        t.push(Source::single(gj, 7));
    }
    return t;
}

namespace {

double gamma_elem_single(LocType j, const Rates& g, const AncillaStats& st,
                         const Protocol& proto) {
    const int s = proto.s;
    const double f11 = prob::rect_failure(source_table(j, 1, 1, g, st.delta_anc, proto));
    const double fs1 = prob::rect_failure(source_table(j, s, 1, g, st.delta_anc, proto));
    const double fss = prob::rect_failure(source_table(j, s, s, g, st.delta_anc, proto));
    const double b = st.beta;
    return clamp01(b * b * f11 + 2.0 * b * (1.0 - b) * fs1 +
                   (1.0 - b) * (1.0 - b) * fss);
}

double gamma_elem_two(const Rates& g, const AncillaStats& st, const Protocol& proto) {
    const int s = proto.s;
    const double g2 = g[r_g2];
    const std::array<std::pair<int, int>, 4> cfgs{{{1, 1}, {s, 1}, {1, s}, {s, s}}};

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

}  // namespace

double gamma_elementary(LocType j, const Rates& g, const AncillaStats& st,
                        const Protocol& proto) {
    if (j == LocType::two) return gamma_elem_two(g, st, proto);
    return gamma_elem_single(j, g, st, proto);
}

Rates step(const Rates& g, const Geometry& geo, const Protocol& proto,
           bool reduce_moves) {
    check_geometry(geo, "step");
    const auto st = ancilla_stats(g, proto);

    const double e1 = gamma_elementary(LocType::one, g, st, proto);
    const double e2 = gamma_elementary(LocType::two, g, st, proto);
    const double ew1 = gamma_elementary(LocType::wait_short, g, st, proto);
    const double ew2 = gamma_elementary(LocType::wait_long, g, st, proto);
    double emd = gamma_elementary(LocType::move_data, g, st, proto);
    double ewd = gamma_elementary(LocType::wait_data, g, st, proto);
    const double e1m = gamma_elementary(LocType::measure, g, st, proto);
    const double ep = e1;  // preparations renormalize like one-qubit gates
    if (reduce_moves) {
        emd = 0.0;
        ewd = 0.0;
    }

    const int t2 = 2 * geo.tau;
    Rates out{};
    out[r_g1] = e1;
    out[r_g2] = clamp01(1.0 - std::pow(1.0 - emd, t2) * std::pow(1.0 - ewd, t2) *
                                  (1.0 - e2));
    out[r_gw1] = ew1;
    out[r_gw2] = clamp01(1.0 - std::pow(1.0 - ewd, t2) * (1.0 - ew2));
    out[r_gmd] = clamp01(1.0 - std::pow(1.0 - emd, geo.r));
    out[r_gwd] = clamp01(1.0 - std::pow(1.0 - ewd, geo.r));
    out[r_g1m] = e1m;
    out[r_gp] = ep;
    return out;
}

}  // namespace ftc::local
