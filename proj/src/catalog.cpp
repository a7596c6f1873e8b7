#include "catalog.h"

#include <cmath>

#include "errors.h"
#include "json.hpp"
#include "local_model.h"
#include "model_core.h"

namespace ftc::catalog {

RoutineCounts counts(Routine r) {
    switch (r) {
        case Routine::S: return {0, 7, 14, 0, 7, 0};
        case Routine::G: return {3, 9, 4, 3, 0, 7};
        case Routine::V: return {4, 13, 14, 18, 4, 4};
        case Routine::R: return {1, 0, 6, 0, 0, 0};
    }
    throw domain_error("counts: unknown routine");
}

int time_steps(Routine r) {
    switch (r) {
        case Routine::S: return 3;
        case Routine::G: return 5;
        case Routine::V: return 6;
        case Routine::R: return 1;
    }
    throw domain_error("time_steps: unknown routine");
}

const char* routine_name(Routine r) {
    switch (r) {
        case Routine::S: return "S";
        case Routine::G: return "G";
        case Routine::V: return "V";
        case Routine::R: return "R";
    }
    throw domain_error("routine_name: unknown routine");
}

int n_rep(int s, double alpha) {
    if (s < 1) throw domain_error("n_rep: need at least one syndrome round");
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw domain_error("n_rep: acceptance rate must lie in (0,1]");
    return static_cast<int>(std::ceil(static_cast<double>(s) / alpha));
}

int ec_footprint(int s, double alpha) {
    // 7 data qubits plus X- and Z-type ancilla factories; each factory keeps
    // n_rep prepared 7-qubit blocks with 3 verification qubits attached.
    return 7 + 2 * n_rep(s, alpha) * 10;
}

int local_rect_location_count(int s, int nrep) {
    if (s < 1 || nrep < 1) throw domain_error("local_rect_location_count: bad protocol");
    const int gv = counts(Routine::G).total() + counts(Routine::V).total();
    const int syn = counts(Routine::S).total();
    const int rec = counts(Routine::R).total();
    return nrep * gv + 2 * s * syn + rec + 7;
}

ConsistencyReport validate_against_sources() {
    ConsistencyReport rep;
    const auto s = counts(Routine::S);
    const auto g = counts(Routine::G);
    const auto v = counts(Routine::V);
    const auto r = counts(Routine::R);

    auto check = [&rep](const char* name, bool ok) {
        rep.items.push_back({name, ok});
    };

    check("syndrome two-qubit multiplicity feeds the 7(sx+sz) source row",
          s.g2 == model::syndrome_two_qubit);
    check("syndrome short-wait multiplicity feeds the 14(sx+sz) source row",
          s.w1 == model::syndrome_short_wait);
    check("syndrome measurements match the beta-chain exponent",
          s.m1 == model::syndrome_measure);
    check("recovery waits feed the 6-per-syndrome source row",
          r.w1 == model::recovery_wait);
    check("recovery gate feeds the single-location source row", r.g1 == 1);
    check("verification two-qubit gates match the late CNOT exponent",
          v.g2 == model::late_two_qubit);
    check("verification measurements match the pass-probability exponent",
          v.m1 == model::verify_measure);
    check("preparation exponents match G and V preparation counts",
          g.p == model::ancilla_prep && v.p == model::early_prep);
    check("Z-ancilla wait exponents partition the verification waits",
          model::zanc_wait_23 + model::zanc_wait_full == v.waits());
    check("X-ancilla wait exponent covers the verification waits",
          model::xanc_wait_23 == v.waits());
    check("movement split of short waits preserves the G+V total",
          local::zanc_w1_23 + g.w1 == g.w1 + v.w1 &&
              local::xanc_w1_23 + g.w1 == g.w1 + v.w1);
    check("movement split of long waits preserves the G+V total",
          local::zanc_w2_23 + local::zanc_w2_full + g.w2 == g.w2 + v.w2 &&
              local::xanc_w2_23 + g.w2 == g.w2 + v.w2);

    rep.all_pass = true;
    for (const auto& item : rep.items) rep.all_pass = rep.all_pass && item.pass;
    return rep;
}

std::string to_json() {
    nlohmann::json j;
    for (Routine r : {Routine::S, Routine::G, Routine::V, Routine::R}) {
        const auto c = counts(r);
        nlohmann::json rc;
        rc["one_qubit_gates"] = c.g1;
        rc["two_qubit_gates"] = c.g2;
        rc["short_waits"] = c.w1;
        rc["long_waits"] = c.w2;
        rc["measurements"] = c.m1;
        rc["preparations"] = c.p;
        rc["time_steps"] = time_steps(r);
        rc["total_locations"] = c.total();
        j["routines"][routine_name(r)] = rc;
    }
    j["protocol"]["max_syndromes"] = max_syndromes;
    j["protocol"]["late_syndromes"] = late_syndromes;
    j["protocol"]["gamma_ws"] = gamma_ws;

    const int nrep = n_rep(max_syndromes, 0.9);
    j["derived"]["n_rep_at_alpha_0.9"] = nrep;
    j["derived"]["ec_footprint_at_alpha_0.9"] = ec_footprint(max_syndromes, 0.9);
    j["derived"]["local_rect_location_count"] =
        local_rect_location_count(max_syndromes, nrep);

    const auto rep = validate_against_sources();
    j["consistency"]["all_pass"] = rep.all_pass;
    for (const auto& item : rep.items)
        j["consistency"]["identities"][item.name] = item.pass;

    return j.dump(2);
}

}  // namespace ftc::catalog
