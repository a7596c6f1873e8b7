#pragma once

#include <array>

#include "prob.h"

namespace ftc::model {

// Rate vector for the nonlocal machine: one-qubit gates, two-qubit gates,
// waits, measurements, preparations.
using Rates = std::array<double, 5>;

enum RateIndex : std::size_t { r_g1 = 0, r_g2 = 1, r_gw = 2, r_g1m = 3, r_gp = 4 };

enum class LocType { one, two, wait, measure, prep };

struct Protocol {
    int s = 3;        // syndrome rounds per EC
    int s_prime = 2;  // rounds that can still disagree after the first match
    double gamma_ws = 0.0;
};

// Multiplicities hard-coded in the pass probabilities and source rows that
// are not a whole-routine total; the catalog cross-checks these.
inline constexpr int syndrome_two_qubit = 7;
inline constexpr int syndrome_short_wait = 14;
inline constexpr int syndrome_measure = 7;
inline constexpr int recovery_wait = 6;
inline constexpr int late_two_qubit = 13;
inline constexpr int verify_measure = 4;
inline constexpr int ancilla_prep = 7;
inline constexpr int early_prep = 4;
inline constexpr int zanc_wait_23 = 26;
inline constexpr int zanc_wait_full = 6;
inline constexpr int xanc_wait_23 = 32;

struct AncillaStats {
    double alpha = 1.0;      // ancilla acceptance probability
    double beta = 1.0;       // P(zero syndrome | accepted, no incoming error)
    double delta_anc = 0.0;  // residual error rate on an accepted ancilla
    double p_no_z = 1.0;
    double p_no_x = 1.0;
    double p_no_xz = 1.0;
};

AncillaStats ancilla_stats(const Rates& g, const Protocol& proto = {});

// Table of independent fault sources for a single-block rectangle whose EC
// steps saw sx (leading) and sz (trailing) syndrome repetitions.
prob::SourceTable source_table(LocType l, int sx, int sz, const Rates& g,
                               double delta_anc, const Protocol& proto = {},
                               bool include_gate = true);

double gamma_single(LocType l, const Rates& g, const AncillaStats& st,
                    const Protocol& proto = {});
double gamma_two(const Rates& g, const AncillaStats& st, const Protocol& proto = {});

Rates step(const Rates& g, const Protocol& proto = {});

}  // namespace ftc::model
