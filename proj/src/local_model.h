#pragma once

#include <array>
#include <vector>

#include "model_core.h"
#include "prob.h"

namespace ftc::local {

// Rate vector for the movement-constrained machine: one-qubit gates,
// two-qubit gates, short waits, long waits, data movement, data waiting,
// measurements, preparations.
using Rates = std::array<double, 8>;

enum RateIndex : std::size_t {
    r_g1 = 0,
    r_g2 = 1,
    r_gw1 = 2,
    r_gw2 = 3,
    r_gmd = 4,
    r_gwd = 5,
    r_g1m = 6,
    r_gp = 7,
};

enum class LocType { one, two, wait_short, wait_long, move_data, wait_data, measure, prep };

using Protocol = model::Protocol;
using AncillaStats = model::AncillaStats;

// Split wait exponents in the pass probabilities once short and long waits
// carry different rates; the catalog cross-checks these against Table VII.
inline constexpr int zanc_w1_23 = 14;
inline constexpr int zanc_w2_23 = 12;
inline constexpr int zanc_w2_full = 6;
inline constexpr int xanc_w1_23 = 14;
inline constexpr int xanc_w2_23 = 18;

struct Geometry {
    int r = 1;             // lattice separation between interacting blocks
    int tau = 1;           // movement steps interleaved per transversal step
    double epsilon = 1.0;  // movement noise relative to gate noise (wiring only)

    int d() const { return (r + tau - 1) / tau; }
};

struct Replacement {
    LocType what;
    int count;
};

// How one level-k location decomposes into level-(k-1) locations under the
// movement-constrained layout.
std::vector<Replacement> replacement(LocType composite, const Geometry& geo);

AncillaStats ancilla_stats(const Rates& g, const Protocol& proto = {});

prob::SourceTable source_table(LocType j, int sx, int sz, const Rates& g,
                               double delta_anc, const Protocol& proto = {},
                               bool include_gate = true);

double gamma_elementary(LocType j, const Rates& g, const AncillaStats& st,
                        const Protocol& proto = {});

// One concatenation step of the composite rates. With reduce_moves set, the
// movement and data-wait channels are zeroed after the elementary rates are
// computed, which collapses the map onto the nonlocal one.
Rates step(const Rates& g, const Geometry& geo, const Protocol& proto = {},
           bool reduce_moves = false);

}  // namespace ftc::local
