#pragma once

#include <array>
#include <cstddef>

namespace ftc::prob {

double clamp01(double x);

// num/den clamped into [0,1]; a nonpositive denominator yields 0 so that
// degenerate pass probabilities never poison downstream products.
double ratio_clamped(double num, double den);

// Probability of at least one (resp. two) marked outcomes among n independent
// trials with per-trial probability delta.
double p_one_plus(double delta, int n);
double p_two_plus(double delta, int n);

// A fault source is a small set of (rate, multiplicity) groups acting as one
// unit: "one or more faults anywhere in the source" is the single-fault event.
struct SourceGroup {
    double delta = 0.0;
    int count = 0;
};

struct Source {
    std::array<SourceGroup, 2> groups{};
    int ngroups = 0;

    static Source single(double delta, int count) {
        Source s;
        s.groups[0] = {delta, count};
        s.ngroups = 1;
        return s;
    }
    static Source pair(double d0, int n0, double d1, int n1) {
        Source s;
        s.groups[0] = {d0, n0};
        s.groups[1] = {d1, n1};
        s.ngroups = 2;
        return s;
    }
};

double source_p_one_plus(const Source& src);
double source_p_two_plus(const Source& src);

struct SourceTable {
    std::array<Source, 8> rows{};
    int n = 0;

    void push(const Source& src) { rows[static_cast<std::size_t>(n++)] = src; }
};

// Probability that a rectangle fails given its independent fault sources:
// two or more single-fault sources, or any double-fault source.
double rect_failure(const SourceTable& table);

}  // namespace ftc::prob
