#pragma once

#include <string>
#include <vector>

namespace ftc::catalog {

inline constexpr int max_syndromes = 3;       // s
inline constexpr int late_syndromes = 2;      // s'
inline constexpr double gamma_ws = 0.0;

enum class Routine { S, G, V, R };

// Location counts per routine, in the order: one-qubit gates, two-qubit
// gates, short waits, long waits, one-qubit measurements, preparations.
struct RoutineCounts {
    int g1 = 0;
    int g2 = 0;
    int w1 = 0;
    int w2 = 0;
    int m1 = 0;
    int p = 0;

    int total() const { return g1 + g2 + w1 + w2 + m1 + p; }
    int waits() const { return w1 + w2; }
};

RoutineCounts counts(Routine r);
int time_steps(Routine r);
const char* routine_name(Routine r);

int n_rep(int s, double alpha);
int ec_footprint(int s, double alpha);
int local_rect_location_count(int s, int nrep);

struct ConsistencyItem {
    std::string name;
    bool pass = false;
};

struct ConsistencyReport {
    std::vector<ConsistencyItem> items;
    bool all_pass = false;
};

// Cross-checks the stored counts against the multiplicities that the rate
// maps hard-code, so a catalog edit that would silently desynchronize the
// model shows up as a failed identity.
ConsistencyReport validate_against_sources();

std::string to_json();

}  // namespace ftc::catalog
