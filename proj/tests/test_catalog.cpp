#include "catalog.h"

#include "doctest.h"
#include "errors.h"
#include "json.hpp"

using namespace ftc;
using catalog::Routine;

TEST_CASE("routine location counts") {
    const auto s = catalog::counts(Routine::S);
    CHECK(s.g1 == 0);
    CHECK(s.g2 == 7);
    CHECK(s.w1 == 14);
    CHECK(s.w2 == 0);
    CHECK(s.m1 == 7);
    CHECK(s.p == 0);
    CHECK(s.total() == 28);

    const auto g = catalog::counts(Routine::G);
    CHECK(g.g1 == 3);
    CHECK(g.g2 == 9);
    CHECK(g.w1 == 4);
    CHECK(g.w2 == 3);
    CHECK(g.m1 == 0);
    CHECK(g.p == 7);
    CHECK(g.total() == 26);

    const auto v = catalog::counts(Routine::V);
    CHECK(v.g1 == 4);
    CHECK(v.g2 == 13);
    CHECK(v.w1 == 14);
    CHECK(v.w2 == 18);
    CHECK(v.m1 == 4);
    CHECK(v.p == 4);
    CHECK(v.total() == 57);

    const auto r = catalog::counts(Routine::R);
    CHECK(r.g1 == 1);
    CHECK(r.g2 == 0);
    CHECK(r.w1 == 6);
    CHECK(r.w2 == 0);
    CHECK(r.m1 == 0);
    CHECK(r.p == 0);
    CHECK(r.total() == 7);
}

TEST_CASE("schedule lengths") {
    CHECK(catalog::time_steps(Routine::S) == 3);
    CHECK(catalog::time_steps(Routine::G) == 5);
    CHECK(catalog::time_steps(Routine::V) == 6);
    CHECK(catalog::time_steps(Routine::R) == 1);
}

TEST_CASE("ancilla repetition count") {
    CHECK(catalog::n_rep(3, 0.9) == 4);
    CHECK(catalog::n_rep(3, 1.0) == 3);
    CHECK(catalog::n_rep(1, 1.0) == 1);
    CHECK(catalog::n_rep(3, 0.5) == 6);
    CHECK_THROWS_AS(catalog::n_rep(0, 0.9), domain_error);
    CHECK_THROWS_AS(catalog::n_rep(3, 0.0), domain_error);
    CHECK_THROWS_AS(catalog::n_rep(3, 1.5), domain_error);
    CHECK_THROWS_AS(catalog::n_rep(3, -0.1), domain_error);
}

TEST_CASE("EC footprint in physical qubits") {
    CHECK(catalog::ec_footprint(3, 0.9) == 87);
    CHECK(catalog::ec_footprint(3, 1.0) == 67);
    CHECK(catalog::ec_footprint(1, 1.0) == 27);
}

TEST_CASE("location count of a local elementary rectangle") {
    CHECK(catalog::local_rect_location_count(3, 4) == 514);
    // One G+V ancilla factory pass per repetition, 2s syndrome extractions,
    // one recovery, one data block.
    const int expect = 4 * (26 + 57) + 2 * 3 * 28 + 7 + 7;
    CHECK(catalog::local_rect_location_count(3, 4) == expect);
    CHECK_THROWS_AS(catalog::local_rect_location_count(0, 4), domain_error);
    CHECK_THROWS_AS(catalog::local_rect_location_count(3, 0), domain_error);
}

TEST_CASE("counts stay consistent with the multiplicities used by the maps") {
    const auto rep = catalog::validate_against_sources();
    CHECK(rep.items.size() >= 4);
    for (const auto& item : rep.items) {
        CAPTURE(item.name);
        CHECK(item.pass);
    }
    CHECK(rep.all_pass);
}

TEST_CASE("catalog export is valid JSON carrying the counts") {
    const auto doc = nlohmann::json::parse(catalog::to_json());
    CHECK(doc["routines"]["S"]["two_qubit_gates"] == 7);
    CHECK(doc["routines"]["S"]["short_waits"] == 14);
    CHECK(doc["routines"]["S"]["time_steps"] == 3);
    CHECK(doc["routines"]["G"]["time_steps"] == 5);
    CHECK(doc["routines"]["V"]["time_steps"] == 6);
    CHECK(doc["routines"]["V"]["long_waits"] == 18);
    CHECK(doc["routines"]["R"]["total_locations"] == 7);
    CHECK(doc["protocol"]["max_syndromes"] == 3);
    CHECK(doc["protocol"]["late_syndromes"] == 2);
    CHECK(doc["derived"]["n_rep_at_alpha_0.9"] == 4);
    CHECK(doc["derived"]["ec_footprint_at_alpha_0.9"] == 87);
    CHECK(doc["derived"]["local_rect_location_count"] == 514);
    CHECK(doc["consistency"]["all_pass"] == true);
}
