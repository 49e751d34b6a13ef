#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "qinsim/linkbudget.hpp"
#include "qinsim/orbit.hpp"
#include "qinsim/scenarios.hpp"

using namespace qinsim;

namespace {

std::map<LinkKind, int> kind_counts(const Network& net) {
    std::map<LinkKind, int> counts;
    for (const auto& l : net.links) ++counts[l.channel.kind];
    return counts;
}

}  // namespace

TEST_CASE("every scenario builds a clean network with the figure's link kinds") {
    const ScenarioParams params = default_scenario_params();
    const std::map<ScenarioId, std::map<LinkKind, int>> expected{
        {ScenarioId::S1a, {{LinkKind::Downlink, 1}}},
        {ScenarioId::S1b, {{LinkKind::Downlink, 2}}},
        {ScenarioId::S1c, {{LinkKind::Downlink, 2}, {LinkKind::Fiber, 1}}},
        {ScenarioId::S1d, {{LinkKind::Downlink, 4}}},
        {ScenarioId::S2, {{LinkKind::Uplink, 2}}},
        {ScenarioId::S3a, {{LinkKind::Downlink, 2}, {LinkKind::Qoisl, 2}}},
        {ScenarioId::S3b,
         {{LinkKind::Downlink, 1}, {LinkKind::Uplink, 1}, {LinkKind::Qoisl, 1}}},
        {ScenarioId::S4, {{LinkKind::Downlink, 1}, {LinkKind::Qoisl, 1}}},
    };
    for (ScenarioId id : all_scenario_ids()) {
        CAPTURE(to_string(id));
        const BuiltScenario built = build_scenario(id, params);
        CHECK(validate_network(built.network).empty());
        CHECK(kind_counts(built.network) == expected.at(id));
        // chains bind as many segments as there are chain gaps
        CHECK(built.chain.segments.size() + 1 == built.chain.chain_nodes.size());
    }
}

TEST_CASE("S1b has no uplink or inter-satellite links") {
    const BuiltScenario built = build_scenario(ScenarioId::S1b, default_scenario_params());
    const auto counts = kind_counts(built.network);
    CHECK(counts.count(LinkKind::Uplink) == 0);
    CHECK(counts.count(LinkKind::Qoisl) == 0);
}

TEST_CASE("S3a's QOISL links terminate at the satellite repeater") {
    const BuiltScenario built = build_scenario(ScenarioId::S3a, default_scenario_params());
    int qoisl_at_relay = 0;
    for (const auto& l : built.network.links) {
        if (l.channel.kind != LinkKind::Qoisl) continue;
        const Node* a = built.network.find_node(l.a);
        const Node* b = built.network.find_node(l.b);
        const bool touches_repeater = a->kind == NodeKind::SatelliteRepeater ||
                                      b->kind == NodeKind::SatelliteRepeater;
        CHECK(touches_repeater);
        ++qoisl_at_relay;
    }
    CHECK(qoisl_at_relay == 2);
}

TEST_CASE("QOISL links contribute zero atmospheric dB to the itemized budget") {
    for (ScenarioId id : {ScenarioId::S3a, ScenarioId::S3b, ScenarioId::S4}) {
        const BuiltScenario built = build_scenario(id, default_scenario_params());
        for (const auto& l : built.network.links) {
            if (l.channel.kind != LinkKind::Qoisl) continue;
            const BudgetRow row =
                itemize_budget(l.label(), l.channel, PathGeometry::free_space_range_km(1000.0));
            CHECK(row.atmospheric_db == 0.0);
        }
    }
}

TEST_CASE("S1b rejects user separations beyond the dual-visibility bound") {
    ScenarioParams params = default_scenario_params();
    params.site_a = {0.0, -40.0, 0.0};  // ~8900 km apart
    params.site_b = {0.0, 40.0, 0.0};
    try {
        build_scenario(ScenarioId::S1b, params);
        FAIL("expected the dual-visibility diagnostic");
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        CHECK(msg.find("dual-visibility") != std::string::npos);
        CHECK(msg.find("exceeds") != std::string::npos);
    }
    // just inside the bound is fine
    const double bound =
        max_ground_separation_km(params.orbits[0].altitude_km, params.elevation_mask_deg);
    const double half_deg = 0.45 * bound / kEarthRadiusKm * 180.0 / std::numbers::pi;
    params.site_a = {0.0, -half_deg, 0.0};
    params.site_b = {0.0, half_deg, 0.0};
    CHECK_NOTHROW(build_scenario(ScenarioId::S1b, params));
}

TEST_CASE("missing equipment fails the build with a named error") {
    ScenarioParams no_source = default_scenario_params();
    no_source.eps.reset();
    CHECK_THROWS_AS(build_scenario(ScenarioId::S2, no_source), std::invalid_argument);

    ScenarioParams no_bsm = default_scenario_params();
    no_bsm.bsm.reset();
    CHECK_THROWS_AS(build_scenario(ScenarioId::S3a, no_bsm), std::invalid_argument);

    ScenarioParams no_memory = default_scenario_params();
    no_memory.memory.reset();
    CHECK_THROWS_AS(build_scenario(ScenarioId::S1a, no_memory), std::invalid_argument);

    ScenarioParams one_orbit = default_scenario_params();
    one_orbit.orbits.resize(1);
    CHECK_THROWS_AS(build_scenario(ScenarioId::S3a, one_orbit), std::invalid_argument);
    CHECK_THROWS_AS(build_scenario(ScenarioId::S1d, one_orbit), std::invalid_argument);
    CHECK_NOTHROW(build_scenario(ScenarioId::S1b, one_orbit));
}

TEST_CASE("node overrides reach the built nodes") {
    ScenarioParams params = default_scenario_params();
    NodeOverride ov;
    ov.telescope_aperture_m = 2.5;
    ov.eps = EpsParams{123.0, 0.5};
    params.node_overrides["sat"] = ov;
    const BuiltScenario built = build_scenario(ScenarioId::S1b, params);
    const Node* sat = built.network.find_node("sat");
    REQUIRE(sat != nullptr);
    CHECK(*sat->telescope_aperture_m == 2.5);
    CHECK(sat->eps->pair_rate_hz == 123.0);
}

TEST_CASE("tradeoff table carries the published score pairs") {
    const std::map<ScenarioId, std::pair<int, int>> expected{
        {ScenarioId::S1b, {2, 5}}, {ScenarioId::S2, {4, 3}},  {ScenarioId::S3a, {4, 5}},
        {ScenarioId::S3b, {4, 4}}, {ScenarioId::S4, {5, 2}},
    };
    const auto table = tradeoff_table();
    CHECK(table.size() == 8);
    int scored = 0;
    for (const auto& rec : table) {
        auto it = expected.find(rec.scenario);
        if (it != expected.end()) {
            REQUIRE(rec.scored());
            CHECK(*rec.complexity_1to5 == it->second.first);
            CHECK(*rec.interest_1to5 == it->second.second);
            CHECK(!rec.pros.empty());
            CHECK(!rec.cons.empty());
            CHECK(rec.note.empty());
            ++scored;
        } else {
            CHECK_FALSE(rec.scored());
            CHECK(rec.note == "not scored in paper");
        }
    }
    CHECK(scored == 5);
    CHECK(tradeoff_record(ScenarioId::S1c).note == "not scored in paper");
    CHECK(tradeoff_record(ScenarioId::S4).complexity_1to5 == 5);
}

TEST_CASE("comparing one scenario yields one row with its scores") {
    ScenarioParams params = default_scenario_params();
    params.channels.space_aperture_m = 0.5;
    SimConfig sim;
    sim.duration_s = 50.0;
    sim.slot_s = 0.05;
    sim.seed = 12;
    const auto rows = compare_scenarios({ScenarioId::S1b}, params, sim, 2);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].scenario == ScenarioId::S1b);
    CHECK(rows[0].complexity_1to5 == 2);
    CHECK(rows[0].interest_1to5 == 5);
    CHECK(rows[0].active_fraction > 0.0);
}

TEST_CASE("downlink beats uplink: S1b outranks S2 at matched geometry") {
    // memoryless hardware so the comparison isolates channel transmittance
    ScenarioParams params = default_scenario_params();
    params.memory.reset();
    params.channels.space_aperture_m = 0.5;
    params.channels.ground_aperture_m = 1.0;

    SimConfig sim;
    sim.duration_s = 400.0;
    sim.slot_s = 0.02;
    sim.seed = 2024;
    const auto rows = compare_scenarios({ScenarioId::S1b, ScenarioId::S2}, params, sim, 6);
    REQUIRE(rows.size() == 2);
    // sorted descending by rate, S1b first
    CHECK(rows[0].scenario == ScenarioId::S1b);
    CHECK(rows[0].rate_hz >= rows[1].rate_hz);
    CHECK(rows[0].rate_hz - rows[1].rate_hz >=
          -3.0 * (rows[0].stderr_hz + rows[1].stderr_hz));
    CHECK(rows[0].complexity_1to5 == 2);
    CHECK(rows[1].complexity_1to5 == 4);
}

TEST_CASE("built scenarios simulate end to end") {
    // large apertures so success probabilities are measurable in a short run
    ScenarioParams params = default_scenario_params();
    params.channels.space_aperture_m = 0.8;
    params.channels.ground_aperture_m = 1.5;
    SimConfig sim;
    sim.duration_s = 200.0;
    sim.slot_s = 0.02;
    sim.seed = 99;
    for (ScenarioId id : {ScenarioId::S1b, ScenarioId::S3a, ScenarioId::S4}) {
        CAPTURE(to_string(id));
        const BuiltScenario built = build_scenario(id, params);
        const SimResult r = run_simulation(built.network, built.chain, sim);
        CHECK(r.active_time_s > 0.0);
        CHECK(r.e2e_successes > 0);
    }
}
