#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "qinsim/core.hpp"

using namespace qinsim;

namespace {

// Minimal two-downlink network: one source satellite, two ground users.
Network make_s1b_like() {
    Network net;
    Node sat;
    sat.id = "sat";
    sat.kind = NodeKind::SatelliteSource;
    sat.orbit_ref = Orbit{600.0, 0.0, 0.0, 0.0, 0.0};
    sat.eps = EpsParams{1e10, 1.0};
    net.nodes.push_back(sat);
    for (const char* id : {"user_a", "user_b"}) {
        Node u;
        u.id = id;
        u.kind = NodeKind::GroundUser;
        u.site = GroundSite{0.0, id[5] == 'a' ? -3.0 : 3.0, 0.0};
        net.nodes.push_back(u);
    }
    for (const char* id : {"user_a", "user_b"}) {
        Link l;
        l.a = "sat";
        l.b = id;
        l.channel.kind = LinkKind::Downlink;
        l.channel.atmospheric_penalty_db = 3.0;
        net.links.push_back(l);
    }
    return net;
}

bool any_contains(const std::vector<std::string>& violations, const std::string& needle) {
    return std::any_of(violations.begin(), violations.end(), [&](const std::string& v) {
        return v.find(needle) != std::string::npos;
    });
}

}  // namespace

TEST_CASE("well-formed network validates clean") {
    CHECK(validate_network(make_s1b_like()).empty());
}

TEST_CASE("qoisl with a ground endpoint is flagged") {
    Network net = make_s1b_like();
    Link bad;
    bad.a = "sat";
    bad.b = "user_a";
    bad.channel.kind = LinkKind::Qoisl;
    net.links.push_back(bad);
    const auto v = validate_network(net);
    CHECK(any_contains(v, "Qoisl requires satellite endpoints"));
}

TEST_CASE("fiber link without static length is flagged by link name") {
    Network net = make_s1b_like();
    Link fiber;
    fiber.a = "user_a";
    fiber.b = "user_b";
    fiber.channel.kind = LinkKind::Fiber;
    net.links.push_back(fiber);
    const auto v = validate_network(net);
    REQUIRE(v.size() == 1);
    CHECK(v.front().find("user_a-user_b") != std::string::npos);
    CHECK(v.front().find("static_length_km") != std::string::npos);
}

TEST_CASE("validation is idempotent and order-independent") {
    Network net = make_s1b_like();
    // two extra defects
    net.nodes[0].eps->heralding_efficiency = 1.5;
    Link fiber;
    fiber.a = "user_a";
    fiber.b = "user_b";
    fiber.channel.kind = LinkKind::Fiber;
    net.links.push_back(fiber);

    const auto base = validate_network(net);
    CHECK(validate_network(net) == base);

    std::mt19937 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        Network shuffled = net;
        std::shuffle(shuffled.nodes.begin(), shuffled.nodes.end(), rng);
        std::shuffle(shuffled.links.begin(), shuffled.links.end(), rng);
        CHECK(validate_network(shuffled) == base);
    }
}

TEST_CASE("equipment mismatches are flagged") {
    Network net = make_s1b_like();
    net.nodes[1].eps = EpsParams{};  // ground_user carrying a source
    CHECK(any_contains(validate_network(net), "must not carry a source"));

    Network net2 = make_s1b_like();
    Node hybrid;
    hybrid.id = "hybrid";
    hybrid.kind = NodeKind::SatelliteHybrid;
    hybrid.orbit_ref = Orbit{600.0};
    hybrid.eps = EpsParams{};  // bsm missing
    net2.nodes.push_back(hybrid);
    Link q;
    q.a = "sat";
    q.b = "hybrid";
    q.channel.kind = LinkKind::Qoisl;
    net2.links.push_back(q);
    CHECK(any_contains(validate_network(net2), "hybrid satellite missing bsm"));
}

TEST_CASE("duplicate node ids and disconnection are flagged") {
    Network net = make_s1b_like();
    net.nodes.push_back(net.nodes[1]);
    CHECK(any_contains(validate_network(net), "duplicate id"));

    Network net2 = make_s1b_like();
    Node loner;
    loner.id = "island";
    loner.kind = NodeKind::GroundUser;
    loner.site = GroundSite{10.0, 10.0, 0.0};
    net2.nodes.push_back(loner);
    CHECK(any_contains(validate_network(net2), "unreachable"));
}

TEST_CASE("uplink penalty below the downlink penalty is flagged") {
    Network net = make_s1b_like();
    Node gs;
    gs.id = "gs";
    gs.kind = NodeKind::GroundSource;
    gs.site = GroundSite{0.0, 0.0, 0.0};
    gs.eps = EpsParams{};
    net.nodes.push_back(gs);
    Link up;
    up.a = "gs";
    up.b = "sat";
    up.channel.kind = LinkKind::Uplink;
    up.channel.atmospheric_penalty_db = 1.0;  // below the 3 dB downlinks
    net.links.push_back(up);
    CHECK(any_contains(validate_network(net), "below the network's downlink penalty"));
}

TEST_CASE("satellite/ground position fields are mutually exclusive") {
    Network net = make_s1b_like();
    net.nodes[0].site = GroundSite{};  // satellite with a ground site
    CHECK(any_contains(validate_network(net), "must not carry site"));

    Network net2 = make_s1b_like();
    net2.nodes[1].orbit_ref = Orbit{500.0};
    CHECK(any_contains(validate_network(net2), "must not carry orbit_ref"));
}

TEST_CASE("memory retrieval decays and respects eta0") {
    MemoryParams m{0.8, 2.0, 100.0};
    CHECK(m.retrieval_efficiency(0.0) == doctest::Approx(0.8));
    CHECK(m.retrieval_efficiency(2.0) == doctest::Approx(0.8 * std::exp(-1.0)));
    MemoryParams no_decay{0.9, std::numeric_limits<double>::infinity(),
                          std::numeric_limits<double>::infinity()};
    CHECK(no_decay.retrieval_efficiency(1e9) == doctest::Approx(0.9));
}

TEST_CASE("scenario id round-trips through strings") {
    for (ScenarioId id : all_scenario_ids()) {
        CHECK(scenario_id_from_string(to_string(id)) == id);
    }
    CHECK_FALSE(scenario_id_from_string("S9").has_value());
}
