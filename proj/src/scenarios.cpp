#include "qinsim/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qinsim/orbit.hpp"

namespace qinsim {

ChannelParams ChannelDefaults::make(LinkKind kind) const {
    ChannelParams c;
    c.kind = kind;
    c.fiber_alpha_db_per_km = fiber_alpha_db_per_km;
    c.wavelength_m = wavelength_m;
    c.pointing_loss_db = pointing_loss_db;
    c.system_loss_db = system_loss_db;
    c.detector_efficiency = detector_efficiency;
    switch (kind) {
        case LinkKind::Fiber:
            c.atmospheric_penalty_db = 0.0;
            break;
        case LinkKind::Downlink:
            c.tx_aperture_m = space_aperture_m;
            c.rx_aperture_m = ground_aperture_m;
            c.atmospheric_penalty_db = downlink_atmospheric_db;
            break;
        case LinkKind::Uplink:
            c.tx_aperture_m = ground_aperture_m;
            c.rx_aperture_m = space_aperture_m;
            c.atmospheric_penalty_db = uplink_atmospheric_db;
            break;
        case LinkKind::Qoisl:
            c.tx_aperture_m = space_aperture_m;
            c.rx_aperture_m = space_aperture_m;
            c.atmospheric_penalty_db = 0.0;
            break;
    }
    return c;
}

ScenarioParams default_scenario_params() {
    ScenarioParams p;
    // Three equatorial 600 km orbits phased so neighbours keep line of sight;
    // builders pick the ones they need.
    p.orbits = {Orbit{600.0, 0.0, 0.0, -4.0, 0.0}, Orbit{600.0, 0.0, 0.0, 4.0, 0.0},
                Orbit{600.0, 0.0, 0.0, 0.0, 0.0}};
    return p;
}

namespace {

GroundSite interpolate_site(const GroundSite& a, const GroundSite& b, double fraction) {
    return {a.latitude_deg + fraction * (b.latitude_deg - a.latitude_deg),
            a.longitude_deg + fraction * (b.longitude_deg - a.longitude_deg),
            a.altitude_m + fraction * (b.altitude_m - a.altitude_m)};
}

struct Builder {
    const ScenarioParams& params;
    BuiltScenario out;

    explicit Builder(ScenarioId id, const ScenarioParams& p) : params(p) {
        out.id = id;
        out.network.classical_heralding_latency_s = p.classical_heralding_latency_s;
        out.chain.elevation_mask_deg = p.elevation_mask_deg;
    }

    void apply_overrides(Node& node) {
        auto it = params.node_overrides.find(node.id);
        if (it == params.node_overrides.end()) return;
        if (it->second.eps) node.eps = it->second.eps;
        if (it->second.bsm) node.bsm = it->second.bsm;
        if (it->second.memory) node.memory = it->second.memory;
        if (it->second.telescope_aperture_m)
            node.telescope_aperture_m = it->second.telescope_aperture_m;
    }

    EpsParams require_eps(const char* where) {
        if (!params.eps)
            throw std::invalid_argument(std::string(to_string(out.id)) +
                                        ": missing entangled photon source params for " + where);
        return *params.eps;
    }
    BsmParams require_bsm(const char* where) {
        if (!params.bsm)
            throw std::invalid_argument(std::string(to_string(out.id)) +
                                        ": missing BSM params for " + where);
        return *params.bsm;
    }
    MemoryParams require_memory(const char* where) {
        if (!params.memory)
            throw std::invalid_argument(std::string(to_string(out.id)) +
                                        ": missing memory params for " + where);
        return *params.memory;
    }
    Orbit orbit(std::size_t i) {
        if (params.orbits.size() <= i)
            throw std::invalid_argument(std::string(to_string(out.id)) + ": needs at least " +
                                        std::to_string(i + 1) + " orbit(s), got " +
                                        std::to_string(params.orbits.size()));
        return params.orbits[i];
    }

    Node& add_ground_user(const NodeId& id, const GroundSite& site) {
        Node n;
        n.id = id;
        n.kind = NodeKind::GroundUser;
        n.site = site;
        n.memory = params.memory;
        n.telescope_aperture_m = params.channels.ground_aperture_m;
        apply_overrides(n);
        out.network.nodes.push_back(n);
        return out.network.nodes.back();
    }
    Node& add_ground_source(const NodeId& id, const GroundSite& site) {
        Node n;
        n.id = id;
        n.kind = NodeKind::GroundSource;
        n.site = site;
        n.eps = require_eps(id.c_str());
        n.memory = params.memory;
        n.telescope_aperture_m = params.channels.ground_aperture_m;
        apply_overrides(n);
        out.network.nodes.push_back(n);
        return out.network.nodes.back();
    }
    Node& add_ground_repeater(const NodeId& id, const GroundSite& site, bool with_eps) {
        Node n;
        n.id = id;
        n.kind = NodeKind::GroundRepeater;
        n.site = site;
        n.bsm = require_bsm(id.c_str());
        if (with_eps) n.eps = require_eps(id.c_str());
        n.memory = params.memory;
        n.telescope_aperture_m = params.channels.ground_aperture_m;
        apply_overrides(n);
        out.network.nodes.push_back(n);
        return out.network.nodes.back();
    }
    Node& add_satellite(const NodeId& id, NodeKind kind, std::size_t orbit_index,
                        bool with_memory) {
        Node n;
        n.id = id;
        n.kind = kind;
        n.orbit_ref = orbit(orbit_index);
        if (kind == NodeKind::SatelliteSource || kind == NodeKind::SatelliteHybrid)
            n.eps = require_eps(id.c_str());
        if (kind == NodeKind::SatelliteRepeater || kind == NodeKind::SatelliteHybrid)
            n.bsm = require_bsm(id.c_str());
        if (with_memory) n.memory = params.memory;
        n.telescope_aperture_m = params.channels.space_aperture_m;
        apply_overrides(n);
        out.network.nodes.push_back(n);
        return out.network.nodes.back();
    }

    std::size_t add_link(const NodeId& a, const NodeId& b, LinkKind kind,
                         std::optional<double> fiber_km = std::nullopt) {
        Link l;
        l.a = a;
        l.b = b;
        l.channel = params.channels.make(kind);
        l.static_length_km = fiber_km;
        out.network.links.push_back(l);
        return out.network.links.size() - 1;
    }

    void set_chain(std::vector<NodeId> nodes, std::vector<BoundSegment> segments) {
        out.chain.chain_nodes = std::move(nodes);
        out.chain.segments = std::move(segments);
        if (out.chain.segments.size() > 1)
            out.chain.schedule = build_swap_schedule(
                static_cast<int>(out.chain.segments.size()) - 1, SwapStrategy::Balanced);
    }
};

BuiltScenario build_s1a(const ScenarioParams& p) {
    Builder b(ScenarioId::S1a, p);
    b.require_memory("sat (on-board storage of the retained photon)");
    Node& sat = b.add_satellite("sat", NodeKind::SatelliteSource, 0, true);
    (void)sat;
    b.add_ground_user("user_a", p.site_a);
    const auto down = b.add_link("sat", "user_a", LinkKind::Downlink);
    b.set_chain({"sat", "user_a"}, {{"sat", {down}}});
    b.out.notes = "satellite acts as the second user; rate is satellite-ground";
    return std::move(b.out);
}

BuiltScenario build_s1b(const ScenarioParams& p) {
    Builder b(ScenarioId::S1b, p);
    const double separation = great_circle_distance_km(p.site_a, p.site_b);
    const double bound =
        max_ground_separation_km(b.orbit(0).altitude_km, p.elevation_mask_deg);
    if (separation > bound)
        throw std::invalid_argument(
            "S1b: user separation " + std::to_string(separation) +
            " km exceeds the dual-visibility bound " + std::to_string(bound) +
            " km at altitude " + std::to_string(b.orbit(0).altitude_km) + " km, mask " +
            std::to_string(p.elevation_mask_deg) + " deg");
    b.add_satellite("sat", NodeKind::SatelliteSource, 0, false);
    b.add_ground_user("user_a", p.site_a);
    b.add_ground_user("user_b", p.site_b);
    const auto da = b.add_link("sat", "user_a", LinkKind::Downlink);
    const auto db = b.add_link("sat", "user_b", LinkKind::Downlink);
    b.set_chain({"user_a", "user_b"}, {{"sat", {da, db}}});
    return std::move(b.out);
}

BuiltScenario build_s1c(const ScenarioParams& p) {
    Builder b(ScenarioId::S1c, p);
    b.add_ground_user("user_a", p.site_a);
    b.add_ground_user("user_b", p.site_b);
    // The ground source is co-located with the repeater; its fiber reaches
    // user A, so A needs no satellite visibility.
    const double total = great_circle_distance_km(p.site_a, p.site_b);
    const double f = total > 0.0 ? std::min(1.0, p.fiber_length_km / total) : 0.5;
    b.add_ground_repeater("repeater", interpolate_site(p.site_a, p.site_b, f), true);
    b.add_satellite("sat", NodeKind::SatelliteSource, 0, false);
    const auto fiber = b.add_link("repeater", "user_a", LinkKind::Fiber, p.fiber_length_km);
    const auto dr = b.add_link("sat", "repeater", LinkKind::Downlink);
    const auto db = b.add_link("sat", "user_b", LinkKind::Downlink);
    b.set_chain({"user_a", "repeater", "user_b"},
                {{"repeater", {fiber}}, {"sat", {dr, db}}});
    return std::move(b.out);
}

BuiltScenario build_s1d(const ScenarioParams& p) {
    Builder b(ScenarioId::S1d, p);
    b.orbit(1);
    b.add_ground_user("user_a", p.site_a);
    b.add_ground_user("user_b", p.site_b);
    b.add_ground_repeater("repeater", interpolate_site(p.site_a, p.site_b, 0.5), false);
    b.add_satellite("sat1", NodeKind::SatelliteSource, 0, false);
    b.add_satellite("sat2", NodeKind::SatelliteSource, 1, false);
    const auto d1a = b.add_link("sat1", "user_a", LinkKind::Downlink);
    const auto d1r = b.add_link("sat1", "repeater", LinkKind::Downlink);
    const auto d2r = b.add_link("sat2", "repeater", LinkKind::Downlink);
    const auto d2b = b.add_link("sat2", "user_b", LinkKind::Downlink);
    b.set_chain({"user_a", "repeater", "user_b"},
                {{"sat1", {d1a, d1r}}, {"sat2", {d2r, d2b}}});
    b.out.notes = "both satellites must be visible from the repeater within memory lifetime";
    return std::move(b.out);
}

BuiltScenario build_s2(const ScenarioParams& p) {
    Builder b(ScenarioId::S2, p);
    // End nodes are the ground sources; each keeps one photon for its user.
    b.add_ground_source("user_a", p.site_a);
    b.add_ground_source("user_b", p.site_b);
    b.add_satellite("sat", NodeKind::SatelliteRepeater, 0, true);
    const auto ua = b.add_link("user_a", "sat", LinkKind::Uplink);
    const auto ub = b.add_link("user_b", "sat", LinkKind::Uplink);
    b.set_chain({"user_a", "sat", "user_b"}, {{"user_a", {ua}}, {"user_b", {ub}}});
    return std::move(b.out);
}

BuiltScenario build_s3a(const ScenarioParams& p) {
    Builder b(ScenarioId::S3a, p);
    b.orbit(2);
    b.add_ground_user("user_a", p.site_a);
    b.add_ground_user("user_b", p.site_b);
    b.add_satellite("sat1", NodeKind::SatelliteSource, 0, false);
    b.add_satellite("sat2", NodeKind::SatelliteSource, 1, false);
    b.add_satellite("relay", NodeKind::SatelliteRepeater, 2, true);
    const auto d1 = b.add_link("sat1", "user_a", LinkKind::Downlink);
    const auto q1 = b.add_link("sat1", "relay", LinkKind::Qoisl);
    const auto q2 = b.add_link("sat2", "relay", LinkKind::Qoisl);
    const auto d2 = b.add_link("sat2", "user_b", LinkKind::Downlink);
    b.set_chain({"user_a", "relay", "user_b"}, {{"sat1", {d1, q1}}, {"sat2", {d2, q2}}});
    return std::move(b.out);
}

BuiltScenario build_s3b(const ScenarioParams& p) {
    Builder b(ScenarioId::S3b, p);
    b.orbit(1);
    b.add_ground_user("user_a", p.site_a);
    b.add_ground_source("user_b", p.site_b);
    b.add_satellite("sat1", NodeKind::SatelliteSource, 0, false);
    b.add_satellite("relay", NodeKind::SatelliteRepeater, 1, true);
    const auto d1 = b.add_link("sat1", "user_a", LinkKind::Downlink);
    const auto q1 = b.add_link("sat1", "relay", LinkKind::Qoisl);
    const auto up = b.add_link("user_b", "relay", LinkKind::Uplink);
    b.set_chain({"user_a", "relay", "user_b"}, {{"sat1", {d1, q1}}, {"user_b", {up}}});
    return std::move(b.out);
}

BuiltScenario build_s4(const ScenarioParams& p) {
    Builder b(ScenarioId::S4, p);
    b.orbit(1);
    b.require_memory("sat1 (retained photon)");
    b.add_ground_user("user_a", p.site_a);
    b.add_satellite("hybrid", NodeKind::SatelliteHybrid, 1, true);
    b.add_satellite("sat1", NodeKind::SatelliteSource, 0, true);
    const auto down = b.add_link("hybrid", "user_a", LinkKind::Downlink);
    const auto qoisl = b.add_link("sat1", "hybrid", LinkKind::Qoisl);
    // The hybrid's own pair feeds its BSM locally and user A by downlink; the
    // source satellite keeps one photon on board as the far end.
    b.set_chain({"user_a", "hybrid", "sat1"}, {{"hybrid", {down}}, {"sat1", {qoisl}}});
    b.out.notes = p.integrated_payload
                      ? "integrated payload: on-board source feeds the BSM directly"
                      : "separated payload: source and BSM share the bus only";
    return std::move(b.out);
}

}  // namespace

BuiltScenario build_scenario(ScenarioId id, const ScenarioParams& params) {
    BuiltScenario built;
    switch (id) {
        case ScenarioId::S1a: built = build_s1a(params); break;
        case ScenarioId::S1b: built = build_s1b(params); break;
        case ScenarioId::S1c: built = build_s1c(params); break;
        case ScenarioId::S1d: built = build_s1d(params); break;
        case ScenarioId::S2: built = build_s2(params); break;
        case ScenarioId::S3a: built = build_s3a(params); break;
        case ScenarioId::S3b: built = build_s3b(params); break;
        case ScenarioId::S4: built = build_s4(params); break;
    }
    const auto violations = validate_network(built.network);
    if (!violations.empty())
        throw std::invalid_argument(std::string(to_string(id)) +
                                    ": built network does not validate: " + violations.front());
    return built;
}

namespace {

std::vector<TradeoffRecord> make_tradeoff_table() {
    std::vector<TradeoffRecord> t;

    TradeoffRecord s1a;
    s1a.scenario = ScenarioId::S1a;
    s1a.description = "Entangled photon source on-board the satellite, satellite as a user";
    s1a.note = "not scored in paper";
    t.push_back(s1a);

    TradeoffRecord s1b;
    s1b.scenario = ScenarioId::S1b;
    s1b.description = "Entangled photon source on-board the satellite";
    s1b.complexity_1to5 = 2;
    s1b.interest_1to5 = 5;
    s1b.pros = {
        "Downlink has lower losses compared to uplink",
        "Photonic equipment feasible",
        "Medium technological complexity",
        "No space quantum memory (for scenario 1 b)",
        "No BSM",
        "Space single photon detectors are not mandatory (except maybe for source health "
        "monitoring)",
    };
    s1b.cons = {
        "Requires two large telescopes on-board the satellite",
        "Requires pointing toward two ground stations simultaneously",
        "Involves two space-to-ground links",
        "Involves space quantum memory for scenario 1 a)",
    };
    t.push_back(s1b);

    TradeoffRecord s1c;
    s1c.scenario = ScenarioId::S1c;
    s1c.description = "Source satellite plus one ground quantum repeater";
    s1c.note = "not scored in paper";
    t.push_back(s1c);

    TradeoffRecord s1d;
    s1d.scenario = ScenarioId::S1d;
    s1d.description = "Two source satellites plus one ground quantum repeater";
    s1d.note = "not scored in paper";
    t.push_back(s1d);

    TradeoffRecord s2;
    s2.scenario = ScenarioId::S2;
    s2.description = "Bell state measurement on-board the satellite";
    s2.complexity_1to5 = 4;
    s2.interest_1to5 = 3;
    s2.pros = {"Allows the entanglement of remote photons at large distances"};
    s2.cons = {
        "Requires two large receiving telescopes on-board the satellite",
        "Requires pointing toward two ground stations simultaneously",
        "Involves two ground-to-space links",
        "Uplink has higher losses compared to downlink",
        "Photonic equipment never realized in space",
        "Higher technological complexity: involves space quantum memory and stringent "
        "time-synchronization",
        "Involves space single photon detectors",
    };
    t.push_back(s2);

    const std::vector<std::string> qoisl_pros = {
        "QOISL allows a better link budget than space-to-ground link (with atmospheric "
        "impairments)",
        "QOISL allows for an extension into a satellite constellation",
        "QOISL telescopes could be smaller than space-to-ground telescopes",
        "Reuse of existing OISL telescopes",
    };
    const std::vector<std::string> bsm_payload_cons = {
        "Photonic equipment never realized, for the BSM payload",
        "Higher technological complexity for the BSM module",
        "Involves space quantum memory and stringent time-synchronization, for BSM",
        "Involves space single photon detectors",
    };

    TradeoffRecord s3a;
    s3a.scenario = ScenarioId::S3a;
    s3a.description = "Source satellites linked with BSM satellite";
    s3a.complexity_1to5 = 4;
    s3a.interest_1to5 = 5;
    s3a.pros = qoisl_pros;
    s3a.cons = {"Space sources and space BSM to be synchronized"};
    s3a.cons.insert(s3a.cons.end(), bsm_payload_cons.begin(), bsm_payload_cons.end());
    s3a.cons.push_back(
        "Requires pointing toward a ground station and a satellite simultaneously, or two "
        "satellites");
    t.push_back(s3a);

    TradeoffRecord s3b;
    s3b.scenario = ScenarioId::S3b;
    s3b.description = "Source satellite linked with BSM satellite, other source at the ground";
    s3b.complexity_1to5 = 4;
    s3b.interest_1to5 = 4;
    s3b.pros = qoisl_pros;
    s3b.pros.push_back("Only one QOISL to be managed in this configuration");
    s3b.cons = {"Space and ground sources and space BSM to be synchronized"};
    s3b.cons.insert(s3b.cons.end(), bsm_payload_cons.begin(), bsm_payload_cons.end());
    s3b.cons.push_back(
        "Requires pointing toward a ground station and a satellite simultaneously");
    s3b.cons.push_back("Involves an uplink; uplink has higher losses compared to downlink");
    t.push_back(s3b);

    TradeoffRecord s4;
    s4.scenario = ScenarioId::S4;
    s4.description = "Source satellite linked with a hybrid satellite";
    s4.complexity_1to5 = 5;
    s4.interest_1to5 = 2;
    s4.pros = qoisl_pros;
    s4.pros.push_back("Only one QOISL to be managed in this configuration");
    s4.pros.push_back("No uplink involved");
    s4.cons = {"Space source and BSM to be synchronized"};
    s4.cons.insert(s4.cons.end(), bsm_payload_cons.begin(), bsm_payload_cons.end());
    s4.cons.push_back(
        "Requires pointing toward a ground station and a satellite simultaneously");
    t.push_back(s4);

    return t;
}

}  // namespace

std::vector<TradeoffRecord> tradeoff_table() {
    static const std::vector<TradeoffRecord> table = make_tradeoff_table();
    return table;
}

const TradeoffRecord& tradeoff_record(ScenarioId id) {
    static const std::vector<TradeoffRecord> table = make_tradeoff_table();
    for (const auto& r : table)
        if (r.scenario == id) return r;
    throw std::logic_error("tradeoff table is missing a scenario");
}

std::vector<CompareRow> compare_scenarios(const std::vector<ScenarioId>& ids,
                                          const ScenarioParams& params, const SimConfig& sim,
                                          int batches) {
    if (ids.empty()) throw std::invalid_argument("compare_scenarios needs at least one id");
    std::vector<CompareRow> rows;
    for (ScenarioId id : ids) {
        const BuiltScenario built = build_scenario(id, params);
        const RateEstimate est = estimate_rate(built.network, built.chain, sim, batches);
        const TradeoffRecord& rec = tradeoff_record(id);
        CompareRow row;
        row.scenario = id;
        row.rate_hz = est.mean_rate_hz;
        row.stderr_hz = est.stderr_hz;
        row.active_fraction = est.mean_active_fraction;
        row.complexity_1to5 = rec.complexity_1to5;
        row.interest_1to5 = rec.interest_1to5;
        row.note = rec.note;
        rows.push_back(row);
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const CompareRow& a, const CompareRow& b) {
                         return a.rate_hz > b.rate_hz;
                     });
    return rows;
}

}  // namespace qinsim
