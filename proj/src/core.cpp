#include "qinsim/core.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <sstream>

namespace qinsim {

bool is_ground_kind(NodeKind kind) {
    return kind == NodeKind::GroundUser || kind == NodeKind::GroundSource ||
           kind == NodeKind::GroundRepeater;
}

bool is_satellite_kind(NodeKind kind) { return !is_ground_kind(kind); }

const char* to_string(NodeKind kind) {
    switch (kind) {
        case NodeKind::GroundUser: return "ground_user";
        case NodeKind::GroundSource: return "ground_source";
        case NodeKind::GroundRepeater: return "ground_repeater";
        case NodeKind::SatelliteSource: return "satellite_source";
        case NodeKind::SatelliteRepeater: return "satellite_repeater";
        case NodeKind::SatelliteHybrid: return "satellite_hybrid";
    }
    return "?";
}

std::optional<NodeKind> node_kind_from_string(const std::string& name) {
    static const std::map<std::string, NodeKind> table = {
        {"ground_user", NodeKind::GroundUser},
        {"ground_source", NodeKind::GroundSource},
        {"ground_repeater", NodeKind::GroundRepeater},
        {"satellite_source", NodeKind::SatelliteSource},
        {"satellite_repeater", NodeKind::SatelliteRepeater},
        {"satellite_hybrid", NodeKind::SatelliteHybrid},
    };
    auto it = table.find(name);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

double MemoryParams::retrieval_efficiency(double storage_time_s) const {
    if (storage_time_s <= 0.0) return efficiency_eta0;
    if (std::isinf(lifetime_tau_s)) return efficiency_eta0;
    return efficiency_eta0 * std::exp(-storage_time_s / lifetime_tau_s);
}

const char* to_string(LinkKind kind) {
    switch (kind) {
        case LinkKind::Fiber: return "fiber";
        case LinkKind::Downlink: return "downlink";
        case LinkKind::Uplink: return "uplink";
        case LinkKind::Qoisl: return "qoisl";
    }
    return "?";
}

std::optional<LinkKind> link_kind_from_string(const std::string& name) {
    if (name == "fiber") return LinkKind::Fiber;
    if (name == "downlink") return LinkKind::Downlink;
    if (name == "uplink") return LinkKind::Uplink;
    if (name == "qoisl") return LinkKind::Qoisl;
    return std::nullopt;
}

const Node* Network::find_node(const NodeId& id) const {
    for (const auto& n : nodes) {
        if (n.id == id) return &n;
    }
    return nullptr;
}

const char* to_string(ScenarioId id) {
    switch (id) {
        case ScenarioId::S1a: return "S1a";
        case ScenarioId::S1b: return "S1b";
        case ScenarioId::S1c: return "S1c";
        case ScenarioId::S1d: return "S1d";
        case ScenarioId::S2: return "S2";
        case ScenarioId::S3a: return "S3a";
        case ScenarioId::S3b: return "S3b";
        case ScenarioId::S4: return "S4";
    }
    return "?";
}

std::optional<ScenarioId> scenario_id_from_string(const std::string& name) {
    for (ScenarioId id : all_scenario_ids()) {
        if (name == to_string(id)) return id;
    }
    return std::nullopt;
}

std::vector<ScenarioId> all_scenario_ids() {
    return {ScenarioId::S1a, ScenarioId::S1b, ScenarioId::S1c, ScenarioId::S1d,
            ScenarioId::S2,  ScenarioId::S3a, ScenarioId::S3b, ScenarioId::S4};
}

namespace {

bool in_unit_interval(double x) { return x >= 0.0 && x <= 1.0; }

void check_node(const Node& n, std::vector<std::string>& out) {
    auto flag = [&](const std::string& msg) { out.push_back("node " + n.id + ": " + msg); };

    if (is_ground_kind(n.kind)) {
        if (!n.site) flag("ground node missing site");
        if (n.orbit_ref) flag("ground node must not carry orbit_ref");
    } else {
        if (!n.orbit_ref) flag("satellite node missing orbit_ref");
        if (n.site) flag("satellite node must not carry site");
    }

    switch (n.kind) {
        case NodeKind::GroundUser:
            if (n.eps) flag("ground_user must not carry a source");
            if (n.bsm) flag("ground_user must not carry a bsm");
            break;
        case NodeKind::GroundSource:
        case NodeKind::SatelliteSource:
            if (!n.eps) flag("source node missing eps");
            break;
        case NodeKind::GroundRepeater:
        case NodeKind::SatelliteRepeater:
            if (!n.bsm) flag("repeater node missing bsm");
            break;
        case NodeKind::SatelliteHybrid:
            if (!n.eps) flag("hybrid satellite missing eps");
            if (!n.bsm) flag("hybrid satellite missing bsm");
            break;
    }

    if (n.site) {
        if (n.site->latitude_deg < -90.0 || n.site->latitude_deg > 90.0)
            flag("latitude_deg out of [-90,90]");
        if (n.site->longitude_deg < -180.0 || n.site->longitude_deg > 180.0)
            flag("longitude_deg out of [-180,180]");
    }
    if (n.orbit_ref && n.orbit_ref->altitude_km <= 0.0) flag("altitude_km must be > 0");
    if (n.eps) {
        if (n.eps->pair_rate_hz <= 0.0) flag("pair_rate_hz must be > 0");
        if (!in_unit_interval(n.eps->heralding_efficiency))
            flag("heralding_efficiency out of [0,1]");
    }
    if (n.bsm) {
        if (n.bsm->success_prob_q < 0.0 || n.bsm->success_prob_q > 0.5)
            flag("success_prob_q out of [0,0.5]");
        if (!in_unit_interval(n.bsm->indistinguishability_v))
            flag("indistinguishability_v out of [0,1]");
        if (n.bsm->coincidence_window_ps <= 0.0) flag("coincidence_window_ps must be > 0");
    }
    if (n.memory) {
        if (!in_unit_interval(n.memory->efficiency_eta0)) flag("efficiency_eta0 out of [0,1]");
        if (n.memory->lifetime_tau_s <= 0.0) flag("lifetime_tau_s must be > 0");
        if (n.memory->cutoff_s <= 0.0) flag("cutoff_s must be > 0");
    }
    if (n.telescope_aperture_m && *n.telescope_aperture_m <= 0.0)
        flag("telescope_aperture_m must be > 0");
}

void check_link(const Link& l, const Network& net, double max_downlink_penalty_db,
                std::vector<std::string>& out) {
    auto flag = [&](const std::string& msg) { out.push_back("link " + l.label() + ": " + msg); };

    if (l.a == l.b) flag("endpoints must differ");
    const Node* na = net.find_node(l.a);
    const Node* nb = net.find_node(l.b);
    if (!na) flag("endpoint " + l.a + " not in network");
    if (!nb) flag("endpoint " + l.b + " not in network");
    if (!na || !nb) return;

    switch (l.channel.kind) {
        case LinkKind::Fiber:
            if (!is_ground_kind(na->kind) || !is_ground_kind(nb->kind))
                flag("fiber requires ground endpoints");
            if (!l.static_length_km)
                flag("fiber link missing static_length_km");
            else if (*l.static_length_km <= 0.0)
                flag("static_length_km must be > 0");
            break;
        case LinkKind::Downlink:
            if (!is_satellite_kind(na->kind)) flag("downlink source endpoint must be a satellite");
            if (!is_ground_kind(nb->kind)) flag("downlink receive endpoint must be on ground");
            break;
        case LinkKind::Uplink:
            if (!is_ground_kind(na->kind)) flag("uplink source endpoint must be on ground");
            if (!is_satellite_kind(nb->kind)) flag("uplink receive endpoint must be a satellite");
            if (l.channel.atmospheric_penalty_db < max_downlink_penalty_db)
                flag("uplink atmospheric_penalty_db below the network's downlink penalty");
            break;
        case LinkKind::Qoisl:
            if (!is_satellite_kind(na->kind) || !is_satellite_kind(nb->kind))
                flag("Qoisl requires satellite endpoints");
            if (l.channel.atmospheric_penalty_db != 0.0)
                flag("qoisl atmospheric_penalty_db must be 0");
            break;
    }

    if (l.channel.fiber_alpha_db_per_km < 0.0) flag("fiber_alpha_db_per_km must be >= 0");
    if (l.channel.kind != LinkKind::Fiber) {
        if (l.channel.wavelength_m <= 0.0) flag("wavelength_m must be > 0");
        if (l.channel.tx_aperture_m <= 0.0) flag("tx_aperture_m must be > 0");
        if (l.channel.rx_aperture_m <= 0.0) flag("rx_aperture_m must be > 0");
    }
    if (l.channel.atmospheric_penalty_db < 0.0) flag("atmospheric_penalty_db must be >= 0");
    if (l.channel.pointing_loss_db < 0.0) flag("pointing_loss_db must be >= 0");
    if (l.channel.system_loss_db < 0.0) flag("system_loss_db must be >= 0");
    if (!in_unit_interval(l.channel.detector_efficiency))
        flag("detector_efficiency out of [0,1]");
}

void check_connectivity(const Network& net, std::vector<std::string>& out) {
    if (net.nodes.size() < 2) return;
    std::map<NodeId, std::set<NodeId>> adj;
    for (const auto& l : net.links) {
        if (net.find_node(l.a) && net.find_node(l.b)) {
            adj[l.a].insert(l.b);
            adj[l.b].insert(l.a);
        }
    }
    std::set<NodeId> seen;
    std::queue<NodeId> frontier;
    frontier.push(net.nodes.front().id);
    seen.insert(net.nodes.front().id);
    while (!frontier.empty()) {
        NodeId cur = frontier.front();
        frontier.pop();
        for (const auto& next : adj[cur]) {
            if (seen.insert(next).second) frontier.push(next);
        }
    }
    for (const auto& n : net.nodes) {
        if (!seen.count(n.id))
            out.push_back("network: node " + n.id + " unreachable from " + net.nodes.front().id);
    }
}

}  // namespace

std::vector<std::string> validate_network(const Network& network) {
    std::vector<std::string> out;

    std::set<NodeId> ids;
    for (const auto& n : network.nodes) {
        if (!ids.insert(n.id).second) out.push_back("node " + n.id + ": duplicate id");
        check_node(n, out);
    }

    if (network.classical_heralding_latency_s < 0.0)
        out.push_back("network: classical_heralding_latency_s must be >= 0");

    double max_downlink_penalty_db = 0.0;
    for (const auto& l : network.links) {
        if (l.channel.kind == LinkKind::Downlink)
            max_downlink_penalty_db =
                std::max(max_downlink_penalty_db, l.channel.atmospheric_penalty_db);
    }
    for (const auto& l : network.links) check_link(l, network, max_downlink_penalty_db, out);

    check_connectivity(network, out);

    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace qinsim
