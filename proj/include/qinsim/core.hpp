#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

// Core domain types shared by every other module: nodes, links, equipment
// parameters, the network graph, and scenario identity.

namespace qinsim {

using NodeId = std::string;

// What a node is and which equipment it is expected to carry.
// SatelliteHybrid carries both a source and a BSM; a GroundUser may hold a
// memory but never a source or a BSM.
enum class NodeKind {
    GroundUser,
    GroundSource,
    GroundRepeater,
    SatelliteSource,
    SatelliteRepeater,
    SatelliteHybrid,
};

bool is_ground_kind(NodeKind kind);
bool is_satellite_kind(NodeKind kind);
const char* to_string(NodeKind kind);
std::optional<NodeKind> node_kind_from_string(const std::string& name);

// Entangled photon source module.
struct EpsParams {
    double pair_rate_hz = 1e10;         // emission attempts per second
    double heralding_efficiency = 1.0;  // in [0,1]
};

// Bell state measurement module. success_prob_q is capped at the 0.5
// linear-optics bound; indistinguishability_v multiplies it.
struct BsmParams {
    double success_prob_q = 0.5;
    double indistinguishability_v = 1.0;
    double coincidence_window_ps = 100.0;
};

// Quantum memory: retrieval efficiency eta0 * exp(-dt/tau), hard discard
// at cutoff_s (may be infinite).
struct MemoryParams {
    double efficiency_eta0 = 1.0;
    double lifetime_tau_s = std::numeric_limits<double>::infinity();
    double cutoff_s = std::numeric_limits<double>::infinity();

    double retrieval_efficiency(double storage_time_s) const;
};

// Geodetic ground station position (spherical Earth; altitude added radially).
struct GroundSite {
    double latitude_deg = 0.0;   // [-90, 90]
    double longitude_deg = 0.0;  // [-180, 180]
    double altitude_m = 0.0;
};

// Circular orbit only. Angles in degrees; epoch_s anchors initial_anomaly_deg.
struct Orbit {
    double altitude_km = 600.0;
    double inclination_deg = 0.0;     // [0, 180]
    double raan_deg = 0.0;            // [0, 360)
    double initial_anomaly_deg = 0.0; // [0, 360)
    double epoch_s = 0.0;
};

struct Node {
    NodeId id;
    NodeKind kind = NodeKind::GroundUser;
    std::optional<GroundSite> site;    // ground nodes only
    std::optional<Orbit> orbit_ref;    // satellite nodes only
    std::optional<EpsParams> eps;
    std::optional<BsmParams> bsm;
    std::optional<MemoryParams> memory;
    std::optional<double> telescope_aperture_m;
};

enum class LinkKind { Fiber, Downlink, Uplink, Qoisl };

const char* to_string(LinkKind kind);
std::optional<LinkKind> link_kind_from_string(const std::string& name);

// Everything needed to turn a link plus geometry into a per-photon success
// probability. atmospheric_penalty_db is ignored (forced to 0) for Qoisl
// and meaningless for Fiber.
struct ChannelParams {
    LinkKind kind = LinkKind::Fiber;
    double fiber_alpha_db_per_km = 0.2;  // Fiber only
    double wavelength_m = 1550e-9;       // optical kinds
    double tx_aperture_m = 0.3;          // optical kinds
    double rx_aperture_m = 0.3;          // optical kinds
    double atmospheric_penalty_db = 0.0;
    double pointing_loss_db = 0.0;
    double system_loss_db = 0.0;
    double detector_efficiency = 1.0;
};

// Directed for channel semantics: `a` transmits, `b` receives. A Downlink
// therefore has a satellite at `a`; an Uplink has ground at `a`.
struct Link {
    NodeId a;
    NodeId b;
    ChannelParams channel;
    std::optional<double> static_length_km;  // Fiber only, required there

    std::string label() const { return a + "-" + b; }
};

struct Network {
    std::vector<Node> nodes;
    std::vector<Link> links;
    double classical_heralding_latency_s = 0.0;

    const Node* find_node(const NodeId& id) const;
};

enum class ScenarioId { S1a, S1b, S1c, S1d, S2, S3a, S3b, S4 };

const char* to_string(ScenarioId id);
std::optional<ScenarioId> scenario_id_from_string(const std::string& name);
std::vector<ScenarioId> all_scenario_ids();

// Returns every invariant violation found, as human-readable strings,
// lexicographically sorted so the result is independent of node/link order.
// Empty means the network is simulatable. Violations are data, not errors.
std::vector<std::string> validate_network(const Network& network);

}  // namespace qinsim
