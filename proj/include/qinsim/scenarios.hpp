#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qinsim/core.hpp"
#include "qinsim/sim.hpp"

// Builders for the eight satellite/ground architecture scenarios plus the
// encoded trade-off metadata and the scenario comparison report.

namespace qinsim {

// Scored trade-off metadata. Scenarios without published scores carry no
// numbers and a "not scored" note instead.
struct TradeoffRecord {
    ScenarioId scenario = ScenarioId::S1b;
    std::string description;
    std::optional<int> complexity_1to5;
    std::optional<int> interest_1to5;
    std::vector<std::string> pros;
    std::vector<std::string> cons;
    std::string note;  // nonempty iff unscored

    bool scored() const { return complexity_1to5.has_value(); }
};

// Per-link-kind channel defaults used by the builders.
struct ChannelDefaults {
    double wavelength_m = 1550e-9;
    double space_aperture_m = 0.3;   // placeholder terminal sizes, configurable
    double ground_aperture_m = 1.0;
    double downlink_atmospheric_db = 3.0;
    double uplink_atmospheric_db = 10.0;
    double pointing_loss_db = 0.0;
    double system_loss_db = 0.0;
    double detector_efficiency = 1.0;
    double fiber_alpha_db_per_km = 0.2;

    ChannelParams make(LinkKind kind) const;
};

struct NodeOverride {
    std::optional<EpsParams> eps;
    std::optional<BsmParams> bsm;
    std::optional<MemoryParams> memory;
    std::optional<double> telescope_aperture_m;
};

struct ScenarioParams {
    GroundSite site_a{0.0, -3.0, 0.0};
    GroundSite site_b{0.0, 3.0, 0.0};
    std::vector<Orbit> orbits;  // interpretation per scenario, see README
    std::optional<EpsParams> eps = EpsParams{};
    std::optional<BsmParams> bsm = BsmParams{};
    std::optional<MemoryParams> memory = MemoryParams{};
    ChannelDefaults channels;
    double elevation_mask_deg = 10.0;
    double fiber_length_km = 50.0;  // S1c ground span
    double classical_heralding_latency_s = 0.0;
    bool integrated_payload = true;  // S4 metadata
    std::map<NodeId, NodeOverride> node_overrides;
};

ScenarioParams default_scenario_params();

struct BuiltScenario {
    ScenarioId id = ScenarioId::S1b;
    Network network;
    BoundChain chain;
    std::string notes;
};

// Materializes one scenario as a validating Network plus bound chain whose
// node kinds, link kinds, and equipment match the scenario topology.
// Throws std::invalid_argument on wrong satellite counts, missing equipment,
// or an S1b user separation beyond the dual-visibility bound.
BuiltScenario build_scenario(ScenarioId id, const ScenarioParams& params);

// The full scenario catalog with trade-off scores for the five scored
// scenarios and "not scored" flags for the rest.
std::vector<TradeoffRecord> tradeoff_table();

const TradeoffRecord& tradeoff_record(ScenarioId id);

struct CompareRow {
    ScenarioId scenario = ScenarioId::S1b;
    double rate_hz = 0.0;
    double stderr_hz = 0.0;
    double active_fraction = 0.0;
    std::optional<int> complexity_1to5;
    std::optional<int> interest_1to5;
    std::string note;
};

// One estimate_rate per scenario under identical params; rows sorted by
// simulated rate descending, trade-off metadata joined.
std::vector<CompareRow> compare_scenarios(const std::vector<ScenarioId>& ids,
                                          const ScenarioParams& params, const SimConfig& sim,
                                          int batches);

}  // namespace qinsim
