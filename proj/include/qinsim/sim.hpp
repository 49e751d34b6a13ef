#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qinsim/core.hpp"
#include "qinsim/swapchain.hpp"

// Seeded, slotted Monte Carlo of entanglement distribution over a Network:
// per-slot pair-generation attempts, memory storage/decay/cutoff, BSM firing
// per SwapSchedule, and pass-window gating of optical links.
//
// Slot procedure (all randomness from one seeded mt19937_64; draw order is
// the documented total order):
//   1. expire stored photons older than their memory cutoff (no-memory
//      photons survive only their birth slot),
//   2. sample geometry, emit pass transitions,
//   3. pair-generation attempts, segments in ascending index order,
//   4. BSM pass: schedule rounds in order, nodes ascending within a round,
//   5. end-to-end check.
// Ties inside a slot are broken by that step order, then by segment/node
// index. One pass per slot through the rounds.

namespace qinsim {

struct SimConfig {
    double duration_s = 1.0;
    double slot_s = 0.0;  // 0 = derive as 1/pair_rate of the slowest bound source
    std::uint64_t seed = 0;
    double time_origin_s = 0.0;  // maps slot 0 to orbit epoch time
    std::size_t max_events = 0;  // event-log cap; 0 disables the log
};

// One elementary entangled pair spanning two adjacent chain nodes. The
// source's pair is delivered over the listed network links (a hop the spec
// leaves on-node is simply absent from the list).
struct BoundSegment {
    NodeId source;
    std::vector<std::size_t> link_indices;
};

// A ChainConfig bound to network nodes: chain_nodes[0] and chain_nodes[N]
// are the end users, the interior nodes carry the BSMs.
struct BoundChain {
    std::vector<NodeId> chain_nodes;     // N+1 node ids
    std::vector<BoundSegment> segments;  // N segments
    SwapSchedule schedule;               // partitions {1..N-1}
    double elevation_mask_deg = 0.0;     // gate for satellite-ground links
};

enum class SimEventKind {
    PairGenerated,
    PhotonStored,
    MemoryExpired,
    BsmFired,
    PassStart,
    PassEnd,
    EndToEndEntanglement,
};

const char* to_string(SimEventKind kind);

struct SimEvent {
    double time_s = 0.0;
    SimEventKind kind = SimEventKind::PairGenerated;
    std::string subject;        // node id, link label, or segment label
    bool success = false;       // BsmFired only
    double latency_s = 0.0;     // EndToEndEntanglement only

    bool operator==(const SimEvent&) const = default;
};

struct LinkStats {
    std::string link;
    std::uint64_t attempts = 0;
    std::uint64_t successes = 0;

    bool operator==(const LinkStats&) const = default;
};

struct SimResult {
    std::uint64_t e2e_successes = 0;
    double e2e_rate_hz = 0.0;  // successes / duration_s
    double mean_latency_s = 0.0;
    std::vector<LinkStats> per_link;
    double active_time_s = 0.0;  // time with every required link in visibility
    double duration_s = 0.0;
    std::uint64_t slots = 0;
    double max_storage_age_used_s = 0.0;  // oldest photon age consumed by a BSM
    std::vector<SimEvent> event_log;
    std::uint64_t dropped_events = 0;

    bool operator==(const SimResult&) const = default;
};

// Runs one seeded simulation. Throws std::invalid_argument on unbound
// segments, schedule/node mismatches, zero duration, or a slot shorter than
// a memoryless BSM node's coincidence window.
SimResult run_simulation(const Network& network, const BoundChain& chain,
                         const SimConfig& sim);

struct RateEstimate {
    double mean_rate_hz = 0.0;
    double stderr_hz = 0.0;
    std::vector<double> batch_rates_hz;
    double mean_active_fraction = 0.0;
};

// Runs `batches` simulations with seeds seed+0..batches-1 and reports the
// sample mean and standard error of e2e_rate_hz.
RateEstimate estimate_rate(const Network& network, const BoundChain& chain,
                           const SimConfig& sim, int batches);

// Homogeneous fiber chain generator for distance sweeps: alpha dB/km over
// equal segments, one BSM between neighbours, optional memories everywhere.
struct ChainTemplate {
    double alpha_db_per_km = 0.2;
    double source_rate_hz = 1.0;
    double heralding_efficiency = 1.0;
    BsmParams bsm;
    std::optional<MemoryParams> memory;
    double segment_length_km = 0.0;  // 0 = direct transmission (N = 1)
    double extra_loss_db_per_segment = 0.0;
    SwapStrategy strategy = SwapStrategy::Balanced;

    int n_segments_for(double distance_km) const;
};

struct BuiltChain {
    Network network;
    BoundChain chain;
    ChainConfig analytic;  // the matching closed-form chain
};

// Materializes the template at one total distance as a validating Network
// plus bound chain (ground fiber chain; sources at the left node of each
// segment).
BuiltChain build_fiber_chain(const ChainTemplate& tmpl, double distance_km);

enum class RateMode { Analytic, Simulated };

struct SweepRow {
    double distance_km = 0.0;
    double rate_hz = 0.0;
    double stderr_hz = 0.0;
};

// One rate estimate per distance; Analytic evaluates memoryless_rate_hz
// exactly (stderr 0), Simulated Monte-Carlos the bound chain. Output feeds
// classify_scaling.
std::vector<SweepRow> sweep_distance(const ChainTemplate& tmpl,
                                     const std::vector<double>& distances_km,
                                     const SimConfig& sim, RateMode mode, int batches);

}  // namespace qinsim
