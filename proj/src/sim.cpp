#include "qinsim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "qinsim/linkbudget.hpp"
#include "qinsim/orbit.hpp"

namespace qinsim {

const char* to_string(SimEventKind kind) {
    switch (kind) {
        case SimEventKind::PairGenerated: return "pair_generated";
        case SimEventKind::PhotonStored: return "photon_stored";
        case SimEventKind::MemoryExpired: return "memory_expired";
        case SimEventKind::BsmFired: return "bsm_fired";
        case SimEventKind::PassStart: return "pass_start";
        case SimEventKind::PassEnd: return "pass_end";
        case SimEventKind::EndToEndEntanglement: return "end_to_end_entanglement";
    }
    return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Per-link dynamic-geometry handle, resolved once at setup.
struct LinkRuntime {
    const Link* link = nullptr;
    bool dynamic = false;            // needs per-slot geometry
    double static_transmittance = 1.0;
    const Orbit* orbit_a = nullptr;  // satellite end(s)
    const Orbit* orbit_b = nullptr;
    const GroundSite* site = nullptr;  // ground end for up/down links
    bool visible = false;
    bool visible_known = false;
    std::uint64_t attempts = 0;
    std::uint64_t successes = 0;
};

struct SegmentRuntime {
    double heralding = 1.0;
    std::vector<std::size_t> links;  // indices into the LinkRuntime table
    std::string label;
};

// One side of a chain node's storage: cutoff and decay for photons parked
// there. Nodes without memory get cutoff 0 (same-slot use only) and no
// retrieval penalty.
struct NodeRuntime {
    NodeId id;
    std::optional<MemoryParams> memory;
    std::optional<BsmParams> bsm;

    double cutoff_s() const { return memory ? memory->cutoff_s : 0.0; }
    double retrieval(double age_s) const {
        return memory ? memory->retrieval_efficiency(age_s) : 1.0;
    }
};

// A live entanglement resource spanning chain nodes [left, right]. Slot
// indices (not times) keep age arithmetic exact.
struct LiveLink {
    int left = 0;
    int right = 0;
    std::int64_t born_slot = 0;          // earliest contributing generation
    std::int64_t left_stored_slot = 0;   // arrival of the photon at `left`
    std::int64_t right_stored_slot = 0;  // arrival of the photon at `right`
};

struct EventSink {
    std::vector<SimEvent>* log = nullptr;
    std::size_t cap = 0;
    std::uint64_t dropped = 0;

    void push(double t, SimEventKind kind, std::string subject, bool success = false,
              double latency = 0.0) {
        if (!log) return;
        if (log->size() < cap)
            log->push_back({t, kind, std::move(subject), success, latency});
        else
            ++dropped;
    }
};

double link_transmittance_static(const Link& l) {
    return channel_transmittance(l.channel, PathGeometry::fiber_length_km(*l.static_length_km))
        .value();
}

}  // namespace

SimResult run_simulation(const Network& network, const BoundChain& chain,
                         const SimConfig& sim) {
    // --- validation ------------------------------------------------------
    {
        auto violations = validate_network(network);
        if (!violations.empty())
            throw std::invalid_argument("network does not validate: " + violations.front());
    }
    const int n_chain_nodes = static_cast<int>(chain.chain_nodes.size());
    if (n_chain_nodes < 2) throw std::invalid_argument("chain needs at least two nodes");
    const int n_segments = n_chain_nodes - 1;
    if (chain.segments.size() != static_cast<std::size_t>(n_segments))
        throw std::invalid_argument("segment count must equal chain node count minus one");
    if (!(sim.duration_s > 0.0)) throw std::invalid_argument("duration_s must be > 0");

    std::vector<NodeRuntime> nodes;
    for (int k = 0; k < n_chain_nodes; ++k) {
        const Node* n = network.find_node(chain.chain_nodes[k]);
        if (!n)
            throw std::invalid_argument("chain node " + chain.chain_nodes[k] +
                                        " not in network");
        const bool interior = k > 0 && k < n_chain_nodes - 1;
        if (interior && !n->bsm)
            throw std::invalid_argument("chain node " + n->id + " needs bsm params");
        nodes.push_back({n->id, n->memory, n->bsm});
    }

    double slowest_rate_hz = kInf;
    std::vector<SegmentRuntime> segments;
    std::vector<LinkRuntime> link_table;
    std::vector<std::size_t> link_table_index(network.links.size(), SIZE_MAX);

    auto intern_link = [&](std::size_t idx) {
        if (idx >= network.links.size())
            throw std::invalid_argument("segment references unknown link index");
        if (link_table_index[idx] != SIZE_MAX) return link_table_index[idx];
        const Link& l = network.links[idx];
        LinkRuntime rt;
        rt.link = &l;
        const Node* na = network.find_node(l.a);
        const Node* nb = network.find_node(l.b);
        switch (l.channel.kind) {
            case LinkKind::Fiber:
                rt.dynamic = false;
                rt.static_transmittance = link_transmittance_static(l);
                break;
            case LinkKind::Downlink:
                rt.dynamic = true;
                rt.orbit_a = &*na->orbit_ref;
                rt.site = &*nb->site;
                break;
            case LinkKind::Uplink:
                rt.dynamic = true;
                rt.orbit_a = &*nb->orbit_ref;
                rt.site = &*na->site;
                break;
            case LinkKind::Qoisl:
                rt.dynamic = true;
                rt.orbit_a = &*na->orbit_ref;
                rt.orbit_b = &*nb->orbit_ref;
                break;
        }
        link_table.push_back(rt);
        link_table_index[idx] = link_table.size() - 1;
        return link_table_index[idx];
    };

    for (int s = 0; s < n_segments; ++s) {
        const BoundSegment& bs = chain.segments[s];
        const Node* src = network.find_node(bs.source);
        if (!src || !src->eps)
            throw std::invalid_argument("segment " + std::to_string(s + 1) +
                                        " source missing or without eps");
        SegmentRuntime rt;
        rt.heralding = src->eps->heralding_efficiency;
        rt.label = "seg" + std::to_string(s + 1);
        for (std::size_t idx : bs.link_indices) rt.links.push_back(intern_link(idx));
        segments.push_back(rt);
        slowest_rate_hz = std::min(slowest_rate_hz, src->eps->pair_rate_hz);
    }

    // Schedule must hit every interior node exactly once.
    {
        std::vector<int> seen(static_cast<std::size_t>(n_segments), 0);
        for (const auto& round : chain.schedule.rounds)
            for (int k : round) {
                if (k < 1 || k > n_segments - 1)
                    throw std::invalid_argument("schedule index " + std::to_string(k) +
                                                " out of range");
                ++seen[static_cast<std::size_t>(k)];
            }
        for (int k = 1; k <= n_segments - 1; ++k)
            if (seen[static_cast<std::size_t>(k)] != 1)
                throw std::invalid_argument("schedule must cover each BSM index exactly once");
    }

    double slot_s = sim.slot_s;
    if (slot_s == 0.0) slot_s = 1.0 / slowest_rate_hz;
    if (!(slot_s > 0.0)) throw std::invalid_argument("slot_s must be > 0");

    // Memoryless BSM nodes rely on same-slot coincidence; the slot must not
    // be finer than their coincidence window.
    for (int k = 1; k < n_chain_nodes - 1; ++k) {
        if (!nodes[k].memory && slot_s < nodes[k].bsm->coincidence_window_ps * 1e-12)
            throw std::invalid_argument(
                "slot_s shorter than the coincidence window of memoryless node " +
                nodes[k].id);
    }

    const std::uint64_t total_slots =
        static_cast<std::uint64_t>(std::llround(sim.duration_s / slot_s));
    if (total_slots == 0) throw std::invalid_argument("duration shorter than one slot");

    // --- state -----------------------------------------------------------
    std::mt19937_64 rng(sim.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    SimResult result;
    result.duration_s = sim.duration_s;
    result.slots = total_slots;

    std::vector<SimEvent> log;
    EventSink events;
    if (sim.max_events > 0) {
        events.log = &log;
        events.cap = sim.max_events;
    }

    std::vector<LiveLink> live;  // kept sorted by left endpoint
    auto insert_link = [&](LiveLink l) {
        live.insert(std::upper_bound(live.begin(), live.end(), l,
                                     [](const LiveLink& a, const LiveLink& b) {
                                         return a.left < b.left;
                                     }),
                    l);
    };
    auto side_occupied = [&](int node, bool right_side) {
        for (const auto& l : live) {
            if (right_side && l.left == node) return true;
            if (!right_side && l.right == node) return true;
        }
        return false;
    };

    double latency_sum = 0.0;
    std::uint64_t active_slots = 0;
    std::vector<double> seg_p(segments.size(), 0.0);
    std::vector<bool> seg_active(segments.size(), false);

    // --- slot loop ---------------------------------------------------------
    for (std::uint64_t slot = 0; slot < total_slots; ++slot) {
        const double t = sim.time_origin_s + static_cast<double>(slot) * slot_s;

        // 1. expiry
        for (std::size_t i = 0; i < live.size();) {
            const LiveLink& l = live[i];
            const double age_left =
                static_cast<double>(static_cast<std::int64_t>(slot) - l.left_stored_slot) *
                slot_s;
            const double age_right =
                static_cast<double>(static_cast<std::int64_t>(slot) - l.right_stored_slot) *
                slot_s;
            const bool left_dead = age_left > nodes[l.left].cutoff_s();
            const bool right_dead = age_right > nodes[l.right].cutoff_s();
            if (left_dead || right_dead) {
                if (left_dead)
                    events.push(t, SimEventKind::MemoryExpired, nodes[l.left].id);
                if (right_dead)
                    events.push(t, SimEventKind::MemoryExpired, nodes[l.right].id);
                live.erase(live.begin() + static_cast<std::ptrdiff_t>(i));
            } else {
                ++i;
            }
        }

        // 2. geometry and pass transitions
        bool all_visible = true;
        for (auto& rt : link_table) {
            if (!rt.dynamic) continue;
            bool vis;
            double transmittance = 0.0;
            if (rt.link->channel.kind == LinkKind::Qoisl) {
                vis = intersatellite_line_of_sight(*rt.orbit_a, *rt.orbit_b, t);
                if (vis) {
                    const double range =
                        (propagate_eci_km(*rt.orbit_a, t) - propagate_eci_km(*rt.orbit_b, t))
                            .norm();
                    transmittance = channel_transmittance(
                                        rt.link->channel,
                                        PathGeometry::free_space_range_km(range))
                                        .value();
                }
            } else {
                vis = elevation_deg(*rt.orbit_a, *rt.site, t) >= chain.elevation_mask_deg;
                if (vis) {
                    const double range = slant_range_km(*rt.orbit_a, *rt.site, t);
                    transmittance = channel_transmittance(
                                        rt.link->channel,
                                        PathGeometry::free_space_range_km(range))
                                        .value();
                }
            }
            if (!rt.visible_known || vis != rt.visible)
                events.push(t, vis ? SimEventKind::PassStart : SimEventKind::PassEnd,
                            rt.link->label());
            rt.visible = vis;
            rt.visible_known = true;
            rt.static_transmittance = transmittance;  // valid for this slot
            all_visible = all_visible && vis;
        }
        if (all_visible) ++active_slots;

        for (std::size_t s = 0; s < segments.size(); ++s) {
            double p = segments[s].heralding;
            bool active = true;
            for (std::size_t li : segments[s].links) {
                const auto& rt = link_table[li];
                if (rt.dynamic && !rt.visible) active = false;
                p *= rt.static_transmittance;
            }
            seg_active[s] = active;
            seg_p[s] = p;
        }

        // 3. pair-generation attempts
        for (std::size_t s = 0; s < segments.size(); ++s) {
            if (!seg_active[s]) continue;
            const int left = static_cast<int>(s);
            const int right = left + 1;
            if (side_occupied(left, true) || side_occupied(right, false)) continue;
            for (std::size_t li : segments[s].links) ++link_table[li].attempts;
            if (unit(rng) < seg_p[s]) {
                for (std::size_t li : segments[s].links) ++link_table[li].successes;
                insert_link({left, right, static_cast<std::int64_t>(slot),
                             static_cast<std::int64_t>(slot),
                             static_cast<std::int64_t>(slot)});
                events.push(t, SimEventKind::PairGenerated, segments[s].label);
                if (nodes[left].memory)
                    events.push(t, SimEventKind::PhotonStored, nodes[left].id);
                if (nodes[right].memory)
                    events.push(t, SimEventKind::PhotonStored, nodes[right].id);
            }
        }

        // 4. BSM pass: one sweep through the rounds, nodes ascending
        for (const auto& round : chain.schedule.rounds) {
            std::vector<int> order(round);
            std::sort(order.begin(), order.end());
            for (int k : order) {
                auto left_it = live.end();
                auto right_it = live.end();
                for (auto it = live.begin(); it != live.end(); ++it) {
                    if (it->right == k) left_it = it;
                    if (it->left == k) right_it = it;
                }
                if (left_it == live.end() || right_it == live.end()) continue;

                const double age_l =
                    static_cast<double>(static_cast<std::int64_t>(slot) -
                                        left_it->right_stored_slot) *
                    slot_s;
                const double age_r =
                    static_cast<double>(static_cast<std::int64_t>(slot) -
                                        right_it->left_stored_slot) *
                    slot_s;
                const BsmParams& bsm = *nodes[k].bsm;
                const double p_swap = bsm.success_prob_q * bsm.indistinguishability_v *
                                      nodes[k].retrieval(age_l) * nodes[k].retrieval(age_r);
                result.max_storage_age_used_s =
                    std::max({result.max_storage_age_used_s, age_l, age_r});

                const bool ok = unit(rng) < p_swap;
                events.push(t, SimEventKind::BsmFired, nodes[k].id, ok);
                LiveLink merged{left_it->left, right_it->right,
                                std::min(left_it->born_slot, right_it->born_slot),
                                left_it->left_stored_slot, right_it->right_stored_slot};
                // erase the higher iterator first
                if (left_it > right_it) std::swap(left_it, right_it);
                live.erase(right_it);
                live.erase(left_it);
                if (ok) insert_link(merged);
            }
        }

        // 5. end-to-end check
        for (auto it = live.begin(); it != live.end(); ++it) {
            if (it->left == 0 && it->right == n_segments) {
                const double latency =
                    static_cast<double>(static_cast<std::int64_t>(slot) - it->born_slot) *
                        slot_s +
                    network.classical_heralding_latency_s;
                ++result.e2e_successes;
                latency_sum += latency;
                events.push(t, SimEventKind::EndToEndEntanglement, "e2e", true, latency);
                live.erase(it);
                break;
            }
        }
    }

    result.e2e_rate_hz = static_cast<double>(result.e2e_successes) / sim.duration_s;
    result.mean_latency_s =
        result.e2e_successes ? latency_sum / static_cast<double>(result.e2e_successes) : 0.0;
    result.active_time_s = static_cast<double>(active_slots) * slot_s;
    for (const auto& rt : link_table)
        result.per_link.push_back({rt.link->label(), rt.attempts, rt.successes});
    result.event_log = std::move(log);
    result.dropped_events = events.dropped;
    return result;
}

RateEstimate estimate_rate(const Network& network, const BoundChain& chain,
                           const SimConfig& sim, int batches) {
    if (batches < 2) throw std::invalid_argument("batches must be >= 2");
    RateEstimate est;
    double active_sum = 0.0;
    for (int b = 0; b < batches; ++b) {
        SimConfig batch_cfg = sim;
        batch_cfg.seed = sim.seed + static_cast<std::uint64_t>(b);
        batch_cfg.max_events = 0;
        const SimResult r = run_simulation(network, chain, batch_cfg);
        est.batch_rates_hz.push_back(r.e2e_rate_hz);
        active_sum += r.active_time_s / r.duration_s;
    }
    double sum = 0.0;
    for (double r : est.batch_rates_hz) sum += r;
    est.mean_rate_hz = sum / batches;
    double ss = 0.0;
    for (double r : est.batch_rates_hz)
        ss += (r - est.mean_rate_hz) * (r - est.mean_rate_hz);
    est.stderr_hz = std::sqrt(ss / (batches - 1)) / std::sqrt(static_cast<double>(batches));
    est.mean_active_fraction = active_sum / batches;
    return est;
}

int ChainTemplate::n_segments_for(double distance_km) const {
    if (segment_length_km <= 0.0) return 1;
    return std::max(1, static_cast<int>(std::llround(distance_km / segment_length_km)));
}

BuiltChain build_fiber_chain(const ChainTemplate& tmpl, double distance_km) {
    if (distance_km <= 0.0) throw std::invalid_argument("distance_km must be > 0");
    const int n = tmpl.n_segments_for(distance_km);
    const std::vector<double> lengths = segment_chain(distance_km, n);

    EpsParams eps{tmpl.source_rate_hz, tmpl.heralding_efficiency};

    BuiltChain built;
    for (int k = 0; k <= n; ++k) {
        Node node;
        node.id = "n" + std::to_string(k);
        node.site = GroundSite{0.0, 0.02 * k, 0.0};
        node.memory = tmpl.memory;
        if (k == 0) {
            node.kind = NodeKind::GroundSource;
            node.eps = eps;
        } else if (k == n) {
            node.kind = NodeKind::GroundUser;
        } else {
            node.kind = NodeKind::GroundRepeater;
            node.bsm = tmpl.bsm;
            node.eps = eps;
        }
        built.network.nodes.push_back(node);
        built.chain.chain_nodes.push_back(node.id);
    }
    for (int k = 0; k < n; ++k) {
        Link link;
        link.a = "n" + std::to_string(k);
        link.b = "n" + std::to_string(k + 1);
        link.channel.kind = LinkKind::Fiber;
        link.channel.fiber_alpha_db_per_km = tmpl.alpha_db_per_km;
        link.channel.system_loss_db = tmpl.extra_loss_db_per_segment;
        link.static_length_km = lengths[static_cast<std::size_t>(k)];
        built.network.links.push_back(link);
        built.chain.segments.push_back(
            {"n" + std::to_string(k), {static_cast<std::size_t>(k)}});
    }
    if (n > 1) built.chain.schedule = build_swap_schedule(n - 1, tmpl.strategy);

    built.analytic.n_segments = n;
    for (int k = 0; k < n; ++k) {
        const double t = tmpl.heralding_efficiency *
                         fiber_transmittance(lengths[static_cast<std::size_t>(k)],
                                             tmpl.alpha_db_per_km)
                             .value() *
                         db_to_transmittance(tmpl.extra_loss_db_per_segment).value();
        built.analytic.per_segment_transmittance.push_back(Transmittance(t));
    }
    built.analytic.bsm = tmpl.bsm;
    built.analytic.memory = tmpl.memory;
    built.analytic.source_attempt_rate_hz = tmpl.source_rate_hz;
    return built;
}

std::vector<SweepRow> sweep_distance(const ChainTemplate& tmpl,
                                     const std::vector<double>& distances_km,
                                     const SimConfig& sim, RateMode mode, int batches) {
    if (distances_km.empty()) throw std::invalid_argument("distances must be nonempty");
    for (std::size_t i = 1; i < distances_km.size(); ++i)
        if (distances_km[i] <= distances_km[i - 1])
            throw std::invalid_argument("distances must be strictly increasing");

    std::vector<SweepRow> rows;
    for (double d : distances_km) {
        const BuiltChain built = build_fiber_chain(tmpl, d);
        SweepRow row;
        row.distance_km = d;
        if (mode == RateMode::Analytic) {
            row.rate_hz = memoryless_rate_hz(built.analytic);
            row.stderr_hz = 0.0;
        } else {
            const RateEstimate est = estimate_rate(built.network, built.chain, sim, batches);
            row.rate_hz = est.mean_rate_hz;
            row.stderr_hz = est.stderr_hz;
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace qinsim
