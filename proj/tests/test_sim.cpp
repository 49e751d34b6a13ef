#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "qinsim/linkbudget.hpp"
#include "qinsim/orbit.hpp"
#include "qinsim/sim.hpp"

using namespace qinsim;

namespace {

ChainTemplate lossless_template(double p, double q, double v, int n_for_100km = 1) {
    ChainTemplate t;
    t.alpha_db_per_km = 0.0;  // per-segment probability comes from heralding
    t.source_rate_hz = 1.0;
    t.heralding_efficiency = p;
    t.bsm.success_prob_q = q;
    t.bsm.indistinguishability_v = v;
    t.segment_length_km = n_for_100km > 1 ? 100.0 / n_for_100km : 0.0;
    return t;
}

SimConfig cfg(double slots, std::uint64_t seed, std::size_t max_events = 0) {
    SimConfig c;
    c.duration_s = slots;
    c.slot_s = 1.0;
    c.seed = seed;
    c.max_events = max_events;
    return c;
}

// --- independent expected-slots oracle -------------------------------------
// Exact Markov chain over storage occupancy for infinite-cutoff, no-decay
// memories: states are sets of live spans, transitions replay the simulator's
// slot pipeline (generate, one BSM sweep in round order, end-to-end check)
// with exact probabilities. Expected slots per end-to-end success by value
// iteration.
struct ExpectedSlotsOracle {
    int n;
    double p;
    double swap;
    std::vector<std::vector<int>> rounds;

    using State = std::vector<std::pair<int, int>>;
    std::map<State, int> index;
    std::vector<State> states;
    std::vector<std::vector<std::pair<double, int>>> transitions;  // -1 = success

    int intern(const State& s) {
        auto it = index.find(s);
        if (it != index.end()) return it->second;
        const int id = static_cast<int>(states.size());
        index.emplace(s, id);
        states.push_back(s);
        transitions.emplace_back();
        return id;
    }

    void record(int from, const State& s, double prob) {
        for (const auto& [l, r] : s) {
            if (l == 0 && r == n) {
                transitions[static_cast<std::size_t>(from)].push_back({prob, -1});
                return;
            }
        }
        State sorted = s;
        std::sort(sorted.begin(), sorted.end());
        const int next = intern(sorted);  // may reallocate `transitions`
        transitions[static_cast<std::size_t>(from)].push_back({prob, next});
    }

    void sweep(int from, State s, double prob, std::size_t round, std::size_t pos) {
        if (round == rounds.size()) {
            record(from, s, prob);
            return;
        }
        if (pos == rounds[round].size()) {
            sweep(from, std::move(s), prob, round + 1, 0);
            return;
        }
        const int k = rounds[round][pos];
        int left = -1, right = -1;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i].second == k) left = static_cast<int>(i);
            if (s[i].first == k) right = static_cast<int>(i);
        }
        if (left < 0 || right < 0) {
            sweep(from, std::move(s), prob, round, pos + 1);
            return;
        }
        const auto li = s[static_cast<std::size_t>(left)];
        const auto ri = s[static_cast<std::size_t>(right)];
        State base;
        for (std::size_t i = 0; i < s.size(); ++i)
            if (static_cast<int>(i) != left && static_cast<int>(i) != right)
                base.push_back(s[i]);
        State merged = base;
        merged.push_back({li.first, ri.second});
        sweep(from, std::move(merged), prob * swap, round, pos + 1);
        sweep(from, std::move(base), prob * (1.0 - swap), round, pos + 1);
    }

    void expand(int id) {
        const State s = states[static_cast<std::size_t>(id)];
        std::vector<int> free;
        for (int k = 0; k < n; ++k) {
            bool blocked = false;
            for (const auto& [l, r] : s)
                if (l == k || r == k + 1) blocked = true;
            if (!blocked) free.push_back(k);
        }
        for (int mask = 0; mask < (1 << free.size()); ++mask) {
            double prob = 1.0;
            State next = s;
            for (std::size_t i = 0; i < free.size(); ++i) {
                if (mask & (1 << i)) {
                    prob *= p;
                    next.push_back({free[i], free[i] + 1});
                } else {
                    prob *= 1.0 - p;
                }
            }
            sweep(id, std::move(next), prob, 0, 0);
        }
    }

    double expected_slots() {
        const int start = intern({});
        for (std::size_t i = 0; i < states.size(); ++i) expand(static_cast<int>(i));

        std::vector<double> e(states.size(), 0.0);
        for (int iter = 0; iter < 1000000; ++iter) {
            double delta = 0.0;
            for (std::size_t i = 0; i < states.size(); ++i) {
                double acc = 1.0;
                for (const auto& [prob, next] : transitions[i])
                    if (next >= 0) acc += prob * e[static_cast<std::size_t>(next)];
                delta = std::max(delta, std::abs(acc - e[i]));
                e[i] = acc;
            }
            if (delta < 1e-12) break;
        }
        return e[static_cast<std::size_t>(start)];
    }
};

}  // namespace

TEST_CASE("a deterministic single segment succeeds every slot") {
    const BuiltChain built = build_fiber_chain(lossless_template(1.0, 0.5, 1.0), 100.0);
    const SimResult r = run_simulation(built.network, built.chain, cfg(1000, 42));
    CHECK(r.e2e_successes == 1000);
    CHECK(r.e2e_rate_hz == doctest::Approx(1.0));
    CHECK(r.mean_latency_s == 0.0);
    REQUIRE(r.per_link.size() == 1);
    CHECK(r.per_link[0].attempts == 1000);
    CHECK(r.per_link[0].successes == 1000);
    CHECK(r.active_time_s == doctest::Approx(1000.0));
}

TEST_CASE("heralding latency is added to every success") {
    BuiltChain built = build_fiber_chain(lossless_template(1.0, 0.5, 1.0), 100.0);
    built.network.classical_heralding_latency_s = 2.5;
    const SimResult r = run_simulation(built.network, built.chain, cfg(100, 1));
    CHECK(r.mean_latency_s == doctest::Approx(2.5));
}

TEST_CASE("single-segment counts follow the binomial") {
    const BuiltChain built = build_fiber_chain(lossless_template(0.1, 0.5, 1.0), 100.0);
    const SimResult r = run_simulation(built.network, built.chain, cfg(100000, 7));
    const double sigma = std::sqrt(100000.0 * 0.1 * 0.9);
    CHECK(std::abs(static_cast<double>(r.e2e_successes) - 10000.0) <= 3.0 * sigma);
}

TEST_CASE("a memoryless N=2 chain matches the analytic per-slot probability") {
    const BuiltChain built = build_fiber_chain(lossless_template(0.1, 0.5, 1.0, 2), 100.0);
    REQUIRE(built.chain.segments.size() == 2);
    const double analytic = memoryless_rate_hz(built.analytic);
    CHECK(analytic == doctest::Approx(0.005));

    const SimResult r = run_simulation(built.network, built.chain, cfg(100000, 3));
    const double sigma = std::sqrt(0.005 * 0.995 / 100000.0);
    CHECK(std::abs(r.e2e_rate_hz - analytic) <= 3.0 * sigma);
}

TEST_CASE("estimate_rate: deterministic chains have zero standard error") {
    const BuiltChain built = build_fiber_chain(lossless_template(1.0, 0.5, 1.0), 100.0);
    const RateEstimate est = estimate_rate(built.network, built.chain, cfg(500, 9), 4);
    CHECK(est.mean_rate_hz == doctest::Approx(1.0));
    CHECK(est.stderr_hz == 0.0);
}

TEST_CASE("estimate_rate standard error shrinks with more batches") {
    const BuiltChain built = build_fiber_chain(lossless_template(0.1, 0.5, 1.0), 100.0);
    const RateEstimate few = estimate_rate(built.network, built.chain, cfg(20000, 11), 4);
    const RateEstimate many = estimate_rate(built.network, built.chain, cfg(20000, 11), 16);
    CHECK(few.stderr_hz > 0.0);
    CHECK(many.stderr_hz < few.stderr_hz);
}

TEST_CASE("estimate_rate agrees with the analytic rate for short memoryless chains") {
    for (int n : {1, 2, 3}) {
        const BuiltChain built = build_fiber_chain(lossless_template(0.2, 0.5, 1.0, n), 100.0);
        const RateEstimate est =
            estimate_rate(built.network, built.chain, cfg(50000, 100 + n), 10);
        const double analytic = memoryless_rate_hz(built.analytic);
        const double tolerance = 3.0 * est.stderr_hz + 1e-12;
        CHECK(std::abs(est.mean_rate_hz - analytic) <= tolerance);
    }
}

TEST_CASE("identical seeds reproduce results bit for bit, fresh seeds move them") {
    const BuiltChain built = build_fiber_chain(lossless_template(0.1, 0.5, 1.0, 2), 100.0);
    const SimResult a = run_simulation(built.network, built.chain, cfg(20000, 77, 100000));
    const SimResult b = run_simulation(built.network, built.chain, cfg(20000, 77, 100000));
    CHECK(a == b);

    const SimResult c = run_simulation(built.network, built.chain, cfg(20000, 78, 100000));
    CHECK(a.event_log != c.event_log);
}

TEST_CASE("memoryless conservation: every success consumes N pairs and N-1 swaps in-slot") {
    const BuiltChain built = build_fiber_chain(lossless_template(1.0, 0.5, 1.0, 2), 100.0);
    const SimResult r = run_simulation(built.network, built.chain, cfg(2000, 5, 1000000));

    std::map<double, int> pairs_at, swaps_at, e2e_at;
    std::uint64_t swap_successes = 0;
    for (const auto& ev : r.event_log) {
        if (ev.kind == SimEventKind::PairGenerated) ++pairs_at[ev.time_s];
        if (ev.kind == SimEventKind::BsmFired && ev.success) {
            ++swaps_at[ev.time_s];
            ++swap_successes;
        }
        if (ev.kind == SimEventKind::EndToEndEntanglement) ++e2e_at[ev.time_s];
    }
    CHECK(r.e2e_successes == swap_successes);  // N=2: one swap per success
    for (const auto& [t, count] : e2e_at) {
        CHECK(count == 1);
        CHECK(pairs_at[t] == 2);
        CHECK(swaps_at[t] == 1);
    }
    CHECK(r.dropped_events == 0);
}

TEST_CASE("memories raise the rate above the memoryless chain and honor the cutoff") {
    ChainTemplate with_memory = lossless_template(0.1, 0.5, 1.0, 2);
    with_memory.memory = MemoryParams{1.0, std::numeric_limits<double>::infinity(), 3.0};
    const BuiltChain mem = build_fiber_chain(with_memory, 100.0);
    const BuiltChain nomem = build_fiber_chain(lossless_template(0.1, 0.5, 1.0, 2), 100.0);

    const RateEstimate est_mem = estimate_rate(mem.network, mem.chain, cfg(30000, 21), 6);
    const RateEstimate est_nomem = estimate_rate(nomem.network, nomem.chain, cfg(30000, 21), 6);
    CHECK(est_mem.mean_rate_hz - est_nomem.mean_rate_hz >
          3.0 * (est_mem.stderr_hz + est_nomem.stderr_hz));

    const SimResult r = run_simulation(mem.network, mem.chain, cfg(30000, 22, 200000));
    CHECK(r.max_storage_age_used_s <= 3.0);
    const bool expired = std::any_of(r.event_log.begin(), r.event_log.end(),
                                     [](const SimEvent& e) {
                                         return e.kind == SimEventKind::MemoryExpired;
                                     });
    CHECK(expired);
}

TEST_CASE("memory decay lowers the swap success as stored photons age") {
    ChainTemplate decaying = lossless_template(0.25, 0.5, 1.0, 2);
    decaying.memory = MemoryParams{1.0, 2.0, 50.0};  // tau 2 slots
    ChainTemplate fresh = lossless_template(0.25, 0.5, 1.0, 2);
    fresh.memory = MemoryParams{1.0, std::numeric_limits<double>::infinity(), 50.0};
    const BuiltChain slow = build_fiber_chain(decaying, 100.0);
    const BuiltChain ideal = build_fiber_chain(fresh, 100.0);
    const RateEstimate est_slow = estimate_rate(slow.network, slow.chain, cfg(30000, 31), 6);
    const RateEstimate est_ideal = estimate_rate(ideal.network, ideal.chain, cfg(30000, 31), 6);
    CHECK(est_ideal.mean_rate_hz - est_slow.mean_rate_hz >
          3.0 * (est_ideal.stderr_hz + est_slow.stderr_hz));
}

TEST_CASE("simulated rate matches the exact expected-slots oracle for N in {1,2,4}") {
    for (int n : {1, 2, 4}) {
        ChainTemplate tmpl = lossless_template(0.2, 0.5, 1.0, n);
        tmpl.memory = MemoryParams{1.0, std::numeric_limits<double>::infinity(),
                                   std::numeric_limits<double>::infinity()};
        const BuiltChain built = build_fiber_chain(tmpl, 100.0);

        ExpectedSlotsOracle oracle;
        oracle.n = n;
        oracle.p = 0.2;
        oracle.swap = 0.5;
        if (n > 1) oracle.rounds = built.chain.schedule.rounds;
        const double expected_rate = 1.0 / oracle.expected_slots();

        const RateEstimate est =
            estimate_rate(built.network, built.chain, cfg(60000, 1000 + n), 10);
        // renewal-edge bias is at most one cycle per batch
        const double bias_guard = expected_rate * oracle.expected_slots() / 60000.0;
        CHECK(std::abs(est.mean_rate_hz - expected_rate) <=
              3.0 * est.stderr_hz + bias_guard);
    }
}

TEST_CASE("optical segments attempt only inside visibility windows") {
    // one satellite source, two ground users, N=1 over two downlinks
    Network net;
    Node sat;
    sat.id = "sat";
    sat.kind = NodeKind::SatelliteSource;
    sat.orbit_ref = Orbit{600.0, 0.0, 0.0, 0.0, 0.0};
    sat.eps = EpsParams{1.0, 1.0};
    net.nodes.push_back(sat);
    const GroundSite site_a{0.0, -3.0, 0.0}, site_b{0.0, 3.0, 0.0};
    for (const auto& [id, site] : {std::pair{"ua", site_a}, std::pair{"ub", site_b}}) {
        Node u;
        u.id = id;
        u.kind = NodeKind::GroundUser;
        u.site = site;
        net.nodes.push_back(u);
    }
    for (const char* id : {"ua", "ub"}) {
        Link l;
        l.a = "sat";
        l.b = id;
        l.channel.kind = LinkKind::Downlink;
        l.channel.atmospheric_penalty_db = 3.0;
        l.channel.tx_aperture_m = 0.5;
        l.channel.rx_aperture_m = 1.0;
        net.links.push_back(l);
    }
    BoundChain chain;
    chain.chain_nodes = {"ua", "ub"};
    chain.segments = {{"sat", {0, 1}}};
    chain.elevation_mask_deg = 10.0;

    SimConfig sim;
    sim.duration_s = orbital_period_s(600.0);
    sim.slot_s = 1.0;
    sim.seed = 4;
    sim.max_events = 1000000;
    const SimResult r = run_simulation(net, chain, sim);

    // ground truth: slots where both sites see the satellite above the mask
    std::uint64_t both_visible = 0;
    for (std::uint64_t slot = 0; slot < r.slots; ++slot) {
        const double t = static_cast<double>(slot);
        if (elevation_deg(*net.nodes[0].orbit_ref, site_a, t) >= 10.0 &&
            elevation_deg(*net.nodes[0].orbit_ref, site_b, t) >= 10.0)
            ++both_visible;
    }
    CHECK(both_visible > 0);
    CHECK(r.per_link[0].attempts == both_visible);
    CHECK(r.per_link[1].attempts == both_visible);
    CHECK(r.active_time_s == doctest::Approx(static_cast<double>(both_visible)));

    const bool has_start = std::any_of(r.event_log.begin(), r.event_log.end(),
                                       [](const SimEvent& e) {
                                           return e.kind == SimEventKind::PassStart;
                                       });
    const bool has_end = std::any_of(r.event_log.begin(), r.event_log.end(),
                                     [](const SimEvent& e) {
                                         return e.kind == SimEventKind::PassEnd;
                                     });
    CHECK(has_start);
    CHECK(has_end);
}

TEST_CASE("an always-visible optical link behaves like an equal-transmittance fiber") {
    // geostationary-altitude satellite pinned at the site's zenith
    const double geo_alt = 35786.0;
    Network net;
    Node sat;
    sat.id = "sat";
    sat.kind = NodeKind::SatelliteSource;
    sat.orbit_ref = Orbit{geo_alt, 0.0, 0.0, 0.0, 0.0};
    sat.eps = EpsParams{1.0, 1.0};
    net.nodes.push_back(sat);
    Node user;
    user.id = "ua";
    user.kind = NodeKind::GroundUser;
    user.site = GroundSite{0.0, 0.0, 0.0};
    net.nodes.push_back(user);
    Link l;
    l.a = "sat";
    l.b = "ua";
    l.channel.kind = LinkKind::Downlink;
    l.channel.tx_aperture_m = 1.0;
    l.channel.rx_aperture_m = 1.0;
    net.links.push_back(l);

    BoundChain chain;
    chain.chain_nodes = {"sat", "ua"};
    chain.segments = {{"sat", {0}}};
    chain.elevation_mask_deg = 10.0;

    const double t_optical =
        channel_transmittance(l.channel, PathGeometry::free_space_range_km(geo_alt)).value();

    ChainTemplate fiber = lossless_template(1.0, 0.5, 1.0);
    fiber.alpha_db_per_km = -10.0 * std::log10(t_optical) / 100.0;  // match over 100 km
    const BuiltChain matched = build_fiber_chain(fiber, 100.0);

    const std::uint64_t slots = 400000;
    const SimResult opt = run_simulation(net, chain, cfg(static_cast<double>(slots), 55));
    const SimResult fib =
        run_simulation(matched.network, matched.chain, cfg(static_cast<double>(slots), 56));
    CHECK(opt.active_time_s == doctest::Approx(static_cast<double>(slots)));

    const double mean = static_cast<double>(slots) * t_optical;
    const double sigma = std::sqrt(static_cast<double>(slots) * t_optical * (1.0 - t_optical));
    CHECK(std::abs(static_cast<double>(opt.e2e_successes) - mean) <= 3.0 * sigma);
    CHECK(std::abs(static_cast<double>(opt.e2e_successes) -
                   static_cast<double>(fib.e2e_successes)) <= 3.0 * std::sqrt(2.0) * sigma);
}

TEST_CASE("run_simulation rejects broken configurations") {
    const BuiltChain built = build_fiber_chain(lossless_template(0.5, 0.5, 1.0, 2), 100.0);

    SimConfig zero = cfg(0.0, 1);
    CHECK_THROWS_AS(run_simulation(built.network, built.chain, zero), std::invalid_argument);

    BoundChain bad_schedule = built.chain;
    bad_schedule.schedule.rounds = {};
    CHECK_THROWS_AS(run_simulation(built.network, bad_schedule, cfg(10, 1)),
                    std::invalid_argument);

    BoundChain unknown_node = built.chain;
    unknown_node.chain_nodes[0] = "nope";
    CHECK_THROWS_AS(run_simulation(built.network, unknown_node, cfg(10, 1)),
                    std::invalid_argument);

    BoundChain bad_link = built.chain;
    bad_link.segments[0].link_indices = {99};
    CHECK_THROWS_AS(run_simulation(built.network, bad_link, cfg(10, 1)),
                    std::invalid_argument);

    // slot finer than the memoryless coincidence window (100 ps default)
    SimConfig tiny = cfg(10, 1);
    tiny.slot_s = 1e-12;
    CHECK_THROWS_AS(run_simulation(built.network, built.chain, tiny), std::invalid_argument);

    CHECK_THROWS_AS(estimate_rate(built.network, built.chain, cfg(10, 1), 1),
                    std::invalid_argument);
}

TEST_CASE("analytic distance sweep exposes the exponential law") {
    ChainTemplate direct;
    direct.alpha_db_per_km = 0.2;
    direct.source_rate_hz = 1e10;
    const std::vector<double> distances{100, 200, 300, 400, 500};
    const auto rows = sweep_distance(direct, distances, cfg(10, 1), RateMode::Analytic, 2);
    REQUIRE(rows.size() == 5);
    std::vector<double> d, r;
    for (const auto& row : rows) {
        CHECK(row.stderr_hz == 0.0);
        d.push_back(row.distance_km);
        r.push_back(row.rate_hz);
    }
    const ScalingFit fit = classify_scaling(d, r);
    CHECK(fit.cls == ScalingClass::Exponential);
    CHECK(fit.decay_db_per_km == doctest::Approx(0.2).epsilon(0.01));

    const auto one = sweep_distance(direct, {250.0}, cfg(10, 1), RateMode::Analytic, 2);
    CHECK(one.size() == 1);
}
