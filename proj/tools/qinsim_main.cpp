// qinsim: link budgets, pass prediction, repeater-chain analytics, and
// seeded Monte Carlo entanglement-distribution simulation.
//
// Exit codes: 0 success, 1 invalid configuration or failed validation,
// 2 bad usage. A RunManifest accompanies every result (alongside --out, or
// one JSON line on stderr when results go to stdout).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qinsim/config_io.hpp"
#include "qinsim/csv.hpp"
#include "qinsim/linkbudget.hpp"
#include "qinsim/manifest.hpp"
#include "qinsim/orbit.hpp"
#include "qinsim/scenarios.hpp"
#include "qinsim/sim.hpp"
#include "qinsim/swapchain.hpp"

namespace {

using namespace qinsim;

struct OutputTarget {
    std::string path;  // empty or "-" = stdout
    std::ofstream file;

    std::ostream& stream() {
        if (path.empty() || path == "-") return std::cout;
        if (!file.is_open()) {
            file.open(path);
            if (!file) throw std::runtime_error("cannot open output file: " + path);
        }
        return file;
    }
};

std::uint64_t default_seed() {
    if (const char* env = std::getenv("QINSIM_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw std::runtime_error("QINSIM_SEED is not an integer");
        }
    }
    return 0;
}

std::vector<double> parse_distances(const std::string& expr) {
    std::vector<double> out;
    if (expr.find(':') != std::string::npos) {  // d0:d1:step
        double d0, d1, step;
        char c1, c2;
        std::istringstream in(expr);
        if (!(in >> d0 >> c1 >> d1 >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0.0)
            throw std::runtime_error("bad distance range, want d0:d1:step");
        for (double d = d0; d <= d1 + 1e-9; d += step) out.push_back(d);
        return out;
    }
    std::istringstream in(expr);
    std::string token;
    while (std::getline(in, token, ',')) {
        if (!token.empty()) out.push_back(std::stod(token));
    }
    return out;
}

GroundSite parse_site(const std::string& expr) {
    GroundSite s;
    std::istringstream in(expr);
    char c;
    if (!(in >> s.latitude_deg >> c >> s.longitude_deg) || c != ',')
        throw std::runtime_error("bad site, want lat,lon[,alt_m]");
    if (in >> c >> s.altitude_m && c != ',')
        throw std::runtime_error("bad site, want lat,lon[,alt_m]");
    return s;
}

ScenarioParams load_params(const std::string& config_path) {
    if (config_path.empty()) return default_scenario_params();
    return scenario_params_from_json(load_config_file(config_path));
}

// ---------------------------------------------------------------------------

struct CommonFlags {
    std::string config;
    std::string out;
    std::string format = "csv";
    int precision = 17;
    std::uint64_t seed = default_seed();
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool with_seed = true) {
    cmd->add_option("--config", flags.config, "configuration file (.json or .toml)");
    cmd->add_option("-o,--out", flags.out, "output path (default stdout)");
    cmd->add_option("--format", flags.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--precision", flags.precision, "significant digits for CSV reals");
    if (with_seed) cmd->add_option("--seed", flags.seed, "RNG seed (env QINSIM_SEED)");
}

void finish(const CommonFlags& flags, const std::string& subcommand,
            const std::vector<std::string>& argv) {
    const RunManifest manifest = make_manifest(subcommand, argv, flags.config, flags.seed);
    emit_manifest(manifest, flags.out, std::cerr);
}

// --- linkbudget --------------------------------------------------------------

int cmd_linkbudget(const CommonFlags& flags, double at_time,
                   const std::vector<std::string>& argv) {
    if (flags.config.empty()) throw std::runtime_error("linkbudget needs --config");
    const json cfg = load_config_file(flags.config);
    Network net;
    if (cfg.contains("nodes")) {
        net = network_from_json(cfg);
    } else {
        const ScenarioParams params = scenario_params_from_json(cfg);
        const std::string name = cfg.value("scenario", "S1b");
        const auto id = scenario_id_from_string(name);
        if (!id) throw std::runtime_error("unknown scenario id: " + name);
        net = build_scenario(*id, params).network;
    }
    const auto violations = validate_network(net);
    if (!violations.empty()) {
        for (const auto& v : violations) std::cerr << "violation: " << v << "\n";
        return 1;
    }

    OutputTarget target;
    target.path = flags.out;
    CsvWriter csv(target.stream(), flags.precision);
    csv.header({"link", "kind", "distance_km", "geometric_db", "atmospheric_db",
                "pointing_db", "system_db", "detector_db", "total_db", "transmittance"});
    for (const auto& link : net.links) {
        PathGeometry geo = PathGeometry::fiber_length_km(1.0);
        if (link.channel.kind == LinkKind::Fiber) {
            geo = PathGeometry::fiber_length_km(*link.static_length_km);
        } else {
            const Node* a = net.find_node(link.a);
            const Node* b = net.find_node(link.b);
            double range;
            if (link.channel.kind == LinkKind::Qoisl) {
                range = (propagate_eci_km(*a->orbit_ref, at_time) -
                         propagate_eci_km(*b->orbit_ref, at_time))
                            .norm();
            } else {
                const Node* sat = a->orbit_ref ? a : b;
                const Node* ground = a->orbit_ref ? b : a;
                range = slant_range_km(*sat->orbit_ref, *ground->site, at_time);
            }
            geo = PathGeometry::free_space_range_km(range);
        }
        const BudgetRow row = itemize_budget(link.label(), link.channel, geo);
        csv.field(row.link)
            .field(std::string(to_string(row.kind)))
            .field(row.distance_km)
            .field(row.geometric_db)
            .field(row.atmospheric_db)
            .field(row.pointing_db)
            .field(row.system_db)
            .field(row.detector_db)
            .field(row.total_db)
            .field(row.transmittance);
        csv.end_row();
    }
    finish(flags, "linkbudget", argv);
    return 0;
}

// --- passes ------------------------------------------------------------------

struct PassFlags {
    double alt_km = 1000.0;
    double inclination_deg = 0.0;
    double raan_deg = 0.0;
    double anomaly_deg = 0.0;
    std::string site_a, site_b;
    double sep_km = -1.0;
    double mask_deg = 0.0;
    double t0 = 0.0;
    double t1 = 86400.0;
    double step = 1.0;
    bool include_single = false;
};

int cmd_passes(const CommonFlags& flags, const PassFlags& pf,
               const std::vector<std::string>& argv) {
    const Orbit orbit{pf.alt_km, pf.inclination_deg, pf.raan_deg, pf.anomaly_deg, 0.0};
    std::optional<GroundSite> a, b;
    if (pf.sep_km >= 0.0) {
        const double half_deg = (pf.sep_km / 2.0) / kEarthRadiusKm * 180.0 / std::numbers::pi;
        a = GroundSite{0.0, -half_deg, 0.0};
        b = GroundSite{0.0, half_deg, 0.0};
    } else {
        if (!pf.site_a.empty()) a = parse_site(pf.site_a);
        if (!pf.site_b.empty()) b = parse_site(pf.site_b);
    }
    if (!a) throw std::runtime_error("passes needs --site-a or --sep-km");

    OutputTarget target;
    target.path = flags.out;
    CsvWriter csv(target.stream(), flags.precision);
    csv.header({"site_or_pair", "start_s", "end_s", "duration_s", "max_elevation_deg"});
    auto emit = [&](const std::string& label, const std::vector<VisibilityWindow>& windows) {
        for (const auto& w : windows) {
            csv.field(label)
                .field(w.start_s)
                .field(w.end_s)
                .field(w.duration_s())
                .field(w.max_elevation_deg);
            csv.end_row();
        }
    };
    if (b) {
        if (pf.include_single) {
            emit("site_a", visibility_windows(orbit, *a, pf.mask_deg, pf.t0, pf.t1, pf.step));
            emit("site_b", visibility_windows(orbit, *b, pf.mask_deg, pf.t0, pf.t1, pf.step));
        }
        emit("pair", dual_visibility_windows(orbit, *a, *b, pf.mask_deg, pf.t0, pf.t1, pf.step));
    } else {
        emit("site_a", visibility_windows(orbit, *a, pf.mask_deg, pf.t0, pf.t1, pf.step));
    }
    finish(flags, "passes", argv);
    return 0;
}

// --- chain -------------------------------------------------------------------

struct ChainFlags {
    double distance_km = 1000.0;
    double alpha = 0.2;
    double source_rate_hz = 1e10;
    int n = 1;
    double segment_length_km = 0.0;
    double q = 0.5;
    double v = 1.0;
    double heralding = 1.0;
    double extra_loss_db = 0.0;
    std::string sweep;
};

int cmd_chain(const CommonFlags& flags, const ChainFlags& cf,
              const std::vector<std::string>& argv) {
    ChainTemplate tmpl;
    tmpl.alpha_db_per_km = cf.alpha;
    tmpl.source_rate_hz = cf.source_rate_hz;
    tmpl.heralding_efficiency = cf.heralding;
    tmpl.bsm.success_prob_q = cf.q;
    tmpl.bsm.indistinguishability_v = cf.v;
    tmpl.extra_loss_db_per_segment = cf.extra_loss_db;
    tmpl.segment_length_km =
        cf.segment_length_km > 0.0 ? cf.segment_length_km : cf.distance_km / cf.n;

    OutputTarget target;
    target.path = flags.out;

    if (!cf.sweep.empty()) {
        const auto distances = parse_distances(cf.sweep);
        const auto rows = sweep_distance(tmpl, distances, SimConfig{}, RateMode::Analytic, 2);
        CsvWriter csv(target.stream(), flags.precision);
        csv.header({"distance_km", "rate_hz", "stderr_hz"});
        for (const auto& row : rows) {
            csv.field(row.distance_km).field(row.rate_hz).field(row.stderr_hz);
            csv.end_row();
        }
        finish(flags, "chain", argv);
        return 0;
    }

    const BuiltChain built = build_fiber_chain(tmpl, cf.distance_km);
    const double p_segment = built.analytic.per_segment_transmittance.front().value();
    const double prob = single_shot_e2e_prob(built.analytic);
    const double rate = memoryless_rate_hz(built.analytic);
    const double per_century = rate * kSecondsPerCentury;

    std::ostream& out = target.stream();
    out << "n_segments: " << built.analytic.n_segments << "\n";
    out << "per_segment_p: " << CsvWriter::format_double(p_segment, flags.precision) << "\n";
    out << "single_shot_prob: " << CsvWriter::format_double(prob, flags.precision) << "\n";
    out << "memoryless_rate_hz: " << CsvWriter::format_double(rate, flags.precision) << "\n";
    {
        std::ostringstream century;
        century.precision(2);
        century << std::fixed << per_century;
        out << "expected_detections_per_century: ~" << century.str() << " per century\n";
    }
    finish(flags, "chain", argv);
    return 0;
}

// --- simulate ----------------------------------------------------------------

struct SimulateFlags {
    std::string scenario = "S1b";
    double duration_s = 100.0;
    double slot_s = 0.0;
    int batches = 1;
    std::size_t max_events = 0;
    std::string events_out;
};

json result_to_json(const SimResult& r) {
    json links = json::array();
    for (const auto& l : r.per_link)
        links.push_back({{"link", l.link}, {"attempts", l.attempts}, {"successes", l.successes}});
    return {{"e2e_successes", r.e2e_successes},
            {"e2e_rate_hz", r.e2e_rate_hz},
            {"mean_latency_s", r.mean_latency_s},
            {"active_time_s", r.active_time_s},
            {"duration_s", r.duration_s},
            {"slots", r.slots},
            {"per_link", links}};
}

int cmd_simulate(const CommonFlags& flags, const SimulateFlags& sf,
                 const std::vector<std::string>& argv) {
    ScenarioParams params = load_params(flags.config);
    std::string scenario_name = sf.scenario;
    if (!flags.config.empty()) {
        const json cfg = load_config_file(flags.config);
        scenario_name = cfg.value("scenario", scenario_name);
    }
    const auto id = scenario_id_from_string(scenario_name);
    if (!id) throw std::runtime_error("unknown scenario id: " + scenario_name);
    const BuiltScenario built = build_scenario(*id, params);

    SimConfig sim;
    sim.duration_s = sf.duration_s;
    sim.slot_s = sf.slot_s;
    sim.seed = flags.seed;
    sim.max_events = sf.max_events;

    OutputTarget target;
    target.path = flags.out;

    if (sf.batches > 1) {
        const RateEstimate est = estimate_rate(built.network, built.chain, sim, sf.batches);
        if (flags.format == "json") {
            target.stream() << json{{"scenario", scenario_name},
                                    {"mean_rate_hz", est.mean_rate_hz},
                                    {"stderr_hz", est.stderr_hz},
                                    {"batches", sf.batches},
                                    {"active_fraction", est.mean_active_fraction}}
                                   .dump(2)
                            << "\n";
        } else {
            CsvWriter csv(target.stream(), flags.precision);
            csv.header({"scenario", "mean_rate_hz", "stderr_hz", "batches", "active_fraction"});
            csv.field(scenario_name)
                .field(est.mean_rate_hz)
                .field(est.stderr_hz)
                .field(static_cast<std::int64_t>(sf.batches))
                .field(est.mean_active_fraction);
            csv.end_row();
        }
    } else {
        const SimResult r = run_simulation(built.network, built.chain, sim);
        if (!sf.events_out.empty()) {
            std::ofstream ev(sf.events_out);
            for (const auto& e : r.event_log) {
                json je = {{"time_s", e.time_s},
                           {"kind", to_string(e.kind)},
                           {"subject", e.subject}};
                if (e.kind == SimEventKind::BsmFired) je["success"] = e.success;
                if (e.kind == SimEventKind::EndToEndEntanglement) je["latency_s"] = e.latency_s;
                ev << je.dump() << "\n";
            }
        }
        if (flags.format == "json") {
            json j = result_to_json(r);
            j["scenario"] = scenario_name;
            target.stream() << j.dump(2) << "\n";
        } else {
            CsvWriter csv(target.stream(), flags.precision);
            csv.header({"scenario", "e2e_successes", "e2e_rate_hz", "mean_latency_s",
                        "active_time_s", "duration_s", "slots"});
            csv.field(scenario_name)
                .field(r.e2e_successes)
                .field(r.e2e_rate_hz)
                .field(r.mean_latency_s)
                .field(r.active_time_s)
                .field(r.duration_s)
                .field(r.slots);
            csv.end_row();
        }
    }
    finish(flags, "simulate", argv);
    return 0;
}

// --- sweep ---------------------------------------------------------------------

struct SweepFlags {
    std::string distances = "100:800:100";
    double alpha = 0.2;
    double source_rate_hz = 1.0;
    double heralding = 1.0;
    double q = 0.5;
    double v = 1.0;
    double segment_length_km = 0.0;
    bool with_memory = false;
    double memory_eta0 = 1.0;
    double memory_tau_s = std::numeric_limits<double>::infinity();
    double memory_cutoff_s = std::numeric_limits<double>::infinity();
    std::string mode = "analytic";
    double duration_s = 100000.0;
    double slot_s = 1.0;
    int batches = 5;
    bool classify = false;
};

int cmd_sweep(const CommonFlags& flags, const SweepFlags& sf,
              const std::vector<std::string>& argv) {
    ChainTemplate tmpl;
    tmpl.alpha_db_per_km = sf.alpha;
    tmpl.source_rate_hz = sf.source_rate_hz;
    tmpl.heralding_efficiency = sf.heralding;
    tmpl.bsm.success_prob_q = sf.q;
    tmpl.bsm.indistinguishability_v = sf.v;
    tmpl.segment_length_km = sf.segment_length_km;
    if (sf.with_memory)
        tmpl.memory = MemoryParams{sf.memory_eta0, sf.memory_tau_s, sf.memory_cutoff_s};

    SimConfig sim;
    sim.duration_s = sf.duration_s;
    sim.slot_s = sf.slot_s;
    sim.seed = flags.seed;

    const RateMode mode = sf.mode == "analytic" ? RateMode::Analytic : RateMode::Simulated;
    const auto rows = sweep_distance(tmpl, parse_distances(sf.distances), sim, mode, sf.batches);

    OutputTarget target;
    target.path = flags.out;
    CsvWriter csv(target.stream(), flags.precision);
    csv.header({"distance_km", "rate_hz", "stderr_hz"});
    std::vector<double> d, r;
    for (const auto& row : rows) {
        csv.field(row.distance_km).field(row.rate_hz).field(row.stderr_hz);
        csv.end_row();
        d.push_back(row.distance_km);
        if (row.rate_hz > 0.0) r.push_back(row.rate_hz);
    }
    if (sf.classify) {
        std::ostream& diag = (flags.out.empty() || flags.out == "-") ? std::cerr : std::cout;
        if (r.size() == d.size() && d.size() >= 4) {
            const ScalingFit fit = classify_scaling(d, r);
            diag << "classification: " << to_string(fit.cls)
                 << " exp_r2=" << fit.exponential_r2 << " poly_r2=" << fit.polynomial_r2
                 << " decay_db_per_km=" << fit.decay_db_per_km
                 << " poly_exponent=" << fit.polynomial_exponent << "\n";
        } else {
            diag << "classification: skipped (needs >= 4 points with nonzero rates)\n";
        }
    }
    finish(flags, "sweep", argv);
    return 0;
}

// --- scenarios / compare -------------------------------------------------------

int cmd_scenarios_list(const CommonFlags& flags, const std::vector<std::string>& argv) {
    OutputTarget target;
    target.path = flags.out;
    if (flags.format == "json") {
        json arr = json::array();
        for (const auto& rec : tradeoff_table()) {
            json j = {{"scenario", to_string(rec.scenario)},
                      {"description", rec.description},
                      {"pros", rec.pros},
                      {"cons", rec.cons}};
            if (rec.scored()) {
                j["complexity_1to5"] = *rec.complexity_1to5;
                j["interest_1to5"] = *rec.interest_1to5;
            } else {
                j["note"] = rec.note;
            }
            arr.push_back(j);
        }
        target.stream() << arr.dump(2) << "\n";
    } else {
        CsvWriter csv(target.stream(), flags.precision);
        csv.header({"scenario", "description", "complexity_1to5", "interest_1to5", "note"});
        for (const auto& rec : tradeoff_table()) {
            csv.field(std::string(to_string(rec.scenario))).field(rec.description);
            if (rec.scored())
                csv.field(*rec.complexity_1to5).field(*rec.interest_1to5);
            else
                csv.field(std::string()).field(std::string());
            csv.field(rec.note);
            csv.end_row();
        }
    }
    finish(flags, "scenarios list", argv);
    return 0;
}

int cmd_scenarios_build(const CommonFlags& flags, const std::string& id_name,
                        const std::vector<std::string>& argv) {
    const auto id = scenario_id_from_string(id_name);
    if (!id) throw std::runtime_error("unknown scenario id: " + id_name);
    const ScenarioParams params = load_params(flags.config);
    const BuiltScenario built = build_scenario(*id, params);
    OutputTarget target;
    target.path = flags.out;
    target.stream() << network_to_json(built.network).dump(2) << "\n";
    finish(flags, "scenarios build", argv);
    return 0;
}

int cmd_compare(const CommonFlags& flags, const std::string& ids_expr, double duration_s,
                double slot_s, int batches, const std::vector<std::string>& argv) {
    std::vector<ScenarioId> ids;
    if (ids_expr == "all") {
        ids = all_scenario_ids();
    } else {
        std::istringstream in(ids_expr);
        std::string token;
        while (std::getline(in, token, ',')) {
            const auto id = scenario_id_from_string(token);
            if (!id) throw std::runtime_error("unknown scenario id: " + token);
            ids.push_back(*id);
        }
    }
    const ScenarioParams params = load_params(flags.config);
    SimConfig sim;
    sim.duration_s = duration_s;
    sim.slot_s = slot_s;
    sim.seed = flags.seed;
    const auto rows = compare_scenarios(ids, params, sim, batches);

    OutputTarget target;
    target.path = flags.out;
    if (flags.format == "json") {
        json arr = json::array();
        for (const auto& row : rows) {
            json j = {{"scenario", to_string(row.scenario)},
                      {"rate_hz", row.rate_hz},
                      {"stderr_hz", row.stderr_hz},
                      {"active_fraction", row.active_fraction}};
            if (row.complexity_1to5) j["complexity_1to5"] = *row.complexity_1to5;
            if (row.interest_1to5) j["interest_1to5"] = *row.interest_1to5;
            if (!row.note.empty()) j["note"] = row.note;
            arr.push_back(j);
        }
        target.stream() << arr.dump(2) << "\n";
    } else {
        CsvWriter csv(target.stream(), flags.precision);
        csv.header({"scenario", "rate_hz", "stderr_hz", "active_fraction", "complexity_1to5",
                    "interest_1to5", "note"});
        for (const auto& row : rows) {
            csv.field(std::string(to_string(row.scenario)))
                .field(row.rate_hz)
                .field(row.stderr_hz)
                .field(row.active_fraction);
            if (row.complexity_1to5)
                csv.field(*row.complexity_1to5).field(*row.interest_1to5);
            else
                csv.field(std::string()).field(std::string());
            csv.field(row.note);
            csv.end_row();
        }
    }
    finish(flags, "compare", argv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);

    CLI::App app{"space-based quantum information network simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    CommonFlags lb_flags;
    double lb_at_time = 0.0;
    auto* lb = app.add_subcommand("linkbudget", "per-link dB budget table");
    add_common(lb, lb_flags, false);
    lb->add_option("--at-time", lb_at_time, "geometry sample time (s)");

    CommonFlags pass_flags;
    PassFlags pf;
    auto* passes = app.add_subcommand("passes", "visibility windows as CSV");
    add_common(passes, pass_flags, false);
    passes->add_option("--alt-km", pf.alt_km, "circular orbit altitude");
    passes->add_option("--inclination-deg", pf.inclination_deg, "inclination");
    passes->add_option("--raan-deg", pf.raan_deg, "RAAN");
    passes->add_option("--anomaly-deg", pf.anomaly_deg, "initial anomaly");
    passes->add_option("--site-a", pf.site_a, "lat,lon[,alt_m]");
    passes->add_option("--site-b", pf.site_b, "lat,lon[,alt_m]");
    passes->add_option("--sep-km", pf.sep_km,
                       "place two equatorial sites this far apart instead of --site-a/b");
    passes->add_option("--mask-deg", pf.mask_deg, "elevation mask");
    passes->add_option("--t0", pf.t0, "window start (s)");
    passes->add_option("--t1", pf.t1, "window end (s)");
    passes->add_option("--step", pf.step, "scan step (s)");
    passes->add_flag("--include-single", pf.include_single,
                     "emit per-site rows alongside the pair rows");

    CommonFlags chain_flags;
    ChainFlags cf;
    auto* chain = app.add_subcommand("chain", "analytic repeater-chain figures");
    add_common(chain, chain_flags, false);
    chain->add_option("--distance-km", cf.distance_km, "total channel length");
    chain->add_option("--alpha", cf.alpha, "fiber loss dB/km");
    chain->add_option("--source-rate-hz", cf.source_rate_hz, "pair attempts per second");
    chain->add_option("-n,--n", cf.n, "number of segments");
    chain->add_option("--segment-length-km", cf.segment_length_km,
                      "segment length (overrides --n)");
    chain->add_option("--q", cf.q, "BSM success probability (<= 0.5)");
    chain->add_option("--v", cf.v, "photon indistinguishability");
    chain->add_option("--heralding", cf.heralding, "source heralding efficiency");
    chain->add_option("--extra-loss-db", cf.extra_loss_db, "extra per-segment loss");
    chain->add_option("--sweep", cf.sweep, "emit rate vs distance CSV, d0:d1:step");

    CommonFlags sim_flags;
    SimulateFlags sf;
    auto* simulate = app.add_subcommand("simulate", "seeded Monte Carlo of one scenario");
    add_common(simulate, sim_flags);
    simulate->add_option("--scenario", sf.scenario, "scenario id (S1a..S4)");
    simulate->add_option("--duration", sf.duration_s, "simulated seconds");
    simulate->add_option("--slot", sf.slot_s, "slot length (s), 0 = 1/source rate");
    simulate->add_option("--batches", sf.batches, "batch count (>1 reports mean/stderr)");
    simulate->add_option("--max-events", sf.max_events, "event log cap");
    simulate->add_option("--events-out", sf.events_out, "event log path (ndjson)");

    CommonFlags sweep_flags;
    SweepFlags swf;
    auto* sweep = app.add_subcommand("sweep", "rate vs distance for a chain template");
    add_common(sweep, sweep_flags);
    sweep->add_option("--distances", swf.distances, "d0:d1:step or comma list (km)");
    sweep->add_option("--alpha", swf.alpha, "fiber loss dB/km");
    sweep->add_option("--source-rate-hz", swf.source_rate_hz, "pair attempts per second");
    sweep->add_option("--heralding", swf.heralding, "source heralding efficiency");
    sweep->add_option("--q", swf.q, "BSM success probability");
    sweep->add_option("--v", swf.v, "photon indistinguishability");
    sweep->add_option("--segment-length-km", swf.segment_length_km,
                      "segment length; 0 = direct transmission");
    sweep->add_flag("--memory", swf.with_memory, "equip every chain node with memories");
    sweep->add_option("--memory-eta0", swf.memory_eta0, "memory retrieval at zero age");
    sweep->add_option("--memory-tau-s", swf.memory_tau_s, "memory 1/e lifetime");
    sweep->add_option("--memory-cutoff-s", swf.memory_cutoff_s, "memory discard age");
    sweep->add_option("--mode", swf.mode, "analytic or simulated")
        ->check(CLI::IsMember({"analytic", "simulated"}));
    sweep->add_option("--duration", swf.duration_s, "simulated seconds per batch");
    sweep->add_option("--slot", swf.slot_s, "slot length (s)");
    sweep->add_option("--batches", swf.batches, "batches per distance");
    sweep->add_flag("--classify", swf.classify, "print the scaling classification");

    CommonFlags sc_flags;
    auto* scenarios = app.add_subcommand("scenarios", "catalog and builders");
    scenarios->require_subcommand(1);
    auto* sc_list = scenarios->add_subcommand("list", "catalog with trade-off metadata");
    add_common(sc_list, sc_flags, false);
    std::string build_id = "S1b";
    auto* sc_build = scenarios->add_subcommand("build", "emit a network config file");
    add_common(sc_build, sc_flags, false);
    sc_build->add_option("--id", build_id, "scenario id")->required();

    CommonFlags cmp_flags;
    std::string cmp_ids = "all";
    double cmp_duration = 200.0;
    double cmp_slot = 0.02;
    int cmp_batches = 4;
    auto* compare = app.add_subcommand("compare", "simulate scenarios side by side");
    add_common(compare, cmp_flags);
    compare->add_option("--ids", cmp_ids, "comma list of scenario ids, or 'all'");
    compare->add_option("--duration", cmp_duration, "simulated seconds per batch");
    compare->add_option("--slot", cmp_slot, "slot length (s)");
    compare->add_option("--batches", cmp_batches, "batches per scenario");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        return 0;
    } catch (const CLI::CallForVersion& e) {
        app.exit(e);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (lb->parsed()) return cmd_linkbudget(lb_flags, lb_at_time, args);
        if (passes->parsed()) return cmd_passes(pass_flags, pf, args);
        if (chain->parsed()) return cmd_chain(chain_flags, cf, args);
        if (simulate->parsed()) return cmd_simulate(sim_flags, sf, args);
        if (sweep->parsed()) return cmd_sweep(sweep_flags, swf, args);
        if (scenarios->parsed()) {
            if (sc_list->parsed()) return cmd_scenarios_list(sc_flags, args);
            if (sc_build->parsed()) return cmd_scenarios_build(sc_flags, build_id, args);
        }
        if (compare->parsed())
            return cmd_compare(cmp_flags, cmp_ids, cmp_duration, cmp_slot, cmp_batches, args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
