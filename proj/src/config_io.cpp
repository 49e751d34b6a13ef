#include "qinsim/config_io.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace qinsim {

// --- TOML subset reader ----------------------------------------------------
// Supports: comments, [table] and [[array-of-table]] headers, dotted keys,
// basic strings, integers/floats (inf/nan included), booleans, and arrays
// (multi-line allowed). No date-times, no multi-line strings.

namespace {

[[noreturn]] void toml_fail(std::size_t line, const std::string& msg) {
    throw std::runtime_error("toml parse error at line " + std::to_string(line) + ": " + msg);
}

struct TomlValueParser {
    const std::string& text;
    std::size_t pos = 0;
    std::size_t line;

    void skip_ws() {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t' ||
                                     text[pos] == '\n' || text[pos] == '\r')) {
            ++pos;
        }
        if (pos < text.size() && text[pos] == '#') {
            while (pos < text.size() && text[pos] != '\n') ++pos;
            skip_ws();
        }
    }

    json parse_value() {
        skip_ws();
        if (pos >= text.size()) toml_fail(line, "expected a value");
        const char c = text[pos];
        if (c == '"') return parse_string();
        if (c == '[') return parse_array();
        return parse_scalar();
    }

    json parse_string() {
        ++pos;  // opening quote
        std::string out;
        while (pos < text.size() && text[pos] != '"') {
            char c = text[pos++];
            if (c == '\\') {
                if (pos >= text.size()) toml_fail(line, "dangling escape");
                const char e = text[pos++];
                switch (e) {
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    case 'r': out += '\r'; break;
                    case '"': out += '"'; break;
                    case '\\': out += '\\'; break;
                    default: toml_fail(line, std::string("unsupported escape \\") + e);
                }
            } else if (c == '\n') {
                toml_fail(line, "newline inside basic string");
            } else {
                out += c;
            }
        }
        if (pos >= text.size()) toml_fail(line, "unterminated string");
        ++pos;  // closing quote
        return json(out);
    }

    json parse_array() {
        ++pos;  // '['
        json arr = json::array();
        skip_ws();
        if (pos < text.size() && text[pos] == ']') {
            ++pos;
            return arr;
        }
        while (true) {
            arr.push_back(parse_value());
            skip_ws();
            if (pos < text.size() && text[pos] == ',') {
                ++pos;
                skip_ws();
                if (pos < text.size() && text[pos] == ']') {  // trailing comma
                    ++pos;
                    return arr;
                }
                continue;
            }
            if (pos < text.size() && text[pos] == ']') {
                ++pos;
                return arr;
            }
            toml_fail(line, "expected ',' or ']' in array");
        }
    }

    json parse_scalar() {
        std::size_t end = pos;
        while (end < text.size() && text[end] != ',' && text[end] != ']' &&
               text[end] != '\n' && text[end] != '#') {
            ++end;
        }
        std::string token = text.substr(pos, end - pos);
        while (!token.empty() && (token.back() == ' ' || token.back() == '\t' ||
                                  token.back() == '\r')) {
            token.pop_back();
        }
        pos = end;
        if (token == "true") return json(true);
        if (token == "false") return json(false);
        if (token == "inf" || token == "+inf") return json(std::numeric_limits<double>::infinity());
        if (token == "-inf") return json(-std::numeric_limits<double>::infinity());
        if (token == "nan") return json(std::numeric_limits<double>::quiet_NaN());

        std::string clean;  // TOML permits 1_000 style separators
        for (char c : token)
            if (c != '_') clean += c;
        if (clean.empty()) toml_fail(line, "empty value");

        const bool looks_float = clean.find_first_of(".eE") != std::string::npos;
        try {
            std::size_t used = 0;
            if (looks_float) {
                const double d = std::stod(clean, &used);
                if (used != clean.size()) toml_fail(line, "bad number: " + token);
                return json(d);
            }
            const long long v = std::stoll(clean, &used);
            if (used != clean.size()) toml_fail(line, "bad number: " + token);
            return json(v);
        } catch (const std::exception&) {
            toml_fail(line, "unrecognized value: " + token);
        }
    }
};

std::vector<std::string> parse_key_path(const std::string& raw, std::size_t line) {
    std::vector<std::string> parts;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const char c = raw[i];
        if (quoted) {
            if (c == '"')
                quoted = false;
            else
                cur += c;
        } else if (c == '"') {
            quoted = true;
        } else if (c == '.') {
            if (cur.empty()) toml_fail(line, "empty key segment");
            parts.push_back(cur);
            cur.clear();
        } else if (c == ' ' || c == '\t') {
            continue;
        } else {
            cur += c;
        }
    }
    if (quoted) toml_fail(line, "unterminated quoted key");
    if (cur.empty()) toml_fail(line, "empty key");
    parts.push_back(cur);
    return parts;
}

}  // namespace

json parse_toml(const std::string& text) {
    json root = json::object();
    json* current = &root;

    std::istringstream in(text);
    std::string rawline;
    std::size_t lineno = 0;
    std::string pending;  // continuation buffer for multi-line arrays
    std::size_t pending_line = 0;

    auto strip = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return std::string();
        const auto b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    };
    auto strip_comment = [](const std::string& s) {
        bool quoted = false;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) quoted = !quoted;
            if (s[i] == '#' && !quoted) return s.substr(0, i);
        }
        return s;
    };
    auto bracket_balance = [](const std::string& s) {
        int depth = 0;
        bool quoted = false;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) quoted = !quoted;
            if (quoted) continue;
            if (s[i] == '[') ++depth;
            if (s[i] == ']') --depth;
        }
        return depth;
    };

    auto handle_logical_line = [&](const std::string& line, std::size_t at) {
        if (line.empty()) return;
        if (line.front() == '[') {
            const bool array_table = line.size() > 1 && line[1] == '[';
            const std::string closer = array_table ? "]]" : "]";
            const auto end = line.find(closer);
            if (end == std::string::npos) toml_fail(at, "unterminated table header");
            const std::string inside =
                strip(line.substr(array_table ? 2 : 1, end - (array_table ? 2 : 1)));
            const auto path = parse_key_path(inside, at);
            json* node = &root;
            for (std::size_t i = 0; i < path.size(); ++i) {
                if (node->is_array()) node = &node->back();
                json& child = (*node)[path[i]];
                const bool leaf = i + 1 == path.size();
                if (leaf && array_table) {
                    if (child.is_null()) child = json::array();
                    if (!child.is_array()) toml_fail(at, "redefinition of " + path[i]);
                    child.push_back(json::object());
                    node = &child;
                } else {
                    if (child.is_null()) child = json::object();
                    node = &child;
                }
            }
            current = node;
            return;
        }
        const auto eq = [&] {
            bool quoted = false;
            for (std::size_t i = 0; i < line.size(); ++i) {
                if (line[i] == '"') quoted = !quoted;
                if (line[i] == '=' && !quoted) return i;
            }
            return std::string::npos;
        }();
        if (eq == std::string::npos) toml_fail(at, "expected key = value");
        const auto path = parse_key_path(strip(line.substr(0, eq)), at);
        json* target = current;
        if (target->is_array()) target = &target->back();
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            json& child = (*target)[path[i]];
            if (child.is_null()) child = json::object();
            if (!child.is_object()) toml_fail(at, "key path collides with a value");
            target = &child;
        }
        const std::string rhs = line.substr(eq + 1);
        TomlValueParser vp{rhs, 0, at};
        json value = vp.parse_value();
        vp.skip_ws();
        if (vp.pos != vp.text.size()) toml_fail(at, "trailing characters after value");
        (*target)[path.back()] = std::move(value);
    };

    while (std::getline(in, rawline)) {
        ++lineno;
        std::string line = strip(strip_comment(rawline));
        if (!pending.empty()) {
            pending += " " + line;
            if (bracket_balance(pending) > 0) continue;
            handle_logical_line(strip(pending), pending_line);
            pending.clear();
            continue;
        }
        if (line.empty()) continue;
        if (line.front() != '[' && bracket_balance(line) > 0) {
            pending = line;
            pending_line = lineno;
            continue;
        }
        handle_logical_line(line, lineno);
    }
    if (!pending.empty()) toml_fail(pending_line, "unterminated array");
    return root;
}

json load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    auto ends_with = [&](const char* suffix) {
        const std::string s(suffix);
        return path.size() >= s.size() && path.compare(path.size() - s.size(), s.size(), s) == 0;
    };
    if (ends_with(".json")) return json::parse(text);
    if (ends_with(".toml")) return parse_toml(text);
    try {
        return json::parse(text);
    } catch (const std::exception&) {
        return parse_toml(text);
    }
}

// --- JSON mapping ------------------------------------------------------------

namespace {

json real_to_json(double v) {
    if (std::isinf(v)) return json(v > 0 ? "inf" : "-inf");
    return json(v);
}

double real_from_json(const json& j, const std::string& key) {
    const json& v = j.at(key);
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw std::runtime_error("expected a number for " + key + ", got \"" + s + "\"");
    }
    if (!v.is_number()) throw std::runtime_error("expected a number for " + key);
    return v.get<double>();
}

double real_or(const json& j, const std::string& key, double fallback) {
    if (!j.contains(key)) return fallback;
    return real_from_json(j, key);
}

json site_to_json(const GroundSite& s) {
    return {{"latitude_deg", s.latitude_deg},
            {"longitude_deg", s.longitude_deg},
            {"altitude_m", s.altitude_m}};
}

GroundSite site_from_json(const json& j) {
    GroundSite s;
    s.latitude_deg = real_from_json(j, "latitude_deg");
    s.longitude_deg = real_from_json(j, "longitude_deg");
    s.altitude_m = real_or(j, "altitude_m", 0.0);
    return s;
}

json orbit_to_json(const Orbit& o) {
    return {{"altitude_km", o.altitude_km},
            {"inclination_deg", o.inclination_deg},
            {"raan_deg", o.raan_deg},
            {"initial_anomaly_deg", o.initial_anomaly_deg},
            {"epoch_s", o.epoch_s}};
}

Orbit orbit_from_json(const json& j) {
    Orbit o;
    o.altitude_km = real_from_json(j, "altitude_km");
    o.inclination_deg = real_or(j, "inclination_deg", 0.0);
    o.raan_deg = real_or(j, "raan_deg", 0.0);
    o.initial_anomaly_deg = real_or(j, "initial_anomaly_deg", 0.0);
    o.epoch_s = real_or(j, "epoch_s", 0.0);
    return o;
}

json eps_to_json(const EpsParams& e) {
    return {{"pair_rate_hz", e.pair_rate_hz},
            {"heralding_efficiency", e.heralding_efficiency}};
}

EpsParams eps_from_json(const json& j) {
    EpsParams e;
    e.pair_rate_hz = real_from_json(j, "pair_rate_hz");
    e.heralding_efficiency = real_or(j, "heralding_efficiency", 1.0);
    return e;
}

json bsm_to_json(const BsmParams& b) {
    return {{"success_prob_q", b.success_prob_q},
            {"indistinguishability_v", b.indistinguishability_v},
            {"coincidence_window_ps", b.coincidence_window_ps}};
}

BsmParams bsm_from_json(const json& j) {
    BsmParams b;
    b.success_prob_q = real_or(j, "success_prob_q", 0.5);
    b.indistinguishability_v = real_or(j, "indistinguishability_v", 1.0);
    b.coincidence_window_ps = real_or(j, "coincidence_window_ps", 100.0);
    return b;
}

json memory_to_json(const MemoryParams& m) {
    return {{"efficiency_eta0", m.efficiency_eta0},
            {"lifetime_tau_s", real_to_json(m.lifetime_tau_s)},
            {"cutoff_s", real_to_json(m.cutoff_s)}};
}

MemoryParams memory_from_json(const json& j) {
    MemoryParams m;
    m.efficiency_eta0 = real_or(j, "efficiency_eta0", 1.0);
    m.lifetime_tau_s =
        j.contains("lifetime_tau_s") ? real_from_json(j, "lifetime_tau_s")
                                     : std::numeric_limits<double>::infinity();
    m.cutoff_s = j.contains("cutoff_s") ? real_from_json(j, "cutoff_s")
                                        : std::numeric_limits<double>::infinity();
    return m;
}

json channel_to_json(const ChannelParams& c) {
    return {{"kind", to_string(c.kind)},
            {"fiber_alpha_db_per_km", c.fiber_alpha_db_per_km},
            {"wavelength_m", c.wavelength_m},
            {"tx_aperture_m", c.tx_aperture_m},
            {"rx_aperture_m", c.rx_aperture_m},
            {"atmospheric_penalty_db", c.atmospheric_penalty_db},
            {"pointing_loss_db", c.pointing_loss_db},
            {"system_loss_db", c.system_loss_db},
            {"detector_efficiency", c.detector_efficiency}};
}

ChannelParams channel_from_json(const json& j) {
    ChannelParams c;
    const std::string kind = j.at("kind").get<std::string>();
    const auto parsed = link_kind_from_string(kind);
    if (!parsed) throw std::runtime_error("unknown link kind: " + kind);
    c.kind = *parsed;
    c.fiber_alpha_db_per_km = real_or(j, "fiber_alpha_db_per_km", c.fiber_alpha_db_per_km);
    c.wavelength_m = real_or(j, "wavelength_m", c.wavelength_m);
    c.tx_aperture_m = real_or(j, "tx_aperture_m", c.tx_aperture_m);
    c.rx_aperture_m = real_or(j, "rx_aperture_m", c.rx_aperture_m);
    c.atmospheric_penalty_db = real_or(j, "atmospheric_penalty_db", 0.0);
    c.pointing_loss_db = real_or(j, "pointing_loss_db", 0.0);
    c.system_loss_db = real_or(j, "system_loss_db", 0.0);
    c.detector_efficiency = real_or(j, "detector_efficiency", 1.0);
    return c;
}

}  // namespace

json network_to_json(const Network& network) {
    json nodes = json::array();
    for (const auto& n : network.nodes) {
        json jn = {{"id", n.id}, {"kind", to_string(n.kind)}};
        if (n.site) jn["site"] = site_to_json(*n.site);
        if (n.orbit_ref) jn["orbit_ref"] = orbit_to_json(*n.orbit_ref);
        if (n.eps) jn["eps"] = eps_to_json(*n.eps);
        if (n.bsm) jn["bsm"] = bsm_to_json(*n.bsm);
        if (n.memory) jn["memory"] = memory_to_json(*n.memory);
        if (n.telescope_aperture_m) jn["telescope_aperture_m"] = *n.telescope_aperture_m;
        nodes.push_back(jn);
    }
    json links = json::array();
    for (const auto& l : network.links) {
        json jl = {{"a", l.a}, {"b", l.b}, {"channel", channel_to_json(l.channel)}};
        if (l.static_length_km) jl["static_length_km"] = *l.static_length_km;
        links.push_back(jl);
    }
    return {{"schema_version", kConfigSchemaVersion},
            {"classical_heralding_latency_s", network.classical_heralding_latency_s},
            {"nodes", nodes},
            {"links", links}};
}

Network network_from_json(const json& j) {
    if (j.contains("schema_version") && j["schema_version"].get<int>() != kConfigSchemaVersion)
        throw std::runtime_error("unsupported schema_version");
    Network net;
    net.classical_heralding_latency_s = real_or(j, "classical_heralding_latency_s", 0.0);
    for (const auto& jn : j.at("nodes")) {
        Node n;
        n.id = jn.at("id").get<std::string>();
        const std::string kind = jn.at("kind").get<std::string>();
        const auto parsed = node_kind_from_string(kind);
        if (!parsed) throw std::runtime_error("unknown node kind: " + kind);
        n.kind = *parsed;
        if (jn.contains("site")) n.site = site_from_json(jn["site"]);
        if (jn.contains("orbit_ref")) n.orbit_ref = orbit_from_json(jn["orbit_ref"]);
        if (jn.contains("eps")) n.eps = eps_from_json(jn["eps"]);
        if (jn.contains("bsm")) n.bsm = bsm_from_json(jn["bsm"]);
        if (jn.contains("memory")) n.memory = memory_from_json(jn["memory"]);
        if (jn.contains("telescope_aperture_m"))
            n.telescope_aperture_m = real_from_json(jn, "telescope_aperture_m");
        net.nodes.push_back(n);
    }
    for (const auto& jl : j.at("links")) {
        Link l;
        l.a = jl.at("a").get<std::string>();
        l.b = jl.at("b").get<std::string>();
        l.channel = channel_from_json(jl.at("channel"));
        if (jl.contains("static_length_km"))
            l.static_length_km = real_from_json(jl, "static_length_km");
        net.links.push_back(l);
    }
    return net;
}

json scenario_params_to_json(const ScenarioParams& p) {
    json j;
    j["schema_version"] = kConfigSchemaVersion;
    j["site_a"] = site_to_json(p.site_a);
    j["site_b"] = site_to_json(p.site_b);
    json orbits = json::array();
    for (const auto& o : p.orbits) orbits.push_back(orbit_to_json(o));
    j["orbits"] = orbits;
    if (p.eps) j["eps"] = eps_to_json(*p.eps);
    if (p.bsm) j["bsm"] = bsm_to_json(*p.bsm);
    if (p.memory) j["memory"] = memory_to_json(*p.memory);
    j["channel_defaults"] = {{"wavelength_m", p.channels.wavelength_m},
                             {"space_aperture_m", p.channels.space_aperture_m},
                             {"ground_aperture_m", p.channels.ground_aperture_m},
                             {"downlink_atmospheric_db", p.channels.downlink_atmospheric_db},
                             {"uplink_atmospheric_db", p.channels.uplink_atmospheric_db},
                             {"pointing_loss_db", p.channels.pointing_loss_db},
                             {"system_loss_db", p.channels.system_loss_db},
                             {"detector_efficiency", p.channels.detector_efficiency},
                             {"fiber_alpha_db_per_km", p.channels.fiber_alpha_db_per_km}};
    j["elevation_mask_deg"] = p.elevation_mask_deg;
    j["fiber_length_km"] = p.fiber_length_km;
    j["classical_heralding_latency_s"] = p.classical_heralding_latency_s;
    j["integrated_payload"] = p.integrated_payload;
    if (!p.node_overrides.empty()) {
        json overrides = json::object();
        for (const auto& [id, ov] : p.node_overrides) {
            json jo = json::object();
            if (ov.eps) jo["eps"] = eps_to_json(*ov.eps);
            if (ov.bsm) jo["bsm"] = bsm_to_json(*ov.bsm);
            if (ov.memory) jo["memory"] = memory_to_json(*ov.memory);
            if (ov.telescope_aperture_m) jo["telescope_aperture_m"] = *ov.telescope_aperture_m;
            overrides[id] = jo;
        }
        j["node_overrides"] = overrides;
    }
    return j;
}

ScenarioParams scenario_params_from_json(const json& j) {
    if (j.contains("schema_version") && j["schema_version"].get<int>() != kConfigSchemaVersion)
        throw std::runtime_error("unsupported schema_version");
    ScenarioParams p = default_scenario_params();
    if (j.contains("site_a")) p.site_a = site_from_json(j["site_a"]);
    if (j.contains("site_b")) p.site_b = site_from_json(j["site_b"]);
    if (j.contains("orbits")) {
        p.orbits.clear();
        for (const auto& jo : j["orbits"]) p.orbits.push_back(orbit_from_json(jo));
    }
    if (j.contains("eps"))
        p.eps = j["eps"].is_null() ? std::nullopt : std::optional(eps_from_json(j["eps"]));
    if (j.contains("bsm"))
        p.bsm = j["bsm"].is_null() ? std::nullopt : std::optional(bsm_from_json(j["bsm"]));
    if (j.contains("memory"))
        p.memory = j["memory"].is_null() ? std::nullopt
                                         : std::optional(memory_from_json(j["memory"]));
    if (j.contains("channel_defaults")) {
        const json& c = j["channel_defaults"];
        p.channels.wavelength_m = real_or(c, "wavelength_m", p.channels.wavelength_m);
        p.channels.space_aperture_m = real_or(c, "space_aperture_m", p.channels.space_aperture_m);
        p.channels.ground_aperture_m =
            real_or(c, "ground_aperture_m", p.channels.ground_aperture_m);
        p.channels.downlink_atmospheric_db =
            real_or(c, "downlink_atmospheric_db", p.channels.downlink_atmospheric_db);
        p.channels.uplink_atmospheric_db =
            real_or(c, "uplink_atmospheric_db", p.channels.uplink_atmospheric_db);
        p.channels.pointing_loss_db = real_or(c, "pointing_loss_db", p.channels.pointing_loss_db);
        p.channels.system_loss_db = real_or(c, "system_loss_db", p.channels.system_loss_db);
        p.channels.detector_efficiency =
            real_or(c, "detector_efficiency", p.channels.detector_efficiency);
        p.channels.fiber_alpha_db_per_km =
            real_or(c, "fiber_alpha_db_per_km", p.channels.fiber_alpha_db_per_km);
    }
    p.elevation_mask_deg = real_or(j, "elevation_mask_deg", p.elevation_mask_deg);
    p.fiber_length_km = real_or(j, "fiber_length_km", p.fiber_length_km);
    p.classical_heralding_latency_s =
        real_or(j, "classical_heralding_latency_s", p.classical_heralding_latency_s);
    if (j.contains("integrated_payload"))
        p.integrated_payload = j["integrated_payload"].get<bool>();
    if (j.contains("node_overrides")) {
        for (const auto& [id, jo] : j["node_overrides"].items()) {
            NodeOverride ov;
            if (jo.contains("eps")) ov.eps = eps_from_json(jo["eps"]);
            if (jo.contains("bsm")) ov.bsm = bsm_from_json(jo["bsm"]);
            if (jo.contains("memory")) ov.memory = memory_from_json(jo["memory"]);
            if (jo.contains("telescope_aperture_m"))
                ov.telescope_aperture_m = real_from_json(jo, "telescope_aperture_m");
            p.node_overrides[id] = ov;
        }
    }
    return p;
}

}  // namespace qinsim
