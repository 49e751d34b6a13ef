#include "qinsim/manifest.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

namespace qinsim {

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string fnv1a64_hex(const std::string& bytes) {
    std::ostringstream os;
    os << std::hex << fnv1a64(bytes);
    return os.str();
}

std::string iso8601_utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

nlohmann::json RunManifest::to_json() const {
    return {{"tool_version", tool_version},
            {"subcommand", subcommand},
            {"args", args},
            {"config_path", config_path},
            {"config_digest", config_digest},
            {"digest_algorithm", digest_algorithm},
            {"seed", seed},
            {"timestamp", timestamp}};
}

RunManifest make_manifest(const std::string& subcommand, const std::vector<std::string>& args,
                          const std::string& config_path, std::uint64_t seed) {
    RunManifest m;
    m.subcommand = subcommand;
    m.args = args;
    m.seed = seed;
    m.timestamp = iso8601_utc_now();
    if (config_path.empty() || config_path == "-") {
        m.config_path = "-";
        m.config_digest = fnv1a64_hex("");
    } else {
        m.config_path = config_path;
        std::ifstream in(config_path, std::ios::binary);
        std::stringstream buf;
        buf << in.rdbuf();
        m.config_digest = fnv1a64_hex(buf.str());
    }
    return m;
}

void emit_manifest(const RunManifest& manifest, const std::string& result_path,
                   std::ostream& fallback) {
    if (!result_path.empty() && result_path != "-") {
        std::ofstream out(result_path + ".manifest.json");
        out << manifest.to_json().dump(2) << "\n";
    } else {
        fallback << manifest.to_json().dump() << "\n";
    }
}

}  // namespace qinsim
