#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace qinsim {

inline constexpr const char* kToolVersion = "0.1.0";

// Provenance record emitted alongside every result: enough to re-run the
// command and check the config was the same.
struct RunManifest {
    std::string tool_version = kToolVersion;
    std::string subcommand;
    std::vector<std::string> args;
    std::string config_path;    // "-" when no config file was used
    std::string config_digest;  // fnv1a64 hex of the config bytes
    std::string digest_algorithm = "fnv1a64";
    std::uint64_t seed = 0;
    std::string timestamp;  // ISO-8601 UTC

    nlohmann::json to_json() const;
};

std::uint64_t fnv1a64(const std::string& bytes);
std::string fnv1a64_hex(const std::string& bytes);
std::string iso8601_utc_now();

// Builds a manifest for the current run; digest covers the config file bytes
// when a path is given.
RunManifest make_manifest(const std::string& subcommand, const std::vector<std::string>& args,
                          const std::string& config_path, std::uint64_t seed);

// Writes `<result_path>.manifest.json`, or one JSON line to `fallback`
// when results went to stdout.
void emit_manifest(const RunManifest& manifest, const std::string& result_path,
                   std::ostream& fallback);

}  // namespace qinsim
