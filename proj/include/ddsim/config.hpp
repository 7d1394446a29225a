#pragma once

#include <cstdint>
#include <string>

namespace ddsim {

enum class Mode : std::uint8_t { Centralized = 0, Distributed = 1, Both = 2 };

const char* to_string(Mode m);
Mode mode_from_string(const std::string& s);

// Per-hop link latencies and compute cost. Calibration values: together
// with the default route mix they put the centralized/distributed deltas
// where a 500-device fleet is expected to land.
struct LatencyTable {
    std::int64_t device_gw_ms = 5;    // device to its HGW or AP
    std::int64_t gw_cds_ms = 40;      // HGW or AP to the CDS
    std::int64_t colocated_ms = 0;    // diagnosis node on its host gateway
    std::int64_t graph_build_ms = 2;  // serialized per graph at the building node
};

// Message body sizes in bytes; the per-device header is added on top.
struct SizeTable {
    std::uint32_t context_share = 64;
    std::uint32_t digest_report = 24;
    std::uint32_t period_start = 16;
    std::uint32_t alarm = 32;
    std::uint32_t patch_dispatch = 128;
    std::uint32_t trust_revalidate = 16;
    std::uint32_t trust_ack = 24;
    std::uint32_t reregister = 64;
    std::uint32_t eliminate = 16;
};

struct ScenarioConfig {
    std::uint64_t seed = 42;
    Mode mode = Mode::Both;
    std::uint32_t devices = 500;
    double attacker_fraction = 0.2;
    double malicious_share_of_attackers = 0.5;
    double route_mix_lds = 0.77;
    double route_mix_sds = 0.03;
    double route_mix_direct = 0.20;
    std::int64_t period_ms = 1000;
    std::int64_t duration_ms = 10000;
    std::uint32_t stages = 4;
    std::uint32_t num_hgws = 1;
    std::uint32_t num_aps = 1;
    std::uint32_t header_bits = 1024;  // per-device context header envelope
    double patch_efficacy = 1.0;
    LatencyTable latency;
    SizeTable sizes;
};

// Parses flat key=value text ('#' starts a comment). Unknown keys, malformed
// lines, and out-of-range values throw std::invalid_argument naming the
// offending line or key. Missing keys keep their defaults.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);

// Canonical form: sorted keys, one per line. parse(serialize(c)) == c.
std::string serialize_config(const ScenarioConfig& c);

// Range and consistency checks; throws std::invalid_argument on violation.
void validate_config(const ScenarioConfig& c);

} // namespace ddsim
