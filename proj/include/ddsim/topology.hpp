#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "ddsim/config.hpp"
#include "ddsim/roles.hpp"

namespace ddsim {

// Deployment graph: a tree rooted at the CDS. Home gateways and access
// points hang off the CDS; devices hang off exactly one gateway or access
// point according to their route. Each LDS is co-located with one HGW and
// each SDS with one AP.

constexpr std::uint64_t kCdsId = 1;
constexpr std::uint64_t kHgwBase = 100;
constexpr std::uint64_t kLdsBase = 200;
constexpr std::uint64_t kApBase = 300;
constexpr std::uint64_t kSdsBase = 400;
constexpr std::uint64_t kDeviceBase = 1000;

// Attack lifecycle for one compromised device, fixed at scenario build.
struct AttackTimeline {
    std::int64_t discovery_at = 0;        // vulnerability becomes known
    std::int64_t exploit_at = 0;          // device is taken over
    std::int64_t patch_available_at = 0;  // fix exists upstream
    std::optional<std::int64_t> patch_applied_at;  // set when the patch lands
};

struct Topology {
    std::uint64_t cds = kCdsId;
    std::vector<std::uint64_t> hgws;
    std::vector<std::uint64_t> lds_nodes;  // lds_nodes[i] sits on hgws[i]
    std::vector<std::uint64_t> aps;
    std::vector<std::uint64_t> sds_nodes;  // sds_nodes[i] sits on aps[i]
    std::vector<DeviceState> devices;

    std::map<std::uint64_t, std::uint64_t> attachment;  // device -> HGW or AP
    std::map<std::uint64_t, AttackTimeline> attacks;    // device -> lifecycle

    // Fields each attacker will mutate once its exploit lands. Kept off the
    // device itself: a device carries a tamper profile only while it is
    // actually compromised.
    std::map<std::uint64_t, std::set<ContextField>> tamper_plan;

    std::uint64_t device_id(std::uint32_t index) const { return kDeviceBase + index; }
};

// Draws the whole deployment from (config, seed): route counts by largest
// remainder, device-to-route assignment and attacker picks by seeded
// shuffle, tamper profiles uniform over the 63 non-empty field subsets,
// exploit instants on period boundaries in the first half of the run.
Topology build_topology(const ScenarioConfig& config);

// Test hooks: force specific compromise plans instead of seeded draws.
struct AttackOverride {
    std::map<std::uint32_t, std::uint32_t> profile_by_device_index;  // field bitmask, may be 0
    std::map<std::uint32_t, std::uint32_t> exploit_tick_by_device_index;
    std::map<std::uint32_t, bool> malicious_by_device_index;
};

Topology build_topology(const ScenarioConfig& config, const AttackOverride& ov);

// Entities an event or message may involve, resolved against the tree.
struct HopPath {
    std::uint32_t hops = 0;
    std::int64_t latency_ms = 0;
};

// Link walk between two entities. Co-located pairs (an LDS and its HGW, an
// SDS and its AP) are zero hops apart; the colocated latency applies once
// when a path enters or leaves the co-resident node.
HopPath resolve_path(const Topology& topo, const LatencyTable& lat, std::uint64_t from,
                     std::uint64_t to);

// The node that builds graphs for this device in the given mode, or the CDS.
std::uint64_t diagnosis_node_for(const Topology& topo, const DeviceState& dev, Mode mode);

} // namespace ddsim
