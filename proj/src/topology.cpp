#include "ddsim/topology.hpp"

#include <algorithm>
#include <stdexcept>

#include "ddsim/rng.hpp"

namespace ddsim {
namespace {

constexpr std::uint64_t kRouteShuffleTag = 0x524f555445534846ull;
constexpr std::uint64_t kAttackerTag = 0x4154544b53454c31ull;
constexpr std::uint64_t kMaliciousTag = 0x4d414c53504c4954ull;
constexpr std::uint64_t kProfileTag = 0x50524f46494c4531ull;
constexpr std::uint64_t kExploitTag = 0x4558504c4f495431ull;
constexpr std::uint64_t kTimelineTag = 0x54494d454c494e45ull;
constexpr std::uint64_t kRecordTag = 0x5245434f52444456ull;
constexpr std::uint64_t kSignatureTag = 0x5349474e41545552ull;

void seeded_shuffle(std::vector<std::uint32_t>& v, SplitMix64& rng) {
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[rng.next_below(i)]);
}

// Route counts from fractions by largest remainder; ties resolve in route
// order so the split is a pure function of (fractions, device count).
std::array<std::uint32_t, 3> route_counts(const ScenarioConfig& c) {
    const double fr[3] = {c.route_mix_lds, c.route_mix_sds, c.route_mix_direct};
    std::array<std::uint32_t, 3> n{};
    double rem[3];
    std::uint32_t assigned = 0;
    for (int i = 0; i < 3; ++i) {
        const double exact = fr[i] * c.devices;
        n[i] = static_cast<std::uint32_t>(exact);
        rem[i] = exact - n[i];
        assigned += n[i];
    }
    while (assigned < c.devices) {
        int best = 0;
        for (int i = 1; i < 3; ++i)
            if (rem[i] > rem[best])
                best = i;
        n[best] += 1;
        rem[best] = -1.0;
        assigned += 1;
    }
    return n;
}

std::optional<std::size_t> find_index(const std::vector<std::uint64_t>& v, std::uint64_t id) {
    const auto it = std::find(v.begin(), v.end(), id);
    if (it == v.end())
        return std::nullopt;
    return static_cast<std::size_t>(it - v.begin());
}

// Hop distance from an entity up to the CDS, with per-link latency.
// Devices sit two links out, gateways and access points one, co-located
// diagnosis nodes share their host's uplink.
std::vector<std::int64_t> uplink(const Topology& topo, const LatencyTable& lat, std::uint64_t id) {
    if (id == topo.cds)
        return {};
    if (find_index(topo.hgws, id) || find_index(topo.aps, id))
        return {lat.gw_cds_ms};
    if (find_index(topo.lds_nodes, id) || find_index(topo.sds_nodes, id))
        return {lat.colocated_ms + lat.gw_cds_ms};
    const auto att = topo.attachment.find(id);
    if (att == topo.attachment.end())
        throw std::invalid_argument("topology: unknown entity in path resolution");
    return {lat.device_gw_ms, lat.gw_cds_ms};
}

// Host gateway of an entity (itself for gateways; the attachment for
// devices and co-located nodes). Used to detect shared-subtree shortcuts.
std::uint64_t host_of(const Topology& topo, std::uint64_t id) {
    if (id == topo.cds)
        return topo.cds;
    if (find_index(topo.hgws, id) || find_index(topo.aps, id))
        return id;
    if (auto i = find_index(topo.lds_nodes, id))
        return topo.hgws[*i];
    if (auto i = find_index(topo.sds_nodes, id))
        return topo.aps[*i];
    const auto att = topo.attachment.find(id);
    if (att == topo.attachment.end())
        throw std::invalid_argument("topology: unknown entity in path resolution");
    return att->second;
}

} // namespace

Topology build_topology(const ScenarioConfig& config) {
    return build_topology(config, AttackOverride{});
}

Topology build_topology(const ScenarioConfig& config, const AttackOverride& ov) {
    validate_config(config);

    Topology topo;
    for (std::uint32_t i = 0; i < config.num_hgws; ++i) {
        topo.hgws.push_back(kHgwBase + i);
        topo.lds_nodes.push_back(kLdsBase + i);
    }
    for (std::uint32_t i = 0; i < config.num_aps; ++i) {
        topo.aps.push_back(kApBase + i);
        topo.sds_nodes.push_back(kSdsBase + i);
    }

    const auto counts = route_counts(config);

    std::vector<std::uint32_t> order(config.devices);
    for (std::uint32_t i = 0; i < config.devices; ++i)
        order[i] = i;
    SplitMix64 route_rng(derive(config.seed, {kRouteShuffleTag}));
    seeded_shuffle(order, route_rng);

    std::map<std::uint32_t, RouteRegion> route_of;
    for (std::uint32_t k = 0; k < config.devices; ++k) {
        RouteRegion r = RouteRegion::DirectCDS;
        if (k < counts[0])
            r = RouteRegion::ViaLDS;
        else if (k < counts[0] + counts[1])
            r = RouteRegion::ViaSDS;
        route_of[order[k]] = r;
    }

    // Attacker picks, honest/malicious split, profiles, exploit instants.
    const auto n_attackers = static_cast<std::uint32_t>(config.attacker_fraction * config.devices);
    std::vector<std::uint32_t> attack_order = order;
    SplitMix64 attacker_rng(derive(config.seed, {kAttackerTag}));
    seeded_shuffle(attack_order, attacker_rng);
    std::set<std::uint32_t> attackers(attack_order.begin(), attack_order.begin() + n_attackers);

    std::vector<std::uint32_t> att_sorted(attackers.begin(), attackers.end());
    std::vector<std::uint32_t> mal_order = att_sorted;
    SplitMix64 mal_rng(derive(config.seed, {kMaliciousTag}));
    seeded_shuffle(mal_order, mal_rng);
    const auto n_malicious =
        static_cast<std::uint32_t>(config.malicious_share_of_attackers * n_attackers);
    std::set<std::uint32_t> malicious(mal_order.begin(), mal_order.begin() + n_malicious);

    const std::int64_t periods = config.duration_ms / config.period_ms;
    const std::int64_t first_half = std::max<std::int64_t>(1, periods / 2);

    std::uint32_t lds_rr = 0, sds_rr = 0, ap_rr = 0;
    for (std::uint32_t i = 0; i < config.devices; ++i) {
        const std::uint64_t id = topo.device_id(i);
        const RouteRegion route = route_of[i];

        SplitMix64 rec_rng(derive(config.seed, {kRecordTag, id}));
        DeviceSignature sig{derive(config.seed, {kSignatureTag, id}), 0};
        const auto traffic = static_cast<TrafficType>(rec_rng.next_below(4));
        const auto mem_min = static_cast<std::uint32_t>(32 + rec_rng.next_below(97));
        const auto mem_max = mem_min + static_cast<std::uint32_t>(rec_rng.next_below(1025));

        DeviceState dev;
        dev.device_id = id;
        dev.stages = config.stages;
        dev.base = ContextRecord::make(id, sig, new_counter(config.seed, id), traffic,
                                       config.header_bits, {mem_min, mem_max}, route);

        switch (route) {
        case RouteRegion::ViaLDS:
            topo.attachment[id] = topo.hgws[lds_rr++ % topo.hgws.size()];
            break;
        case RouteRegion::ViaSDS:
            topo.attachment[id] = topo.aps[sds_rr++ % topo.aps.size()];
            break;
        case RouteRegion::DirectCDS:
            topo.attachment[id] = topo.aps[ap_rr++ % topo.aps.size()];
            break;
        }

        const bool forced = ov.profile_by_device_index.count(i) > 0;
        if (attackers.count(i) || forced) {
            std::uint32_t mask;
            if (forced) {
                mask = ov.profile_by_device_index.at(i);
            } else {
                // Uniform over the 63 non-empty subsets of the six fields.
                mask = 1 + static_cast<std::uint32_t>(derive(config.seed, {kProfileTag, id}) % 63);
            }
            std::set<ContextField> profile;
            for (int b = 0; b < kContextFieldCount; ++b)
                if (mask & (1u << b))
                    profile.insert(static_cast<ContextField>(b));
            topo.tamper_plan[id] = std::move(profile);

            bool is_malicious = malicious.count(i) > 0;
            if (auto mit = ov.malicious_by_device_index.find(i); mit != ov.malicious_by_device_index.end())
                is_malicious = mit->second;
            dev.malicious = is_malicious;

            std::int64_t exploit_tick;
            if (auto eit = ov.exploit_tick_by_device_index.find(i);
                eit != ov.exploit_tick_by_device_index.end())
                exploit_tick = eit->second;
            else
                exploit_tick = 1 + static_cast<std::int64_t>(derive(config.seed, {kExploitTag, id}) %
                                                             static_cast<std::uint64_t>(first_half));

            // Compromise lands just ahead of a reporting boundary, so the
            // first tampered report is the tick right after exploit_at.
            AttackTimeline tl;
            tl.exploit_at = exploit_tick * config.period_ms - 1;
            const auto w1 = static_cast<std::int64_t>(derive(config.seed, {kTimelineTag, id, 1}) %
                                                      static_cast<std::uint64_t>(config.period_ms));
            const auto w2 = static_cast<std::int64_t>(derive(config.seed, {kTimelineTag, id, 2}) %
                                                      static_cast<std::uint64_t>(config.period_ms));
            tl.discovery_at = std::max<std::int64_t>(0, tl.exploit_at - config.period_ms - w1);
            tl.patch_available_at = tl.discovery_at + w2;
            topo.attacks[id] = tl;
        }

        topo.devices.push_back(std::move(dev));
    }
    return topo;
}

HopPath resolve_path(const Topology& topo, const LatencyTable& lat, std::uint64_t from,
                     std::uint64_t to) {
    if (from == to)
        return {0, 0};

    const std::uint64_t host_from = host_of(topo, from);
    const std::uint64_t host_to = host_of(topo, to);

    // Co-located pairs exchange without touching any link.
    if (host_from == host_to) {
        const bool from_is_host = from == host_from;
        const bool to_is_host = to == host_to;
        if (from_is_host || to_is_host) {
            // Gateway <-> resident diagnosis node.
            if (find_index(topo.lds_nodes, from) || find_index(topo.sds_nodes, from) ||
                find_index(topo.lds_nodes, to) || find_index(topo.sds_nodes, to))
                return {0, lat.colocated_ms};
            // Gateway <-> attached device: one access link.
            return {1, lat.device_gw_ms};
        }
        // Device <-> resident diagnosis node of the same gateway.
        return {1, lat.device_gw_ms + lat.colocated_ms};
    }

    const auto up_from = uplink(topo, lat, from);
    const auto up_to = uplink(topo, lat, to);
    HopPath p;
    for (std::int64_t ms : up_from) {
        p.hops += 1;
        p.latency_ms += ms;
    }
    for (std::int64_t ms : up_to) {
        p.hops += 1;
        p.latency_ms += ms;
    }
    return p;
}

std::uint64_t diagnosis_node_for(const Topology& topo, const DeviceState& dev, Mode mode) {
    if (mode == Mode::Centralized || dev.base.route == RouteRegion::DirectCDS)
        return topo.cds;
    const std::uint64_t host = topo.attachment.at(dev.device_id);
    if (auto i = find_index(topo.hgws, host))
        return topo.lds_nodes[*i];
    if (auto i = find_index(topo.aps, host))
        return topo.sds_nodes[*i];
    throw std::logic_error("topology: device attached to unknown host");
}

} // namespace ddsim
