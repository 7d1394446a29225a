#include "ddsim/roles.hpp"

#include <stdexcept>

#include "ddsim/rng.hpp"

namespace ddsim {
namespace {

constexpr std::uint64_t kTamperTag = 0x54414d5045525631ull;

std::uint64_t tamper_word(std::uint64_t seed, std::uint64_t device_id, ContextField f,
                          std::uint64_t attempt) {
    return derive(seed, {kTamperTag, device_id, static_cast<std::uint64_t>(f), attempt});
}

// Applies one field's mutation. XOR with a derived mask, re-rolled whenever
// the result would be invalid or indistinguishable from the honest value.
void tamper_field(ContextRecord& rec, ContextField f, std::uint64_t seed) {
    const std::uint64_t id = rec.device_id;
    switch (f) {
    case ContextField::Signature: {
        std::uint64_t mask = tamper_word(seed, id, f, 0);
        for (std::uint64_t a = 1; mask == 0; ++a)
            mask = tamper_word(seed, id, f, a);
        rec.signature.id ^= mask;
        break;
    }
    case ContextField::Counter:
        // Handled by the caller: a tampered counter is frozen, not rewritten.
        break;
    case ContextField::Traffic: {
        const auto orig = static_cast<std::uint8_t>(rec.traffic_type);
        std::uint8_t v = orig;
        for (std::uint64_t a = 0; v == orig; ++a)
            v = static_cast<std::uint8_t>((orig ^ tamper_word(seed, id, f, a)) % 4);
        rec.traffic_type = static_cast<TrafficType>(v);
        break;
    }
    case ContextField::Header: {
        const std::uint32_t orig_bytes = rec.header_length_bits / 8;
        std::uint32_t bytes = orig_bytes;
        for (std::uint64_t a = 0; bytes == orig_bytes || bytes == 0; ++a)
            bytes = orig_bytes ^ static_cast<std::uint32_t>(tamper_word(seed, id, f, a) & 0xff);
        rec.header_length_bits = bytes * 8;
        break;
    }
    case ContextField::Memory: {
        const MemoryRange orig = rec.memory_range;
        MemoryRange m = orig;
        for (std::uint64_t a = 0; m == orig; ++a) {
            const std::uint64_t w = tamper_word(seed, id, f, a);
            m.min_bytes = orig.min_bytes ^ static_cast<std::uint32_t>(w & 0xffff);
            m.max_bytes = orig.max_bytes ^ static_cast<std::uint32_t>((w >> 16) & 0xffff);
            if (m.min_bytes > m.max_bytes)
                std::swap(m.min_bytes, m.max_bytes);
        }
        rec.memory_range = m;
        break;
    }
    case ContextField::Route: {
        const auto orig = static_cast<std::uint8_t>(rec.route);
        std::uint8_t v = orig;
        for (std::uint64_t a = 0; v == orig; ++a)
            v = static_cast<std::uint8_t>((orig ^ tamper_word(seed, id, f, a)) % 3);
        rec.route = static_cast<RouteRegion>(v);
        break;
    }
    }
}

} // namespace

const char* to_string(Role r) {
    switch (r) {
    case Role::CDS: return "cds";
    case Role::LDS: return "lds";
    case Role::SDS: return "sds";
    case Role::HGW: return "hgw";
    case Role::AP: return "ap";
    case Role::Device: return "device";
    }
    return "?";
}

const char* to_string(Trust t) {
    switch (t) {
    case Trust::Trusted: return "trusted";
    case Trust::Suspect: return "suspect";
    case Trust::Eliminated: return "eliminated";
    }
    return "?";
}

void set_trust(RegistryEntry& entry, Trust next) {
    const Trust cur = entry.trust;
    const bool ok = (cur == Trust::Trusted && next == Trust::Suspect) ||
                    (cur == Trust::Suspect && next == Trust::Trusted) ||
                    (cur == Trust::Suspect && next == Trust::Eliminated) ||
                    cur == next;
    if (!ok)
        throw std::logic_error(std::string("illegal trust transition ") + to_string(cur) + " -> " +
                               to_string(next));
    entry.trust = next;
}

RegistrationAck register_device(RoleState& cds, RoleState* local_node, const ContextRecord& record,
                                std::uint32_t stages, std::int64_t now, bool via_reregistration) {
    if (record.signature.issued_at > now)
        return {false, "signature issued in the future"};

    auto it = cds.registry.find(record.device_id);
    if (it != cds.registry.end()) {
        if (it->second.trust == Trust::Eliminated && !via_reregistration)
            return {false, "device was eliminated"};
        if (it->second.trust != Trust::Eliminated && !via_reregistration)
            return {false, "device already registered"};
    }

    RegistryEntry entry;
    entry.stored = build_graph(record, stages);
    entry.base_record = record;
    entry.last_epoch = record.counter.epoch;
    entry.trust = Trust::Trusted;
    entry.generation = (it != cds.registry.end() && via_reregistration) ? it->second.generation + 1 : 0;
    entry.stages = stages;
    if (it != cds.registry.end())
        entry.firmware = it->second.firmware;

    cds.registry[record.device_id] = entry;
    if (local_node != nullptr)
        local_node->registry[record.device_id] = entry;
    return {true, ""};
}

ContextRecord device_emit_context(const DeviceState& dev, std::uint32_t epoch, std::uint64_t seed) {
    ContextRecord rec = dev.base;
    rec.counter = expected_counter_for_generation(seed, dev.device_id, dev.generation, epoch);

    if (!dev.compromised || !dev.tamper_profile || dev.tamper_profile->empty())
        return rec;

    for (ContextField f : *dev.tamper_profile) {
        if (f == ContextField::Counter) {
            // Compromised firmware loses the scheme: the counter stays at
            // whatever epoch the device was taken over in.
            rec.counter =
                expected_counter_for_generation(seed, dev.device_id, dev.generation, dev.compromise_epoch);
        } else {
            tamper_field(rec, f, seed);
        }
    }
    return rec;
}

LocalDiagnosis local_diagnose(const RoleState& node, const ContextRecord& record, std::uint32_t stages) {
    LocalDiagnosis out;
    out.known_device = node.registry.count(record.device_id) > 0;
    if (out.known_device)
        out.graph = build_graph(record, stages);
    return out;
}

Decision cds_decide(RoleState& cds, std::uint64_t seed, std::uint64_t device_id,
                    const std::vector<Report>& reports, std::uint32_t epoch,
                    const std::set<ReportSource>& required_sources) {
    auto it = cds.registry.find(device_id);
    if (it == cds.registry.end() || it->second.trust != Trust::Trusted)
        return {Verdict{}, false};

    RegistryEntry& entry = it->second;
    const UpdateCounter expected =
        expected_counter_for_generation(seed, device_id, entry.generation, epoch);
    const Verdict v = mutual_exclusion_check(entry.stored, reports, expected, required_sources);

    if (v.kind == VerdictKind::Consistent)
        entry.last_epoch = epoch;
    else
        set_trust(entry, Trust::Suspect);
    return {v, true};
}

} // namespace ddsim
