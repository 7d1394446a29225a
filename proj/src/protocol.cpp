#include "ddsim/protocol.hpp"

#include <stdexcept>

namespace ddsim {
namespace {

ProtocolMessage make_msg(MessageKind kind, std::uint64_t src, std::uint64_t dst,
                         std::uint64_t device_id, const SizeTable& sizes, std::uint32_t header_bytes) {
    ProtocolMessage m;
    m.kind = kind;
    m.src = src;
    m.dst = dst;
    m.device_id = device_id;
    m.payload_bytes = body_size(sizes, kind) + header_bytes;
    return m;
}

} // namespace

const char* to_string(MessageKind k) {
    switch (k) {
    case MessageKind::ContextShare: return "context_share";
    case MessageKind::DigestReport: return "digest_report";
    case MessageKind::PeriodStart: return "period_start";
    case MessageKind::Alarm: return "alarm";
    case MessageKind::PatchDispatch: return "patch_dispatch";
    case MessageKind::TrustRevalidate: return "trust_revalidate";
    case MessageKind::TrustAck: return "trust_ack";
    case MessageKind::ReRegister: return "reregister";
    case MessageKind::Eliminate: return "eliminate";
    }
    return "?";
}

const char* to_string(RoundPhase p) {
    switch (p) {
    case RoundPhase::Alarmed: return "alarmed";
    case RoundPhase::Patching: return "patching";
    case RoundPhase::Revalidating: return "revalidating";
    case RoundPhase::ResolvedReRegistered: return "resolved_reregistered";
    case RoundPhase::ResolvedEliminated: return "resolved_eliminated";
    }
    return "?";
}

std::uint32_t body_size(const SizeTable& sizes, MessageKind k) {
    switch (k) {
    case MessageKind::ContextShare: return sizes.context_share;
    case MessageKind::DigestReport: return sizes.digest_report;
    case MessageKind::PeriodStart: return sizes.period_start;
    case MessageKind::Alarm: return sizes.alarm;
    case MessageKind::PatchDispatch: return sizes.patch_dispatch;
    case MessageKind::TrustRevalidate: return sizes.trust_revalidate;
    case MessageKind::TrustAck: return sizes.trust_ack;
    case MessageKind::ReRegister: return sizes.reregister;
    case MessageKind::Eliminate: return sizes.eliminate;
    }
    throw std::logic_error("unknown message kind");
}

std::vector<ProtocolMessage> raise_alarm(RegistryEntry& entry, ProtocolRound& round,
                                         const RouteEntities& ents, const Verdict& verdict,
                                         std::int64_t now, std::int64_t period_ms,
                                         const SizeTable& sizes, std::uint32_t header_bytes) {
    if (verdict.kind != VerdictKind::Threat)
        throw std::invalid_argument("raise_alarm: round requires a threat verdict");
    if (entry.trust != Trust::Suspect)
        throw std::invalid_argument("raise_alarm: device is not suspect");
    if (round.device_id != 0 && !round.resolved)
        throw std::logic_error("raise_alarm: a round is already open for this device");

    round.device_id = ents.device;
    round.phase = RoundPhase::Alarmed;
    round.cause = verdict.cause;
    round.alarm_at = now;
    round.deadline = now + 4 * period_ms;
    round.resolved = false;

    // Alarm fan-out follows the route: threat intelligence to the SDS, trust
    // information to the gateway, device information to the LDS. Only
    // entities that exist on this route and in this mode are addressed.
    std::vector<ProtocolMessage> out;
    if (ents.mode == Mode::Distributed && ents.sds != 0)
        out.push_back(make_msg(MessageKind::Alarm, ents.cds, ents.sds, ents.device, sizes, header_bytes));
    if (ents.hgw != 0)
        out.push_back(make_msg(MessageKind::Alarm, ents.cds, ents.hgw, ents.device, sizes, header_bytes));
    if (ents.mode == Mode::Distributed && ents.lds != 0)
        out.push_back(make_msg(MessageKind::Alarm, ents.cds, ents.lds, ents.device, sizes, header_bytes));
    return out;
}

ProtocolMessage dispatch_patch(ProtocolRound& round, const RouteEntities& ents,
                               const SizeTable& sizes, std::uint32_t header_bytes) {
    if (round.phase != RoundPhase::Alarmed)
        throw std::logic_error("dispatch_patch: round is not in the alarmed phase");
    round.phase = RoundPhase::Patching;
    return make_msg(MessageKind::PatchDispatch, ents.cds, ents.device, ents.device, sizes, header_bytes);
}

ProtocolMessage revalidate_trust(ProtocolRound& round, const RouteEntities& ents,
                                 const SizeTable& sizes, std::uint32_t header_bytes) {
    if (round.phase != RoundPhase::Patching)
        throw std::logic_error("revalidate_trust: round is not in the patching phase");
    round.phase = RoundPhase::Revalidating;

    // Distributed routes revalidate through the local diagnosis node, which
    // polls its device itself; everything else is asked end to end.
    std::uint64_t dst = ents.device;
    if (ents.mode == Mode::Distributed && ents.lds != 0)
        dst = ents.lds;
    else if (ents.mode == Mode::Distributed && ents.sds != 0)
        dst = ents.sds;
    return make_msg(MessageKind::TrustRevalidate, ents.cds, dst, ents.device, sizes, header_bytes);
}

ResolveOutcome resolve(RoleState& cds, ProtocolRound& round, const RouteEntities& ents,
                       const std::vector<Report>& fresh_reports, const ContextRecord& fresh_record,
                       std::uint64_t seed, std::uint32_t revalidation_epoch,
                       const std::set<ReportSource>& required_sources, const SizeTable& sizes,
                       std::uint32_t header_bytes) {
    if (round.phase != RoundPhase::Revalidating)
        throw std::logic_error("resolve: round is not in the revalidating phase");
    if (round.resolved)
        throw std::logic_error("resolve: round already resolved");

    auto it = cds.registry.find(round.device_id);
    if (it == cds.registry.end())
        throw std::logic_error("resolve: device missing from CDS registry");
    RegistryEntry& entry = it->second;

    Verdict v{VerdictKind::Threat, ThreatCause::MissingReport};
    if (!fresh_reports.empty()) {
        const UpdateCounter expected = expected_counter_for_generation(
            seed, round.device_id, entry.generation, revalidation_epoch);
        v = mutual_exclusion_check(entry.stored, fresh_reports, expected, required_sources);
    }

    ResolveOutcome out;
    round.resolved = true;
    if (v.kind == VerdictKind::Consistent) {
        // Recovered: trust restored, stored model replaced by the fresh
        // context, counter scheme restarted under the next generation.
        set_trust(entry, Trust::Trusted);
        entry.firmware.version += 1;
        ContextRecord reset = fresh_record;
        reset.counter = expected_counter_for_generation(seed, round.device_id, entry.generation + 1, 0);
        entry.stored = build_graph(reset, entry.stages);
        entry.base_record = reset;
        entry.generation += 1;
        entry.last_epoch = 0;

        round.phase = RoundPhase::ResolvedReRegistered;
        out.phase = round.phase;
        out.messages.push_back(
            make_msg(MessageKind::ReRegister, ents.cds, ents.device, ents.device, sizes, header_bytes));
        return out;
    }

    set_trust(entry, Trust::Eliminated);
    round.phase = RoundPhase::ResolvedEliminated;
    out.phase = round.phase;

    // The removal notice goes where the device's registry lives: its local
    // diagnosis node in distributed mode, otherwise the edge that fronts it.
    std::uint64_t dst = 0;
    if (ents.mode == Mode::Distributed && ents.lds != 0)
        dst = ents.lds;
    else if (ents.mode == Mode::Distributed && ents.sds != 0)
        dst = ents.sds;
    else if (ents.hgw != 0)
        dst = ents.hgw;
    else if (ents.ap != 0)
        dst = ents.ap;
    if (dst != 0)
        out.messages.push_back(make_msg(MessageKind::Eliminate, ents.cds, dst, ents.device, sizes, header_bytes));
    return out;
}

} // namespace ddsim
