#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ddsim/config.hpp"
#include "ddsim/context.hpp"
#include "ddsim/context_graph.hpp"
#include "ddsim/detection.hpp"
#include "ddsim/roles.hpp"

namespace ddsim {

// Critical data sharing protocol. A Threat verdict opens a round for the
// device; the round walks Alarmed -> Patching -> Revalidating and resolves
// either by re-registering a recovered device or eliminating it. Message
// order within a round is fixed: alarms, then the patch, then trust
// revalidation, then exactly one resolution message.

enum class MessageKind : std::uint8_t {
    ContextShare = 0,
    DigestReport,
    PeriodStart,
    Alarm,
    PatchDispatch,
    TrustRevalidate,
    TrustAck,
    ReRegister,
    Eliminate,
};

const char* to_string(MessageKind k);

struct ProtocolMessage {
    MessageKind kind = MessageKind::ContextShare;
    std::uint64_t src = 0;
    std::uint64_t dst = 0;
    std::uint64_t device_id = 0;      // subject device
    std::uint32_t payload_bytes = 0;  // body size plus the subject's header
    // In-memory payloads; what is byte-accounted on the wire is payload_bytes.
    std::optional<ContextRecord> record;
    std::optional<ContextGraph> graph;
    std::uint32_t epoch = 0;
};

std::uint32_t body_size(const SizeTable& sizes, MessageKind k);

enum class RoundPhase : std::uint8_t {
    Alarmed = 0,
    Patching,
    Revalidating,
    ResolvedReRegistered,
    ResolvedEliminated,
};

const char* to_string(RoundPhase p);

struct ProtocolRound {
    std::uint64_t device_id = 0;
    RoundPhase phase = RoundPhase::Alarmed;
    ThreatCause cause = ThreatCause::None;
    std::int64_t alarm_at = 0;
    std::int64_t deadline = 0;  // alarm_at + 4 * period
    bool resolved = false;
};

// Which entities surround the device; ids are 0 when the route lacks them.
// The protocol uses this to pick alarm and resolution recipients per mode.
struct RouteEntities {
    RouteRegion route = RouteRegion::ViaLDS;
    Mode mode = Mode::Distributed;
    std::uint64_t cds = 0;
    std::uint64_t hgw = 0;   // ViaLDS only
    std::uint64_t lds = 0;   // ViaLDS, distributed only
    std::uint64_t ap = 0;    // ViaSDS and DirectCDS
    std::uint64_t sds = 0;   // ViaSDS, distributed only
    std::uint64_t device = 0;
};

// Opens the round and emits its alarms: threat information toward the SDS,
// trust information toward the gateway, device information toward the LDS,
// filtered to the entities actually on the device's route.
std::vector<ProtocolMessage> raise_alarm(RegistryEntry& entry, ProtocolRound& round,
                                         const RouteEntities& ents, const Verdict& verdict,
                                         std::int64_t now, std::int64_t period_ms,
                                         const SizeTable& sizes, std::uint32_t header_bytes);

// Security update pushed to the device itself.
ProtocolMessage dispatch_patch(ProtocolRound& round, const RouteEntities& ents,
                               const SizeTable& sizes, std::uint32_t header_bytes);

// Asks the device's diagnosis chain for fresh context. Distributed routes
// revalidate through their local node; centrally diagnosed devices are
// polled end to end.
ProtocolMessage revalidate_trust(ProtocolRound& round, const RouteEntities& ents,
                                 const SizeTable& sizes, std::uint32_t header_bytes);

struct ResolveOutcome {
    RoundPhase phase = RoundPhase::ResolvedEliminated;
    std::vector<ProtocolMessage> messages;
};

// Closes the round from the fresh post-patch reports. A passing check
// re-registers the device (trust restored, stored graph replaced, counter
// re-seeded under the next generation); anything else eliminates it. An
// empty report set models a missed revalidation deadline.
ResolveOutcome resolve(RoleState& cds, ProtocolRound& round, const RouteEntities& ents,
                       const std::vector<Report>& fresh_reports, const ContextRecord& fresh_record,
                       std::uint64_t seed, std::uint32_t revalidation_epoch,
                       const std::set<ReportSource>& required_sources, const SizeTable& sizes,
                       std::uint32_t header_bytes);

} // namespace ddsim
