#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ddsim/context.hpp"
#include "ddsim/context_graph.hpp"
#include "ddsim/detection.hpp"

namespace ddsim {

// Diagnosis-side state machines. The CDS owns fleet-wide trust; LDS and SDS
// nodes mirror registrations for the devices they front. Gateways and access
// points are pure forwarders and hold no diagnosis state at all.

enum class Role : std::uint8_t { CDS = 0, LDS, SDS, HGW, AP, Device };

const char* to_string(Role r);

enum class Trust : std::uint8_t { Trusted = 0, Suspect = 1, Eliminated = 2 };

const char* to_string(Trust t);

struct RegistryEntry {
    ContextGraph stored;        // graph accepted at (re)registration
    ContextRecord base_record;  // record the stored graph was built from
    FirmwareVersion firmware;
    std::uint32_t last_epoch = 0;   // newest epoch with a Consistent verdict
    Trust trust = Trust::Trusted;   // Eliminated only ever appears at the CDS
    std::uint32_t generation = 0;   // counter-scheme generation, bumps on re-registration
    std::uint32_t stages = 0;
};

struct RoleState {
    Role role = Role::CDS;
    std::uint64_t entity_id = 0;
    std::map<std::uint64_t, RegistryEntry> registry;
};

// Simulated endpoint. Compromise state is runtime-only; the base record is
// what an honest firmware would keep reporting.
struct DeviceState {
    std::uint64_t device_id = 0;
    ContextRecord base;
    FirmwareVersion firmware;
    std::uint32_t stages = 4;
    bool compromised = false;
    bool malicious = false;      // ignores patches when true
    bool eliminated = false;
    std::optional<std::set<ContextField>> tamper_profile;  // absent unless compromised
    std::uint32_t compromise_epoch = 0;
    std::uint32_t generation = 0;     // counter generation after re-registrations
    std::uint32_t epoch_base = 0;     // period index the current generation started at
};

struct RegistrationAck {
    bool accepted = false;
    std::string reason;
};

// Registers a device at the CDS and, when the route has one, at its local
// diagnosis node. Duplicate registrations are rejected; an Eliminated
// device may only come back through the re-registration path.
RegistrationAck register_device(RoleState& cds, RoleState* local_node, const ContextRecord& record,
                                std::uint32_t stages, std::int64_t now, bool via_reregistration = false);

// The record a device hands to its diagnosis chain at the given epoch.
// Honest firmware reports its base record with the scheme counter; each
// tampered field is replaced by a seed-derived mutation that keeps the
// record well-formed, and a tampered counter stays frozen at the epoch the
// compromise happened.
ContextRecord device_emit_context(const DeviceState& dev, std::uint32_t epoch, std::uint64_t seed);

struct LocalDiagnosis {
    bool known_device = false;
    std::optional<ContextGraph> graph;  // absent for unknown devices
};

// LDS/SDS handling of one received record: build the graph locally and
// produce the digest view that travels to the CDS. Unknown devices yield no
// graph, which the CDS later surfaces as a missing report.
LocalDiagnosis local_diagnose(const RoleState& node, const ContextRecord& record, std::uint32_t stages);

struct Decision {
    Verdict verdict;
    bool decided = false;  // false when the device is not in a decidable state
};

// Periodic fleet decision for one device. Consistent advances last_epoch;
// Threat moves trust to Suspect and leaves the rest to the critical
// protocol. Devices that are not Trusted are not decided here.
Decision cds_decide(RoleState& cds, std::uint64_t seed, std::uint64_t device_id,
                    const std::vector<Report>& reports, std::uint32_t epoch,
                    const std::set<ReportSource>& required_sources);

// Trust may only move Trusted -> Suspect -> (Trusted | Eliminated).
// Throws std::logic_error on any other transition.
void set_trust(RegistryEntry& entry, Trust next);

} // namespace ddsim
