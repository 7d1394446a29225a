#pragma once

#include <cstdint>
#include <set>
#include <string>

namespace ddsim {

// The six descriptor fields every managed device reports each period.
// Together they form the device's strategic context: identity, update
// counter, traffic class, header envelope, packet memory range, and the
// diagnosis route the device is registered under.

enum class TrafficType : std::uint8_t { Telemetry = 0, Control = 1, Media = 2, Bulk = 3 };

enum class RouteRegion : std::uint8_t { ViaLDS = 0, ViaSDS = 1, DirectCDS = 2 };

const char* to_string(TrafficType t);
const char* to_string(RouteRegion r);

struct DeviceSignature {
    std::uint64_t id = 0;        // opaque identity token, unique per scenario
    std::int64_t issued_at = 0;  // ms timestamp, never later than registration

    friend bool operator==(const DeviceSignature&, const DeviceSignature&) = default;
};

struct UpdateCounter {
    std::uint32_t value = 0;
    std::uint32_t epoch = 0;

    friend bool operator==(const UpdateCounter&, const UpdateCounter&) = default;
};

struct MemoryRange {
    std::uint32_t min_bytes = 0;
    std::uint32_t max_bytes = 0;

    friend bool operator==(const MemoryRange&, const MemoryRange&) = default;
};

struct FirmwareVersion {
    std::uint32_t version = 1;             // strictly increases on every applied patch
    std::set<std::uint64_t> patched_against;

    friend bool operator==(const FirmwareVersion&, const FirmwareVersion&) = default;
};

// Validated value object. make() rejects structurally invalid field
// combinations so downstream code never sees a malformed record.
struct ContextRecord {
    std::uint64_t device_id = 0;
    DeviceSignature signature;
    UpdateCounter counter;
    TrafficType traffic_type = TrafficType::Telemetry;
    std::uint32_t header_length_bits = 0;  // > 0, multiple of 8
    MemoryRange memory_range;              // min_bytes <= max_bytes
    RouteRegion route = RouteRegion::ViaLDS;

    static ContextRecord make(std::uint64_t device_id, DeviceSignature sig, UpdateCounter ctr,
                              TrafficType traffic, std::uint32_t header_bits, MemoryRange mem,
                              RouteRegion route);

    friend bool operator==(const ContextRecord&, const ContextRecord&) = default;
};

// Update-counter scheme. The CDS and each legitimate device derive the same
// per-epoch sequence from the scenario seed, so any node can compute the
// value a healthy device must report at a given epoch.

UpdateCounter new_counter(std::uint64_t seed, std::uint64_t device_id);

// Scheduled per-epoch increment; never zero, so consecutive epochs always
// differ in value unless the 32-bit sum wraps onto itself by other deltas.
std::uint32_t next_delta(std::uint64_t seed, std::uint64_t device_id, std::uint32_t epoch);

UpdateCounter advance_counter(const UpdateCounter& c, std::uint32_t delta);

UpdateCounter expected_counter_for(std::uint64_t seed, std::uint64_t device_id, std::uint32_t epoch);

// Re-registered devices restart the scheme under a bumped generation so the
// fresh epoch-0 value is unrelated to the retired sequence. Generation 0 is
// the plain scheme above.
UpdateCounter expected_counter_for_generation(std::uint64_t seed, std::uint64_t device_id,
                                              std::uint32_t generation, std::uint32_t epoch);

} // namespace ddsim
