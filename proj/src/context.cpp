#include "ddsim/context.hpp"

#include <stdexcept>

#include "ddsim/rng.hpp"

namespace ddsim {
namespace {

// Domain tags keep the derived streams for seeding, deltas, and generations
// disjoint even when the raw inputs collide.
constexpr std::uint64_t kSeedTag = 0x5345454443545230ull;
constexpr std::uint64_t kDeltaTag = 0x44454c5441435452ull;
constexpr std::uint64_t kGenerationTag = 0x47454e4354523030ull;

std::uint64_t generation_seed(std::uint64_t seed, std::uint64_t device_id, std::uint32_t generation) {
    if (generation == 0)
        return seed;
    return derive(seed, {kGenerationTag, device_id, generation});
}

} // namespace

const char* to_string(TrafficType t) {
    switch (t) {
    case TrafficType::Telemetry: return "telemetry";
    case TrafficType::Control: return "control";
    case TrafficType::Media: return "media";
    case TrafficType::Bulk: return "bulk";
    }
    return "?";
}

const char* to_string(RouteRegion r) {
    switch (r) {
    case RouteRegion::ViaLDS: return "via_lds";
    case RouteRegion::ViaSDS: return "via_sds";
    case RouteRegion::DirectCDS: return "direct_cds";
    }
    return "?";
}

ContextRecord ContextRecord::make(std::uint64_t device_id, DeviceSignature sig, UpdateCounter ctr,
                                  TrafficType traffic, std::uint32_t header_bits, MemoryRange mem,
                                  RouteRegion route) {
    if (header_bits == 0 || header_bits % 8 != 0)
        throw std::invalid_argument("context record: header length must be a positive multiple of 8 bits");
    if (mem.min_bytes > mem.max_bytes)
        throw std::invalid_argument("context record: memory range minimum exceeds maximum");
    ContextRecord rec;
    rec.device_id = device_id;
    rec.signature = sig;
    rec.counter = ctr;
    rec.traffic_type = traffic;
    rec.header_length_bits = header_bits;
    rec.memory_range = mem;
    rec.route = route;
    return rec;
}

UpdateCounter new_counter(std::uint64_t seed, std::uint64_t device_id) {
    UpdateCounter c;
    c.value = static_cast<std::uint32_t>(derive(seed, {kSeedTag, device_id}));
    c.epoch = 0;
    return c;
}

std::uint32_t next_delta(std::uint64_t seed, std::uint64_t device_id, std::uint32_t epoch) {
    // Zero deltas are re-rolled; an epoch step must always change the value.
    for (std::uint64_t attempt = 0;; ++attempt) {
        auto d = static_cast<std::uint32_t>(derive(seed, {kDeltaTag, device_id, epoch, attempt}));
        if (d != 0)
            return d;
    }
}

UpdateCounter advance_counter(const UpdateCounter& c, std::uint32_t delta) {
    UpdateCounter out;
    out.value = c.value + delta;  // mod 2^32 by unsigned wrap
    out.epoch = c.epoch + 1;
    return out;
}

UpdateCounter expected_counter_for(std::uint64_t seed, std::uint64_t device_id, std::uint32_t epoch) {
    return expected_counter_for_generation(seed, device_id, 0, epoch);
}

UpdateCounter expected_counter_for_generation(std::uint64_t seed, std::uint64_t device_id,
                                              std::uint32_t generation, std::uint32_t epoch) {
    const std::uint64_t gen_seed = generation_seed(seed, device_id, generation);
    UpdateCounter c = new_counter(gen_seed, device_id);
    for (std::uint32_t e = 0; e < epoch; ++e)
        c = advance_counter(c, next_delta(gen_seed, device_id, e));
    return c;
}

} // namespace ddsim
