#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "ddsim/config.hpp"
#include "ddsim/detection.hpp"
#include "ddsim/protocol.hpp"
#include "ddsim/roles.hpp"

namespace ddsim {

// Tab-separated, line-oriented record of one run. The transcript is the
// single source of truth for metrics: every aggregate can be recomputed
// from these lines alone, and two runs of the same (config, seed, mode)
// produce byte-identical files.

struct TickEvent {
    std::int64_t t = 0;
    std::uint32_t period = 0;  // 1-based period index
};

struct SendEvent {
    std::int64_t t = 0;
    MessageKind kind = MessageKind::ContextShare;
    std::uint64_t src = 0;
    std::uint64_t dst = 0;
    std::uint64_t device_id = 0;
    std::uint32_t payload_bytes = 0;  // body plus the device's header
    std::uint32_t hops = 0;           // links traversed end to end
};

struct DecideEvent {
    std::int64_t t = 0;
    std::uint64_t device_id = 0;
    std::uint32_t period = 0;
    Verdict verdict;
    std::int64_t tick_t = 0;  // the period tick this decision answers
};

struct CompromiseEvent {
    std::int64_t t = 0;
    std::uint64_t device_id = 0;
    std::uint32_t profile_mask = 0;  // bit per context field; 0 = stealth
};

struct PatchAvailableEvent {
    std::int64_t t = 0;
    std::uint64_t device_id = 0;
};

struct RoundEvent {
    std::int64_t t = 0;
    std::uint64_t device_id = 0;
    RoundPhase phase = RoundPhase::Alarmed;
};

struct TrustEvent {
    std::int64_t t = 0;
    std::uint64_t device_id = 0;
    Trust state = Trust::Trusted;
};

using TranscriptEvent = std::variant<TickEvent, SendEvent, DecideEvent, CompromiseEvent,
                                     PatchAvailableEvent, RoundEvent, TrustEvent>;

struct Transcript {
    std::uint64_t seed = 0;
    Mode mode = Mode::Centralized;
    std::uint32_t devices = 0;
    std::int64_t period_ms = 0;
    std::int64_t duration_ms = 0;
    std::vector<TranscriptEvent> events;
};

std::string to_tsv(const Transcript& tr);
Transcript transcript_from_tsv(const std::string& text);

void write_transcript(const Transcript& tr, const std::string& path);
Transcript read_transcript(const std::string& path);

} // namespace ddsim
