#include "ddsim/detection.hpp"

#include <stdexcept>
#include <string>

namespace ddsim {
namespace {

// Evidence classes in decision priority order. Counter desync outranks the
// other descriptor mismatches; a missing view is only reported when all
// present views look clean.
constexpr ContextField kFieldPriority[] = {
    ContextField::Counter, ContextField::Signature, ContextField::Traffic,
    ContextField::Header,  ContextField::Memory,    ContextField::Route,
};

ThreatCause cause_for(ContextField f) {
    switch (f) {
    case ContextField::Counter: return ThreatCause::CounterMismatch;
    case ContextField::Signature: return ThreatCause::SignatureMismatch;
    case ContextField::Traffic: return ThreatCause::TrafficMismatch;
    case ContextField::Header: return ThreatCause::HeaderMismatch;
    case ContextField::Memory: return ThreatCause::MemoryMismatch;
    case ContextField::Route: return ThreatCause::RouteMismatch;
    }
    return ThreatCause::None;
}

} // namespace

const char* to_string(ReportSource s) {
    switch (s) {
    case ReportSource::Device: return "device";
    case ReportSource::LDS: return "lds";
    case ReportSource::SDS: return "sds";
    case ReportSource::HGW: return "hgw";
    }
    return "?";
}

const char* to_string(VerdictKind k) {
    return k == VerdictKind::Consistent ? "consistent" : "threat";
}

const char* to_string(ThreatCause c) {
    switch (c) {
    case ThreatCause::None: return "none";
    case ThreatCause::CounterMismatch: return "counter_mismatch";
    case ThreatCause::SignatureMismatch: return "signature_mismatch";
    case ThreatCause::TrafficMismatch: return "traffic_mismatch";
    case ThreatCause::HeaderMismatch: return "header_mismatch";
    case ThreatCause::MemoryMismatch: return "memory_mismatch";
    case ThreatCause::RouteMismatch: return "route_mismatch";
    case ThreatCause::MissingReport: return "missing_report";
    }
    return "?";
}

ThreatCause threat_cause_from_string(const std::string& s) {
    for (int i = 0; i <= static_cast<int>(ThreatCause::MissingReport); ++i) {
        auto c = static_cast<ThreatCause>(i);
        if (s == to_string(c))
            return c;
    }
    throw std::invalid_argument("unknown threat cause: " + s);
}

Verdict mutual_exclusion_check(const ContextGraph& stored, const std::vector<Report>& reports,
                               const UpdateCounter& expected_counter,
                               const std::set<ReportSource>& required_sources) {
    for (const auto& r : reports) {
        if (r.graph.device_id() != stored.device_id())
            throw std::invalid_argument("mutual exclusion check: report for a different device");
    }

    const ContextGraph expected = stored.with_counter(expected_counter);

    bool all_match = true;
    for (const auto& r : reports) {
        if (r.graph.fingerprint() != expected.fingerprint() ||
            r.graph.decoded_counter() != expected_counter) {
            all_match = false;
            break;
        }
    }

    std::set<ReportSource> present;
    for (const auto& r : reports)
        present.insert(r.source);
    bool complete = true;
    for (auto s : required_sources)
        if (!present.count(s)) {
            complete = false;
            break;
        }

    if (all_match && complete)
        return {VerdictKind::Consistent, ThreatCause::None};

    if (!all_match) {
        for (ContextField f : kFieldPriority) {
            for (const auto& r : reports) {
                if (r.graph.label_bytes(f) != expected.label_bytes(f))
                    return {VerdictKind::Threat, cause_for(f)};
            }
        }
        // Fingerprints disagree while every descriptor matches: the pipeline
        // structure itself was altered, which is an identity-shape change.
        return {VerdictKind::Threat, ThreatCause::SignatureMismatch};
    }
    return {VerdictKind::Threat, ThreatCause::MissingReport};
}

} // namespace ddsim
