#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "ddsim/context.hpp"
#include "ddsim/context_graph.hpp"

namespace ddsim {

// Decision rule at the CDS: a device is healthy only when every view of its
// context agrees with the stored model at the expected counter epoch and no
// mandated view is missing. The first failing evidence class, in a fixed
// priority order, names the cause.

enum class ReportSource : std::uint8_t { Device = 0, LDS = 1, SDS = 2, HGW = 3 };

const char* to_string(ReportSource s);

enum class VerdictKind : std::uint8_t { Consistent = 0, Threat = 1 };

enum class ThreatCause : std::uint8_t {
    None = 0,
    CounterMismatch,
    SignatureMismatch,
    TrafficMismatch,
    HeaderMismatch,
    MemoryMismatch,
    RouteMismatch,
    MissingReport,
};

const char* to_string(VerdictKind k);
const char* to_string(ThreatCause c);
ThreatCause threat_cause_from_string(const std::string& s);

struct Verdict {
    VerdictKind kind = VerdictKind::Consistent;
    ThreatCause cause = ThreatCause::None;

    friend bool operator==(const Verdict&, const Verdict&) = default;
};

struct Report {
    ReportSource source = ReportSource::Device;
    ContextGraph graph;
};

// Compares stored context against all received views of one device.
//
//   stored           registered graph (counter as of registration or the
//                    last accepted epoch; the expected counter is
//                    substituted internally before comparison)
//   reports          the views that arrived this period
//   expected_counter value the counter scheme mandates for this epoch
//   required_sources views that must be present for the device's route
//
// Returns Consistent only when every present report matches and every
// required source reported. Reports for a different device are a caller
// bug and throw std::invalid_argument.
Verdict mutual_exclusion_check(const ContextGraph& stored, const std::vector<Report>& reports,
                               const UpdateCounter& expected_counter,
                               const std::set<ReportSource>& required_sources);

} // namespace ddsim
