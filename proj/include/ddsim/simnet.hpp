#pragma once

#include <set>

#include "ddsim/config.hpp"
#include "ddsim/topology.hpp"
#include "ddsim/transcript.hpp"

namespace ddsim {

// Deterministic discrete-event run of one scenario under one diagnosis
// mode. All work is driven off a single (time, sequence) ordered queue and
// all randomness comes from the scenario seed, so equal (config, mode)
// inputs produce byte-identical transcripts.
//
// Each period tick the CDS announces the period and every live device
// reports its context. Distributed mode builds graphs at the device's local
// diagnosis node and ships a digest to the CDS; centralized mode ships the
// raw context end to end and builds at the CDS. Graph builds serialize on
// the building node's CPU; verdicts are issued the instant the last needed
// input is in hand. A Threat verdict opens a critical round: alarms and a
// patch immediately, a trust revalidation one period later, then exactly
// one resolution (re-register or eliminate) well inside the four-period
// round deadline.

// Views that must reach the CDS for a device on this route, in this mode.
std::set<ReportSource> required_sources_for(Mode mode, RouteRegion route);

// Simulates `mode` (Centralized or Distributed; Both is rejected).
Transcript run_scenario(const ScenarioConfig& config, Mode mode);
Transcript run_scenario(const ScenarioConfig& config, Mode mode, const AttackOverride& ov);

} // namespace ddsim
