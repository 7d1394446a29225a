#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ddsim/config.hpp"
#include "ddsim/transcript.hpp"

namespace ddsim {

// Everything here is computed from the transcript alone, so any aggregate
// can be re-derived offline from a saved run.
//
// Cost of one decision is verdict time minus the period tick it answers.
// Communication counts each message once and weights its payload by the
// number of links it crossed.

struct PeriodStats {
    std::uint32_t period = 0;
    std::uint32_t decisions = 0;
    std::uint32_t threats = 0;
    std::uint64_t messages = 0;
    std::uint64_t bytes = 0;
};

struct RunMetrics {
    Mode mode = Mode::Centralized;
    std::uint32_t devices = 0;
    std::uint64_t seed = 0;

    std::int64_t cost_total_ms = 0;
    double cost_mean_ms = 0.0;
    std::uint64_t decisions = 0;

    std::uint64_t messages = 0;
    std::uint64_t bytes = 0;  // payload bytes, hop-weighted
    std::uint64_t bytes_excl_context_share = 0;

    std::uint32_t detected = 0;         // compromised and flagged
    std::uint32_t missed = 0;           // compromised, never flagged
    std::uint32_t false_positives = 0;  // flagged but never compromised
    std::uint32_t re_registered = 0;
    std::uint32_t eliminated = 0;
    std::uint32_t rounds_opened = 0;    // alarm phases entered; not in the CSV

    std::vector<PeriodStats> per_period;  // keyed by floor(t / period)
};

RunMetrics compute_metrics(const Transcript& tr);

struct ModeComparison {
    RunMetrics centralized;
    RunMetrics distributed;
    double cost_total_reduction_pct = 0.0;
    double cost_mean_reduction_pct = 0.0;
    double messages_reduction_pct = 0.0;
    double bytes_reduction_pct = 0.0;
};

// 100 * (centralized - distributed) / centralized; 0 when the base is 0.
double reduction_pct(double centralized, double distributed);

// Runs the scenario once per mode and compares the totals.
ModeComparison compare_modes(const ScenarioConfig& config);

std::string csv_header();
std::string csv_row(const RunMetrics& m);
void write_csv(const std::vector<RunMetrics>& rows, const std::string& path);

} // namespace ddsim
