#include "ddsim/metrics.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

#include "ddsim/simnet.hpp"

namespace ddsim {
namespace {

struct Tally {
    RunMetrics m;
    std::int64_t period_ms = 1;
    std::map<std::uint32_t, PeriodStats> periods;
    std::set<std::uint64_t> compromised;
    std::set<std::uint64_t> flagged;

    PeriodStats& bin(std::int64_t t) {
        const auto p = static_cast<std::uint32_t>(t / period_ms);
        PeriodStats& row = periods[p];
        row.period = p;
        return row;
    }

    void operator()(const TickEvent&) {}

    void operator()(const SendEvent& e) {
        m.messages += 1;
        const std::uint64_t wire = static_cast<std::uint64_t>(e.payload_bytes) * e.hops;
        m.bytes += wire;
        if (e.kind != MessageKind::ContextShare)
            m.bytes_excl_context_share += wire;
        PeriodStats& row = bin(e.t);
        row.messages += 1;
        row.bytes += wire;
    }

    void operator()(const DecideEvent& e) {
        if (e.t < e.tick_t)
            throw std::invalid_argument("transcript: decision precedes its period tick");
        m.cost_total_ms += e.t - e.tick_t;
        m.decisions += 1;
        PeriodStats& row = periods[e.period];
        row.period = e.period;
        row.decisions += 1;
        if (e.verdict.kind == VerdictKind::Threat)
            row.threats += 1;
    }

    void operator()(const CompromiseEvent& e) { compromised.insert(e.device_id); }

    void operator()(const PatchAvailableEvent&) {}

    void operator()(const RoundEvent& e) {
        if (e.phase == RoundPhase::Alarmed)
            m.rounds_opened += 1;
        else if (e.phase == RoundPhase::ResolvedReRegistered)
            m.re_registered += 1;
        else if (e.phase == RoundPhase::ResolvedEliminated)
            m.eliminated += 1;
    }

    void operator()(const TrustEvent& e) {
        if (e.state == Trust::Suspect)
            flagged.insert(e.device_id);
    }
};

} // namespace

double reduction_pct(double centralized, double distributed) {
    if (centralized == 0.0)
        return 0.0;
    return 100.0 * (centralized - distributed) / centralized;
}

RunMetrics compute_metrics(const Transcript& tr) {
    if (tr.period_ms <= 0)
        throw std::invalid_argument("transcript: period must be positive");

    Tally tally;
    tally.period_ms = tr.period_ms;
    tally.m.mode = tr.mode;
    tally.m.devices = tr.devices;
    tally.m.seed = tr.seed;

    for (const TranscriptEvent& ev : tr.events)
        std::visit(tally, ev);

    RunMetrics m = std::move(tally.m);
    m.cost_mean_ms = m.decisions == 0 ? 0.0
                                      : static_cast<double>(m.cost_total_ms) /
                                            static_cast<double>(m.decisions);

    for (std::uint64_t id : tally.compromised) {
        if (tally.flagged.count(id))
            m.detected += 1;
        else
            m.missed += 1;
    }
    for (std::uint64_t id : tally.flagged)
        if (!tally.compromised.count(id))
            m.false_positives += 1;

    m.per_period.reserve(tally.periods.size());
    for (const auto& [p, row] : tally.periods)
        m.per_period.push_back(row);
    return m;
}

ModeComparison compare_modes(const ScenarioConfig& config) {
    ModeComparison cmp;
    cmp.centralized = compute_metrics(run_scenario(config, Mode::Centralized));
    cmp.distributed = compute_metrics(run_scenario(config, Mode::Distributed));
    cmp.cost_total_reduction_pct = reduction_pct(static_cast<double>(cmp.centralized.cost_total_ms),
                                                 static_cast<double>(cmp.distributed.cost_total_ms));
    cmp.cost_mean_reduction_pct =
        reduction_pct(cmp.centralized.cost_mean_ms, cmp.distributed.cost_mean_ms);
    cmp.messages_reduction_pct = reduction_pct(static_cast<double>(cmp.centralized.messages),
                                               static_cast<double>(cmp.distributed.messages));
    cmp.bytes_reduction_pct = reduction_pct(static_cast<double>(cmp.centralized.bytes),
                                            static_cast<double>(cmp.distributed.bytes));
    return cmp;
}

std::string csv_header() {
    return "mode,devices,seed,cost_total_ms,cost_mean_ms,msgs,bytes,detected,missed,false_pos,"
           "re_registered,eliminated";
}

std::string csv_row(const RunMetrics& m) {
    char buf[320];
    std::snprintf(buf, sizeof(buf), "%s,%u,%llu,%lld,%.6f,%llu,%llu,%u,%u,%u,%u,%u",
                  to_string(m.mode), m.devices, static_cast<unsigned long long>(m.seed),
                  static_cast<long long>(m.cost_total_ms), m.cost_mean_ms,
                  static_cast<unsigned long long>(m.messages),
                  static_cast<unsigned long long>(m.bytes), m.detected, m.missed,
                  m.false_positives, m.re_registered, m.eliminated);
    return buf;
}

void write_csv(const std::vector<RunMetrics>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path);
    out << csv_header() << '\n';
    for (const RunMetrics& m : rows)
        out << csv_row(m) << '\n';
    if (!out.flush())
        throw std::runtime_error("write failed: " + path);
}

} // namespace ddsim
