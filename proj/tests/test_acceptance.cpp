#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ddsim/detection.hpp"
#include "ddsim/metrics.hpp"
#include "ddsim/rng.hpp"
#include "ddsim/simnet.hpp"
#include "ddsim/topology.hpp"

using namespace ddsim;

// Eight release gates, one printed verdict line each. All tolerances are
// pinned here, not read from anywhere else.
namespace {

constexpr double kCostReductionLo = 28.0;
constexpr double kCostReductionHi = 38.0;
constexpr double kBytesReductionLo = 16.0;
constexpr double kBytesReductionHi = 26.0;
constexpr std::int64_t kModeRuntimeLimitMs = 10000;
constexpr std::int64_t kDetectWithinPeriods = 2;
constexpr std::int64_t kResolveWithinPeriods = 4;

void report(int criterion, bool ok, const std::string& what) {
    std::printf("criterion %d: %s - %s\n", criterion, ok ? "PASS" : "FAIL", what.c_str());
    std::fflush(stdout);
    CHECK_MESSAGE(ok, "criterion ", criterion, ": ", what);
}

template <typename E, typename F>
void for_each_event(const Transcript& tr, F&& f) {
    for (const auto& ev : tr.events)
        if (const E* e = std::get_if<E>(&ev))
            f(*e);
}

RunMetrics run_metrics(const ScenarioConfig& c, Mode m) {
    return compute_metrics(run_scenario(c, m));
}

std::set<std::uint64_t> suspect_set(const Transcript& tr) {
    std::set<std::uint64_t> out;
    for_each_event<TrustEvent>(tr, [&](const TrustEvent& e) {
        if (e.state == Trust::Suspect)
            out.insert(e.device_id);
    });
    return out;
}

} // namespace

TEST_CASE("calibrated mode comparison lands on the headline reductions") {
    const ScenarioConfig c;  // the default scenario: 500 devices, 20% attackers

    using clock = std::chrono::steady_clock;
    std::map<Mode, RunMetrics> m;
    std::int64_t worst_ms = 0;
    for (Mode mode : {Mode::Centralized, Mode::Distributed}) {
        const auto t0 = clock::now();
        const Transcript tr = run_scenario(c, mode);
        const auto elapsed =
            std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - t0).count();
        worst_ms = std::max<std::int64_t>(worst_ms, elapsed);
        m[mode] = compute_metrics(tr);
    }

    const double cost_total = reduction_pct(static_cast<double>(m[Mode::Centralized].cost_total_ms),
                                            static_cast<double>(m[Mode::Distributed].cost_total_ms));
    const double cost_mean =
        reduction_pct(m[Mode::Centralized].cost_mean_ms, m[Mode::Distributed].cost_mean_ms);
    const double bytes = reduction_pct(static_cast<double>(m[Mode::Centralized].bytes),
                                       static_cast<double>(m[Mode::Distributed].bytes));

    const bool cost_ok = cost_total >= kCostReductionLo && cost_total <= kCostReductionHi &&
                         cost_mean >= kCostReductionLo && cost_mean <= kCostReductionHi;
    const bool bytes_ok = bytes >= kBytesReductionLo && bytes <= kBytesReductionHi;
    const bool time_ok = worst_ms < kModeRuntimeLimitMs;

    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "cost reduction %.2f%%/%.2f%% in [%.0f,%.0f], bytes %.2f%% in [%.0f,%.0f], "
                  "slowest mode %lld ms",
                  cost_total, cost_mean, kCostReductionLo, kCostReductionHi, bytes,
                  kBytesReductionLo, kBytesReductionHi, static_cast<long long>(worst_ms));
    report(1, cost_ok && bytes_ok && time_ok, buf);
}

TEST_CASE("distributed mode dominates across the fleet-size sweep") {
    ScenarioConfig c;
    bool strict = true;
    bool widening = true;

    std::int64_t prev_cost_gap = -1;
    std::int64_t prev_bytes_gap = -1;
    for (std::uint32_t n = 50; n <= 500; n += 50) {
        c.devices = n;
        const RunMetrics cent = run_metrics(c, Mode::Centralized);
        const RunMetrics dist = run_metrics(c, Mode::Distributed);

        strict = strict && dist.cost_total_ms < cent.cost_total_ms &&
                 dist.cost_mean_ms < cent.cost_mean_ms && dist.bytes < cent.bytes;

        const std::int64_t cost_gap = cent.cost_total_ms - dist.cost_total_ms;
        const auto bytes_gap = static_cast<std::int64_t>(cent.bytes - dist.bytes);
        widening = widening && cost_gap >= prev_cost_gap && bytes_gap >= prev_bytes_gap;
        prev_cost_gap = cost_gap;
        prev_bytes_gap = bytes_gap;
    }

    report(2, strict && widening,
           strict ? (widening ? "strictly cheaper at all 10 sizes with non-shrinking absolute gaps"
                              : "dominates but a gap shrank")
                  : "centralized was not beaten everywhere");
}

TEST_CASE("clean scenarios never produce a threat or a round") {
    SplitMix64 rng(20260816);
    int bad_runs = 0;
    for (int i = 0; i < 1000; ++i) {
        ScenarioConfig c;
        c.seed = rng.next();
        c.devices = 1 + static_cast<std::uint32_t>(rng.next_below(60));
        c.attacker_fraction = 0.0;
        const double u1 = 1.0 + static_cast<double>(rng.next_below(100));
        const double u2 = 1.0 + static_cast<double>(rng.next_below(100));
        const double u3 = 1.0 + static_cast<double>(rng.next_below(100));
        c.route_mix_lds = u1 / (u1 + u2 + u3);
        c.route_mix_sds = u2 / (u1 + u2 + u3);
        c.route_mix_direct = 1.0 - c.route_mix_lds - c.route_mix_sds;
        c.period_ms = 250 * (1 + static_cast<std::int64_t>(rng.next_below(4)));
        c.duration_ms = c.period_ms * (2 + static_cast<std::int64_t>(rng.next_below(5)));
        c.stages = 2 + static_cast<std::uint32_t>(rng.next_below(5));
        c.num_hgws = 1 + static_cast<std::uint32_t>(rng.next_below(3));
        c.num_aps = 1 + static_cast<std::uint32_t>(rng.next_below(3));
        c.header_bits = 8 * (1 + static_cast<std::uint32_t>(rng.next_below(32)));
        const Mode mode = rng.next_below(2) == 0 ? Mode::Centralized : Mode::Distributed;

        validate_config(c);
        const Transcript tr = run_scenario(c, mode);
        int threats = 0, rounds = 0;
        for_each_event<DecideEvent>(tr, [&](const DecideEvent& e) {
            threats += e.verdict.kind == VerdictKind::Threat ? 1 : 0;
        });
        for_each_event<RoundEvent>(tr, [&](const RoundEvent&) { rounds += 1; });
        if (threats != 0 || rounds != 0)
            ++bad_runs;
    }
    report(3, bad_runs == 0,
           bad_runs == 0 ? "1000 randomized clean runs, zero threats, zero rounds"
                         : std::to_string(bad_runs) + " clean runs raised a threat or round");
}

TEST_CASE("every non-empty tamper profile is caught within two periods") {
    int missed_cases = 0;
    for (std::uint32_t mask = 1; mask <= 63; ++mask) {
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            ScenarioConfig c;
            c.seed = seed;
            c.devices = 10;
            c.attacker_fraction = 0.0;  // only the forced device is hostile
            c.duration_ms = 6000;
            c.route_mix_lds = 0.5;
            c.route_mix_sds = 0.3;
            c.route_mix_direct = 0.2;

            AttackOverride ov;
            const auto index = static_cast<std::uint32_t>((seed + mask) % c.devices);
            ov.profile_by_device_index[index] = mask;
            ov.exploit_tick_by_device_index[index] = 2;
            ov.malicious_by_device_index[index] = mask % 2 == 0;

            const Mode mode = (seed + mask) % 2 == 0 ? Mode::Centralized : Mode::Distributed;
            const Transcript tr = run_scenario(c, mode, ov);

            std::optional<std::int64_t> exploit_at, suspect_at;
            const std::uint64_t device = build_topology(c, ov).device_id(index);
            for_each_event<CompromiseEvent>(tr, [&](const CompromiseEvent& e) {
                if (e.device_id == device)
                    exploit_at = e.t;
            });
            for_each_event<TrustEvent>(tr, [&](const TrustEvent& e) {
                if (e.device_id == device && e.state == Trust::Suspect && !suspect_at)
                    suspect_at = e.t;
            });

            const bool ok = exploit_at && suspect_at &&
                            *suspect_at - *exploit_at <= kDetectWithinPeriods * c.period_ms;
            if (!ok)
                ++missed_cases;
        }
    }
    report(4, missed_cases == 0,
           missed_cases == 0
               ? "63 profiles x 20 seeds all suspect within 2 periods of exploit"
               : std::to_string(missed_cases) + " profile/seed cases escaped the window");
}

TEST_CASE("the detection rule equals the brute-force comparison oracle") {
    constexpr std::uint64_t seed = 42;
    constexpr std::uint32_t stages = 4;
    const std::uint32_t epoch = 3;
    int disagreements = 0;

    for (std::uint64_t device_id = 50; device_id < 60; ++device_id) {
        const ContextRecord reg =
            ContextRecord::make(device_id, DeviceSignature{device_id * 17 + 3, 0},
                                new_counter(seed, device_id), TrafficType::Telemetry, 128,
                                {16, 1024}, RouteRegion::ViaLDS);
        const ContextGraph stored = build_graph(reg, stages);
        const UpdateCounter expected = expected_counter_for(seed, device_id, epoch);
        ContextRecord clean = reg;
        clean.counter = expected;
        const std::set<ReportSource> required = {ReportSource::Device, ReportSource::LDS};

        for (unsigned tamper = 0; tamper < 16; ++tamper) {
            ContextRecord dev = clean;
            if (tamper & 1u)
                dev.traffic_type = TrafficType::Control;
            if (tamper & 2u)
                dev.memory_range.min_bytes += 3;
            if (tamper & 4u)
                dev.counter = expected_counter_for(seed, device_id, epoch - 1);
            const bool drop_lds = (tamper & 8u) != 0;

            std::vector<Report> reports = {{ReportSource::Device, build_graph(dev, stages)}};
            if (!drop_lds)
                reports.push_back({ReportSource::LDS, build_graph(clean, stages)});

            // Oracle: first differing field in priority order, then absence.
            Verdict want{VerdictKind::Consistent, ThreatCause::None};
            if (tamper & 4u)
                want = {VerdictKind::Threat, ThreatCause::CounterMismatch};
            else if (tamper & 1u)
                want = {VerdictKind::Threat, ThreatCause::TrafficMismatch};
            else if (tamper & 2u)
                want = {VerdictKind::Threat, ThreatCause::MemoryMismatch};
            else if (drop_lds)
                want = {VerdictKind::Threat, ThreatCause::MissingReport};

            const Verdict got = mutual_exclusion_check(stored, reports, expected, required);
            if (!(got == want))
                ++disagreements;
        }
    }
    report(5, disagreements == 0,
           disagreements == 0
               ? "10 devices x 16 tamper/drop combinations all match the oracle"
               : std::to_string(disagreements) + " verdicts disagreed with the oracle");
}

TEST_CASE("rounds resolve in time, removals are final, returns stay clean") {
    std::vector<std::pair<ScenarioConfig, Mode>> runs;
    {
        ScenarioConfig defaults;
        runs.emplace_back(defaults, Mode::Centralized);
        runs.emplace_back(defaults, Mode::Distributed);
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            ScenarioConfig c;
            c.seed = seed;
            c.devices = 60;
            c.attacker_fraction = 0.3;
            c.patch_efficacy = 0.7;
            c.duration_ms = 10000;
            runs.emplace_back(c, Mode::Centralized);
            runs.emplace_back(c, Mode::Distributed);
        }
    }

    int late_rounds = 0, unresolved = 0, zombie_events = 0, relapses = 0, unobserved_returns = 0;
    for (const auto& [c, mode] : runs) {
        const Transcript tr = run_scenario(c, mode);

        std::map<std::uint64_t, std::int64_t> open_at, eliminated_at, reregistered_at;
        for_each_event<RoundEvent>(tr, [&](const RoundEvent& e) {
            if (e.phase == RoundPhase::Alarmed) {
                open_at[e.device_id] = e.t;
            } else if (e.phase == RoundPhase::ResolvedReRegistered ||
                       e.phase == RoundPhase::ResolvedEliminated) {
                if (!open_at.count(e.device_id)) {
                    ++unresolved;  // resolution without an open round
                    return;
                }
                if (e.t - open_at[e.device_id] > kResolveWithinPeriods * c.period_ms)
                    ++late_rounds;
                open_at.erase(e.device_id);
                if (e.phase == RoundPhase::ResolvedEliminated)
                    eliminated_at[e.device_id] = e.t;
                else
                    reregistered_at[e.device_id] = e.t;
            }
        });
        unresolved += static_cast<int>(open_at.size());

        // Final removal: no later decision, trust change, or re-registration
        // for the device. Its own traffic may overlap the removal order for
        // one downlink flight; after that it must fall silent.
        const std::int64_t downlink_ms = c.latency.gw_cds_ms + c.latency.device_gw_ms;
        for_each_event<DecideEvent>(tr, [&](const DecideEvent& e) {
            if (eliminated_at.count(e.device_id) && e.t > eliminated_at[e.device_id])
                ++zombie_events;
        });
        for_each_event<TrustEvent>(tr, [&](const TrustEvent& e) {
            if (eliminated_at.count(e.device_id) && e.t > eliminated_at[e.device_id])
                ++zombie_events;
        });
        for_each_event<SendEvent>(tr, [&](const SendEvent& e) {
            if (eliminated_at.count(e.src) && e.t > eliminated_at[e.src] + downlink_ms)
                ++zombie_events;
            if (e.kind == MessageKind::ReRegister && eliminated_at.count(e.dst) &&
                e.t > eliminated_at[e.dst])
                ++zombie_events;
        });

        // Returned devices stay consistent for the rest of the run and are
        // actually observed again.
        for (const auto& [device, t_back] : reregistered_at) {
            int verdicts_after = 0;
            for_each_event<DecideEvent>(tr, [&](const DecideEvent& e) {
                if (e.device_id != device || e.t <= t_back)
                    return;
                ++verdicts_after;
                if (e.verdict.kind != VerdictKind::Consistent)
                    ++relapses;
            });
            if (verdicts_after == 0)
                ++unobserved_returns;
        }
    }

    const bool ok = late_rounds == 0 && unresolved == 0 && zombie_events == 0 && relapses == 0 &&
                    unobserved_returns == 0;
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "12 runs: %d late rounds, %d unresolved, %d post-removal events, %d relapses, "
                  "%d silent returns",
                  late_rounds, unresolved, zombie_events, relapses, unobserved_returns);
    report(6, ok, buf);
}

TEST_CASE("identical inputs reproduce transcripts, metrics, and csv exactly") {
    const ScenarioConfig c;  // full default scenario
    bool ok = true;
    for (Mode mode : {Mode::Centralized, Mode::Distributed}) {
        const Transcript a = run_scenario(c, mode);
        const Transcript b = run_scenario(c, mode);
        ok = ok && to_tsv(a) == to_tsv(b);
        ok = ok && csv_row(compute_metrics(a)) == csv_row(compute_metrics(b));

        const std::string path = std::string("acceptance_replay_") + to_string(mode) + ".tsv";
        write_transcript(a, path);
        const Transcript replay = read_transcript(path);
        std::remove(path.c_str());
        ok = ok && to_tsv(replay) == to_tsv(a);
        ok = ok && csv_row(compute_metrics(replay)) == csv_row(compute_metrics(a));
    }
    report(7, ok,
           ok ? "reruns and persisted replays are byte-identical in both modes"
              : "a rerun or replay diverged");
}

TEST_CASE("both modes mark the identical devices suspect") {
    std::vector<ScenarioConfig> configs;
    configs.emplace_back();  // defaults: 500 devices, 20% attackers
    {
        ScenarioConfig c;
        c.seed = 3;
        c.devices = 80;
        c.attacker_fraction = 0.25;
        c.patch_efficacy = 0.6;
        c.route_mix_lds = 0.5;
        c.route_mix_sds = 0.25;
        c.route_mix_direct = 0.25;
        configs.push_back(c);
        c.seed = 9;
        c.devices = 120;
        configs.push_back(c);
    }

    bool ok = true;
    for (const ScenarioConfig& c : configs) {
        const std::set<std::uint64_t> cent = suspect_set(run_scenario(c, Mode::Centralized));
        const std::set<std::uint64_t> dist = suspect_set(run_scenario(c, Mode::Distributed));
        ok = ok && cent == dist && !cent.empty();
    }
    report(8, ok,
           ok ? "3 paired runs agree on the suspect sets"
              : "the modes disagreed about who is suspect");
}
