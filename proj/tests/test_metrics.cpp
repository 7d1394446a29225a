#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "ddsim/metrics.hpp"
#include "ddsim/simnet.hpp"

using namespace ddsim;

namespace {

Transcript shell(std::uint32_t devices = 2) {
    Transcript tr;
    tr.seed = 42;
    tr.mode = Mode::Distributed;
    tr.devices = devices;
    tr.period_ms = 1000;
    tr.duration_ms = 3000;
    return tr;
}

} // namespace

TEST_CASE("an empty run aggregates to zero") {
    const RunMetrics m = compute_metrics(shell());
    CHECK(m.cost_total_ms == 0);
    CHECK(m.cost_mean_ms == 0.0);
    CHECK(m.decisions == 0u);
    CHECK(m.messages == 0u);
    CHECK(m.bytes == 0u);
    CHECK(m.detected == 0u);
    CHECK(m.missed == 0u);
    CHECK(m.false_positives == 0u);
    CHECK(m.rounds_opened == 0u);
    CHECK(m.per_period.empty());
}

TEST_CASE("every aggregate is recomputed from the event stream alone") {
    Transcript tr = shell();
    tr.events.push_back(TickEvent{1000, 1});
    tr.events.push_back(SendEvent{1000, MessageKind::PeriodStart, 1, 1000, 1000, 100, 2});
    tr.events.push_back(SendEvent{1005, MessageKind::ContextShare, 1000, 200, 1000, 50, 1});
    tr.events.push_back(SendEvent{1007, MessageKind::DigestReport, 200, 1, 1000, 30, 1});
    tr.events.push_back(
        DecideEvent{1047, 1000, 1, Verdict{VerdictKind::Consistent, ThreatCause::None}, 1000});
    tr.events.push_back(CompromiseEvent{1999, 1001, 4});
    tr.events.push_back(TickEvent{2000, 2});
    tr.events.push_back(
        DecideEvent{2051, 1001, 2, Verdict{VerdictKind::Threat, ThreatCause::TrafficMismatch}, 2000});
    tr.events.push_back(TrustEvent{2051, 1001, Trust::Suspect});
    tr.events.push_back(RoundEvent{2051, 1001, RoundPhase::Alarmed});
    tr.events.push_back(SendEvent{2051, MessageKind::PatchDispatch, 1, 1001, 1001, 200, 2});
    tr.events.push_back(RoundEvent{3096, 1001, RoundPhase::ResolvedReRegistered});
    tr.events.push_back(TrustEvent{3096, 1001, Trust::Trusted});

    const RunMetrics m = compute_metrics(tr);
    CHECK(m.mode == Mode::Distributed);
    CHECK(m.devices == 2u);
    CHECK(m.seed == 42u);

    // Costs: 47 and 51 ms against the tick each decision answers.
    CHECK(m.cost_total_ms == 47 + 51);
    CHECK(m.cost_mean_ms == doctest::Approx((47.0 + 51.0) / 2.0));
    CHECK(m.decisions == 2u);

    // Communication: messages once each, bytes weighted by hops.
    CHECK(m.messages == 4u);
    CHECK(m.bytes == 100u * 2 + 50u * 1 + 30u * 1 + 200u * 2);
    CHECK(m.bytes_excl_context_share == m.bytes - 50u);

    // Outcomes: one compromise, flagged; no false positives; one round that
    // opened and closed with a re-registration.
    CHECK(m.detected == 1u);
    CHECK(m.missed == 0u);
    CHECK(m.false_positives == 0u);
    CHECK(m.rounds_opened == 1u);
    CHECK(m.re_registered == 1u);
    CHECK(m.eliminated == 0u);

    // Period binning by event time for sends, by answered period for costs.
    // Only periods with traffic or decisions appear.
    REQUIRE(m.per_period.size() == 2u);
    CHECK(m.per_period[0].period == 1u);
    CHECK(m.per_period[0].messages == 3u);
    CHECK(m.per_period[0].decisions == 1u);
    CHECK(m.per_period[0].threats == 0u);
    CHECK(m.per_period[1].period == 2u);
    CHECK(m.per_period[1].messages == 1u);
    CHECK(m.per_period[1].decisions == 1u);
    CHECK(m.per_period[1].threats == 1u);
}

TEST_CASE("flags without compromises are false positives and vice versa") {
    Transcript tr = shell(3);
    tr.events.push_back(TrustEvent{1000, 1000, Trust::Suspect});   // flagged, never compromised
    tr.events.push_back(CompromiseEvent{1500, 1001, 2});           // compromised, never flagged
    tr.events.push_back(CompromiseEvent{1600, 1002, 2});           // compromised and flagged
    tr.events.push_back(TrustEvent{2000, 1002, Trust::Suspect});

    const RunMetrics m = compute_metrics(tr);
    CHECK(m.false_positives == 1u);
    CHECK(m.missed == 1u);
    CHECK(m.detected == 1u);
}

TEST_CASE("a decision before its tick is a corrupt transcript") {
    Transcript tr = shell();
    tr.events.push_back(
        DecideEvent{900, 1000, 1, Verdict{VerdictKind::Consistent, ThreatCause::None}, 1000});
    CHECK_THROWS_AS(compute_metrics(tr), std::invalid_argument);
}

TEST_CASE("reduction percentage handles zero baselines") {
    CHECK(reduction_pct(200.0, 150.0) == doctest::Approx(25.0));
    CHECK(reduction_pct(100.0, 100.0) == doctest::Approx(0.0));
    CHECK(reduction_pct(100.0, 120.0) == doctest::Approx(-20.0));
    CHECK(reduction_pct(0.0, 5.0) == 0.0);
    CHECK(reduction_pct(0.0, 0.0) == 0.0);
}

TEST_CASE("a one-device fleet diagnoses equally fast in both modes") {
    ScenarioConfig c;
    c.devices = 1;
    c.attacker_fraction = 0.0;
    c.duration_ms = 4000;
    c.route_mix_lds = 1.0;
    c.route_mix_sds = 0.0;
    c.route_mix_direct = 0.0;

    const ModeComparison cmp = compare_modes(c);
    CHECK(cmp.centralized.cost_mean_ms == doctest::Approx(47.0));
    CHECK(cmp.distributed.cost_mean_ms == doctest::Approx(47.0));
    CHECK(cmp.cost_total_reduction_pct == doctest::Approx(0.0));
    CHECK(cmp.cost_mean_reduction_pct == doctest::Approx(0.0));
    // The digest still shrinks the wire volume even with nothing queued.
    CHECK(cmp.bytes_reduction_pct > 0.0);
}

TEST_CASE("csv schema is pinned") {
    CHECK(csv_header() ==
          "mode,devices,seed,cost_total_ms,cost_mean_ms,msgs,bytes,detected,missed,false_pos,"
          "re_registered,eliminated");

    RunMetrics m;
    m.mode = Mode::Centralized;
    m.devices = 500;
    m.seed = 42;
    m.cost_total_ms = 1234;
    m.cost_mean_ms = 2.5;
    m.decisions = 2;
    m.messages = 10;
    m.bytes = 999;
    m.detected = 3;
    m.missed = 1;
    m.false_positives = 0;
    m.re_registered = 2;
    m.eliminated = 1;
    CHECK(csv_row(m) == "centralized,500,42,1234,2.500000,10,999,3,1,0,2,1");
}

TEST_CASE("csv files carry one header and one line per run") {
    RunMetrics a;
    a.mode = Mode::Centralized;
    RunMetrics b;
    b.mode = Mode::Distributed;
    const std::string path = "test_metrics_tmp.csv";
    write_csv({a, b}, path);

    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    CHECK(buf.str() == csv_header() + "\n" + csv_row(a) + "\n" + csv_row(b) + "\n");
    std::remove(path.c_str());

    CHECK_THROWS_AS(write_csv({a}, "no_such_dir/x.csv"), std::runtime_error);
}

TEST_CASE("aggregates recomputed from a persisted run match exactly") {
    ScenarioConfig c;
    c.devices = 15;
    c.attacker_fraction = 0.2;
    c.duration_ms = 5000;

    const Transcript live = run_scenario(c, Mode::Distributed);
    const std::string path = "test_metrics_roundtrip.tsv";
    write_transcript(live, path);
    const Transcript persisted = read_transcript(path);
    std::remove(path.c_str());

    CHECK(csv_row(compute_metrics(live)) == csv_row(compute_metrics(persisted)));
    CHECK(to_tsv(live) == to_tsv(persisted));
}
