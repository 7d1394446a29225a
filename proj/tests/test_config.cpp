#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "ddsim/config.hpp"

using namespace ddsim;

namespace {

bool mentions(const std::exception& e, const std::string& needle) {
    return std::string(e.what()).find(needle) != std::string::npos;
}

} // namespace

TEST_CASE("empty input yields the default scenario") {
    const ScenarioConfig c = parse_config("");
    CHECK(c.seed == 42u);
    CHECK(c.mode == Mode::Both);
    CHECK(c.devices == 500u);
    CHECK(c.attacker_fraction == doctest::Approx(0.2));
    CHECK(c.malicious_share_of_attackers == doctest::Approx(0.5));
    CHECK(c.period_ms == 1000);
    CHECK(c.duration_ms == 10000);
    CHECK(c.stages == 4u);
    CHECK(c.patch_efficacy == doctest::Approx(1.0));
    CHECK(c.route_mix_lds + c.route_mix_sds + c.route_mix_direct == doctest::Approx(1.0));
}

TEST_CASE("values, comments, and blanks parse as written") {
    const ScenarioConfig c = parse_config("# scenario\n"
                                          "\n"
                                          "devices = 10\n"
                                          "seed=7   # inline note\n"
                                          "mode=distributed\n"
                                          "period_ms=500\n"
                                          "duration_ms=2000\n");
    CHECK(c.devices == 10u);
    CHECK(c.seed == 7u);
    CHECK(c.mode == Mode::Distributed);
    CHECK(c.period_ms == 500);
    CHECK(c.duration_ms == 2000);
}

TEST_CASE("range violations name the offending key") {
    try {
        parse_config("attacker_fraction=1.5\n");
        FAIL("expected a range error");
    } catch (const std::invalid_argument& e) {
        CHECK(mentions(e, "attacker_fraction"));
    }

    try {
        parse_config("patch_efficacy=-0.1\n");
        FAIL("expected a range error");
    } catch (const std::invalid_argument& e) {
        CHECK(mentions(e, "patch_efficacy"));
    }
}

TEST_CASE("unknown keys and malformed lines name their line number") {
    try {
        parse_config("devices=5\nbogus_key=1\n");
        FAIL("expected an unknown-key error");
    } catch (const std::invalid_argument& e) {
        CHECK(mentions(e, "line 2"));
        CHECK(mentions(e, "bogus_key"));
    }

    try {
        parse_config("# fine\nthis is not a pair\n");
        FAIL("expected a parse error");
    } catch (const std::invalid_argument& e) {
        CHECK(mentions(e, "line 2"));
    }

    try {
        parse_config("mode=sideways\n");
        FAIL("expected a mode error");
    } catch (const std::invalid_argument& e) {
        CHECK(mentions(e, "line 1"));
        CHECK(mentions(e, "sideways"));
    }
}

TEST_CASE("consistency rules hold across keys") {
    CHECK_THROWS_AS(parse_config("duration_ms=1500\n"), std::invalid_argument);  // < 2 periods
    CHECK_THROWS_AS(parse_config("route_mix_lds=0.9\n"), std::invalid_argument); // sum != 1
    CHECK_THROWS_AS(parse_config("devices=0\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("stages=1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("header_bits=12\n"), std::invalid_argument);
    CHECK_NOTHROW(parse_config("route_mix_lds=0.5\nroute_mix_sds=0.25\nroute_mix_direct=0.25\n"));
}

TEST_CASE("serialization round-trips to the canonical form") {
    const std::string canonical = serialize_config(parse_config(""));
    CHECK(serialize_config(parse_config(canonical)) == canonical);

    // A sparse, unordered input normalizes to the same canonical text as the
    // config it denotes.
    const std::string sparse = "seed=9\ndevices=50\nmode=centralized\n";
    ScenarioConfig direct = parse_config("");
    direct.seed = 9;
    direct.devices = 50;
    direct.mode = Mode::Centralized;
    CHECK(serialize_config(parse_config(sparse)) == serialize_config(direct));

    // Round-trip stability for a config that touches every table.
    ScenarioConfig c = parse_config("");
    c.sizes.alarm = 48;
    c.latency.gw_cds_ms = 25;
    c.header_bits = 512;
    c.route_mix_lds = 0.5;
    c.route_mix_sds = 0.25;
    c.route_mix_direct = 0.25;
    const std::string s = serialize_config(c);
    CHECK(serialize_config(parse_config(s)) == s);
}

TEST_CASE("loading reads files and reports missing ones") {
    const std::string path = "test_config_tmp.cfg";
    {
        std::ofstream out(path);
        out << "devices=3\nmode=centralized\n";
    }
    const ScenarioConfig c = load_config(path);
    CHECK(c.devices == 3u);
    CHECK(c.mode == Mode::Centralized);
    std::remove(path.c_str());

    CHECK_THROWS_AS(load_config("definitely_not_here.cfg"), std::invalid_argument);
}

TEST_CASE("mode names round-trip") {
    CHECK(mode_from_string("centralized") == Mode::Centralized);
    CHECK(mode_from_string("distributed") == Mode::Distributed);
    CHECK(mode_from_string("both") == Mode::Both);
    CHECK(std::string(to_string(Mode::Centralized)) == "centralized");
    CHECK(std::string(to_string(Mode::Distributed)) == "distributed");
    CHECK(std::string(to_string(Mode::Both)) == "both");
    CHECK_THROWS_AS(mode_from_string("hybrid"), std::invalid_argument);
}
