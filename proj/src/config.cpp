#include "ddsim/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace ddsim {
namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void fail_line(int line, const std::string& msg) {
    throw std::invalid_argument("config line " + std::to_string(line) + ": " + msg);
}

std::uint64_t parse_u64(const std::string& key, const std::string& v, int line) {
    char* end = nullptr;
    errno = 0;
    const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
    if (errno != 0 || end == v.c_str() || *end != '\0')
        fail_line(line, key + ": expected an unsigned integer, got '" + v + "'");
    return x;
}

std::int64_t parse_i64(const std::string& key, const std::string& v, int line) {
    char* end = nullptr;
    errno = 0;
    const long long x = std::strtoll(v.c_str(), &end, 10);
    if (errno != 0 || end == v.c_str() || *end != '\0')
        fail_line(line, key + ": expected an integer, got '" + v + "'");
    return x;
}

double parse_double(const std::string& key, const std::string& v, int line) {
    char* end = nullptr;
    errno = 0;
    const double x = std::strtod(v.c_str(), &end);
    if (errno != 0 || end == v.c_str() || *end != '\0')
        fail_line(line, key + ": expected a number, got '" + v + "'");
    return x;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

} // namespace

const char* to_string(Mode m) {
    switch (m) {
    case Mode::Centralized: return "centralized";
    case Mode::Distributed: return "distributed";
    case Mode::Both: return "both";
    }
    return "?";
}

Mode mode_from_string(const std::string& s) {
    if (s == "centralized")
        return Mode::Centralized;
    if (s == "distributed")
        return Mode::Distributed;
    if (s == "both")
        return Mode::Both;
    throw std::invalid_argument("mode: expected centralized|distributed|both, got '" + s + "'");
}

ScenarioConfig parse_config(const std::string& text) {
    ScenarioConfig c;

    // One setter per key; the table doubles as the set of known keys.
    using Setter = std::function<void(const std::string&, int)>;
    const std::map<std::string, Setter> setters = {
        {"seed", [&](const std::string& v, int ln) { c.seed = parse_u64("seed", v, ln); }},
        {"mode",
         [&](const std::string& v, int ln) {
             try {
                 c.mode = mode_from_string(v);
             } catch (const std::invalid_argument& e) {
                 fail_line(ln, e.what());
             }
         }},
        {"devices",
         [&](const std::string& v, int ln) {
             c.devices = static_cast<std::uint32_t>(parse_u64("devices", v, ln));
         }},
        {"attacker_fraction",
         [&](const std::string& v, int ln) { c.attacker_fraction = parse_double("attacker_fraction", v, ln); }},
        {"malicious_share_of_attackers",
         [&](const std::string& v, int ln) {
             c.malicious_share_of_attackers = parse_double("malicious_share_of_attackers", v, ln);
         }},
        {"route_mix_lds",
         [&](const std::string& v, int ln) { c.route_mix_lds = parse_double("route_mix_lds", v, ln); }},
        {"route_mix_sds",
         [&](const std::string& v, int ln) { c.route_mix_sds = parse_double("route_mix_sds", v, ln); }},
        {"route_mix_direct",
         [&](const std::string& v, int ln) { c.route_mix_direct = parse_double("route_mix_direct", v, ln); }},
        {"period_ms", [&](const std::string& v, int ln) { c.period_ms = parse_i64("period_ms", v, ln); }},
        {"duration_ms", [&](const std::string& v, int ln) { c.duration_ms = parse_i64("duration_ms", v, ln); }},
        {"stages",
         [&](const std::string& v, int ln) { c.stages = static_cast<std::uint32_t>(parse_u64("stages", v, ln)); }},
        {"num_hgws",
         [&](const std::string& v, int ln) { c.num_hgws = static_cast<std::uint32_t>(parse_u64("num_hgws", v, ln)); }},
        {"num_aps",
         [&](const std::string& v, int ln) { c.num_aps = static_cast<std::uint32_t>(parse_u64("num_aps", v, ln)); }},
        {"header_bits",
         [&](const std::string& v, int ln) {
             c.header_bits = static_cast<std::uint32_t>(parse_u64("header_bits", v, ln));
         }},
        {"patch_efficacy",
         [&](const std::string& v, int ln) { c.patch_efficacy = parse_double("patch_efficacy", v, ln); }},
        {"lat_device_gw_ms",
         [&](const std::string& v, int ln) { c.latency.device_gw_ms = parse_i64("lat_device_gw_ms", v, ln); }},
        {"lat_gw_cds_ms",
         [&](const std::string& v, int ln) { c.latency.gw_cds_ms = parse_i64("lat_gw_cds_ms", v, ln); }},
        {"lat_colocated_ms",
         [&](const std::string& v, int ln) { c.latency.colocated_ms = parse_i64("lat_colocated_ms", v, ln); }},
        {"graph_build_ms",
         [&](const std::string& v, int ln) { c.latency.graph_build_ms = parse_i64("graph_build_ms", v, ln); }},
        {"size_context_share",
         [&](const std::string& v, int ln) {
             c.sizes.context_share = static_cast<std::uint32_t>(parse_u64("size_context_share", v, ln));
         }},
        {"size_digest_report",
         [&](const std::string& v, int ln) {
             c.sizes.digest_report = static_cast<std::uint32_t>(parse_u64("size_digest_report", v, ln));
         }},
        {"size_period_start",
         [&](const std::string& v, int ln) {
             c.sizes.period_start = static_cast<std::uint32_t>(parse_u64("size_period_start", v, ln));
         }},
        {"size_alarm",
         [&](const std::string& v, int ln) {
             c.sizes.alarm = static_cast<std::uint32_t>(parse_u64("size_alarm", v, ln));
         }},
        {"size_patch_dispatch",
         [&](const std::string& v, int ln) {
             c.sizes.patch_dispatch = static_cast<std::uint32_t>(parse_u64("size_patch_dispatch", v, ln));
         }},
        {"size_trust_revalidate",
         [&](const std::string& v, int ln) {
             c.sizes.trust_revalidate = static_cast<std::uint32_t>(parse_u64("size_trust_revalidate", v, ln));
         }},
        {"size_trust_ack",
         [&](const std::string& v, int ln) {
             c.sizes.trust_ack = static_cast<std::uint32_t>(parse_u64("size_trust_ack", v, ln));
         }},
        {"size_reregister",
         [&](const std::string& v, int ln) {
             c.sizes.reregister = static_cast<std::uint32_t>(parse_u64("size_reregister", v, ln));
         }},
        {"size_eliminate",
         [&](const std::string& v, int ln) {
             c.sizes.eliminate = static_cast<std::uint32_t>(parse_u64("size_eliminate", v, ln));
         }},
    };

    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (s.empty())
            continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            fail_line(line, "expected key=value, got '" + s + "'");
        const std::string key = trim(s.substr(0, eq));
        const std::string val = trim(s.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end())
            fail_line(line, "unknown key '" + key + "'");
        it->second(val, line);
    }

    validate_config(c);
    return c;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const ScenarioConfig& c) {
    std::map<std::string, std::string> kv;
    kv["seed"] = std::to_string(c.seed);
    kv["mode"] = to_string(c.mode);
    kv["devices"] = std::to_string(c.devices);
    kv["attacker_fraction"] = format_double(c.attacker_fraction);
    kv["malicious_share_of_attackers"] = format_double(c.malicious_share_of_attackers);
    kv["route_mix_lds"] = format_double(c.route_mix_lds);
    kv["route_mix_sds"] = format_double(c.route_mix_sds);
    kv["route_mix_direct"] = format_double(c.route_mix_direct);
    kv["period_ms"] = std::to_string(c.period_ms);
    kv["duration_ms"] = std::to_string(c.duration_ms);
    kv["stages"] = std::to_string(c.stages);
    kv["num_hgws"] = std::to_string(c.num_hgws);
    kv["num_aps"] = std::to_string(c.num_aps);
    kv["header_bits"] = std::to_string(c.header_bits);
    kv["patch_efficacy"] = format_double(c.patch_efficacy);
    kv["lat_device_gw_ms"] = std::to_string(c.latency.device_gw_ms);
    kv["lat_gw_cds_ms"] = std::to_string(c.latency.gw_cds_ms);
    kv["lat_colocated_ms"] = std::to_string(c.latency.colocated_ms);
    kv["graph_build_ms"] = std::to_string(c.latency.graph_build_ms);
    kv["size_context_share"] = std::to_string(c.sizes.context_share);
    kv["size_digest_report"] = std::to_string(c.sizes.digest_report);
    kv["size_period_start"] = std::to_string(c.sizes.period_start);
    kv["size_alarm"] = std::to_string(c.sizes.alarm);
    kv["size_patch_dispatch"] = std::to_string(c.sizes.patch_dispatch);
    kv["size_trust_revalidate"] = std::to_string(c.sizes.trust_revalidate);
    kv["size_trust_ack"] = std::to_string(c.sizes.trust_ack);
    kv["size_reregister"] = std::to_string(c.sizes.reregister);
    kv["size_eliminate"] = std::to_string(c.sizes.eliminate);

    std::string out;
    for (const auto& [k, v] : kv)
        out += k + "=" + v + "\n";
    return out;
}

void validate_config(const ScenarioConfig& c) {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };

    if (c.devices == 0)
        fail("devices must be at least 1");
    if (c.stages < 2)
        fail("stages must be at least 2");
    if (c.num_hgws == 0 || c.num_aps == 0)
        fail("num_hgws and num_aps must be at least 1");
    if (c.period_ms <= 0)
        fail("period_ms must be positive");
    if (c.duration_ms < 2 * c.period_ms)
        fail("duration_ms must cover at least two periods");
    if (c.attacker_fraction < 0.0 || c.attacker_fraction > 1.0)
        fail("attacker_fraction must lie in [0, 1]");
    if (c.malicious_share_of_attackers < 0.0 || c.malicious_share_of_attackers > 1.0)
        fail("malicious_share_of_attackers must lie in [0, 1]");
    if (c.patch_efficacy < 0.0 || c.patch_efficacy > 1.0)
        fail("patch_efficacy must lie in [0, 1]");
    for (double f : {c.route_mix_lds, c.route_mix_sds, c.route_mix_direct})
        if (f < 0.0 || f > 1.0)
            fail("route mix fractions must lie in [0, 1]");
    if (std::fabs(c.route_mix_lds + c.route_mix_sds + c.route_mix_direct - 1.0) > 1e-9)
        fail("route mix fractions must sum to 1");
    if (c.header_bits == 0 || c.header_bits % 8 != 0)
        fail("header_bits must be a positive multiple of 8");
    if (c.latency.device_gw_ms <= 0 || c.latency.gw_cds_ms <= 0)
        fail("link latencies must be positive");
    if (c.latency.colocated_ms < 0 || c.latency.graph_build_ms < 0)
        fail("colocated latency and graph build cost must be non-negative");
    for (std::uint32_t s : {c.sizes.context_share, c.sizes.digest_report, c.sizes.period_start,
                            c.sizes.alarm, c.sizes.patch_dispatch, c.sizes.trust_revalidate,
                            c.sizes.trust_ack, c.sizes.reregister, c.sizes.eliminate})
        if (s == 0)
            fail("message body sizes must be positive");
}

} // namespace ddsim
