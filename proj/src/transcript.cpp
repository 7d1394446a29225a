#include "ddsim/transcript.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ddsim {
namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto tab = line.find('\t', start);
        if (tab == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

[[noreturn]] void bad_line(int n, const std::string& why) {
    throw std::invalid_argument("transcript line " + std::to_string(n) + ": " + why);
}

std::uint64_t to_u64(const std::string& s, int n) {
    try {
        return std::stoull(s);
    } catch (...) {
        bad_line(n, "expected integer, got '" + s + "'");
    }
}

std::int64_t to_i64(const std::string& s, int n) {
    try {
        return std::stoll(s);
    } catch (...) {
        bad_line(n, "expected integer, got '" + s + "'");
    }
}

MessageKind kind_from(const std::string& s, int n) {
    for (int i = 0; i <= static_cast<int>(MessageKind::Eliminate); ++i)
        if (s == to_string(static_cast<MessageKind>(i)))
            return static_cast<MessageKind>(i);
    bad_line(n, "unknown message kind '" + s + "'");
}

RoundPhase phase_from(const std::string& s, int n) {
    for (int i = 0; i <= static_cast<int>(RoundPhase::ResolvedEliminated); ++i)
        if (s == to_string(static_cast<RoundPhase>(i)))
            return static_cast<RoundPhase>(i);
    bad_line(n, "unknown round phase '" + s + "'");
}

Trust trust_from(const std::string& s, int n) {
    for (int i = 0; i <= static_cast<int>(Trust::Eliminated); ++i)
        if (s == to_string(static_cast<Trust>(i)))
            return static_cast<Trust>(i);
    bad_line(n, "unknown trust state '" + s + "'");
}

struct LineWriter {
    std::string& out;

    void operator()(const TickEvent& e) const {
        out += "tick\t" + std::to_string(e.t) + "\t" + std::to_string(e.period) + "\n";
    }
    void operator()(const SendEvent& e) const {
        out += "send\t" + std::to_string(e.t) + "\t" + to_string(e.kind) + "\t" +
               std::to_string(e.src) + "\t" + std::to_string(e.dst) + "\t" +
               std::to_string(e.device_id) + "\t" + std::to_string(e.payload_bytes) + "\t" +
               std::to_string(e.hops) + "\n";
    }
    void operator()(const DecideEvent& e) const {
        out += "decide\t" + std::to_string(e.t) + "\t" + std::to_string(e.device_id) + "\t" +
               std::to_string(e.period) + "\t" + to_string(e.verdict.kind) + "\t" +
               to_string(e.verdict.cause) + "\t" + std::to_string(e.tick_t) + "\n";
    }
    void operator()(const CompromiseEvent& e) const {
        out += "compromise\t" + std::to_string(e.t) + "\t" + std::to_string(e.device_id) + "\t" +
               std::to_string(e.profile_mask) + "\n";
    }
    void operator()(const PatchAvailableEvent& e) const {
        out += "patch_avail\t" + std::to_string(e.t) + "\t" + std::to_string(e.device_id) + "\n";
    }
    void operator()(const RoundEvent& e) const {
        out += "round\t" + std::to_string(e.t) + "\t" + std::to_string(e.device_id) + "\t" +
               to_string(e.phase) + "\n";
    }
    void operator()(const TrustEvent& e) const {
        out += "trust\t" + std::to_string(e.t) + "\t" + std::to_string(e.device_id) + "\t" +
               to_string(e.state) + "\n";
    }
};

} // namespace

std::string to_tsv(const Transcript& tr) {
    std::string out;
    out += "meta\t" + std::to_string(tr.seed) + "\t" + std::string(to_string(tr.mode)) + "\t" +
           std::to_string(tr.devices) + "\t" + std::to_string(tr.period_ms) + "\t" +
           std::to_string(tr.duration_ms) + "\n";
    LineWriter w{out};
    for (const auto& e : tr.events)
        std::visit(w, e);
    return out;
}

Transcript transcript_from_tsv(const std::string& text) {
    Transcript tr;
    std::istringstream in(text);
    std::string line;
    int n = 0;
    bool have_meta = false;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty())
            continue;
        const auto f = split_tabs(line);
        const std::string& tag = f[0];
        auto need = [&](std::size_t count) {
            if (f.size() != count)
                bad_line(n, "expected " + std::to_string(count) + " fields, got " +
                                std::to_string(f.size()));
        };
        if (tag == "meta") {
            need(6);
            tr.seed = to_u64(f[1], n);
            tr.mode = mode_from_string(f[2]);
            tr.devices = static_cast<std::uint32_t>(to_u64(f[3], n));
            tr.period_ms = to_i64(f[4], n);
            tr.duration_ms = to_i64(f[5], n);
            have_meta = true;
        } else if (tag == "tick") {
            need(3);
            tr.events.push_back(TickEvent{to_i64(f[1], n), static_cast<std::uint32_t>(to_u64(f[2], n))});
        } else if (tag == "send") {
            need(8);
            SendEvent e;
            e.t = to_i64(f[1], n);
            e.kind = kind_from(f[2], n);
            e.src = to_u64(f[3], n);
            e.dst = to_u64(f[4], n);
            e.device_id = to_u64(f[5], n);
            e.payload_bytes = static_cast<std::uint32_t>(to_u64(f[6], n));
            e.hops = static_cast<std::uint32_t>(to_u64(f[7], n));
            tr.events.push_back(e);
        } else if (tag == "decide") {
            need(7);
            DecideEvent e;
            e.t = to_i64(f[1], n);
            e.device_id = to_u64(f[2], n);
            e.period = static_cast<std::uint32_t>(to_u64(f[3], n));
            e.verdict.kind = (f[4] == "threat") ? VerdictKind::Threat : VerdictKind::Consistent;
            e.verdict.cause = threat_cause_from_string(f[5]);
            e.tick_t = to_i64(f[6], n);
            tr.events.push_back(e);
        } else if (tag == "compromise") {
            need(4);
            tr.events.push_back(CompromiseEvent{to_i64(f[1], n), to_u64(f[2], n),
                                                static_cast<std::uint32_t>(to_u64(f[3], n))});
        } else if (tag == "patch_avail") {
            need(3);
            tr.events.push_back(PatchAvailableEvent{to_i64(f[1], n), to_u64(f[2], n)});
        } else if (tag == "round") {
            need(4);
            tr.events.push_back(RoundEvent{to_i64(f[1], n), to_u64(f[2], n), phase_from(f[3], n)});
        } else if (tag == "trust") {
            need(4);
            tr.events.push_back(TrustEvent{to_i64(f[1], n), to_u64(f[2], n), trust_from(f[3], n)});
        } else {
            bad_line(n, "unknown record '" + tag + "'");
        }
    }
    if (!have_meta)
        throw std::invalid_argument("transcript: missing meta line");
    return tr;
}

void write_transcript(const Transcript& tr, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("transcript: cannot write '" + path + "'");
    out << to_tsv(tr);
}

Transcript read_transcript(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("transcript: cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return transcript_from_tsv(buf.str());
}

} // namespace ddsim
