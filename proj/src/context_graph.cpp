#include "ddsim/context_graph.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace ddsim {
namespace {

constexpr std::uint64_t kVertexStreamTag = 0x564552545354524dull;
constexpr std::uint64_t kPathEdgeTag = 0x5041544845444745ull;
constexpr std::uint64_t kContextEdgeTag = 0x4354584554444745ull;

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

Digest128 edge_digest(const GraphEdge& e) {
    DigestBuilder b(e.is_context ? kContextEdgeTag : kPathEdgeTag);
    b.word(e.from).word(e.to);
    if (e.is_context) {
        b.word(static_cast<std::uint64_t>(e.label.field));
        b.bytes(e.label.encoded_value.data(), e.label.encoded_value.size());
    }
    return b.finish();
}

constexpr StageKind kStageCycle[] = {StageKind::Sense,    StageKind::Process, StageKind::Encode,
                                     StageKind::Transmit, StageKind::Receive, StageKind::Actuate};

} // namespace

const char* to_string(StageKind k) {
    switch (k) {
    case StageKind::Sense: return "sense";
    case StageKind::Process: return "process";
    case StageKind::Encode: return "encode";
    case StageKind::Transmit: return "transmit";
    case StageKind::Receive: return "receive";
    case StageKind::Actuate: return "actuate";
    }
    return "?";
}

const char* to_string(ContextField f) {
    switch (f) {
    case ContextField::Signature: return "signature";
    case ContextField::Counter: return "counter";
    case ContextField::Traffic: return "traffic";
    case ContextField::Header: return "header";
    case ContextField::Memory: return "memory";
    case ContextField::Route: return "route";
    }
    return "?";
}

std::string to_hex(const Digest128& d) {
    char buf[33];
    std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(d.hi),
                  static_cast<unsigned long long>(d.lo));
    return buf;
}

ContextGraph::ContextGraph(std::uint64_t device_id, std::vector<ProcedureStage> stages,
                           std::vector<GraphEdge> edges)
    : device_id_(device_id), stages_(std::move(stages)), edges_(std::move(edges)) {
    fingerprint_ = fingerprint_of(device_id_, stages_, edges_);
}

const std::vector<unsigned char>& ContextGraph::label_bytes(ContextField f) const {
    for (const auto& e : edges_)
        if (e.is_context && e.label.field == f)
            return e.label.encoded_value;
    throw std::logic_error("context graph: missing descriptor edge");
}

ContextGraph ContextGraph::with_counter(const UpdateCounter& c) const {
    std::vector<GraphEdge> edges = edges_;
    for (auto& e : edges) {
        if (e.is_context && e.label.field == ContextField::Counter) {
            e.label.encoded_value.clear();
            put_u32(e.label.encoded_value, c.value);
            put_u32(e.label.encoded_value, c.epoch);
        }
    }
    return ContextGraph(device_id_, stages_, std::move(edges));
}

UpdateCounter ContextGraph::decoded_counter() const {
    const auto& v = label_bytes(ContextField::Counter);
    if (v.size() != 8)
        throw std::logic_error("context graph: malformed counter descriptor");
    UpdateCounter c;
    for (int i = 0; i < 4; ++i)
        c.value |= std::uint32_t(v[i]) << (8 * i);
    for (int i = 0; i < 4; ++i)
        c.epoch |= std::uint32_t(v[4 + i]) << (8 * i);
    return c;
}

std::vector<unsigned char> encode_field(const ContextRecord& rec, ContextField f) {
    std::vector<unsigned char> out;
    switch (f) {
    case ContextField::Signature:
        put_u64(out, rec.signature.id);
        put_u64(out, static_cast<std::uint64_t>(rec.signature.issued_at));
        break;
    case ContextField::Counter:
        put_u32(out, rec.counter.value);
        put_u32(out, rec.counter.epoch);
        break;
    case ContextField::Traffic:
        out.push_back(static_cast<unsigned char>(rec.traffic_type));
        break;
    case ContextField::Header:
        put_u32(out, rec.header_length_bits);
        break;
    case ContextField::Memory:
        put_u32(out, rec.memory_range.min_bytes);
        put_u32(out, rec.memory_range.max_bytes);
        break;
    case ContextField::Route:
        out.push_back(static_cast<unsigned char>(rec.route));
        break;
    }
    return out;
}

ContextGraph build_graph(const ContextRecord& rec, std::uint32_t stages) {
    if (stages < 2)
        throw std::invalid_argument("context graph: a pipeline needs at least 2 stages");

    std::vector<ProcedureStage> verts;
    verts.reserve(stages);
    for (std::uint32_t i = 0; i < stages; ++i)
        verts.push_back({i, kStageCycle[i % 6]});

    std::vector<GraphEdge> edges;
    edges.reserve(stages - 1 + kContextFieldCount);
    for (std::uint32_t i = 0; i + 1 < stages; ++i)
        edges.push_back({i, i + 1, false, {}});

    // Descriptor edges are self-loops on the sensing vertex.
    for (int f = 0; f < kContextFieldCount; ++f) {
        auto field = static_cast<ContextField>(f);
        edges.push_back({0, 0, true, {field, encode_field(rec, field)}});
    }
    return ContextGraph(rec.device_id, std::move(verts), std::move(edges));
}

Digest128 fingerprint_of(std::uint64_t device_id, const std::vector<ProcedureStage>& stages,
                         const std::vector<GraphEdge>& edges) {
    DigestBuilder head(kVertexStreamTag);
    head.word(device_id).word(stages.size());
    for (const auto& s : stages)
        head.word((std::uint64_t(s.index) << 8) | static_cast<std::uint64_t>(s.kind));
    const Digest128 h = head.finish();

    // Edges fold in with wrapping addition per lane, which makes the digest
    // a multiset hash: insertion order cannot matter, repeated edges do.
    std::uint64_t sum_hi = 0, sum_lo = 0;
    for (const auto& e : edges) {
        const Digest128 ed = edge_digest(e);
        sum_hi += ed.hi;
        sum_lo += ed.lo;
    }

    DigestBuilder out(0x464e47525052494eull);
    out.word(h.hi).word(h.lo).word(sum_hi).word(sum_lo).word(edges.size());
    return out.finish();
}

} // namespace ddsim
