#pragma once

#include <cstdint>
#include <vector>

#include "ddsim/context.hpp"
#include "ddsim/digest.hpp"

namespace ddsim {

// A device's context graph: its processing pipeline as a vertex path, plus
// one self-descriptor edge per context field. The fingerprint canonically
// summarizes the whole structure, so two graphs compare in O(1) no matter
// which order their edges were inserted in.

enum class StageKind : std::uint8_t { Sense = 0, Process, Encode, Transmit, Receive, Actuate };

enum class ContextField : std::uint8_t {
    Signature = 0,
    Counter = 1,
    Traffic = 2,
    Header = 3,
    Memory = 4,
    Route = 5,
};

constexpr int kContextFieldCount = 6;

const char* to_string(StageKind k);
const char* to_string(ContextField f);

struct ProcedureStage {
    std::uint32_t index = 0;  // consecutive from 0 in pipeline order
    StageKind kind = StageKind::Sense;

    friend bool operator==(const ProcedureStage&, const ProcedureStage&) = default;
};

struct ContextEdgeLabel {
    ContextField field = ContextField::Signature;
    std::vector<unsigned char> encoded_value;

    friend bool operator==(const ContextEdgeLabel&, const ContextEdgeLabel&) = default;
};

struct GraphEdge {
    std::uint32_t from = 0;
    std::uint32_t to = 0;
    bool is_context = false;     // false: pipeline path edge
    ContextEdgeLabel label;      // meaningful only when is_context

    friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

class ContextGraph {
  public:
    ContextGraph() = default;
    ContextGraph(std::uint64_t device_id, std::vector<ProcedureStage> stages,
                 std::vector<GraphEdge> edges);

    std::uint64_t device_id() const { return device_id_; }
    const std::vector<ProcedureStage>& stages() const { return stages_; }
    const std::vector<GraphEdge>& edges() const { return edges_; }
    const Digest128& fingerprint() const { return fingerprint_; }

    // Label bytes for one context field; exactly one such edge exists.
    const std::vector<unsigned char>& label_bytes(ContextField f) const;

    // Copy with the counter descriptor replaced and the fingerprint
    // recomputed. Used to express "the stored graph at the expected epoch".
    ContextGraph with_counter(const UpdateCounter& c) const;

    UpdateCounter decoded_counter() const;

  private:
    std::uint64_t device_id_ = 0;
    std::vector<ProcedureStage> stages_;
    std::vector<GraphEdge> edges_;
    Digest128 fingerprint_;
};

// Field encoders shared by graph construction and tests.
std::vector<unsigned char> encode_field(const ContextRecord& rec, ContextField f);

// Builds the canonical graph for a record: `stages` pipeline vertices
// (kinds cycle through the stage taxonomy), stages-1 path edges, and six
// context self-descriptor edges anchored at the sensing vertex.
// Throws std::invalid_argument when stages < 2.
ContextGraph build_graph(const ContextRecord& rec, std::uint32_t stages);

// Canonical digest over (device id, vertex sequence, edge multiset).
// Pure and order-invariant: permuting the edge list leaves it unchanged,
// flipping any encoded byte changes it.
Digest128 fingerprint_of(std::uint64_t device_id, const std::vector<ProcedureStage>& stages,
                         const std::vector<GraphEdge>& edges);

} // namespace ddsim
