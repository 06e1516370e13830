#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "clear/attributes.hpp"
#include "clear/scene.hpp"
#include "clear/vocabulary.hpp"

namespace clear {

enum class NodeKind : std::uint8_t {
    scene,
    filter_instrument,
    filter_note,
    filter_brightness,
    filter_loudness,
    filter_global_position,
    filter_absolute_position,
    filter_relative_position,
    unique,
    relate_before,
    relate_after,
    same_brightness,
    same_loudness,
    same_instrument,
    same_note,
    count,
    exist,
    equal_integer,
    less_than,
    greater_than,
    query_instrument,
    query_note,
    query_brightness,
    query_loudness,
    query_absolute_position,
    query_relative_position,
    query_global_position,
};

inline constexpr int kNumNodeKinds = 27;

/// Types flowing along program edges.
enum class ValueType : std::uint8_t {
    sound_set,
    sound,
    integer,
    boolean,
    instrument,
    note,
    brightness,
    loudness,
    position,  // absolute or relative ordinal
    global_position,
};

std::string_view to_string(NodeKind k);
std::optional<NodeKind> parse_node_kind(std::string_view s);

int arity(NodeKind k);
ValueType output_type(NodeKind k);
/// Type every input of `k` must have.
ValueType input_type(NodeKind k);
bool is_filter(NodeKind k);
/// relate_before/relate_after/same_*: the nodes dropped by degeneracy analysis.
bool is_relational(NodeKind k);

struct ProgramNode {
    NodeKind kind = NodeKind::scene;
    std::optional<AttrValue> value_arg;
    std::vector<int> inputs;

    friend bool operator==(const ProgramNode&, const ProgramNode&) = default;
};

/// Nodes in topological order (children before parents); the root is the
/// last node.
struct Program {
    std::vector<ProgramNode> nodes;

    std::size_t root() const { return nodes.size() - 1; }
    friend bool operator==(const Program&, const Program&) = default;
};

/// Throws StructuralError unless the program is well formed: inputs point to
/// earlier nodes, arity and value_arg match the kind, edges type-check, the
/// root yields an answer type, and every node feeds the root.
void validate(const Program& program);

/// Question type implied by the root node.
QuestionType question_type_of(const Program& program);

/// Result of evaluating a program; nullopt means ill-posed (some `unique`
/// received a set whose size is not 1).
using Outcome = std::optional<Answer>;

/// Bottom-up evaluation. Nodes listed in `relaxed` must be relational; each
/// is evaluated as "every sound except its referent" instead of its own
/// constraint. Throws StructuralError for malformed programs.
Outcome execute(const Program& program, const Scene& scene, std::span<const std::size_t> relaxed = {});

/// Independent oracle: top-down recursion over per-node membership masks,
/// recomputing positions from onsets. Same contract as execute().
Outcome brute_force_answer(const Program& program, const Scene& scene,
                           std::span<const std::size_t> relaxed = {});

/// True iff dropping some relational node's constraint still yields a
/// well-posed program with the same answer. Returns false if the program is
/// itself ill-posed on the scene.
bool check_degenerate(const Program& program, const Scene& scene);

/// check_degenerate() evaluated with brute_force_answer().
bool brute_force_degenerate(const Program& program, const Scene& scene);

/// JSON list of {kind, value_arg?, inputs}; root = last node.
nlohmann::json to_json(const Program& program);
/// Parses and validates. Throws StructuralError.
Program program_from_json(const nlohmann::json& j);

}  // namespace clear
