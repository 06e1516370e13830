#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "clear/program.hpp"
#include "clear/scene.hpp"
#include "clear/vocabulary.hpp"

namespace clear {

enum class SlotDomain : std::uint8_t { instrument, note, brightness, loudness, global_position, ordinal, relation };

/// A placeholder such as <I1>, <ORD> or <REL>; `name` is the text between the
/// angle brackets.
struct BindingSlot {
    std::string name;
    SlotDomain domain;
};

/// Program node with an optional slot. Filter nodes take their value_arg from
/// the slot; a relate node with a slot becomes relate_before or relate_after
/// depending on the bound relation.
struct SkeletonNode {
    NodeKind kind = NodeKind::scene;
    std::string slot;
    std::vector<int> inputs;
};

struct Template {
    std::string template_id;
    QuestionType question_type = QuestionType::yes_no;
    std::string text;
    std::vector<SkeletonNode> skeleton;
    std::vector<BindingSlot> slots;
    /// Slot pairs that must not be bound to the same value when sampling.
    std::vector<std::pair<std::string, std::string>> distinct;
};

/// Slot name -> value spelling ("cello", "A#", "third", "before", ...).
using Bindings = std::map<std::string, std::string>;

/// Builds a template from text and a skeleton written as ';'-separated nodes
/// "kind[<SLOT>] input...", e.g. "scene; filter_instrument<I> 0; count 1".
/// "relate<REL>" denotes a relation-slot node. Slots are taken from the text.
/// Throws StructuralError if the result violates the template invariants.
Template make_template(std::string template_id, QuestionType type, std::string text,
                       std::string_view skeleton,
                       std::vector<std::pair<std::string, std::string>> distinct = {});

/// Checks slot coverage, skeleton well-formedness and root/type agreement.
void validate_template(const Template& t);

const std::vector<Template>& builtin_catalog();
const Template* find_template(std::span<const Template> catalog, std::string_view template_id);

struct InstantiatedQuestion {
    std::string text;
    Program program;
};

/// Substitutes bindings into text and skeleton. Throws InvalidBinding for a
/// missing slot or a value outside the slot's domain.
InstantiatedQuestion instantiate(const Template& t, const Bindings& bindings);

struct QuestionRecord {
    std::int64_t question_id = 0;
    std::int64_t scene_id = 0;
    QuestionType question_type = QuestionType::yes_no;
    std::string text;
    Program program;
    Answer answer = Answer::yes_no(true);
    std::string template_id;
    Bindings bindings;
};

nlohmann::json to_json(const QuestionRecord& record);
/// Throws ValidationError / StructuralError on malformed records.
QuestionRecord record_from_json(const nlohmann::json& j);

struct BalanceConfig {
    /// Upper bound on the share of the modal answer among a scene's questions
    /// of one type; checked once the type has at least one accepted question.
    double cap_fraction = 0.5;
    /// max attempts = attempts_per_question * n_questions; every binding draw
    /// counts as one attempt.
    int attempts_per_question = 200;
    /// Binding draws tried for a sampled template before a new template is
    /// drawn. A balance rejection ends the draws early.
    int bindings_per_template = 8;
};

struct GenerationResult {
    std::vector<QuestionRecord> records;
    std::int64_t attempts = 0;
    /// Set when fewer than the requested questions were accepted.
    std::optional<std::string> warning;
};

/// Rejection sampling: template and bindings drawn uniformly; rejects
/// ill-posed, degenerate and balance-violating candidates. Deterministic per
/// (scene, seed). question_id is the 0-based acceptance index.
GenerationResult generate_questions(const Scene& scene, std::span<const Template> catalog, int n_questions,
                                    std::uint64_t seed, const BalanceConfig& balance = {});

}  // namespace clear
