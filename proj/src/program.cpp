#include "clear/program.hpp"

#include <algorithm>
#include <array>
#include <string>
#include <variant>

#include "clear/errors.hpp"

namespace clear {
namespace {

struct KindInfo {
    std::string_view name;
    int arity;
    ValueType input;
    ValueType output;
};

constexpr std::array<KindInfo, kNumNodeKinds> kKinds = {{
    {"scene", 0, ValueType::sound_set, ValueType::sound_set},
    {"filter_instrument", 1, ValueType::sound_set, ValueType::sound_set},
    {"filter_note", 1, ValueType::sound_set, ValueType::sound_set},
    {"filter_brightness", 1, ValueType::sound_set, ValueType::sound_set},
    {"filter_loudness", 1, ValueType::sound_set, ValueType::sound_set},
    {"filter_global_position", 1, ValueType::sound_set, ValueType::sound_set},
    {"filter_absolute_position", 1, ValueType::sound_set, ValueType::sound_set},
    {"filter_relative_position", 1, ValueType::sound_set, ValueType::sound_set},
    {"unique", 1, ValueType::sound_set, ValueType::sound},
    {"relate_before", 1, ValueType::sound, ValueType::sound_set},
    {"relate_after", 1, ValueType::sound, ValueType::sound_set},
    {"same_brightness", 1, ValueType::sound, ValueType::sound_set},
    {"same_loudness", 1, ValueType::sound, ValueType::sound_set},
    {"same_instrument", 1, ValueType::sound, ValueType::sound_set},
    {"same_note", 1, ValueType::sound, ValueType::sound_set},
    {"count", 1, ValueType::sound_set, ValueType::integer},
    {"exist", 1, ValueType::sound_set, ValueType::boolean},
    {"equal_integer", 2, ValueType::integer, ValueType::boolean},
    {"less_than", 2, ValueType::integer, ValueType::boolean},
    {"greater_than", 2, ValueType::integer, ValueType::boolean},
    {"query_instrument", 1, ValueType::sound, ValueType::instrument},
    {"query_note", 1, ValueType::sound, ValueType::note},
    {"query_brightness", 1, ValueType::sound, ValueType::brightness},
    {"query_loudness", 1, ValueType::sound, ValueType::loudness},
    {"query_absolute_position", 1, ValueType::sound, ValueType::position},
    {"query_relative_position", 1, ValueType::sound, ValueType::position},
    {"query_global_position", 1, ValueType::sound, ValueType::global_position},
}};

const KindInfo& info(NodeKind k) { return kKinds[static_cast<std::size_t>(k)]; }

bool is_answer_type(ValueType t) {
    return t != ValueType::sound_set && t != ValueType::sound;
}

/// Index of the AttrValue alternative a filter kind expects.
std::size_t filter_arg_index(NodeKind k) {
    switch (k) {
        case NodeKind::filter_instrument: return 0;
        case NodeKind::filter_note: return 1;
        case NodeKind::filter_brightness: return 2;
        case NodeKind::filter_loudness: return 3;
        case NodeKind::filter_global_position: return 4;
        case NodeKind::filter_absolute_position:
        case NodeKind::filter_relative_position: return 5;
        default: return std::variant_npos;
    }
}

std::optional<AttrValue> parse_value_arg(NodeKind k, const std::string& s) {
    auto wrap = [](auto opt) -> std::optional<AttrValue> {
        if (!opt) return std::nullopt;
        return AttrValue{*opt};
    };
    switch (filter_arg_index(k)) {
        case 0: return wrap(parse_instrument(s));
        case 1: return wrap(parse_note(s));
        case 2: return wrap(parse_brightness(s));
        case 3: return wrap(parse_loudness(s));
        case 4: return wrap(parse_global_position(s));
        case 5: return wrap(parse_ordinal(s));
        default: return std::nullopt;
    }
}

[[noreturn]] void structural(std::size_t node, const std::string& msg) {
    throw StructuralError("node " + std::to_string(node) + ": " + msg);
}

// Intermediate values of bottom-up evaluation.
using SoundList = std::vector<std::size_t>;  // scene indices in onset order
struct SoundRef {
    std::size_t index;
};
using Value = std::variant<SoundList, SoundRef, int, bool, Answer>;

bool matches_filter(NodeKind kind, const AttrValue& arg, const SceneSound& s) {
    switch (kind) {
        case NodeKind::filter_instrument: return std::get<Instrument>(arg) == s.attributes.instrument;
        case NodeKind::filter_note: return std::get<Note>(arg) == s.attributes.note;
        case NodeKind::filter_brightness: return std::get<Brightness>(arg) == s.attributes.brightness;
        case NodeKind::filter_loudness: return std::get<Loudness>(arg) == s.attributes.loudness;
        case NodeKind::filter_global_position: return std::get<GlobalPosition>(arg) == s.global_position;
        case NodeKind::filter_absolute_position: return std::get<Ordinal>(arg).value == s.absolute_position;
        case NodeKind::filter_relative_position: return std::get<Ordinal>(arg).value == s.relative_position;
        default: return false;
    }
}

bool shares_attribute(NodeKind kind, const SceneSound& a, const SceneSound& b) {
    switch (kind) {
        case NodeKind::same_brightness: return a.attributes.brightness == b.attributes.brightness;
        case NodeKind::same_loudness: return a.attributes.loudness == b.attributes.loudness;
        case NodeKind::same_instrument: return a.attributes.instrument == b.attributes.instrument;
        case NodeKind::same_note: return a.attributes.note == b.attributes.note;
        default: return false;
    }
}

}  // namespace

std::string_view to_string(NodeKind k) { return info(k).name; }

std::optional<NodeKind> parse_node_kind(std::string_view s) {
    for (std::size_t i = 0; i < kKinds.size(); ++i) {
        if (kKinds[i].name == s) return static_cast<NodeKind>(i);
    }
    return std::nullopt;
}

int arity(NodeKind k) { return info(k).arity; }
ValueType output_type(NodeKind k) { return info(k).output; }
ValueType input_type(NodeKind k) { return info(k).input; }
bool is_filter(NodeKind k) { return filter_arg_index(k) != std::variant_npos; }

bool is_relational(NodeKind k) {
    switch (k) {
        case NodeKind::relate_before:
        case NodeKind::relate_after:
        case NodeKind::same_brightness:
        case NodeKind::same_loudness:
        case NodeKind::same_instrument:
        case NodeKind::same_note: return true;
        default: return false;
    }
}

void validate(const Program& program) {
    if (program.nodes.empty()) throw StructuralError("empty program");
    std::vector<bool> consumed(program.nodes.size(), false);
    for (std::size_t i = 0; i < program.nodes.size(); ++i) {
        const auto& node = program.nodes[i];
        if (static_cast<int>(node.inputs.size()) != arity(node.kind)) {
            structural(i, std::string(to_string(node.kind)) + " expects " + std::to_string(arity(node.kind)) +
                              " input(s), got " + std::to_string(node.inputs.size()));
        }
        if (is_filter(node.kind)) {
            if (!node.value_arg || node.value_arg->index() != filter_arg_index(node.kind)) {
                structural(i, std::string(to_string(node.kind)) + " needs a value_arg of the matching attribute");
            }
            if (const auto* ord = std::get_if<Ordinal>(&*node.value_arg);
                ord != nullptr && (ord->value < 1 || ord->value > kMaxOrdinal)) {
                structural(i, "ordinal value_arg out of range");
            }
        } else if (node.value_arg) {
            structural(i, std::string(to_string(node.kind)) + " takes no value_arg");
        }
        for (int in : node.inputs) {
            if (in < 0 || static_cast<std::size_t>(in) >= i) {
                structural(i, "input " + std::to_string(in) + " does not reference an earlier node");
            }
            const auto& child = program.nodes[static_cast<std::size_t>(in)];
            if (output_type(child.kind) != input_type(node.kind)) {
                structural(i, std::string(to_string(node.kind)) + " cannot consume the output of " +
                                  std::string(to_string(child.kind)));
            }
            consumed[static_cast<std::size_t>(in)] = true;
        }
    }
    const auto root = program.root();
    if (!is_answer_type(output_type(program.nodes[root].kind))) {
        structural(root, "root must produce an answer, not a sound or set");
    }
    for (std::size_t i = 0; i < root; ++i) {
        if (!consumed[i]) structural(i, "output is never used");
    }
}

QuestionType question_type_of(const Program& program) {
    if (program.nodes.empty()) throw StructuralError("empty program");
    switch (program.nodes[program.root()].kind) {
        case NodeKind::exist:
        case NodeKind::equal_integer:
        case NodeKind::less_than:
        case NodeKind::greater_than: return QuestionType::yes_no;
        case NodeKind::count: return QuestionType::counting;
        case NodeKind::query_instrument: return QuestionType::instrument;
        case NodeKind::query_note: return QuestionType::note;
        case NodeKind::query_brightness: return QuestionType::brightness;
        case NodeKind::query_loudness: return QuestionType::loudness;
        case NodeKind::query_absolute_position: return QuestionType::absolute_position;
        case NodeKind::query_relative_position: return QuestionType::relative_position;
        case NodeKind::query_global_position: return QuestionType::global_position;
        default: throw StructuralError("root does not produce an answer");
    }
}

Outcome execute(const Program& program, const Scene& scene, std::span<const std::size_t> relaxed) {
    validate(program);
    for (auto r : relaxed) {
        if (r >= program.nodes.size() || !is_relational(program.nodes[r].kind)) {
            throw StructuralError("relaxed node " + std::to_string(r) + " is not relational");
        }
    }
    const auto& sounds = scene.sounds;
    std::vector<Value> values(program.nodes.size());

    for (std::size_t i = 0; i < program.nodes.size(); ++i) {
        const auto& node = program.nodes[i];
        auto input = [&](std::size_t k) -> const Value& {
            return values[static_cast<std::size_t>(node.inputs[k])];
        };
        const bool relax = std::find(relaxed.begin(), relaxed.end(), i) != relaxed.end();

        switch (node.kind) {
            case NodeKind::scene: {
                SoundList all(sounds.size());
                for (std::size_t s = 0; s < all.size(); ++s) all[s] = s;
                values[i] = std::move(all);
                break;
            }
            case NodeKind::filter_instrument:
            case NodeKind::filter_note:
            case NodeKind::filter_brightness:
            case NodeKind::filter_loudness:
            case NodeKind::filter_global_position:
            case NodeKind::filter_absolute_position:
            case NodeKind::filter_relative_position: {
                SoundList out;
                for (auto s : std::get<SoundList>(input(0))) {
                    if (matches_filter(node.kind, *node.value_arg, sounds[s])) out.push_back(s);
                }
                values[i] = std::move(out);
                break;
            }
            case NodeKind::unique: {
                const auto& set = std::get<SoundList>(input(0));
                if (set.size() != 1) return std::nullopt;
                values[i] = SoundRef{set.front()};
                break;
            }
            case NodeKind::relate_before:
            case NodeKind::relate_after:
            case NodeKind::same_brightness:
            case NodeKind::same_loudness:
            case NodeKind::same_instrument:
            case NodeKind::same_note: {
                const auto ref = std::get<SoundRef>(input(0)).index;
                SoundList out;
                for (std::size_t s = 0; s < sounds.size(); ++s) {
                    if (s == ref) continue;
                    bool keep = relax;
                    if (!relax) {
                        if (node.kind == NodeKind::relate_before) {
                            keep = sounds[s].onset_s < sounds[ref].onset_s;
                        } else if (node.kind == NodeKind::relate_after) {
                            keep = sounds[s].onset_s > sounds[ref].onset_s;
                        } else {
                            keep = shares_attribute(node.kind, sounds[s], sounds[ref]);
                        }
                    }
                    if (keep) out.push_back(s);
                }
                values[i] = std::move(out);
                break;
            }
            case NodeKind::count:
                values[i] = static_cast<int>(std::get<SoundList>(input(0)).size());
                break;
            case NodeKind::exist:
                values[i] = !std::get<SoundList>(input(0)).empty();
                break;
            case NodeKind::equal_integer:
                values[i] = std::get<int>(input(0)) == std::get<int>(input(1));
                break;
            case NodeKind::less_than:
                values[i] = std::get<int>(input(0)) < std::get<int>(input(1));
                break;
            case NodeKind::greater_than:
                values[i] = std::get<int>(input(0)) > std::get<int>(input(1));
                break;
            case NodeKind::query_instrument:
                values[i] = Answer::of(sounds[std::get<SoundRef>(input(0)).index].attributes.instrument);
                break;
            case NodeKind::query_note:
                values[i] = Answer::of(sounds[std::get<SoundRef>(input(0)).index].attributes.note);
                break;
            case NodeKind::query_brightness:
                values[i] = Answer::of(sounds[std::get<SoundRef>(input(0)).index].attributes.brightness);
                break;
            case NodeKind::query_loudness:
                values[i] = Answer::of(sounds[std::get<SoundRef>(input(0)).index].attributes.loudness);
                break;
            case NodeKind::query_absolute_position:
                values[i] = Answer::of(Ordinal{sounds[std::get<SoundRef>(input(0)).index].absolute_position});
                break;
            case NodeKind::query_relative_position:
                values[i] = Answer::of(Ordinal{sounds[std::get<SoundRef>(input(0)).index].relative_position});
                break;
            case NodeKind::query_global_position:
                values[i] = Answer::of(sounds[std::get<SoundRef>(input(0)).index].global_position);
                break;
        }
    }

    const auto& root = values[program.root()];
    if (const auto* n = std::get_if<int>(&root)) return Answer::count(*n);
    if (const auto* b = std::get_if<bool>(&root)) return Answer::yes_no(*b);
    return std::get<Answer>(root);
}

bool check_degenerate(const Program& program, const Scene& scene) {
    const auto original = execute(program, scene);
    if (!original) return false;
    for (std::size_t i = 0; i < program.nodes.size(); ++i) {
        if (!is_relational(program.nodes[i].kind)) continue;
        const std::array<std::size_t, 1> relaxed = {i};
        const auto variant = execute(program, scene, relaxed);
        if (variant && *variant == *original) return true;
    }
    return false;
}

nlohmann::json to_json(const Program& program) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& node : program.nodes) {
        nlohmann::json j = {{"kind", to_string(node.kind)}, {"inputs", node.inputs}};
        if (node.value_arg) j["value_arg"] = attr_to_string(*node.value_arg);
        out.push_back(std::move(j));
    }
    return out;
}

Program program_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw StructuralError("program must be a JSON array");
    Program program;
    try {
        for (std::size_t i = 0; i < j.size(); ++i) {
            const auto& jn = j[i];
            ProgramNode node;
            const auto kind_name = jn.at("kind").get<std::string>();
            const auto kind = parse_node_kind(kind_name);
            if (!kind) structural(i, "unknown kind '" + kind_name + "'");
            node.kind = *kind;
            if (jn.contains("value_arg") && !jn.at("value_arg").is_null()) {
                const auto text = jn.at("value_arg").get<std::string>();
                node.value_arg = parse_value_arg(node.kind, text);
                if (!node.value_arg) structural(i, "invalid value_arg '" + text + "' for " + kind_name);
            }
            node.inputs = jn.at("inputs").get<std::vector<int>>();
            program.nodes.push_back(std::move(node));
        }
    } catch (const nlohmann::json::exception& e) {
        throw StructuralError(std::string("malformed program JSON: ") + e.what());
    }
    validate(program);
    return program;
}

}  // namespace clear
