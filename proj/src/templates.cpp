#include "clear/templates.hpp"

#include <algorithm>
#include <array>
#include <regex>
#include <set>
#include <sstream>

#include "clear/errors.hpp"
#include "clear/rng.hpp"

namespace clear {
namespace {

const std::regex& placeholder_re() {
    static const std::regex re(R"(<(GP|ORD|REL|I|N|B|L)(\d*)>)");
    return re;
}

SlotDomain domain_of_prefix(const std::string& prefix) {
    if (prefix == "I") return SlotDomain::instrument;
    if (prefix == "N") return SlotDomain::note;
    if (prefix == "B") return SlotDomain::brightness;
    if (prefix == "L") return SlotDomain::loudness;
    if (prefix == "GP") return SlotDomain::global_position;
    if (prefix == "ORD") return SlotDomain::ordinal;
    return SlotDomain::relation;
}

std::size_t domain_size(SlotDomain d) {
    switch (d) {
        case SlotDomain::instrument: return kNumInstruments;
        case SlotDomain::note: return kNumNotes;
        case SlotDomain::brightness: return kNumBrightness;
        case SlotDomain::loudness: return kNumLoudness;
        case SlotDomain::global_position: return kNumGlobalPositions;
        case SlotDomain::ordinal: return kMaxOrdinal;
        case SlotDomain::relation: return 2;
    }
    return 0;
}

std::string domain_value(SlotDomain d, std::size_t i) {
    switch (d) {
        case SlotDomain::instrument: return std::string(to_string(static_cast<Instrument>(i)));
        case SlotDomain::note: return std::string(to_string(static_cast<Note>(i)));
        case SlotDomain::brightness: return std::string(to_string(static_cast<Brightness>(i)));
        case SlotDomain::loudness: return std::string(to_string(static_cast<Loudness>(i)));
        case SlotDomain::global_position: return std::string(to_string(static_cast<GlobalPosition>(i)));
        case SlotDomain::ordinal: return std::string(to_string(Ordinal{static_cast<int>(i) + 1}));
        case SlotDomain::relation: return i == 0 ? "before" : "after";
    }
    return {};
}

/// Parses a bound value into the attribute the filter needs.
std::optional<AttrValue> to_attr(SlotDomain d, const std::string& v) {
    auto wrap = [](auto opt) -> std::optional<AttrValue> {
        if (!opt) return std::nullopt;
        return AttrValue{*opt};
    };
    switch (d) {
        case SlotDomain::instrument: return wrap(parse_instrument(v));
        case SlotDomain::note: return wrap(parse_note(v));
        case SlotDomain::brightness: return wrap(parse_brightness(v));
        case SlotDomain::loudness: return wrap(parse_loudness(v));
        case SlotDomain::global_position: return wrap(parse_global_position(v));
        case SlotDomain::ordinal: return wrap(parse_ordinal(v));
        case SlotDomain::relation: return std::nullopt;
    }
    return std::nullopt;
}

/// Canonical spelling of a bound value, or nullopt if outside the domain.
std::optional<std::string> canonical_value(SlotDomain d, const std::string& v) {
    if (d == SlotDomain::relation) {
        if (v == "before" || v == "after") return v;
        return std::nullopt;
    }
    const auto attr = to_attr(d, v);
    if (!attr) return std::nullopt;
    return attr_to_string(*attr);
}

std::vector<BindingSlot> slots_from_text(const std::string& text) {
    std::vector<BindingSlot> slots;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), placeholder_re()); it != std::sregex_iterator(); ++it) {
        const std::string name = (*it)[1].str() + (*it)[2].str();
        const bool seen = std::any_of(slots.begin(), slots.end(), [&](const auto& s) { return s.name == name; });
        if (!seen) slots.push_back({name, domain_of_prefix((*it)[1].str())});
    }
    return slots;
}

std::vector<SkeletonNode> parse_skeleton(std::string_view spec) {
    std::vector<SkeletonNode> nodes;
    std::stringstream all{std::string(spec)};
    std::string item;
    while (std::getline(all, item, ';')) {
        std::stringstream ss(item);
        std::string head;
        if (!(ss >> head)) continue;
        SkeletonNode node;
        std::string kind_name = head;
        if (const auto lt = head.find('<'); lt != std::string::npos) {
            kind_name = head.substr(0, lt);
            node.slot = head.substr(lt + 1, head.size() - lt - 2);
        }
        if (kind_name == "relate") {
            node.kind = NodeKind::relate_before;
        } else {
            const auto kind = parse_node_kind(kind_name);
            if (!kind) throw StructuralError("unknown skeleton kind '" + kind_name + "'");
            node.kind = *kind;
        }
        int in;
        while (ss >> in) node.inputs.push_back(in);
        nodes.push_back(std::move(node));
    }
    return nodes;
}

const BindingSlot* find_slot(const Template& t, const std::string& name) {
    for (const auto& s : t.slots) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

std::vector<Template> make_catalog() {
    using QT = QuestionType;
    std::vector<Template> c;
    auto add = [&](std::string id, QT type, std::string text, std::string_view skeleton,
                   std::vector<std::pair<std::string, std::string>> distinct = {}) {
        c.push_back(make_template(std::move(id), type, std::move(text), skeleton, std::move(distinct)));
    };

    // yes/no
    add("yes_no_equal_count", QT::yes_no, "Is there an equal number of <L1> <I1> sounds and <L2> <I2> sounds?",
        "scene; filter_instrument<I1> 0; filter_loudness<L1> 1; count 2;"
        "filter_instrument<I2> 0; filter_loudness<L2> 4; count 5; equal_integer 3 6",
        {{"I1", "I2"}});
    // With exist() over a same_* relation only "no" answers survive the
    // degeneracy check: dropping the relation always finds the other sound.
    add("yes_no_as_loud", QT::yes_no, "Is the <I1> as loud as the <I2>?",
        "scene; filter_instrument<I1> 0; unique 1; same_loudness 2; filter_instrument<I2> 3; exist 4",
        {{"I1", "I2"}});
    add("yes_no_more_brightness", QT::yes_no, "Are there more <B> sounds than <L> sounds?",
        "scene; filter_brightness<B> 0; count 1; filter_loudness<L> 0; count 3; greater_than 2 4");
    add("yes_no_fewer_notes", QT::yes_no, "Are there fewer <N> notes than <L> sounds?",
        "scene; filter_note<N> 0; count 1; filter_loudness<L> 0; count 3; less_than 2 4");
    add("yes_no_before_after", QT::yes_no,
        "Is there an equal number of <I1> sounds before the <ORD> sound and <I2> sounds after it?",
        "scene; filter_absolute_position<ORD> 0; unique 1; relate_before 2; filter_instrument<I1> 3; count 4;"
        "relate_after 2; filter_instrument<I2> 6; count 7; equal_integer 5 8");

    // note
    add("note_relation", QT::note, "What is the note played by the <I> that is <REL> the <L> <B> <N> note?",
        "scene; filter_loudness<L> 0; filter_brightness<B> 1; filter_note<N> 2; unique 3; relate<REL> 4;"
        "filter_instrument<I> 5; unique 6; query_note 7");
    add("note_ordinal", QT::note, "What note is played by the <ORD> <I>?",
        "scene; filter_instrument<I> 0; filter_relative_position<ORD> 1; unique 2; query_note 3");
    add("note_part", QT::note, "What is the note of the <B> <I> sound in the <GP> of the scene?",
        "scene; filter_instrument<I> 0; filter_brightness<B> 1; filter_global_position<GP> 2; unique 3; query_note 4");

    // instrument
    add("instrument_part", QT::instrument, "What instrument plays a <B> <L> sound in the <GP> of the scene?",
        "scene; filter_brightness<B> 0; filter_loudness<L> 1; filter_global_position<GP> 2; unique 3;"
        "query_instrument 4");
    add("instrument_absolute", QT::instrument, "What instrument plays the <ORD> sound?",
        "scene; filter_absolute_position<ORD> 0; unique 1; query_instrument 2");
    add("instrument_relation", QT::instrument, "What instrument plays the <N> note <REL> the <ORD> <I>?",
        "scene; filter_instrument<I> 0; filter_relative_position<ORD> 1; unique 2; relate<REL> 3;"
        "filter_note<N> 4; unique 5; query_instrument 6");

    // brightness
    add("brightness_ordinal", QT::brightness, "What is the brightness of the <ORD> <I> sound?",
        "scene; filter_instrument<I> 0; filter_relative_position<ORD> 1; unique 2; query_brightness 3");
    add("brightness_attributes", QT::brightness, "What is the brightness of the <L> <N> note played by the <I>?",
        "scene; filter_instrument<I> 0; filter_note<N> 1; filter_loudness<L> 2; unique 3; query_brightness 4");
    add("brightness_relation", QT::brightness, "What is the brightness of the <I> sound <REL> the <ORD> sound?",
        "scene; filter_absolute_position<ORD> 0; unique 1; relate<REL> 2; filter_instrument<I> 3; unique 4;"
        "query_brightness 5");

    // loudness
    add("loudness_relation", QT::loudness, "What is the loudness of the <I1> playing <REL> the <ORD> <I2>?",
        "scene; filter_instrument<I2> 0; filter_relative_position<ORD> 1; unique 2; relate<REL> 3;"
        "filter_instrument<I1> 4; unique 5; query_loudness 6");
    add("loudness_absolute", QT::loudness, "What is the loudness of the <ORD> sound?",
        "scene; filter_absolute_position<ORD> 0; unique 1; query_loudness 2");
    add("loudness_attributes", QT::loudness, "What is the loudness of the <B> <I> playing a <N>?",
        "scene; filter_instrument<I> 0; filter_brightness<B> 1; filter_note<N> 2; unique 3; query_loudness 4");

    // counting
    add("count_same_brightness", QT::counting, "How many other sounds have the same brightness as the <ORD> <I>?",
        "scene; filter_instrument<I> 0; filter_relative_position<ORD> 1; unique 2; same_brightness 3; count 4");
    add("count_instrument", QT::counting, "How many <I> sounds are there?",
        "scene; filter_instrument<I> 0; count 1");
    add("count_relation", QT::counting, "How many <L> sounds are there <REL> the <ORD> <I>?",
        "scene; filter_instrument<I> 0; filter_relative_position<ORD> 1; unique 2; relate<REL> 3;"
        "filter_loudness<L> 4; count 5");
    add("count_same_loudness", QT::counting, "How many other sounds have the same loudness as the <ORD> sound?",
        "scene; filter_absolute_position<ORD> 0; unique 1; same_loudness 2; count 3");
    add("count_same_instrument", QT::counting,
        "How many other sounds are played by the same instrument as the <ORD> sound?",
        "scene; filter_absolute_position<ORD> 0; unique 1; same_instrument 2; count 3");
    add("count_same_note", QT::counting, "How many other sounds play the same note as the <B> <I>?",
        "scene; filter_instrument<I> 0; filter_brightness<B> 1; unique 2; same_note 3; count 4");

    // absolute position
    add("absolute_relation", QT::absolute_position,
        "What is the position of the <N1> note playing <REL> the <B> <N2> note?",
        "scene; filter_brightness<B> 0; filter_note<N2> 1; unique 2; relate<REL> 3; filter_note<N1> 4; unique 5;"
        "query_absolute_position 6");
    add("absolute_instrument_relation", QT::absolute_position,
        "What is the position of the <I1> playing <REL> the <I2>?",
        "scene; filter_instrument<I2> 0; unique 1; relate<REL> 2; filter_instrument<I1> 3; unique 4;"
        "query_absolute_position 5",
        {{"I1", "I2"}});
    add("absolute_ordinal", QT::absolute_position, "What is the position of the <ORD> <I> in the scene?",
        "scene; filter_instrument<I> 0; filter_relative_position<ORD> 1; unique 2; query_absolute_position 3");
    add("absolute_attributes", QT::absolute_position, "What is the position of the <L> <I> sound?",
        "scene; filter_instrument<I> 0; filter_loudness<L> 1; unique 2; query_absolute_position 3");

    // relative position
    add("relative_note", QT::relative_position, "Among the <I> sounds which one is a <N>?",
        "scene; filter_instrument<I> 0; filter_note<N> 1; unique 2; query_relative_position 3");
    add("relative_attributes", QT::relative_position, "Among the <I> sounds which one is <B> and <L>?",
        "scene; filter_instrument<I> 0; filter_brightness<B> 1; filter_loudness<L> 2; unique 3;"
        "query_relative_position 4");
    add("relative_relation", QT::relative_position, "Among the <I> sounds which one plays <REL> the <ORD> sound?",
        "scene; filter_absolute_position<ORD> 0; unique 1; relate<REL> 2; filter_instrument<I> 3; unique 4;"
        "query_relative_position 5");

    // global position
    add("global_relation", QT::global_position,
        "In what part of the scene is the <I1> playing a <N> note that is <REL> the <ORD> <I2> sound?",
        "scene; filter_instrument<I2> 0; filter_relative_position<ORD> 1; unique 2; relate<REL> 3;"
        "filter_instrument<I1> 4; filter_note<N> 5; unique 6; query_global_position 7");
    add("global_ordinal", QT::global_position, "In what part of the scene is the <ORD> <I>?",
        "scene; filter_instrument<I> 0; filter_relative_position<ORD> 1; unique 2; query_global_position 3");
    add("global_attributes", QT::global_position, "In what part of the scene is the <L> <B> <N> note?",
        "scene; filter_loudness<L> 0; filter_brightness<B> 1; filter_note<N> 2; unique 3; query_global_position 4");
    return c;
}

}  // namespace

Template make_template(std::string template_id, QuestionType type, std::string text, std::string_view skeleton,
                       std::vector<std::pair<std::string, std::string>> distinct) {
    Template t;
    t.template_id = std::move(template_id);
    t.question_type = type;
    t.slots = slots_from_text(text);
    t.text = std::move(text);
    t.skeleton = parse_skeleton(skeleton);
    t.distinct = std::move(distinct);
    validate_template(t);
    return t;
}

void validate_template(const Template& t) {
    const auto fail = [&](const std::string& msg) {
        throw StructuralError("template " + t.template_id + ": " + msg);
    };
    const auto text_slots = slots_from_text(t.text);
    for (const auto& s : text_slots) {
        if (find_slot(t, s.name) == nullptr) fail("placeholder <" + s.name + "> has no binding slot");
    }
    for (const auto& slot : t.slots) {
        int uses = 0;
        for (const auto& node : t.skeleton) {
            if (node.slot != slot.name) continue;
            ++uses;
            const bool relation_node = node.kind == NodeKind::relate_before || node.kind == NodeKind::relate_after;
            if (slot.domain == SlotDomain::relation ? !relation_node : !is_filter(node.kind)) {
                fail("slot " + slot.name + " bound to incompatible node " + std::string(to_string(node.kind)));
            }
        }
        if (uses != 1) fail("slot " + slot.name + " must be consumed by exactly one node");
    }
    for (const auto& node : t.skeleton) {
        if (is_filter(node.kind) && node.slot.empty()) fail("filter node without a slot");
        if (!node.slot.empty() && find_slot(t, node.slot) == nullptr) fail("node uses unknown slot " + node.slot);
    }
    for (const auto& [a, b] : t.distinct) {
        if (find_slot(t, a) == nullptr || find_slot(t, b) == nullptr) fail("distinct constraint on unknown slot");
    }

    // Structural check on a representative instantiation.
    Bindings sample;
    for (const auto& slot : t.slots) {
        sample[slot.name] = domain_value(slot.domain, 0);
    }
    const auto q = instantiate(t, sample);
    if (question_type_of(q.program) != t.question_type) fail("skeleton root does not match the question type");
}

const std::vector<Template>& builtin_catalog() {
    static const std::vector<Template> catalog = make_catalog();
    return catalog;
}

const Template* find_template(std::span<const Template> catalog, std::string_view template_id) {
    for (const auto& t : catalog) {
        if (t.template_id == template_id) return &t;
    }
    return nullptr;
}

InstantiatedQuestion instantiate(const Template& t, const Bindings& bindings) {
    std::map<std::string, std::string> values;
    for (const auto& slot : t.slots) {
        const auto it = bindings.find(slot.name);
        if (it == bindings.end()) throw InvalidBinding("template " + t.template_id + ": missing binding for " + slot.name);
        const auto v = canonical_value(slot.domain, it->second);
        if (!v) {
            throw InvalidBinding("template " + t.template_id + ": value '" + it->second + "' is not valid for slot " +
                                 slot.name);
        }
        values[slot.name] = *v;
    }

    InstantiatedQuestion out;
    std::string text;
    std::size_t last = 0;
    for (auto it = std::sregex_iterator(t.text.begin(), t.text.end(), placeholder_re()); it != std::sregex_iterator(); ++it) {
        const auto& m = *it;
        text.append(t.text, last, static_cast<std::size_t>(m.position()) - last);
        text += values.at(m[1].str() + m[2].str());
        last = static_cast<std::size_t>(m.position() + m.length());
    }
    text.append(t.text, last);
    out.text = std::move(text);

    for (const auto& sk : t.skeleton) {
        ProgramNode node;
        node.kind = sk.kind;
        node.inputs = sk.inputs;
        if (!sk.slot.empty()) {
            const auto* slot = find_slot(t, sk.slot);
            const auto& v = values.at(sk.slot);
            if (slot->domain == SlotDomain::relation) {
                node.kind = v == "before" ? NodeKind::relate_before : NodeKind::relate_after;
            } else {
                node.value_arg = to_attr(slot->domain, v);
            }
        }
        out.program.nodes.push_back(std::move(node));
    }
    validate(out.program);
    return out;
}

nlohmann::json to_json(const QuestionRecord& r) {
    return {
        {"question_id", r.question_id},
        {"scene_id", r.scene_id},
        {"question_type", to_string(r.question_type)},
        {"text", r.text},
        {"program", to_json(r.program)},
        {"answer", r.answer.str()},
        {"template_id", r.template_id},
        {"bindings", r.bindings},
    };
}

QuestionRecord record_from_json(const nlohmann::json& j) {
    QuestionRecord r;
    try {
        r.question_id = j.at("question_id").get<std::int64_t>();
        r.scene_id = j.at("scene_id").get<std::int64_t>();
        const auto type = j.at("question_type").get<std::string>();
        const auto qt = parse_question_type(type);
        if (!qt) throw ValidationError("unknown question_type '" + type + "'");
        r.question_type = *qt;
        r.text = j.at("text").get<std::string>();
        r.program = program_from_json(j.at("program"));
        const auto answer = j.at("answer").get<std::string>();
        const auto a = Answer::parse(answer);
        if (!a) throw ValidationError("answer '" + answer + "' is not in the vocabulary");
        r.answer = *a;
        r.template_id = j.value("template_id", std::string{});
        if (j.contains("bindings")) r.bindings = j.at("bindings").get<Bindings>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed question record: ") + e.what());
    }
    return r;
}

GenerationResult generate_questions(const Scene& scene, std::span<const Template> catalog, int n_questions,
                                    std::uint64_t seed, const BalanceConfig& balance) {
    if (n_questions < 1) throw InvalidArgument("n_questions must be >= 1");
    if (catalog.empty()) throw InvalidArgument("template catalog is empty");

    GenerationResult result;
    Rng rng(seed);
    const std::int64_t max_attempts = static_cast<std::int64_t>(balance.attempts_per_question) * n_questions;
    std::array<std::array<int, kVocabularySize>, kNumQuestionTypes> answer_counts{};
    std::array<int, kNumQuestionTypes> type_counts{};

    while (static_cast<int>(result.records.size()) < n_questions && result.attempts < max_attempts) {
        const auto& t = catalog[rng.below(catalog.size())];
        const auto type = static_cast<std::size_t>(t.question_type);

        for (int draw = 0; draw < balance.bindings_per_template && result.attempts < max_attempts; ++draw) {
            ++result.attempts;
            Bindings bindings;
            for (const auto& slot : t.slots) {
                bindings[slot.name] = domain_value(slot.domain, rng.below(domain_size(slot.domain)));
            }
            const bool clash = std::any_of(t.distinct.begin(), t.distinct.end(), [&](const auto& pair) {
                return bindings[pair.first] == bindings[pair.second];
            });
            if (clash) continue;

            auto q = instantiate(t, bindings);
            const auto answer = execute(q.program, scene);
            if (!answer) continue;
            if (check_degenerate(q.program, scene)) continue;

            const auto slot = static_cast<std::size_t>(answer->index());
            if (type_counts[type] > 0 &&
                static_cast<double>(answer_counts[type][slot] + 1) > balance.cap_fraction * (type_counts[type] + 1)) {
                break;
            }
            ++type_counts[type];
            ++answer_counts[type][slot];

            QuestionRecord r;
            r.question_id = static_cast<std::int64_t>(result.records.size());
            r.scene_id = scene.scene_id;
            r.question_type = t.question_type;
            r.text = std::move(q.text);
            r.program = std::move(q.program);
            r.answer = *answer;
            r.template_id = t.template_id;
            r.bindings = std::move(bindings);
            result.records.push_back(std::move(r));
            break;
        }
    }

    if (static_cast<int>(result.records.size()) < n_questions) {
        result.warning = "scene " + std::to_string(scene.scene_id) + ": accepted " +
                         std::to_string(result.records.size()) + " of " + std::to_string(n_questions) +
                         " questions after " + std::to_string(result.attempts) + " attempts";
    }
    return result;
}

}  // namespace clear
