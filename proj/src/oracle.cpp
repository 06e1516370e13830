// Brute-force reference evaluator. Deliberately shares nothing with the
// bottom-up interpreter in program.cpp beyond validate(): sets are membership
// masks over the scene, evaluation recurses from the root, and positional
// attributes are recomputed from onsets rather than read from the scene.

#include <array>
#include <string>
#include <variant>
#include <vector>

#include "clear/errors.hpp"
#include "clear/program.hpp"

namespace clear {
namespace {

using Mask = std::vector<bool>;

struct IllPosed {};
struct Referent {
    std::size_t index;
};
using Result = std::variant<IllPosed, Mask, Referent, int, bool, Answer>;

class Oracle {
public:
    Oracle(const Program& program, const Scene& scene, std::span<const std::size_t> relaxed)
        : program_(program), scene_(scene), relaxed_(relaxed) {}

    Result eval(std::size_t node_index) const {
        const auto& node = program_.nodes[node_index];
        const std::size_t n = scene_.sounds.size();

        std::vector<Result> args;
        for (int in : node.inputs) {
            args.push_back(eval(static_cast<std::size_t>(in)));
            if (std::holds_alternative<IllPosed>(args.back())) return IllPosed{};
        }

        switch (node.kind) {
            case NodeKind::scene:
                return Mask(n, true);

            case NodeKind::filter_instrument:
            case NodeKind::filter_note:
            case NodeKind::filter_brightness:
            case NodeKind::filter_loudness:
            case NodeKind::filter_global_position:
            case NodeKind::filter_absolute_position:
            case NodeKind::filter_relative_position: {
                Mask in = std::get<Mask>(args[0]);
                const std::string want = attr_to_string(*node.value_arg);
                for (std::size_t s = 0; s < n; ++s) {
                    if (in[s] && attribute_text(node.kind, s) != want) in[s] = false;
                }
                return in;
            }

            case NodeKind::unique: {
                const auto& in = std::get<Mask>(args[0]);
                std::size_t hits = 0;
                std::size_t last = 0;
                for (std::size_t s = 0; s < n; ++s) {
                    if (in[s]) {
                        ++hits;
                        last = s;
                    }
                }
                if (hits != 1) return IllPosed{};
                return Referent{last};
            }

            case NodeKind::relate_before:
            case NodeKind::relate_after:
            case NodeKind::same_brightness:
            case NodeKind::same_loudness:
            case NodeKind::same_instrument:
            case NodeKind::same_note: {
                const std::size_t ref = std::get<Referent>(args[0]).index;
                const bool relax = is_relaxed(node_index);
                Mask out(n, false);
                for (std::size_t s = 0; s < n; ++s) {
                    if (s == ref) continue;
                    out[s] = relax || related(node.kind, s, ref);
                }
                return out;
            }

            case NodeKind::count: {
                int c = 0;
                for (bool b : std::get<Mask>(args[0])) c += b ? 1 : 0;
                return c;
            }
            case NodeKind::exist: {
                for (bool b : std::get<Mask>(args[0])) {
                    if (b) return true;
                }
                return false;
            }
            case NodeKind::equal_integer: return std::get<int>(args[0]) == std::get<int>(args[1]);
            case NodeKind::less_than: return std::get<int>(args[0]) < std::get<int>(args[1]);
            case NodeKind::greater_than: return std::get<int>(args[0]) > std::get<int>(args[1]);

            case NodeKind::query_instrument:
            case NodeKind::query_note:
            case NodeKind::query_brightness:
            case NodeKind::query_loudness:
            case NodeKind::query_absolute_position:
            case NodeKind::query_relative_position:
            case NodeKind::query_global_position: {
                const std::size_t ref = std::get<Referent>(args[0]).index;
                const auto parsed = Answer::parse(attribute_text(node.kind, ref));
                if (!parsed) throw StructuralError("query produced a value outside the vocabulary");
                return *parsed;
            }
        }
        throw StructuralError("unhandled node kind");
    }

private:
    bool is_relaxed(std::size_t node_index) const {
        for (auto r : relaxed_) {
            if (r == node_index) return true;
        }
        return false;
    }

    int absolute_rank(std::size_t s) const {
        int rank = 1;
        for (const auto& other : scene_.sounds) {
            if (other.onset_s < scene_.sounds[s].onset_s) ++rank;
        }
        return rank;
    }

    int relative_rank(std::size_t s) const {
        int rank = 1;
        for (const auto& other : scene_.sounds) {
            if (other.attributes.instrument == scene_.sounds[s].attributes.instrument &&
                other.onset_s < scene_.sounds[s].onset_s) {
                ++rank;
            }
        }
        return rank;
    }

    std::string global_part(std::size_t s) const {
        const double onset = scene_.sounds[s].onset_s;
        if (3.0 * onset < scene_.duration_s) return "beginning";
        if (3.0 * onset < 2.0 * scene_.duration_s) return "middle";
        return "end";
    }

    /// The sound's attribute probed by a filter or query kind, as vocabulary text.
    std::string attribute_text(NodeKind kind, std::size_t s) const {
        const auto& a = scene_.sounds[s].attributes;
        switch (kind) {
            case NodeKind::filter_instrument:
            case NodeKind::query_instrument: return std::string(to_string(a.instrument));
            case NodeKind::filter_note:
            case NodeKind::query_note: return std::string(to_string(a.note));
            case NodeKind::filter_brightness:
            case NodeKind::query_brightness: return std::string(to_string(a.brightness));
            case NodeKind::filter_loudness:
            case NodeKind::query_loudness: return std::string(to_string(a.loudness));
            case NodeKind::filter_global_position:
            case NodeKind::query_global_position: return global_part(s);
            case NodeKind::filter_absolute_position:
            case NodeKind::query_absolute_position: return std::string(to_string(Ordinal{absolute_rank(s)}));
            case NodeKind::filter_relative_position:
            case NodeKind::query_relative_position: return std::string(to_string(Ordinal{relative_rank(s)}));
            default: throw StructuralError("kind has no attribute");
        }
    }

    bool related(NodeKind kind, std::size_t s, std::size_t ref) const {
        const auto& a = scene_.sounds[s];
        const auto& b = scene_.sounds[ref];
        switch (kind) {
            case NodeKind::relate_before: return absolute_rank(s) < absolute_rank(ref);
            case NodeKind::relate_after: return absolute_rank(s) > absolute_rank(ref);
            case NodeKind::same_brightness: return to_string(a.attributes.brightness) == to_string(b.attributes.brightness);
            case NodeKind::same_loudness: return to_string(a.attributes.loudness) == to_string(b.attributes.loudness);
            case NodeKind::same_instrument: return to_string(a.attributes.instrument) == to_string(b.attributes.instrument);
            case NodeKind::same_note: return to_string(a.attributes.note) == to_string(b.attributes.note);
            default: return false;
        }
    }

    const Program& program_;
    const Scene& scene_;
    std::span<const std::size_t> relaxed_;
};

}  // namespace

Outcome brute_force_answer(const Program& program, const Scene& scene, std::span<const std::size_t> relaxed) {
    validate(program);
    for (auto r : relaxed) {
        if (r >= program.nodes.size() || !is_relational(program.nodes[r].kind)) {
            throw StructuralError("relaxed node " + std::to_string(r) + " is not relational");
        }
    }
    const Oracle oracle(program, scene, relaxed);
    const Result r = oracle.eval(program.root());
    if (std::holds_alternative<IllPosed>(r)) return std::nullopt;
    if (const auto* c = std::get_if<int>(&r)) {
        const auto a = Answer::parse(std::to_string(*c));
        if (!a) throw StructuralError("count outside the vocabulary: " + std::to_string(*c));
        return a;
    }
    if (const auto* b = std::get_if<bool>(&r)) return Answer::parse(*b ? "yes" : "no");
    return std::get<Answer>(r);
}

bool brute_force_degenerate(const Program& program, const Scene& scene) {
    const auto original = brute_force_answer(program, scene);
    if (!original) return false;
    for (std::size_t i = 0; i < program.nodes.size(); ++i) {
        if (!is_relational(program.nodes[i].kind)) continue;
        const std::array<std::size_t, 1> relaxed = {i};
        const auto variant = brute_force_answer(program, scene, relaxed);
        if (variant.has_value() && variant->str() == original->str()) return true;
    }
    return false;
}

}  // namespace clear
