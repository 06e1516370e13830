#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include "clear/program.hpp"
#include "clear/rng.hpp"
#include "clear/scene.hpp"

namespace clear::testing {

/// Scene with hand-placed sounds; positions derived from onsets.
struct SoundSpec {
    Instrument instrument;
    Note note;
    Brightness brightness;
    Loudness loudness;
    double onset_s;
    double duration_s = 2.5;
};

inline Scene make_scene(const std::vector<SoundSpec>& specs, std::int64_t id = 0) {
    Scene s;
    s.scene_id = id;
    s.reverb_time_ms = 100.0;
    for (const auto& sp : specs) {
        SceneSound snd;
        snd.attributes = {sp.instrument, sp.note, sp.brightness, sp.loudness};
        snd.onset_s = sp.onset_s;
        snd.duration_s = sp.duration_s;
        s.sounds.push_back(snd);
    }
    derive_positions(s.sounds, s.duration_s);
    return s;
}

/// Composed scene whose attributes are then redrawn from small pools so that
/// repeated attributes (and ambiguous references) are common.
inline Scene crowded_scene(std::uint64_t seed) {
    Rng rng(seed);
    Scene s = compose_scene({}, static_cast<std::int64_t>(rng.below(1000)), seed);
    const int n_instr = 1 + static_cast<int>(rng.below(5));
    const int n_note = 1 + static_cast<int>(rng.below(12));
    for (auto& snd : s.sounds) {
        snd.attributes.instrument = static_cast<Instrument>(rng.below(static_cast<std::uint64_t>(n_instr)));
        snd.attributes.note = static_cast<Note>(rng.below(static_cast<std::uint64_t>(n_note)));
        snd.attributes.brightness = static_cast<Brightness>(rng.below(2));
        snd.attributes.loudness = static_cast<Loudness>(rng.below(2));
    }
    derive_positions(s.sounds, s.duration_s);
    return s;
}

/// Random well-typed programs over the full node inventory.
class ProgramGenerator {
public:
    explicit ProgramGenerator(std::uint64_t seed) : rng_(seed) {}

    Program next() {
        nodes_.clear();
        switch (rng_.below(5)) {
            case 0: {
                static constexpr NodeKind kQueries[] = {
                    NodeKind::query_instrument, NodeKind::query_note, NodeKind::query_brightness,
                    NodeKind::query_loudness, NodeKind::query_absolute_position,
                    NodeKind::query_relative_position, NodeKind::query_global_position};
                int s = sound(0);
                emit(kQueries[rng_.below(7)], {s});
                break;
            }
            case 1: emit(NodeKind::count, {set(0)}); break;
            case 2: emit(NodeKind::exist, {set(0)}); break;
            default: {
                static constexpr NodeKind kCmp[] = {NodeKind::equal_integer, NodeKind::less_than,
                                                    NodeKind::greater_than};
                int a = integer(1);
                int b = integer(1);
                emit(kCmp[rng_.below(3)], {a, b});
            }
        }
        return Program{nodes_};
    }

    /// Random subset of the program's relational node indices.
    std::vector<std::size_t> relaxed_subset(const Program& p) {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < p.nodes.size(); ++i) {
            if (is_relational(p.nodes[i].kind) && rng_.below(3) == 0) out.push_back(i);
        }
        return out;
    }

    Rng& rng() { return rng_; }

private:
    int emit(NodeKind k, std::vector<int> inputs, std::optional<AttrValue> v = std::nullopt) {
        nodes_.push_back(ProgramNode{k, std::move(v), std::move(inputs)});
        return static_cast<int>(nodes_.size()) - 1;
    }

    AttrValue filter_value(NodeKind k) {
        switch (k) {
            case NodeKind::filter_instrument: return static_cast<Instrument>(rng_.below(5));
            case NodeKind::filter_note: return static_cast<Note>(rng_.below(12));
            case NodeKind::filter_brightness: return static_cast<Brightness>(rng_.below(2));
            case NodeKind::filter_loudness: return static_cast<Loudness>(rng_.below(2));
            case NodeKind::filter_global_position: return static_cast<GlobalPosition>(rng_.below(3));
            default: return Ordinal{1 + static_cast<int>(rng_.below(kMaxOrdinal))};
        }
    }

    int set(int depth) {
        const std::uint64_t r = rng_.below(depth >= 4 ? 3 : 10);
        if (r == 0) return emit(NodeKind::scene, {});
        if (r < 7 || depth >= 4) {
            static constexpr NodeKind kFilters[] = {
                NodeKind::filter_instrument, NodeKind::filter_note, NodeKind::filter_brightness,
                NodeKind::filter_loudness, NodeKind::filter_global_position,
                NodeKind::filter_absolute_position, NodeKind::filter_relative_position};
            NodeKind k = kFilters[rng_.below(7)];
            int in = depth >= 4 ? emit(NodeKind::scene, {}) : set(depth + 1);
            return emit(k, {in}, filter_value(k));
        }
        static constexpr NodeKind kRel[] = {NodeKind::relate_before, NodeKind::relate_after,
                                            NodeKind::same_brightness, NodeKind::same_loudness,
                                            NodeKind::same_instrument, NodeKind::same_note};
        NodeKind k = kRel[rng_.below(6)];
        int s = sound(depth + 1);
        return emit(k, {s});
    }

    int sound(int depth) { return emit(NodeKind::unique, {set(depth)}); }
    int integer(int depth) { return emit(NodeKind::count, {set(depth)}); }

    Rng rng_;
    std::vector<ProgramNode> nodes_;
};

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("clear_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace clear::testing
