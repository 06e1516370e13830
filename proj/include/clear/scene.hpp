#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "clear/attributes.hpp"
#include "clear/soundbank.hpp"

namespace clear {

inline constexpr double kSceneDuration = 50.0;
inline constexpr std::int64_t kSceneSamples = 2'400'000;  // 50 s at 48 kHz
inline constexpr double kMinReverbMs = 50.0;
inline constexpr double kMaxReverbMs = 400.0;
inline constexpr double kMinComposedDuration = 2.0;
inline constexpr double kMaxComposedDuration = 3.0;

struct SceneSound {
    AttributeTuple attributes;
    double onset_s = 0.0;
    double duration_s = 0.0;
    int absolute_position = 0;  // 1-based rank by onset
    int relative_position = 0;  // 1-based rank among same-instrument sounds
    GlobalPosition global_position = GlobalPosition::beginning;
    /// Bank sound id when composed from a bank; empty for synthesized sounds.
    std::string sound_id;

    std::int64_t onset_sample() const;
    std::int64_t length_samples() const;

    friend bool operator==(const SceneSound&, const SceneSound&) = default;
};

struct Scene {
    std::int64_t scene_id = 0;
    std::vector<SceneSound> sounds;
    double duration_s = kSceneDuration;
    double reverb_time_ms = kMinReverbMs;
    std::uint64_t seed = 0;

    friend bool operator==(const Scene&, const Scene&) = default;
};

/// Where scene sounds come from during composition. Without a bank, tuples are
/// drawn from the full 5x12x2x2 grid and durations from [2, 3] s; with a bank,
/// tuples are drawn from the bank's distinct tuples and the bank sound's own
/// duration is used.
struct CompositionSource {
    const SoundBank* bank = nullptr;
};

/// Per-scene seed: derive_seed(master_seed, scene_id).
std::uint64_t scene_seed(std::uint64_t master_seed, std::int64_t scene_id);

/// Seed used to synthesize sound `index` of a scene.
std::uint64_t sound_seed(const Scene& scene, std::size_t index);

/// Deterministic in (master_seed, scene_id). Throws std::logic_error if the
/// sampled durations cannot fit the scene.
Scene compose_scene(const CompositionSource& source, std::int64_t scene_id, std::uint64_t master_seed);

/// Fills absolute/relative/global positions. Onsets must be strictly
/// increasing (InvalidArgument otherwise). Global position uses scene thirds
/// of `scene_duration`.
void derive_positions(std::span<SceneSound> sounds, double scene_duration = kSceneDuration);

nlohmann::json to_json(const Scene& scene);
/// Throws ValidationError on missing fields or unknown labels.
Scene scene_from_json(const nlohmann::json& j);

}  // namespace clear
