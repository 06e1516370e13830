#include "clear/scene.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "clear/errors.hpp"
#include "clear/rng.hpp"

namespace clear {

std::int64_t SceneSound::onset_sample() const { return std::llround(onset_s * kSampleRate); }
std::int64_t SceneSound::length_samples() const { return std::llround(duration_s * kSampleRate); }

std::uint64_t scene_seed(std::uint64_t master_seed, std::int64_t scene_id) {
    return derive_seed(master_seed, static_cast<std::uint64_t>(scene_id));
}

std::uint64_t sound_seed(const Scene& scene, std::size_t index) {
    return derive_seed(scene.seed, 0x736f756e64ULL + index);
}

Scene compose_scene(const CompositionSource& source, std::int64_t scene_id, std::uint64_t master_seed) {
    Scene scene;
    scene.scene_id = scene_id;
    scene.seed = scene_seed(master_seed, scene_id);
    Rng rng(scene.seed);

    std::vector<AttributeTuple> bank_tuples;
    if (source.bank != nullptr) {
        bank_tuples = source.bank->tuples();
        if (bank_tuples.empty()) throw InvalidArgument("cannot compose from an empty bank");
    }

    std::array<std::int64_t, kSoundsPerScene> lengths{};
    scene.sounds.resize(kSoundsPerScene);
    for (std::size_t i = 0; i < scene.sounds.size(); ++i) {
        auto& s = scene.sounds[i];
        if (source.bank == nullptr) {
            s.attributes.instrument = static_cast<Instrument>(rng.below(kNumInstruments));
            s.attributes.note = static_cast<Note>(rng.below(kNumNotes));
            s.attributes.brightness = static_cast<Brightness>(rng.below(kNumBrightness));
            s.attributes.loudness = static_cast<Loudness>(rng.below(kNumLoudness));
            const double d = rng.uniform(kMinComposedDuration, kMaxComposedDuration);
            lengths[i] = std::llround(d * kSampleRate);
        } else {
            s.attributes = bank_tuples[rng.below(bank_tuples.size())];
            const auto candidates = source.bank->find(s.attributes);
            const auto& sound = source.bank->sounds()[candidates[rng.below(candidates.size())]];
            s.sound_id = sound.id;
            lengths[i] = static_cast<std::int64_t>(sound.waveform.size());
        }
    }

    std::int64_t total_sound = 0;
    for (auto len : lengths) total_sound += len;
    const std::int64_t silence = kSceneSamples - total_sound;
    if (silence < 0) throw std::logic_error("scene sounds exceed the scene duration");

    // Leading silence plus nine inter-sound gaps, drawn uniform and rescaled
    // so the last sound ends exactly at the scene end. Rounded cumulatively so
    // the integer gaps sum to `silence`.
    std::array<double, kSoundsPerScene> weights{};
    double weight_sum = 0.0;
    for (auto& w : weights) {
        w = 1.0 - rng.uniform();
        weight_sum += w;
    }
    std::int64_t cursor = 0;
    std::int64_t placed_silence = 0;
    double cumulative = 0.0;
    for (std::size_t i = 0; i < scene.sounds.size(); ++i) {
        cumulative += weights[i];
        const auto target = std::llround(static_cast<double>(silence) * cumulative / weight_sum);
        cursor += target - placed_silence;
        placed_silence = target;
        scene.sounds[i].onset_s = static_cast<double>(cursor) / kSampleRate;
        scene.sounds[i].duration_s = static_cast<double>(lengths[i]) / kSampleRate;
        cursor += lengths[i];
    }
    if (cursor != kSceneSamples) throw std::logic_error("scene layout does not end at the scene duration");

    scene.reverb_time_ms = rng.uniform(kMinReverbMs, kMaxReverbMs);
    derive_positions(scene.sounds, scene.duration_s);
    return scene;
}

void derive_positions(std::span<SceneSound> sounds, double scene_duration) {
    for (std::size_t i = 1; i < sounds.size(); ++i) {
        if (!(sounds[i].onset_s > sounds[i - 1].onset_s)) {
            throw InvalidArgument("sound onsets must be strictly increasing");
        }
    }
    std::array<int, kNumInstruments> seen{};
    for (std::size_t i = 0; i < sounds.size(); ++i) {
        auto& s = sounds[i];
        s.absolute_position = static_cast<int>(i) + 1;
        s.relative_position = ++seen[static_cast<std::size_t>(index_of(s.attributes.instrument))];
        if (s.onset_s < scene_duration / 3.0) {
            s.global_position = GlobalPosition::beginning;
        } else if (s.onset_s < 2.0 * scene_duration / 3.0) {
            s.global_position = GlobalPosition::middle;
        } else {
            s.global_position = GlobalPosition::end;
        }
    }
}

nlohmann::json to_json(const Scene& scene) {
    nlohmann::json sounds = nlohmann::json::array();
    for (const auto& s : scene.sounds) {
        nlohmann::json js = {
            {"instrument", to_string(s.attributes.instrument)},
            {"note", to_string(s.attributes.note)},
            {"brightness", to_string(s.attributes.brightness)},
            {"loudness", to_string(s.attributes.loudness)},
            {"onset_s", s.onset_s},
            {"duration_s", s.duration_s},
            {"absolute_position", s.absolute_position},
            {"relative_position", s.relative_position},
            {"global_position", to_string(s.global_position)},
        };
        if (!s.sound_id.empty()) js["sound_id"] = s.sound_id;
        sounds.push_back(std::move(js));
    }
    return {
        {"scene_id", scene.scene_id},
        {"duration_s", scene.duration_s},
        {"reverb_time_ms", scene.reverb_time_ms},
        {"seed", scene.seed},
        {"sounds", std::move(sounds)},
    };
}

namespace {

template <class T>
T parse_label(const nlohmann::json& j, const char* key, std::optional<T> (*parse)(std::string_view)) {
    const auto label = j.at(key).get<std::string>();
    const auto v = parse(label);
    if (!v) throw ValidationError(std::string("unknown ") + key + " label '" + label + "'");
    return *v;
}

}  // namespace

Scene scene_from_json(const nlohmann::json& j) {
    try {
        Scene scene;
        scene.scene_id = j.at("scene_id").get<std::int64_t>();
        scene.duration_s = j.at("duration_s").get<double>();
        scene.reverb_time_ms = j.at("reverb_time_ms").get<double>();
        scene.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& js : j.at("sounds")) {
            SceneSound s;
            s.attributes.instrument = parse_label(js, "instrument", parse_instrument);
            s.attributes.note = parse_label(js, "note", parse_note);
            s.attributes.brightness = parse_label(js, "brightness", parse_brightness);
            s.attributes.loudness = parse_label(js, "loudness", parse_loudness);
            s.onset_s = js.at("onset_s").get<double>();
            s.duration_s = js.at("duration_s").get<double>();
            s.absolute_position = js.at("absolute_position").get<int>();
            s.relative_position = js.at("relative_position").get<int>();
            s.global_position = parse_label(js, "global_position", parse_global_position);
            s.sound_id = js.value("sound_id", std::string{});
            scene.sounds.push_back(std::move(s));
        }
        return scene;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed scene JSON: ") + e.what());
    }
}

}  // namespace clear
