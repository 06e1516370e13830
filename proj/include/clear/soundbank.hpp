#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "clear/attributes.hpp"
#include "clear/dsp.hpp"

namespace clear {

/// The four per-sound attributes (positional attributes live on SceneSound).
struct AttributeTuple {
    Instrument instrument = Instrument::cello;
    Note note = Note::A;
    Brightness brightness = Brightness::bright;
    Loudness loudness = Loudness::quiet;

    friend bool operator==(const AttributeTuple&, const AttributeTuple&) = default;
    friend auto operator<=>(const AttributeTuple&, const AttributeTuple&) = default;
};

struct ElementarySound {
    std::string id;
    AttributeTuple attributes;
    double duration_s = 0.0;
    Waveform waveform;  // mono, 48 kHz, |x| <= 1
};

struct AnnotationConfig {
    double brightness_threshold_hz = 1200.0;
    double loudness_threshold_dbfs = -15.0;
};

inline constexpr int kDefaultOctave = 4;
inline constexpr double kMinSoundDuration = 0.5;
inline constexpr double kMaxSoundDuration = 5.0;
inline constexpr double kLoudPeakDbfs = -6.0;
inline constexpr double kQuietPeakDbfs = -18.0;

/// Equal temperament, A4 = 440 Hz. Octave numbering changes at C, so
/// (C, 4) is middle C. Throws InvalidArgument for octave outside [0, 8].
double note_frequency(Note note, int octave = kDefaultOctave);

/// Additive-synthesis stand-in for a recorded instrument note. Pure function
/// of its arguments. Throws InvalidArgument for duration outside [0.5, 5] s.
ElementarySound synthesize_sound(Instrument instrument, Note note, Brightness brightness,
                                 Loudness loudness, double duration_s, std::uint64_t seed);

/// bright iff spectral centroid > threshold; equality is dark.
/// Throws UndefinedAttribute for an all-zero waveform, InvalidArgument if empty.
Brightness annotate_brightness(std::span<const float> waveform, const AnnotationConfig& cfg = {});

/// loud iff RMS (dBFS) > threshold; equality is quiet.
Loudness annotate_loudness(std::span<const float> waveform, const AnnotationConfig& cfg = {});

/// Collection of elementary sounds indexable by attribute tuple.
class SoundBank {
public:
    void add(ElementarySound sound);

    std::size_t size() const noexcept { return sounds_.size(); }
    bool empty() const noexcept { return sounds_.empty(); }
    const std::vector<ElementarySound>& sounds() const noexcept { return sounds_; }

    /// Indices of sounds carrying exactly this tuple, in insertion order.
    std::span<const std::size_t> find(const AttributeTuple& key) const;
    const ElementarySound* by_id(const std::string& id) const;
    /// Distinct tuples present, sorted.
    std::vector<AttributeTuple> tuples() const;

private:
    std::vector<ElementarySound> sounds_;
    std::map<AttributeTuple, std::vector<std::size_t>> index_;
    std::map<std::string, std::size_t> by_id_;
};

struct BankEntryError {
    std::size_t entry = 0;
    std::string path;
    std::string message;
};

struct LoadedBank {
    SoundBank bank;
    std::vector<BankEntryError> errors;
};

/// Manifest: JSON array of {path, instrument, note}; paths relative to
/// `directory`. Bad entries are skipped and reported in `errors`; throws
/// ValidationError if no entry survives, IoError if the manifest is unreadable.
LoadedBank load_bank(const std::filesystem::path& directory,
                     const std::filesystem::path& manifest,
                     const AnnotationConfig& cfg = {});

}  // namespace clear
