#include "clear/attributes.hpp"

#include <cctype>

#include "clear/errors.hpp"

namespace clear {
namespace {

constexpr std::array<std::string_view, kNumInstruments> kInstrumentNames = {
    "cello", "clarinet", "flute", "trumpet", "violin"};
constexpr std::array<std::string_view, kNumNotes> kNoteNames = {
    "A", "A#", "B", "C", "C#", "D", "D#", "E", "F", "F#", "G", "G#"};
constexpr std::array<std::string_view, kNumBrightness> kBrightnessNames = {"bright", "dark"};
constexpr std::array<std::string_view, kNumLoudness> kLoudnessNames = {"quiet", "loud"};
constexpr std::array<std::string_view, kNumGlobalPositions> kGlobalNames = {
    "beginning", "middle", "end"};
constexpr std::array<std::string_view, kMaxOrdinal> kOrdinalNames = {
    "first", "second", "third", "fourth", "fifth",
    "sixth", "seventh", "eighth", "ninth", "tenth"};

template <class E, std::size_t N>
std::optional<E> lookup(const std::array<std::string_view, N>& names, std::string_view s) {
    for (std::size_t i = 0; i < N; ++i) {
        if (names[i] == s) return static_cast<E>(i);
    }
    return std::nullopt;
}

}  // namespace

std::string_view to_string(Instrument v) { return kInstrumentNames[index_of(v)]; }
std::string_view to_string(Note v) { return kNoteNames[index_of(v)]; }
std::string_view to_string(Brightness v) { return kBrightnessNames[index_of(v)]; }
std::string_view to_string(Loudness v) { return kLoudnessNames[index_of(v)]; }
std::string_view to_string(GlobalPosition v) { return kGlobalNames[index_of(v)]; }

std::string_view to_string(Ordinal v) {
    if (v.value < 1 || v.value > kMaxOrdinal) {
        throw InvalidArgument("ordinal out of range: " + std::to_string(v.value));
    }
    return kOrdinalNames[static_cast<std::size_t>(v.value - 1)];
}

std::optional<Instrument> parse_instrument(std::string_view s) {
    return lookup<Instrument>(kInstrumentNames, s);
}

std::optional<Note> parse_note(std::string_view s) {
    if (s.empty() || s.size() > 2) return std::nullopt;
    std::string up(s);
    up[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(up[0])));
    return lookup<Note>(kNoteNames, up);
}

std::optional<Brightness> parse_brightness(std::string_view s) {
    return lookup<Brightness>(kBrightnessNames, s);
}

std::optional<Loudness> parse_loudness(std::string_view s) {
    return lookup<Loudness>(kLoudnessNames, s);
}

std::optional<GlobalPosition> parse_global_position(std::string_view s) {
    return lookup<GlobalPosition>(kGlobalNames, s);
}

std::optional<Ordinal> parse_ordinal(std::string_view s) {
    for (std::size_t i = 0; i < kOrdinalNames.size(); ++i) {
        if (kOrdinalNames[i] == s) return Ordinal{static_cast<int>(i) + 1};
    }
    return std::nullopt;
}

std::string attr_to_string(const AttrValue& v) {
    return std::visit([](auto x) { return std::string(to_string(x)); }, v);
}

}  // namespace clear
