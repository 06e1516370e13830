#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace clear {

enum class Instrument : std::uint8_t { cello, clarinet, flute, trumpet, violin };
/// Pitch classes in answer-vocabulary order (A first).
enum class Note : std::uint8_t { A, As, B, C, Cs, D, Ds, E, F, Fs, G, Gs };
enum class Brightness : std::uint8_t { bright, dark };
enum class Loudness : std::uint8_t { quiet, loud };
enum class GlobalPosition : std::uint8_t { beginning, middle, end };

inline constexpr int kNumInstruments = 5;
inline constexpr int kNumNotes = 12;
inline constexpr int kNumBrightness = 2;
inline constexpr int kNumLoudness = 2;
inline constexpr int kNumGlobalPositions = 3;
inline constexpr int kSoundsPerScene = 10;

/// 1-based rank, rendered as "first".."tenth".
struct Ordinal {
    int value = 1;
    friend constexpr bool operator==(Ordinal, Ordinal) = default;
    friend constexpr auto operator<=>(Ordinal, Ordinal) = default;
};

inline constexpr int kMaxOrdinal = 10;

std::string_view to_string(Instrument v);
std::string_view to_string(Note v);
std::string_view to_string(Brightness v);
std::string_view to_string(Loudness v);
std::string_view to_string(GlobalPosition v);
/// "first".."tenth"; throws InvalidArgument outside 1..10.
std::string_view to_string(Ordinal v);

/// Parsers return nullopt for labels outside the taxonomy. Notes accept
/// either case for the letter ("a#" == "A#").
std::optional<Instrument> parse_instrument(std::string_view s);
std::optional<Note> parse_note(std::string_view s);
std::optional<Brightness> parse_brightness(std::string_view s);
std::optional<Loudness> parse_loudness(std::string_view s);
std::optional<GlobalPosition> parse_global_position(std::string_view s);
std::optional<Ordinal> parse_ordinal(std::string_view s);

template <class E>
constexpr int index_of(E e) noexcept {
    return static_cast<int>(e);
}

/// Literal carried by a filter node or bound to a template slot.
using AttrValue = std::variant<Instrument, Note, Brightness, Loudness, GlobalPosition, Ordinal>;

std::string attr_to_string(const AttrValue& v);

}  // namespace clear
