#include "clear/vocabulary.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

#include "clear/errors.hpp"

namespace clear {
namespace {

constexpr std::array<std::string_view, kVocabularySize> kVocabulary = {
    "yes", "no",
    "A", "A#", "B", "C", "C#", "D", "D#", "E", "F", "F#", "G", "G#",
    "cello", "clarinet", "flute", "trumpet", "violin",
    "bright", "dark",
    "quiet", "loud",
    "0", "1", "2", "3", "4", "5", "6", "7", "8", "9", "10",
    "first", "second", "third", "fourth", "fifth", "sixth", "seventh", "eighth", "ninth", "tenth",
    "beginning", "middle", "end"};

constexpr int kYesNoBase = 0;
constexpr int kNoteBase = 2;
constexpr int kInstrumentBase = 14;
constexpr int kBrightnessBase = 19;
constexpr int kLoudnessBase = 21;
constexpr int kCountBase = 23;
constexpr int kOrdinalBase = 34;
constexpr int kGlobalBase = 44;

template <int Base, int N>
constexpr std::array<int, N> make_row() {
    std::array<int, N> row{};
    for (int i = 0; i < N; ++i) row[static_cast<std::size_t>(i)] = Base + i;
    return row;
}

constexpr auto kYesNoRow = make_row<kYesNoBase, 2>();
constexpr auto kNoteRow = make_row<kNoteBase, kNumNotes>();
constexpr auto kInstrumentRow = make_row<kInstrumentBase, kNumInstruments>();
constexpr auto kBrightnessRow = make_row<kBrightnessBase, kNumBrightness>();
constexpr auto kLoudnessRow = make_row<kLoudnessBase, kNumLoudness>();
constexpr auto kCountRow = make_row<kCountBase, 11>();
constexpr auto kOrdinalRow = make_row<kOrdinalBase, kMaxOrdinal>();
constexpr auto kGlobalRow = make_row<kGlobalBase, kNumGlobalPositions>();

constexpr std::array<std::string_view, kNumQuestionTypes> kTypeNames = {
    "yes_no", "note", "instrument", "brightness", "loudness",
    "counting", "absolute_position", "relative_position", "global_position"};

constexpr std::array<std::string_view, 11> kCountWords = {
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten"};
constexpr std::array<std::string_view, 10> kNumericOrdinals = {
    "1st", "2nd", "3rd", "4th", "5th", "6th", "7th", "8th", "9th", "10th"};

}  // namespace

std::string_view to_string(QuestionType t) { return kTypeNames[static_cast<std::size_t>(t)]; }

std::optional<QuestionType> parse_question_type(std::string_view s) {
    for (std::size_t i = 0; i < kTypeNames.size(); ++i) {
        if (kTypeNames[i] == s) return static_cast<QuestionType>(i);
    }
    return std::nullopt;
}

std::optional<Answer> Answer::from_index(int index) {
    if (index < 0 || index >= kVocabularySize) return std::nullopt;
    return Answer(index);
}

std::optional<Answer> Answer::parse(std::string_view s) {
    const auto it = std::find(kVocabulary.begin(), kVocabulary.end(), s);
    if (it == kVocabulary.end()) return std::nullopt;
    return Answer(static_cast<int>(it - kVocabulary.begin()));
}

Answer Answer::yes_no(bool b) { return Answer(b ? kYesNoBase : kYesNoBase + 1); }

Answer Answer::count(int n) {
    if (n < 0 || n > 10) throw InvalidArgument("count answer out of range: " + std::to_string(n));
    return Answer(kCountBase + n);
}

Answer Answer::of(Instrument v) { return Answer(kInstrumentBase + index_of(v)); }
Answer Answer::of(Note v) { return Answer(kNoteBase + index_of(v)); }
Answer Answer::of(Brightness v) { return Answer(kBrightnessBase + index_of(v)); }
Answer Answer::of(Loudness v) { return Answer(kLoudnessBase + index_of(v)); }
Answer Answer::of(GlobalPosition v) { return Answer(kGlobalBase + index_of(v)); }

Answer Answer::of(Ordinal v) {
    if (v.value < 1 || v.value > kMaxOrdinal) {
        throw InvalidArgument("ordinal answer out of range: " + std::to_string(v.value));
    }
    return Answer(kOrdinalBase + v.value - 1);
}

std::string_view Answer::str() const { return kVocabulary[static_cast<std::size_t>(index_)]; }

std::span<const std::string_view> vocabulary() { return kVocabulary; }

std::span<const int> answer_row(QuestionType t) {
    switch (t) {
        case QuestionType::yes_no: return kYesNoRow;
        case QuestionType::note: return kNoteRow;
        case QuestionType::instrument: return kInstrumentRow;
        case QuestionType::brightness: return kBrightnessRow;
        case QuestionType::loudness: return kLoudnessRow;
        case QuestionType::counting: return kCountRow;
        case QuestionType::absolute_position:
        case QuestionType::relative_position: return kOrdinalRow;
        case QuestionType::global_position: return kGlobalRow;
    }
    return {};
}

bool answer_in_row(QuestionType t, Answer a) {
    const auto row = answer_row(t);
    return std::find(row.begin(), row.end(), a.index()) != row.end();
}

std::string canonicalize_answer(std::string_view raw) {
    while (!raw.empty() && std::isspace(static_cast<unsigned char>(raw.front()))) raw.remove_prefix(1);
    while (!raw.empty() && std::isspace(static_cast<unsigned char>(raw.back()))) raw.remove_suffix(1);

    std::string lower(raw);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });

    if (const auto note = parse_note(lower)) return std::string(to_string(*note));
    for (std::size_t i = 0; i < kCountWords.size(); ++i) {
        if (lower == kCountWords[i]) return std::to_string(i);
    }
    for (std::size_t i = 0; i < kNumericOrdinals.size(); ++i) {
        if (lower == kNumericOrdinals[i]) return std::string(to_string(Ordinal{static_cast<int>(i) + 1}));
    }
    return lower;
}

}  // namespace clear
