#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "clear/attributes.hpp"

namespace clear {

enum class QuestionType : std::uint8_t {
    yes_no,
    note,
    instrument,
    brightness,
    loudness,
    counting,
    absolute_position,
    relative_position,
    global_position,
};

inline constexpr int kNumQuestionTypes = 9;
inline constexpr int kVocabularySize = 47;

std::string_view to_string(QuestionType t);
std::optional<QuestionType> parse_question_type(std::string_view s);

/// One of the 47 answer classes. Absolute and relative position questions
/// share the ordinal classes.
class Answer {
public:
    static std::optional<Answer> from_index(int index);
    /// Exact vocabulary spelling ("yes", "A#", "cello", "3", "third", "end").
    static std::optional<Answer> parse(std::string_view s);

    static Answer yes_no(bool b);
    static Answer count(int n);
    static Answer of(Instrument v);
    static Answer of(Note v);
    static Answer of(Brightness v);
    static Answer of(Loudness v);
    static Answer of(GlobalPosition v);
    static Answer of(Ordinal v);

    int index() const noexcept { return index_; }
    std::string_view str() const;

    friend bool operator==(Answer, Answer) = default;
    friend auto operator<=>(Answer, Answer) = default;

private:
    explicit constexpr Answer(int index) noexcept : index_(index) {}
    int index_;
};

/// All 47 spellings in canonical order:
/// yes/no, 12 notes, 5 instruments, bright/dark, quiet/loud, 0..10,
/// first..tenth, beginning/middle/end.
std::span<const std::string_view> vocabulary();

/// Vocabulary indices that are legal answers for a question type.
std::span<const int> answer_row(QuestionType t);
bool answer_in_row(QuestionType t, Answer a);

/// Normalize a free-form answer string: trims whitespace, lower-cases words,
/// upper-cases note letters ("a#" -> "A#"), maps count words to digits
/// ("three" -> "3") and numeric ordinals to words ("3rd" -> "third").
/// The result is not guaranteed to be in the vocabulary.
std::string canonicalize_answer(std::string_view raw);

}  // namespace clear
