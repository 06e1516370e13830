#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "clear/attributes.hpp"
#include "clear/errors.hpp"
#include "clear/rng.hpp"
#include "clear/vocabulary.hpp"

using namespace clear;

TEST_CASE("splitmix64 matches reference outputs") {
    // Reference sequence for seed 1234567 from the published SplitMix64 code.
    Rng rng(1234567);
    CHECK(rng.next() == 6457827717110365317ULL);
    CHECK(rng.next() == 3203168211198807973ULL);
    CHECK(rng.next() == 9817491932198370423ULL);
}

TEST_CASE("derived seeds are deterministic and distinct") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        CHECK(derive_seed(42, i) == derive_seed(42, i));
        seen.insert(derive_seed(42, i));
    }
    CHECK(seen.size() == 1000);
    CHECK(derive_seed(42, 0) != derive_seed(43, 0));
}

TEST_CASE("uniform draws cover their range evenly") {
    Rng rng(7);
    std::array<int, 10> bins{};
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        ++bins[static_cast<std::size_t>(u * 10)];
    }
    for (int b : bins) CHECK(std::abs(b - n / 10) < 500);  // ~5 sigma

    std::array<int, 7> ints{};
    for (int i = 0; i < 70000; ++i) ++ints[rng.below(7)];
    for (int c : ints) CHECK(std::abs(c - 10000) < 500);
}

TEST_CASE("shuffle is a permutation") {
    std::vector<int> v(100);
    for (int i = 0; i < 100; ++i) v[i] = i;
    Rng rng(3);
    rng.shuffle(v);
    auto sorted = v;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < 100; ++i) CHECK(sorted[i] == i);
    CHECK(v != sorted);
}

TEST_CASE("attribute labels round trip") {
    for (int i = 0; i < kNumInstruments; ++i) {
        auto v = static_cast<Instrument>(i);
        CHECK(parse_instrument(to_string(v)) == v);
    }
    for (int i = 0; i < kNumNotes; ++i) {
        auto v = static_cast<Note>(i);
        CHECK(parse_note(to_string(v)) == v);
    }
    for (int i = 1; i <= kMaxOrdinal; ++i) CHECK(parse_ordinal(to_string(Ordinal{i}))->value == i);
    CHECK(parse_note("a#") == Note::As);
    CHECK(parse_note("H") == std::nullopt);
    CHECK(parse_instrument("piano") == std::nullopt);
    CHECK(to_string(Ordinal{3}) == "third");
    CHECK_THROWS_AS(to_string(Ordinal{11}), InvalidArgument);
}

TEST_CASE("vocabulary has 47 answers in eight rows") {
    // 2 + 12 + 5 + 2 + 2 + 11 + 10 + 3 = 47.
    CHECK(vocabulary().size() == 47);
    CHECK(answer_row(QuestionType::yes_no).size() == 2);
    CHECK(answer_row(QuestionType::note).size() == 12);
    CHECK(answer_row(QuestionType::instrument).size() == 5);
    CHECK(answer_row(QuestionType::brightness).size() == 2);
    CHECK(answer_row(QuestionType::loudness).size() == 2);
    CHECK(answer_row(QuestionType::counting).size() == 11);
    CHECK(answer_row(QuestionType::absolute_position).size() == 10);
    CHECK(answer_row(QuestionType::global_position).size() == 3);
    // Absolute and relative position share their output nodes.
    CHECK(std::ranges::equal(answer_row(QuestionType::absolute_position),
                             answer_row(QuestionType::relative_position)));

    std::set<std::string> spellings(vocabulary().begin(), vocabulary().end());
    CHECK(spellings.size() == 47);
    for (auto word : {"yes", "no", "A#", "G#", "cello", "violin", "bright", "dark", "quiet", "loud", "0", "10",
                      "first", "tenth", "beginning", "middle", "end"}) {
        CHECK(spellings.contains(word));
    }
}

TEST_CASE("answer rows partition the vocabulary") {
    std::vector<int> all;
    for (int t = 0; t < kNumQuestionTypes; ++t) {
        auto qt = static_cast<QuestionType>(t);
        if (qt == QuestionType::relative_position) continue;
        for (int i : answer_row(qt)) all.push_back(i);
    }
    std::sort(all.begin(), all.end());
    REQUIRE(all.size() == 47);
    for (int i = 0; i < 47; ++i) CHECK(all[i] == i);
}

TEST_CASE("answers map to and from indices") {
    for (int i = 0; i < kVocabularySize; ++i) {
        auto a = Answer::from_index(i);
        REQUIRE(a);
        CHECK(a->index() == i);
        CHECK(Answer::parse(a->str()) == a);
    }
    CHECK_FALSE(Answer::from_index(47));
    CHECK_FALSE(Answer::parse("eleven"));
    CHECK(Answer::count(3).str() == "3");
    CHECK(Answer::of(Note::Cs).str() == "C#");
    CHECK(Answer::of(Ordinal{2}).str() == "second");
    CHECK(answer_in_row(QuestionType::counting, Answer::count(0)));
    CHECK_FALSE(answer_in_row(QuestionType::counting, Answer::yes_no(true)));
}

TEST_CASE("canonicalization normalizes free-form answers") {
    CHECK(canonicalize_answer("  Yes ") == "yes");
    CHECK(canonicalize_answer("a#") == "A#");
    CHECK(canonicalize_answer("CELLO") == "cello");
    CHECK(canonicalize_answer("three") == "3");
    CHECK(canonicalize_answer("3rd") == "third");
    CHECK(canonicalize_answer("Third") == "third");
    CHECK(canonicalize_answer("piano") == "piano");
}

TEST_CASE("question types round trip") {
    for (int t = 0; t < kNumQuestionTypes; ++t) {
        auto qt = static_cast<QuestionType>(t);
        CHECK(parse_question_type(to_string(qt)) == qt);
    }
    CHECK_FALSE(parse_question_type("color"));
}
