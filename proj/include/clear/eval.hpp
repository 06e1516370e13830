#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "clear/templates.hpp"

namespace clear {

struct Prediction {
    std::int64_t question_id = 0;
    std::string answer;
};

inline constexpr std::string_view kMissingAnswer = "<missing>";

struct TypeTally {
    std::int64_t correct = 0;
    std::int64_t total = 0;
    double accuracy() const { return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0; }
};

struct EvalReport {
    double overall_accuracy = 0.0;
    std::map<QuestionType, TypeTally> per_type;
    std::int64_t n_scored = 0;
    std::int64_t n_correct = 0;
    std::int64_t n_missing = 0;
    std::int64_t n_out_of_vocabulary = 0;
    /// Predictions whose question_id is absent from the gold set; ignored.
    std::int64_t n_unmatched = 0;
    /// (gold, canonicalized prediction) -> count; missing predictions appear
    /// as kMissingAnswer. Counts sum to n_scored.
    std::map<std::pair<std::string, std::string>, std::int64_t> answer_confusion;
};

/// Every gold question is scored; missing predictions count as wrong.
/// Throws ValidationError on duplicate prediction ids.
EvalReport score(std::span<const Prediction> predictions, std::span<const QuestionRecord> gold);

nlohmann::json to_json(const EvalReport& report);
/// Per-type table followed by the overall line.
std::string format_report(const EvalReport& report);

/// JSON lines of question records. Throws IoError / ValidationError.
std::vector<QuestionRecord> read_questions(const std::filesystem::path& path);
/// JSON lines of {question_id, answer}. Throws IoError / ValidationError.
std::vector<Prediction> read_predictions(const std::filesystem::path& path);
void write_predictions(const std::filesystem::path& path, std::span<const Prediction> predictions);

struct RandomBaseline {
    double mean_accuracy = 0.0;
    double stddev = 0.0;
    std::vector<double> trial_accuracy;
};

/// Uniform draws over `vocabulary` (the 47 answers when empty), scored with
/// score(). Throws InvalidArgument when n_trials < 1.
RandomBaseline baseline_random(std::span<const QuestionRecord> gold, std::uint64_t seed, int n_trials,
                               std::span<const std::string> vocabulary = {});

struct MajorityBaseline {
    std::string answer;
    EvalReport report;
    std::map<QuestionType, std::string> per_type_answer;
    /// Secondary number: most frequent training answer within each type.
    EvalReport per_type_report;
};

/// Most frequent training answer, ties broken lexicographically. Throws
/// InvalidArgument when `train` is empty.
MajorityBaseline baseline_majority(std::span<const QuestionRecord> train, std::span<const QuestionRecord> gold);

}  // namespace clear
