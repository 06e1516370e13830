#include "clear/eval.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "clear/errors.hpp"
#include "clear/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace clear {
namespace {

template <class Fn>
void for_each_json_line(const fs::path& path, Fn&& fn) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot read " + path.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            fn(json::parse(line));
        } catch (const json::exception& e) {
            throw ValidationError(path.filename().string() + ":" + std::to_string(lineno) + ": " + e.what());
        } catch (const std::exception& e) {
            throw ValidationError(path.filename().string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

std::string most_frequent(const std::map<std::string, std::int64_t>& counts) {
    // std::map iterates lexicographically, so strict > keeps the smallest tie.
    std::string best;
    std::int64_t best_n = -1;
    for (const auto& [answer, n] : counts) {
        if (n > best_n) {
            best = answer;
            best_n = n;
        }
    }
    return best;
}

}  // namespace

EvalReport score(std::span<const Prediction> predictions, std::span<const QuestionRecord> gold) {
    std::unordered_map<std::int64_t, const std::string*> by_id;
    by_id.reserve(predictions.size());
    for (const auto& p : predictions) {
        if (!by_id.emplace(p.question_id, &p.answer).second) {
            throw ValidationError("duplicate prediction for question_id " + std::to_string(p.question_id));
        }
    }
    EvalReport r;
    std::unordered_set<std::int64_t> gold_ids;
    gold_ids.reserve(gold.size());
    for (const auto& g : gold) {
        gold_ids.insert(g.question_id);
        std::string truth(g.answer.str());
        TypeTally& tally = r.per_type[g.question_type];
        ++tally.total;
        ++r.n_scored;
        auto it = by_id.find(g.question_id);
        if (it == by_id.end()) {
            ++r.n_missing;
            ++r.answer_confusion[{truth, std::string(kMissingAnswer)}];
            continue;
        }
        std::string pred = canonicalize_answer(*it->second);
        if (!Answer::parse(pred)) ++r.n_out_of_vocabulary;
        if (pred == truth) {
            ++tally.correct;
            ++r.n_correct;
        }
        ++r.answer_confusion[{truth, pred}];
    }
    for (const auto& p : predictions) {
        if (!gold_ids.contains(p.question_id)) ++r.n_unmatched;
    }
    r.overall_accuracy = r.n_scored ? static_cast<double>(r.n_correct) / static_cast<double>(r.n_scored) : 0.0;
    return r;
}

json to_json(const EvalReport& r) {
    json per_type = json::object();
    for (const auto& [t, tally] : r.per_type) {
        per_type[std::string(to_string(t))] = {
            {"accuracy", tally.accuracy()}, {"correct", tally.correct}, {"total", tally.total}};
    }
    json confusion = json::array();
    for (const auto& [key, n] : r.answer_confusion) {
        confusion.push_back({{"gold", key.first}, {"predicted", key.second}, {"count", n}});
    }
    return json{{"overall_accuracy", r.overall_accuracy},
                {"per_type_accuracy", per_type},
                {"n_scored", r.n_scored},
                {"n_correct", r.n_correct},
                {"n_missing", r.n_missing},
                {"n_out_of_vocabulary", r.n_out_of_vocabulary},
                {"n_unmatched", r.n_unmatched},
                {"answer_confusion", confusion}};
}

std::string format_report(const EvalReport& r) {
    std::ostringstream os;
    os << std::left << std::setw(20) << "type" << std::right << std::setw(10) << "correct" << std::setw(10)
       << "total" << std::setw(10) << "accuracy" << '\n';
    os << std::fixed << std::setprecision(4);
    for (const auto& [t, tally] : r.per_type) {
        os << std::left << std::setw(20) << to_string(t) << std::right << std::setw(10) << tally.correct
           << std::setw(10) << tally.total << std::setw(10) << tally.accuracy() << '\n';
    }
    os << std::left << std::setw(20) << "overall" << std::right << std::setw(10) << r.n_correct << std::setw(10)
       << r.n_scored << std::setw(10) << r.overall_accuracy << '\n';
    os << "missing: " << r.n_missing << "  out-of-vocabulary: " << r.n_out_of_vocabulary
       << "  unmatched: " << r.n_unmatched << '\n';
    return os.str();
}

std::vector<QuestionRecord> read_questions(const fs::path& path) {
    std::vector<QuestionRecord> out;
    for_each_json_line(path, [&](const json& j) { out.push_back(record_from_json(j)); });
    return out;
}

std::vector<Prediction> read_predictions(const fs::path& path) {
    std::vector<Prediction> out;
    for_each_json_line(path, [&](const json& j) {
        out.push_back({j.at("question_id").get<std::int64_t>(), j.at("answer").get<std::string>()});
    });
    return out;
}

void write_predictions(const fs::path& path, std::span<const Prediction> predictions) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write " + path.string());
    for (const auto& p : predictions) f << json{{"question_id", p.question_id}, {"answer", p.answer}}.dump() << '\n';
    if (!f) throw IoError("write failed: " + path.string());
}

RandomBaseline baseline_random(std::span<const QuestionRecord> gold, std::uint64_t seed, int n_trials,
                               std::span<const std::string> vocabulary) {
    if (n_trials < 1) throw InvalidArgument("n_trials must be at least 1");
    std::vector<std::string> vocab(vocabulary.begin(), vocabulary.end());
    if (vocab.empty()) {
        for (auto v : clear::vocabulary()) vocab.emplace_back(v);
    }
    RandomBaseline out;
    std::vector<Prediction> preds(gold.size());
    for (int t = 0; t < n_trials; ++t) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
        for (std::size_t i = 0; i < gold.size(); ++i) {
            preds[i].question_id = gold[i].question_id;
            preds[i].answer = vocab[rng.below(vocab.size())];
        }
        out.trial_accuracy.push_back(score(preds, gold).overall_accuracy);
    }
    double sum = 0.0;
    for (double a : out.trial_accuracy) sum += a;
    out.mean_accuracy = sum / n_trials;
    double ss = 0.0;
    for (double a : out.trial_accuracy) ss += (a - out.mean_accuracy) * (a - out.mean_accuracy);
    out.stddev = n_trials > 1 ? std::sqrt(ss / (n_trials - 1)) : 0.0;
    return out;
}

MajorityBaseline baseline_majority(std::span<const QuestionRecord> train, std::span<const QuestionRecord> gold) {
    if (train.empty()) throw InvalidArgument("training set is empty");
    std::map<std::string, std::int64_t> counts;
    std::map<QuestionType, std::map<std::string, std::int64_t>> type_counts;
    for (const auto& q : train) {
        std::string a(q.answer.str());
        ++counts[a];
        ++type_counts[q.question_type][a];
    }
    MajorityBaseline out;
    out.answer = most_frequent(counts);
    for (const auto& [t, c] : type_counts) out.per_type_answer[t] = most_frequent(c);

    std::vector<Prediction> global(gold.size());
    std::vector<Prediction> per_type(gold.size());
    for (std::size_t i = 0; i < gold.size(); ++i) {
        global[i] = {gold[i].question_id, out.answer};
        auto it = out.per_type_answer.find(gold[i].question_type);
        per_type[i] = {gold[i].question_id, it != out.per_type_answer.end() ? it->second : out.answer};
    }
    out.report = score(global, gold);
    out.per_type_report = score(per_type, gold);
    return out;
}

}  // namespace clear
