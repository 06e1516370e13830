#include "clear/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "clear/digest.hpp"
#include "clear/errors.hpp"
#include "clear/render.hpp"
#include "clear/rng.hpp"
#include "clear/wav.hpp"

#ifndef CLEAR_VERSION
#define CLEAR_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace clear {
namespace {

constexpr std::uint64_t kSplitSalt = 0x73706c6974;     // "split"
constexpr std::uint64_t kQuestionSalt = 0x7175657374;  // "quest"

// Runs fn(i) for i in [0, n) on up to `workers` threads. The first exception
// thrown by any task is rethrown after all threads join.
template <class Fn>
void parallel_for(std::int64_t n, int workers, Fn&& fn) {
    std::atomic<std::int64_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        for (;;) {
            if (failed.load()) return;
            std::int64_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true);
            }
        }
    };
    int threads = static_cast<int>(std::clamp<std::int64_t>(workers, 1, std::max<std::int64_t>(n, 1)));
    if (threads == 1) {
        body();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) pool.emplace_back(body);
    }
    if (error) std::rethrow_exception(error);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write " + path.string());
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f) throw IoError("write failed: " + path.string());
}

json read_json_file(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot read " + path.string());
    try {
        return json::parse(f);
    } catch (const json::exception& e) {
        throw ValidationError(path.filename().string() + ": " + e.what());
    }
}

std::string questions_file(std::size_t split) {
    return std::string("questions_") + kSplitNames[split] + ".jsonl";
}

}  // namespace

std::string scene_file_stem(std::int64_t scene_id) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "scene_%06lld", static_cast<long long>(scene_id));
    return buf;
}

namespace {

struct SceneOutput {
    Scene scene;
    std::vector<QuestionRecord> records;
    std::optional<std::string> warning;
};

// Synthesis, or a loaded bank plus its lookup source.
class SoundSetup {
public:
    SoundSetup(const std::optional<fs::path>& bank_manifest, std::vector<std::string>& warnings) {
        if (!bank_manifest) return;
        fs::path dir = bank_manifest->parent_path();
        loaded_ = load_bank(dir.empty() ? fs::path(".") : dir, *bank_manifest);
        for (const auto& e : loaded_->errors) {
            warnings.push_back("bank entry " + std::to_string(e.entry) + " (" + e.path + "): " + e.message);
        }
        bank_source_.emplace(loaded_->bank);
        spdlog::info("loaded {} bank sounds ({} rejected)", loaded_->bank.size(), loaded_->errors.size());
    }
    SoundSetup(const SoundSetup&) = delete;
    SoundSetup& operator=(const SoundSetup&) = delete;

    const SoundBank* bank() const { return loaded_ ? &loaded_->bank : nullptr; }
    const SoundSource& source() const {
        return bank_source_ ? static_cast<const SoundSource&>(*bank_source_) : synth_;
    }

private:
    std::optional<LoadedBank> loaded_;
    SynthesisSource synth_;
    std::optional<BankSource> bank_source_;
};

void render_files(const fs::path& out, const Scene& scene, const SoundSource& source, bool audio, bool spec) {
    if (!audio && !spec) return;
    Waveform wave = render_scene(scene, source);
    std::string stem = scene_file_stem(scene.scene_id);
    if (audio) wav::write_pcm16(out / "audio" / (stem + ".wav"), wave);
    if (spec) write_png(out / "spectrograms" / (stem + ".png"), spectrogram(wave));
}

void refresh_digests(const fs::path& out, DatasetManifest& manifest, std::int64_t n_scenes, bool audio, bool spec,
                     int workers) {
    std::vector<std::string> files = {"scenes.json"};
    for (std::size_t s = 0; s < 3; ++s) files.push_back(questions_file(s));
    for (std::int64_t id = 0; id < n_scenes; ++id) {
        if (audio) files.push_back("audio/" + scene_file_stem(id) + ".wav");
        if (spec) files.push_back("spectrograms/" + scene_file_stem(id) + ".png");
    }
    std::vector<std::string> digests(files.size());
    parallel_for(static_cast<std::int64_t>(files.size()), workers, [&](std::int64_t i) {
        auto k = static_cast<std::size_t>(i);
        digests[k] = sha256_file(out / files[k]);
    });
    manifest.digests.clear();
    for (std::size_t i = 0; i < files.size(); ++i) manifest.digests[files[i]] = digests[i];
    std::string listing;
    for (const auto& [path, digest] : manifest.digests) listing += path + " " + digest + "\n";
    manifest.content_digest = sha256_hex(listing);
}

}  // namespace

void validate(const DatasetConfig& c) {
    if (c.n_scenes < 10) throw InvalidArgument("n_scenes must be at least 10");
    if (c.questions_per_scene < 1) throw InvalidArgument("questions_per_scene must be at least 1");
    if (c.workers < 1) throw InvalidArgument("workers must be at least 1");
    if (!(c.cap_fraction > 0.0 && c.cap_fraction <= 1.0)) throw InvalidArgument("cap_fraction must be in (0, 1]");
    double sum = 0.0;
    for (double f : c.split_fractions) {
        if (!(f >= 0.0 && f <= 1.0)) throw InvalidArgument("split fractions must be in [0, 1]");
        sum += f;
    }
    if (std::abs(sum - 1.0) > 1e-6) throw InvalidArgument("split fractions must sum to 1");
}

json to_json(const DatasetConfig& c) {
    json j{{"n_scenes", c.n_scenes},
           {"questions_per_scene", c.questions_per_scene},
           {"master_seed", c.master_seed},
           {"split_fractions", c.split_fractions},
           {"render_audio", c.render_audio},
           {"render_spectrograms", c.render_spectrograms},
           {"cap_fraction", c.cap_fraction},
           {"sound_source", c.bank_manifest ? "bank" : "synthesis"}};
    if (c.bank_manifest) j["bank_manifest"] = c.bank_manifest->generic_string();
    return j;
}

DatasetConfig config_from_json(const json& j, DatasetConfig c) {
    if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
    try {
        if (j.contains("n_scenes")) c.n_scenes = j.at("n_scenes").get<std::int64_t>();
        if (j.contains("questions_per_scene")) c.questions_per_scene = j.at("questions_per_scene").get<int>();
        if (j.contains("master_seed")) c.master_seed = j.at("master_seed").get<std::uint64_t>();
        if (j.contains("split_fractions")) c.split_fractions = j.at("split_fractions").get<std::array<double, 3>>();
        if (j.contains("render_audio")) c.render_audio = j.at("render_audio").get<bool>();
        if (j.contains("render_spectrograms")) c.render_spectrograms = j.at("render_spectrograms").get<bool>();
        if (j.contains("cap_fraction")) c.cap_fraction = j.at("cap_fraction").get<double>();
        if (j.contains("workers")) c.workers = j.at("workers").get<int>();
        if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
        if (j.contains("bank_manifest")) c.bank_manifest = fs::path(j.at("bank_manifest").get<std::string>());
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("bad config value: ") + e.what());
    }
    return c;
}

SplitAssignment split_scenes(std::int64_t n, const std::array<double, 3>& fractions, std::uint64_t master_seed) {
    std::vector<std::int64_t> ids(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = i;
    Rng rng(derive_seed(master_seed, kSplitSalt));
    rng.shuffle(ids);
    auto n_train = static_cast<std::size_t>(std::floor(fractions[0] * static_cast<double>(n) + 1e-9));
    auto n_val = static_cast<std::size_t>(std::floor(fractions[1] * static_cast<double>(n) + 1e-9));
    n_train = std::min(n_train, ids.size());
    n_val = std::min(n_val, ids.size() - n_train);
    SplitAssignment s;
    s.ids[0].assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.ids[1].assign(ids.begin() + static_cast<std::ptrdiff_t>(n_train),
                    ids.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
    s.ids[2].assign(ids.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), ids.end());
    for (auto& v : s.ids) std::sort(v.begin(), v.end());
    return s;
}

json to_json(const DatasetManifest& m) {
    json splits = json::object();
    json counts = json::object();
    json freq = json::object();
    for (std::size_t s = 0; s < 3; ++s) {
        splits[kSplitNames[s]] = m.splits.ids[s];
        counts[kSplitNames[s]] = {{"scenes", m.scene_counts[s]}, {"questions", m.question_counts[s]}};
        freq[kSplitNames[s]] = m.answer_frequency[s];
    }
    return json{{"tool_version", m.tool_version},
                {"config", m.config},
                {"splits", splits},
                {"counts", counts},
                {"answer_frequency", freq},
                {"files", m.digests},
                {"content_digest", m.content_digest},
                {"warnings", m.warnings}};
}

DatasetManifest manifest_from_json(const json& j) {
    DatasetManifest m;
    try {
        m.tool_version = j.at("tool_version").get<std::string>();
        m.config = j.at("config");
        for (std::size_t s = 0; s < 3; ++s) {
            m.splits.ids[s] = j.at("splits").at(kSplitNames[s]).get<std::vector<std::int64_t>>();
            const auto& c = j.at("counts").at(kSplitNames[s]);
            m.scene_counts[s] = c.at("scenes").get<std::int64_t>();
            m.question_counts[s] = c.at("questions").get<std::int64_t>();
            m.answer_frequency[s] = j.at("answer_frequency").at(kSplitNames[s]).get<std::map<std::string, std::int64_t>>();
        }
        m.digests = j.at("files").get<std::map<std::string, std::string>>();
        m.content_digest = j.at("content_digest").get<std::string>();
        m.warnings = j.at("warnings").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed manifest: ") + e.what());
    }
    return m;
}

DatasetManifest generate_dataset(const DatasetConfig& config) {
    validate(config);
    const fs::path out = config.output_dir;
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec || !fs::is_directory(out)) throw IoError("cannot create output directory " + out.string());
    if (config.render_audio) fs::create_directories(out / "audio", ec);
    if (config.render_spectrograms) fs::create_directories(out / "spectrograms", ec);
    if (ec) throw IoError("cannot create output subdirectories in " + out.string());

    DatasetManifest manifest;
    manifest.tool_version = CLEAR_VERSION;
    manifest.config = to_json(config);

    SoundSetup sounds(config.bank_manifest, manifest.warnings);
    CompositionSource composition{sounds.bank()};
    const SoundSource& sound_source = sounds.source();

    const auto& catalog = builtin_catalog();
    BalanceConfig balance;
    balance.cap_fraction = config.cap_fraction;

    const bool render = config.render_audio || config.render_spectrograms;
    std::vector<SceneOutput> outputs(static_cast<std::size_t>(config.n_scenes));
    std::atomic<std::int64_t> done{0};
    parallel_for(config.n_scenes, config.workers, [&](std::int64_t id) {
        SceneOutput& o = outputs[static_cast<std::size_t>(id)];
        o.scene = compose_scene(composition, id, config.master_seed);
        auto gen = generate_questions(o.scene, catalog, config.questions_per_scene,
                                      derive_seed(o.scene.seed, kQuestionSalt), balance);
        o.records = std::move(gen.records);
        if (gen.warning) o.warning = "scene " + std::to_string(id) + ": " + *gen.warning;
        if (render) render_files(out, o.scene, sound_source, config.render_audio, config.render_spectrograms);
        std::int64_t d = ++done;
        if (d % 100 == 0 || d == config.n_scenes) spdlog::info("scenes {}/{}", d, config.n_scenes);
    });

    manifest.splits = split_scenes(config.n_scenes, config.split_fractions, config.master_seed);

    // Question ids are global and follow scene order.
    std::int64_t qid = 0;
    for (auto& o : outputs) {
        for (auto& r : o.records) {
            r.question_id = qid++;
            r.scene_id = o.scene.scene_id;
        }
        if (o.warning) manifest.warnings.push_back(*o.warning);
    }

    json scenes = json::array();
    for (const auto& o : outputs) scenes.push_back(to_json(o.scene));
    write_text(out / "scenes.json", scenes.dump() + "\n");

    for (std::size_t s = 0; s < 3; ++s) {
        std::string text;
        std::int64_t n_questions = 0;
        for (std::int64_t id : manifest.splits.ids[s]) {
            for (const auto& r : outputs[static_cast<std::size_t>(id)].records) {
                text += to_json(r).dump();
                text += '\n';
                ++n_questions;
                ++manifest.answer_frequency[s][std::string(r.answer.str())];
            }
        }
        write_text(out / questions_file(s), text);
        manifest.scene_counts[s] = static_cast<std::int64_t>(manifest.splits.ids[s].size());
        manifest.question_counts[s] = n_questions;
    }

    refresh_digests(out, manifest, config.n_scenes, config.render_audio, config.render_spectrograms, config.workers);
    write_text(out / "manifest.json", to_json(manifest).dump(2) + "\n");
    if (!manifest.warnings.empty()) spdlog::warn("{} generation warnings", manifest.warnings.size());
    return manifest;
}

DatasetManifest render_dataset(const fs::path& dir, const RenderConfig& rc) {
    if (rc.workers < 1) throw InvalidArgument("workers must be at least 1");
    DatasetManifest manifest = manifest_from_json(read_json_file(dir / "manifest.json"));
    json scenes_json = read_json_file(dir / "scenes.json");
    if (!scenes_json.is_array()) throw ValidationError("scenes.json must hold an array");
    std::vector<Scene> scenes;
    for (const auto& sj : scenes_json) scenes.push_back(scene_from_json(sj));

    std::optional<fs::path> bank = rc.bank_manifest;
    if (!bank && manifest.config.contains("bank_manifest")) {
        bank = fs::path(manifest.config.at("bank_manifest").get<std::string>());
    }
    SoundSetup sounds(bank, manifest.warnings);
    std::error_code ec;
    if (rc.audio) fs::create_directories(dir / "audio", ec);
    if (rc.spectrograms) fs::create_directories(dir / "spectrograms", ec);
    if (ec) throw IoError("cannot create output subdirectories in " + dir.string());
    parallel_for(static_cast<std::int64_t>(scenes.size()), rc.workers, [&](std::int64_t i) {
        render_files(dir, scenes[static_cast<std::size_t>(i)], sounds.source(), rc.audio, rc.spectrograms);
    });
    bool audio = rc.audio || manifest.config.value("render_audio", false);
    bool spec = rc.spectrograms || manifest.config.value("render_spectrograms", false);
    manifest.config["render_audio"] = audio;
    manifest.config["render_spectrograms"] = spec;
    refresh_digests(dir, manifest, static_cast<std::int64_t>(scenes.size()), audio, spec, rc.workers);
    write_text(dir / "manifest.json", to_json(manifest).dump(2) + "\n");
    return manifest;
}

std::int64_t VerificationReport::count(std::string_view kind) const {
    return std::count_if(violations.begin(), violations.end(), [&](const Violation& v) { return v.kind == kind; });
}

json to_json(const VerificationReport& r) {
    json vs = json::array();
    for (const auto& v : r.violations) {
        json j{{"kind", v.kind}, {"message", v.message}};
        if (v.question_id) j["question_id"] = *v.question_id;
        if (v.scene_id) j["scene_id"] = *v.scene_id;
        vs.push_back(std::move(j));
    }
    return json{{"ok", r.ok()},
                {"questions_checked", r.questions_checked},
                {"scenes_checked", r.scenes_checked},
                {"violations", vs}};
}

namespace {

struct StoredQuestion {
    std::size_t split = 0;
    std::size_t line = 0;
    json raw;
};

// Returns the first violation for a stored question, if any.
std::optional<Violation> check_question(const StoredQuestion& q, const std::map<std::int64_t, Scene>& scenes,
                                        const std::array<std::set<std::int64_t>, 3>& split_sets) {
    std::optional<std::int64_t> qid;
    std::optional<std::int64_t> sid;
    auto fail = [&](std::string kind, std::string msg) {
        return Violation{std::move(kind), qid, sid, std::move(msg)};
    };
    if (q.raw.is_object()) {
        if (auto it = q.raw.find("question_id"); it != q.raw.end() && it->is_number_integer()) qid = it->get<std::int64_t>();
        if (auto it = q.raw.find("scene_id"); it != q.raw.end() && it->is_number_integer()) sid = it->get<std::int64_t>();
        if (auto it = q.raw.find("answer"); it != q.raw.end() && it->is_string()) {
            if (!Answer::parse(it->get<std::string>())) {
                return fail("answer_vocabulary", "answer '" + it->get<std::string>() + "' is not in the vocabulary");
            }
        }
    }
    QuestionRecord r;
    try {
        r = record_from_json(q.raw);
    } catch (const std::exception& e) {
        return fail("malformed_record", std::string(questions_file(q.split)) + ":" + std::to_string(q.line) + ": " + e.what());
    }
    if (!split_sets[q.split].contains(r.scene_id)) {
        return fail("split_membership", "scene " + std::to_string(r.scene_id) + " is not in split " + kSplitNames[q.split]);
    }
    auto it = scenes.find(r.scene_id);
    if (it == scenes.end()) return fail("missing_scene", "scene " + std::to_string(r.scene_id) + " not found");
    const Scene& scene = it->second;
    if (question_type_of(r.program) != r.question_type) {
        return fail("type_mismatch", "program root implies " + std::string(to_string(question_type_of(r.program))));
    }
    if (!answer_in_row(r.question_type, r.answer)) {
        return fail("answer_type", "answer '" + std::string(r.answer.str()) + "' not valid for " + std::string(to_string(r.question_type)));
    }
    Outcome truth;
    try {
        truth = brute_force_answer(r.program, scene);
    } catch (const std::exception& e) {
        return fail("malformed_record", e.what());
    }
    if (!truth) return fail("ill_posed", "program is ill-posed on its scene");
    if (*truth != r.answer) {
        return fail("answer_mismatch", "stored '" + std::string(r.answer.str()) + "', recomputed '" + std::string(truth->str()) + "'");
    }
    if (brute_force_degenerate(r.program, scene)) {
        return fail("degenerate", "a relational constraint can be dropped without changing the answer");
    }
    return std::nullopt;
}

}  // namespace

VerificationReport verify_dataset(const fs::path& dir, int workers) {
    VerificationReport report;
    DatasetManifest manifest = manifest_from_json(read_json_file(dir / "manifest.json"));

    std::map<std::int64_t, Scene> scenes;
    json scenes_json = read_json_file(dir / "scenes.json");
    if (!scenes_json.is_array()) throw ValidationError("scenes.json must hold an array");
    for (const auto& sj : scenes_json) {
        try {
            Scene s = scene_from_json(sj);
            if (!scenes.emplace(s.scene_id, s).second) {
                report.violations.push_back({"duplicate_scene", std::nullopt, s.scene_id, "scene id repeated in scenes.json"});
            }
        } catch (const std::exception& e) {
            report.violations.push_back({"malformed_scene", std::nullopt, std::nullopt, e.what()});
        }
    }
    report.scenes_checked = static_cast<std::int64_t>(scenes.size());

    std::array<std::set<std::int64_t>, 3> split_sets;
    std::map<std::int64_t, std::size_t> owner;
    for (std::size_t s = 0; s < 3; ++s) {
        for (std::int64_t id : manifest.splits.ids[s]) {
            split_sets[s].insert(id);
            auto [it, fresh] = owner.emplace(id, s);
            if (!fresh) {
                report.violations.push_back({"split_overlap", std::nullopt, id,
                                             std::string("scene in both ") + kSplitNames[it->second] + " and " + kSplitNames[s]});
            }
        }
    }
    for (const auto& [id, scene] : scenes) {
        if (!owner.contains(id)) report.violations.push_back({"split_coverage", std::nullopt, id, "scene assigned to no split"});
    }
    for (const auto& [id, s] : owner) {
        if (!scenes.contains(id)) report.violations.push_back({"split_coverage", std::nullopt, id, "split lists an unknown scene"});
    }

    std::vector<StoredQuestion> questions;
    for (std::size_t s = 0; s < 3; ++s) {
        fs::path p = dir / questions_file(s);
        std::ifstream f(p, std::ios::binary);
        if (!f) throw IoError("cannot read " + p.string());
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(f, line)) {
            ++lineno;
            if (line.empty()) continue;
            StoredQuestion q{s, lineno, json()};
            try {
                q.raw = json::parse(line);
            } catch (const json::exception& e) {
                q.raw = json();
            }
            questions.push_back(std::move(q));
        }
    }
    report.questions_checked = static_cast<std::int64_t>(questions.size());

    std::vector<std::optional<Violation>> results(questions.size());
    parallel_for(static_cast<std::int64_t>(questions.size()), std::max(workers, 1), [&](std::int64_t i) {
        auto k = static_cast<std::size_t>(i);
        results[k] = check_question(questions[k], scenes, split_sets);
    });

    std::set<std::int64_t> seen_ids;
    for (std::size_t k = 0; k < questions.size(); ++k) {
        if (results[k]) {
            report.violations.push_back(std::move(*results[k]));
            continue;
        }
        auto qid = questions[k].raw.at("question_id").get<std::int64_t>();
        if (!seen_ids.insert(qid).second) {
            report.violations.push_back({"duplicate_question_id", qid, questions[k].raw.at("scene_id").get<std::int64_t>(),
                                         "question id repeated"});
        }
    }
    return report;
}

}  // namespace clear
