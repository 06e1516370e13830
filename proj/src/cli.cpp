#include "clear/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "clear/dataset.hpp"
#include "clear/errors.hpp"
#include "clear/eval.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace clear::cli {
namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DatasetFlags {
    std::string config;
    std::int64_t scenes = 0;
    int questions_per_scene = 0;
    std::uint64_t seed = 0;
    std::string out;
    int workers = 1;
    bool no_audio = false;
    bool no_spectrograms = false;
    std::string bank_manifest;
    std::string split;
    double cap_fraction = 0.5;
    std::map<std::string, CLI::Option*> opts;

    bool given(const std::string& name) const { return opts.at(name)->count() > 0; }
};

void add_dataset_flags(CLI::App* app, DatasetFlags& f) {
    f.opts["config"] = app->add_option("--config", f.config, "JSON config file; flags override its values");
    f.opts["scenes"] = app->add_option("--scenes", f.scenes, "Number of scenes");
    f.opts["qps"] = app->add_option("--questions-per-scene", f.questions_per_scene, "Questions per scene");
    f.opts["seed"] = app->add_option("--seed", f.seed, "Master seed");
    f.opts["out"] = app->add_option("--out", f.out, "Output directory");
    f.opts["workers"] = app->add_option("--workers", f.workers, "Worker threads");
    f.opts["no_audio"] = app->add_flag("--no-audio", f.no_audio, "Skip WAV rendering");
    f.opts["no_spec"] = app->add_flag("--no-spectrograms", f.no_spectrograms, "Skip spectrogram rendering");
    f.opts["bank"] = app->add_option("--bank-manifest", f.bank_manifest, "Use a recorded sound bank");
    f.opts["split"] = app->add_option("--split", f.split, "Train,val,test fractions, e.g. 0.7,0.15,0.15");
    f.opts["cap"] = app->add_option("--cap-fraction", f.cap_fraction, "Answer balance cap per scene and type");
}

std::array<double, 3> parse_split(const std::string& text) {
    std::array<double, 3> out{};
    std::size_t n = 0;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        if (n == 3) throw UsageError("--split takes exactly three fractions");
        const char* b = part.data();
        const char* e = b + part.size();
        auto [ptr, ec] = std::from_chars(b, e, out[n]);
        if (ec != std::errc() || ptr != e) throw UsageError("bad --split value '" + part + "'");
        ++n;
    }
    if (n != 3) throw UsageError("--split takes exactly three fractions");
    return out;
}

json read_config_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot read config " + path);
    try {
        return json::parse(f, nullptr, true, true);
    } catch (const json::exception& e) {
        throw UsageError("bad config file " + path + ": " + e.what());
    }
}

DatasetConfig effective_config(const DatasetFlags& f) {
    DatasetConfig c;
    if (f.given("config")) c = config_from_json(read_config_file(f.config), c);
    if (f.given("scenes")) c.n_scenes = f.scenes;
    if (f.given("qps")) c.questions_per_scene = f.questions_per_scene;
    if (f.given("seed")) c.master_seed = f.seed;
    if (f.given("out")) c.output_dir = f.out;
    if (f.given("workers")) c.workers = f.workers;
    if (f.no_audio) c.render_audio = false;
    if (f.no_spectrograms) c.render_spectrograms = false;
    if (f.given("bank")) c.bank_manifest = fs::path(f.bank_manifest);
    if (f.given("split")) c.split_fractions = parse_split(f.split);
    if (f.given("cap")) c.cap_fraction = f.cap_fraction;
    return c;
}

void write_json(const std::string& path, const json& j) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write " + path);
    f << j.dump(2) << '\n';
}

void configure_logging() {
    auto logger = spdlog::get("clear");
    if (!logger) {
        logger = spdlog::stderr_color_mt("clear");
        logger->set_pattern("[%l] %v");
    }
    spdlog::set_default_logger(logger);
    spdlog::level::level_enum level = spdlog::level::info;
    if (const char* env = std::getenv("CLEAR_LOG"); env && *env) level = spdlog::level::from_str(env);
    spdlog::set_level(level);
}

int cmd_generate(const DatasetFlags& flags, bool symbolic_only, std::ostream& out) {
    DatasetConfig c = effective_config(flags);
    if (symbolic_only) {
        c.render_audio = false;
        c.render_spectrograms = false;
    }
    DatasetManifest m = generate_dataset(c);
    out << "wrote " << c.output_dir.string() << ": ";
    for (std::size_t s = 0; s < 3; ++s) {
        out << kSplitNames[s] << " " << m.scene_counts[s] << " scenes / " << m.question_counts[s] << " questions"
            << (s < 2 ? ", " : "\n");
    }
    out << "content digest " << m.content_digest << '\n';
    if (!m.warnings.empty()) out << m.warnings.size() << " warnings (see manifest.json)\n";
    return kExitOk;
}

int cmd_verify(const std::string& dir, int workers, const std::string& report_path, std::ostream& out) {
    VerificationReport r = verify_dataset(dir, workers);
    for (const auto& v : r.violations) {
        out << v.kind;
        if (v.question_id) out << " question " << *v.question_id;
        if (v.scene_id) out << " scene " << *v.scene_id;
        out << ": " << v.message << '\n';
    }
    out << r.questions_checked << " questions, " << r.scenes_checked << " scenes checked, "
        << r.violations.size() << " violations\n";
    if (!report_path.empty()) write_json(report_path, to_json(r));
    return r.ok() ? kExitOk : kExitFailure;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Acoustic question answering dataset generator and evaluation toolkit", "clear"};
    app.require_subcommand(1);
    app.set_version_flag("--version", CLEAR_VERSION);

    DatasetFlags gen_flags;
    auto* generate = app.add_subcommand("generate", "Compose scenes, generate questions, render audio");
    add_dataset_flags(generate, gen_flags);

    DatasetFlags q_flags;
    auto* questions = app.add_subcommand("questions", "Symbolic-only generation (no audio, no spectrograms)");
    add_dataset_flags(questions, q_flags);

    std::string render_dir;
    RenderConfig render_cfg;
    bool render_no_audio = false;
    bool render_no_spec = false;
    std::string render_bank;
    auto* render = app.add_subcommand("render", "Render audio and spectrograms for an existing dataset");
    render->add_option("dir", render_dir, "Dataset directory")->required();
    render->add_option("--workers", render_cfg.workers, "Worker threads");
    render->add_flag("--no-audio", render_no_audio, "Skip WAV rendering");
    render->add_flag("--no-spectrograms", render_no_spec, "Skip spectrogram rendering");
    auto* render_bank_opt = render->add_option("--bank-manifest", render_bank, "Sound bank manifest");

    std::string verify_dir;
    int verify_workers = 1;
    std::string verify_report;
    auto* verify = app.add_subcommand("verify", "Re-check every stored question against its scene");
    verify->add_option("dir", verify_dir, "Dataset directory")->required();
    verify->add_option("--workers", verify_workers, "Worker threads");
    verify->add_option("--report", verify_report, "Write the report as JSON");

    std::string gold_path;
    std::string pred_path;
    std::string eval_report;
    bool eval_json = false;
    auto* evaluate = app.add_subcommand("evaluate", "Score predictions against gold answers");
    evaluate->add_option("--gold", gold_path, "Gold questions (JSON lines)")->required();
    evaluate->add_option("--pred", pred_path, "Predictions (JSON lines of question_id, answer)")->required();
    evaluate->add_option("--report", eval_report, "Write the report as JSON");
    evaluate->add_flag("--json", eval_json, "Print JSON instead of a table");

    std::string base_gold;
    std::string base_train;
    std::uint64_t base_seed = 0;
    int base_trials = 10;
    std::string base_report;
    auto* baselines = app.add_subcommand("baselines", "Chance-level and majority-class baselines");
    baselines->add_option("--gold", base_gold, "Gold questions (JSON lines)")->required();
    baselines->add_option("--train", base_train, "Training questions; defaults to questions_train.jsonl next to --gold");
    baselines->add_option("--seed", base_seed, "Seed for the random baseline");
    baselines->add_option("--trials", base_trials, "Random baseline trials");
    baselines->add_option("--report", base_report, "Write results as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    configure_logging();
    try {
        if (*generate) return cmd_generate(gen_flags, false, out);
        if (*questions) return cmd_generate(q_flags, true, out);
        if (*render) {
            render_cfg.audio = !render_no_audio;
            render_cfg.spectrograms = !render_no_spec;
            if (render_bank_opt->count()) render_cfg.bank_manifest = fs::path(render_bank);
            DatasetManifest m = render_dataset(render_dir, render_cfg);
            out << "rendered " << render_dir << ", content digest " << m.content_digest << '\n';
            return kExitOk;
        }
        if (*verify) return cmd_verify(verify_dir, verify_workers, verify_report, out);
        if (*evaluate) {
            auto gold = read_questions(gold_path);
            auto preds = read_predictions(pred_path);
            EvalReport r = score(preds, gold);
            if (eval_json) {
                out << to_json(r).dump(2) << '\n';
            } else {
                out << format_report(r);
            }
            if (!eval_report.empty()) write_json(eval_report, to_json(r));
            return kExitOk;
        }
        if (*baselines) {
            auto gold = read_questions(base_gold);
            fs::path train_path = base_train.empty() ? fs::path(base_gold).parent_path() / "questions_train.jsonl"
                                                     : fs::path(base_train);
            auto train = read_questions(train_path);
            RandomBaseline rnd = baseline_random(gold, base_seed, base_trials);
            MajorityBaseline maj = baseline_majority(train, gold);
            out << "random:             " << rnd.mean_accuracy << " (sd " << rnd.stddev << ", " << base_trials
                << " trials)\n";
            out << "majority ('" << maj.answer << "'): " << maj.report.overall_accuracy << '\n';
            out << "per-type majority:  " << maj.per_type_report.overall_accuracy << '\n';
            if (!base_report.empty()) {
                json per_type = json::object();
                for (const auto& [t, a] : maj.per_type_answer) per_type[std::string(to_string(t))] = a;
                write_json(base_report, json{{"random", {{"mean_accuracy", rnd.mean_accuracy},
                                                         {"stddev", rnd.stddev},
                                                         {"trials", rnd.trial_accuracy},
                                                         {"seed", base_seed}}},
                                             {"majority", {{"answer", maj.answer}, {"report", to_json(maj.report)}}},
                                             {"per_type_majority", {{"answers", per_type},
                                                                    {"report", to_json(maj.per_type_report)}}}});
            }
            return kExitOk;
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace clear::cli
