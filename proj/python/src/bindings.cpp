#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "clear/dataset.hpp"
#include "clear/errors.hpp"
#include "clear/eval.hpp"
#include "clear/render.hpp"

namespace py = pybind11;
using nlohmann::json;

// JSON crosses the boundary as text; the Python package decodes it.
namespace {

std::vector<clear::QuestionRecord> records_from(const std::string& text) {
    std::vector<clear::QuestionRecord> out;
    for (const auto& j : json::parse(text)) out.push_back(clear::record_from_json(j));
    return out;
}

std::string records_to(const std::vector<clear::QuestionRecord>& records) {
    json arr = json::array();
    for (const auto& r : records) arr.push_back(clear::to_json(r));
    return arr.dump();
}

py::array_t<float> to_array(const std::vector<float>& v) {
    py::array_t<float> a(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), a.mutable_data());
    return a;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Acoustic question answering dataset generator (native core)";

    py::register_exception<clear::InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<clear::ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<clear::StructuralError>(m, "StructuralError", PyExc_ValueError);
    py::register_exception<clear::InvalidBinding>(m, "InvalidBinding", PyExc_ValueError);
    py::register_exception<clear::IoError>(m, "IoError", PyExc_OSError);

    m.attr("SAMPLE_RATE") = clear::kSampleRate;
    m.attr("SCENE_SAMPLES") = clear::kSceneSamples;

    m.def("vocabulary", [] {
        std::vector<std::string> out;
        for (auto s : clear::vocabulary()) out.emplace_back(s);
        return out;
    });

    m.def("compose_scene", [](std::int64_t scene_id, std::uint64_t master_seed) {
        return clear::to_json(clear::compose_scene({}, scene_id, master_seed)).dump();
    }, py::arg("scene_id"), py::arg("master_seed"));

    m.def("render_scene", [](const std::string& scene, bool reverb) {
        auto s = clear::scene_from_json(json::parse(scene));
        clear::SynthesisSource src;
        clear::Waveform w;
        {
            py::gil_scoped_release release;
            w = clear::render_scene(s, src, clear::RenderOptions{reverb});
        }
        return to_array(w);
    }, py::arg("scene"), py::arg("reverb") = true);

    m.def("spectrogram", [](py::array_t<float, py::array::c_style | py::array::forcecast> samples) {
        std::span<const float> in(samples.data(), static_cast<std::size_t>(samples.size()));
        clear::SpectrogramImage img;
        {
            py::gil_scoped_release release;
            img = clear::spectrogram(in);
        }
        py::array_t<float> out({clear::SpectrogramImage::height, clear::SpectrogramImage::width});
        std::copy(img.values.begin(), img.values.end(), out.mutable_data());
        return out;
    }, py::arg("samples"));

    m.def("generate_questions", [](const std::string& scene, int n, std::uint64_t seed, double cap_fraction) {
        auto s = clear::scene_from_json(json::parse(scene));
        auto gen = clear::generate_questions(s, clear::builtin_catalog(), n, seed, clear::BalanceConfig{cap_fraction});
        return records_to(gen.records);
    }, py::arg("scene"), py::arg("n"), py::arg("seed"), py::arg("cap_fraction") = 0.5);

    m.def("execute", [](const std::string& program, const std::string& scene) -> std::optional<std::string> {
        auto p = clear::program_from_json(json::parse(program));
        auto s = clear::scene_from_json(json::parse(scene));
        auto a = clear::execute(p, s);
        if (!a) return std::nullopt;
        return std::string(a->str());
    }, py::arg("program"), py::arg("scene"));

    m.def("generate_dataset", [](const std::string& config) {
        auto c = clear::config_from_json(json::parse(config));
        py::gil_scoped_release release;
        return clear::to_json(clear::generate_dataset(c)).dump();
    }, py::arg("config"));

    m.def("verify_dataset", [](const std::string& dir, int workers) {
        py::gil_scoped_release release;
        return clear::to_json(clear::verify_dataset(dir, workers)).dump();
    }, py::arg("dir"), py::arg("workers") = 1);

    m.def("score", [](const std::vector<std::pair<std::int64_t, std::string>>& predictions, const std::string& gold) {
        std::vector<clear::Prediction> preds;
        for (const auto& [id, a] : predictions) preds.push_back({id, a});
        return clear::to_json(clear::score(preds, records_from(gold))).dump();
    }, py::arg("predictions"), py::arg("gold"));

    m.def("baseline_random", [](const std::string& gold, std::uint64_t seed, int n_trials) {
        auto r = clear::baseline_random(records_from(gold), seed, n_trials);
        return json{{"mean_accuracy", r.mean_accuracy}, {"stddev", r.stddev}, {"trials", r.trial_accuracy}}.dump();
    }, py::arg("gold"), py::arg("seed") = 0, py::arg("n_trials") = 10);

    m.def("baseline_majority", [](const std::string& train, const std::string& gold) {
        auto r = clear::baseline_majority(records_from(train), records_from(gold));
        return json{{"answer", r.answer}, {"report", clear::to_json(r.report)},
                    {"per_type_report", clear::to_json(r.per_type_report)}}.dump();
    }, py::arg("train"), py::arg("gold"));

    m.def("read_questions", [](const std::string& path) { return records_to(clear::read_questions(path)); },
          py::arg("path"));
}
