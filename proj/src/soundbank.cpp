#include "clear/soundbank.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>

#include <nlohmann/json.hpp>

#include "clear/errors.hpp"
#include "clear/rng.hpp"
#include "clear/wav.hpp"

namespace clear {
namespace {

constexpr double kMaxPartialHz = 20000.0;
constexpr double kAttackS = 0.030;
constexpr double kReleaseS = 0.100;
constexpr double kVibratoHz = 5.0;
constexpr double kVibratoDepth = 0.003;
constexpr double kDarkCutoffHz = 1500.0;
constexpr double kShelfHz = 2000.0;
constexpr double kShelfGain = 2.0;  // +6 dB
// Synthesized centroids must clear the annotation threshold by this factor.
constexpr double kCentroidMargin = 1.2;
constexpr int kMaxTiltStages = 16;
// Loud sounds whose RMS would land within this many dB of the threshold are
// rescaled by RMS instead of peak.
constexpr double kLoudRmsMarginDb = 1.5;

double harmonic_profile(Instrument instrument, int k) {
    const double kd = static_cast<double>(k);
    switch (instrument) {
        case Instrument::cello: return (k % 2 == 1 && k > 1 ? 1.5 : 1.0) / kd;
        case Instrument::clarinet: return k % 2 == 1 ? 1.0 / kd : 0.0;
        case Instrument::flute: return 1.0 / (kd * kd);
        case Instrument::trumpet: return k <= 6 ? 1.0 : 1.0 / kd;
        case Instrument::violin: return std::pow(kd, -1.2);
    }
    return 0.0;
}

double lowpass_gain(double f) { return 1.0 / std::sqrt(1.0 + (f / kDarkCutoffHz) * (f / kDarkCutoffHz)); }

double shelf_gain(double f) {
    const double fc = kShelfHz * std::sqrt(kShelfGain);
    const double x2 = (f / fc) * (f / fc);
    return std::sqrt((1.0 + kShelfGain * kShelfGain * x2) / (1.0 + x2));
}

double centroid_of(const std::vector<double>& freqs, const std::vector<double>& amps) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        num += freqs[i] * amps[i];
        den += amps[i];
    }
    return den > 0.0 ? num / den : 0.0;
}

}  // namespace

double note_frequency(Note note, int octave) {
    if (octave < 0 || octave > 8) throw InvalidArgument("octave out of range [0, 8]: " + std::to_string(octave));
    // Vocabulary order starts at A; shift to C-based index within the octave.
    const int c_index = (index_of(note) + 9) % 12;
    const int semitones_from_a4 = (octave - 4) * 12 + (c_index - 9);
    return 440.0 * std::pow(2.0, semitones_from_a4 / 12.0);
}

ElementarySound synthesize_sound(Instrument instrument, Note note, Brightness brightness,
                                 Loudness loudness, double duration_s, std::uint64_t seed) {
    if (!(duration_s >= kMinSoundDuration && duration_s <= kMaxSoundDuration)) {
        throw InvalidArgument("sound duration out of range [0.5, 5] s");
    }
    const double f0 = note_frequency(note);
    const bool vibrato = instrument == Instrument::violin;
    const double headroom = vibrato ? 1.0 + kVibratoDepth : 1.0;
    const int n_harmonics = static_cast<int>(kMaxPartialHz / (f0 * headroom));

    std::vector<double> freqs;
    std::vector<double> base;
    std::vector<int> orders;
    for (int k = 1; k <= n_harmonics; ++k) {
        const double a = harmonic_profile(instrument, k);
        if (a <= 0.0) continue;
        orders.push_back(k);
        freqs.push_back(k * f0);
        base.push_back(a);
    }

    // Spectral tilt: one low-pass (dark) or high-shelf (bright) stage, cascaded
    // further until the partial-amplitude centroid clears the threshold margin.
    const AnnotationConfig defaults;
    std::vector<double> amps = base;
    for (int stages = 1; stages <= kMaxTiltStages; ++stages) {
        for (std::size_t i = 0; i < amps.size(); ++i) {
            const double g = brightness == Brightness::dark ? lowpass_gain(freqs[i]) : shelf_gain(freqs[i]);
            amps[i] = base[i] * std::pow(g, stages);
        }
        const double c = centroid_of(freqs, amps);
        if (brightness == Brightness::dark && c * kCentroidMargin <= defaults.brightness_threshold_hz) break;
        if (brightness == Brightness::bright && c >= defaults.brightness_threshold_hz * kCentroidMargin) break;
    }

    Rng rng(seed);
    std::vector<double> phases(amps.size());
    const double kmax = static_cast<double>(orders.empty() ? 1 : orders.back());
    for (std::size_t i = 0; i < phases.size(); ++i) {
        // Newman-style quadratic phases keep the crest factor low.
        const double k = static_cast<double>(orders[i]);
        phases[i] = std::numbers::pi * k * k / kmax + rng.uniform(-0.3, 0.3);
    }
    const double vibrato_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    std::vector<double> cos_terms(amps.size());
    std::vector<double> sin_terms(amps.size());
    for (std::size_t i = 0; i < amps.size(); ++i) {
        cos_terms[i] = amps[i] * std::cos(phases[i]);
        sin_terms[i] = amps[i] * std::sin(phases[i]);
    }

    const auto n = static_cast<std::size_t>(std::llround(duration_s * kSampleRate));
    const auto attack = static_cast<std::size_t>(kAttackS * kSampleRate);
    const auto release = static_cast<std::size_t>(kReleaseS * kSampleRate);
    std::vector<double> x(n, 0.0);
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t t = 0; t < n; ++t) {
        const double ts = static_cast<double>(t) / kSampleRate;
        double theta = two_pi * f0 * ts;
        if (vibrato) {
            // Integral of f0 * (1 + d sin(2 pi fv t + p)).
            theta += two_pi * f0 * kVibratoDepth / (two_pi * kVibratoHz) *
                     (std::cos(vibrato_phase) - std::cos(two_pi * kVibratoHz * ts + vibrato_phase));
        }
        // sum_k a_k sin(k theta + phi_k) via successive powers of e^{i theta}.
        const std::complex<double> step = std::polar(1.0, theta);
        std::complex<double> power = 1.0;
        int order = 0;
        double acc = 0.0;
        for (std::size_t i = 0; i < amps.size(); ++i) {
            while (order < orders[i]) {
                power *= step;
                ++order;
            }
            acc += power.imag() * cos_terms[i] + power.real() * sin_terms[i];
        }
        double env = 1.0;
        if (t < attack) env = static_cast<double>(t) / static_cast<double>(attack);
        if (n - t <= release) env = std::min(env, static_cast<double>(n - 1 - t) / static_cast<double>(release));
        x[t] = acc * env;
    }

    double pk = 0.0;
    double energy = 0.0;
    for (double v : x) {
        pk = std::max(pk, std::abs(v));
        energy += v * v;
    }
    const double r = std::sqrt(energy / static_cast<double>(n));
    const double target_peak = dsp::db_to_linear(loudness == Loudness::loud ? kLoudPeakDbfs : kQuietPeakDbfs);
    double gain = pk > 0.0 ? target_peak / pk : 0.0;
    if (loudness == Loudness::loud) {
        const double min_rms = dsp::db_to_linear(defaults.loudness_threshold_dbfs + kLoudRmsMarginDb);
        if (r * gain < min_rms) gain = std::min(min_rms / r, 1.0 / pk);
    }

    ElementarySound out;
    out.id = std::string(to_string(instrument)) + "_" + std::string(to_string(note)) + "_" +
             std::string(to_string(brightness)) + "_" + std::string(to_string(loudness));
    out.attributes = {instrument, note, brightness, loudness};
    out.duration_s = duration_s;
    out.waveform.resize(n);
    for (std::size_t t = 0; t < n; ++t) out.waveform[t] = static_cast<float>(x[t] * gain);
    return out;
}

Brightness annotate_brightness(std::span<const float> waveform, const AnnotationConfig& cfg) {
    if (waveform.empty()) throw InvalidArgument("empty waveform");
    if (dsp::peak(waveform) == 0.0) throw UndefinedAttribute("brightness undefined for a silent waveform");
    const double c = dsp::spectral_centroid(waveform);
    return c > cfg.brightness_threshold_hz ? Brightness::bright : Brightness::dark;
}

Loudness annotate_loudness(std::span<const float> waveform, const AnnotationConfig& cfg) {
    if (waveform.empty()) throw InvalidArgument("empty waveform");
    const double r = dsp::rms(waveform);
    if (r == 0.0) throw UndefinedAttribute("loudness undefined for a silent waveform");
    const double db = 20.0 * std::log10(r);
    return db > cfg.loudness_threshold_dbfs ? Loudness::loud : Loudness::quiet;
}

void SoundBank::add(ElementarySound sound) {
    const std::size_t idx = sounds_.size();
    index_[sound.attributes].push_back(idx);
    by_id_[sound.id] = idx;
    sounds_.push_back(std::move(sound));
}

std::span<const std::size_t> SoundBank::find(const AttributeTuple& key) const {
    const auto it = index_.find(key);
    if (it == index_.end()) return {};
    return it->second;
}

const ElementarySound* SoundBank::by_id(const std::string& id) const {
    const auto it = by_id_.find(id);
    return it == by_id_.end() ? nullptr : &sounds_[it->second];
}

std::vector<AttributeTuple> SoundBank::tuples() const {
    std::vector<AttributeTuple> out;
    out.reserve(index_.size());
    for (const auto& [key, _] : index_) out.push_back(key);
    return out;
}

LoadedBank load_bank(const std::filesystem::path& directory, const std::filesystem::path& manifest,
                     const AnnotationConfig& cfg) {
    std::ifstream f(manifest);
    if (!f) throw IoError("cannot open bank manifest: " + manifest.string());
    nlohmann::json doc;
    try {
        f >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed bank manifest " + manifest.string() + ": " + e.what());
    }
    if (!doc.is_array()) throw IoError("bank manifest must be a JSON array: " + manifest.string());

    LoadedBank out;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& entry = doc[i];
        const std::string path = entry.value("path", std::string{});
        auto fail = [&](std::string msg) { out.errors.push_back({i, path, std::move(msg)}); };

        const auto instrument = parse_instrument(entry.value("instrument", std::string{}));
        if (!instrument) {
            fail("unknown instrument label '" + entry.value("instrument", std::string{}) + "'");
            continue;
        }
        const auto note = parse_note(entry.value("note", std::string{}));
        if (!note) {
            fail("unknown note label '" + entry.value("note", std::string{}) + "'");
            continue;
        }
        try {
            ElementarySound s;
            s.waveform = wav::read_48k(directory / path);
            if (s.waveform.empty()) throw UndefinedAttribute("empty audio");
            const double pk = dsp::peak(s.waveform);
            if (pk > 1.0) {
                for (auto& v : s.waveform) v = static_cast<float>(v / pk);
            }
            s.attributes = {*instrument, *note, annotate_brightness(s.waveform, cfg),
                            annotate_loudness(s.waveform, cfg)};
            s.duration_s = static_cast<double>(s.waveform.size()) / kSampleRate;
            s.id = path;
            out.bank.add(std::move(s));
        } catch (const std::exception& e) {
            fail(e.what());
        }
    }
    if (out.bank.empty()) throw ValidationError("sound bank is empty after loading " + manifest.string());
    return out;
}

}  // namespace clear
