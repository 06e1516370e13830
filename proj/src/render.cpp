#include "clear/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <iterator>

#include <zlib.h>

#include "clear/errors.hpp"
#include "clear/rng.hpp"

namespace clear {
namespace {

constexpr double kOutputPeakDbfs = -1.0;
// Energy of the reverberant tail relative to the direct path.
constexpr double kWetEnergy = 0.5;
// ln(10^6): amplitude envelope exp(-k t / T) drops energy by 60 dB at t = T.
constexpr double kSixtyDbLog = 13.815510557964274;

struct AreaWeight {
    std::size_t src;
    double weight;
};

/// For each destination cell, the source cells it overlaps and the overlap
/// fraction (weights of one cell sum to 1).
std::vector<std::vector<AreaWeight>> area_weights(std::size_t src, std::size_t dst) {
    std::vector<std::vector<AreaWeight>> out(dst);
    const double scale = static_cast<double>(src) / static_cast<double>(dst);
    for (std::size_t d = 0; d < dst; ++d) {
        const double lo = static_cast<double>(d) * scale;
        const double hi = static_cast<double>(d + 1) * scale;
        for (auto s = static_cast<std::size_t>(lo); s < src && static_cast<double>(s) < hi; ++s) {
            const double overlap = std::min(hi, static_cast<double>(s + 1)) - std::max(lo, static_cast<double>(s));
            if (overlap > 0.0) out[d].push_back({s, overlap / scale});
        }
    }
    return out;
}

void put_be32(std::vector<unsigned char>& out, std::uint32_t v) {
    for (int i = 3; i >= 0; --i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
}

void put_chunk(std::vector<unsigned char>& out, const char* type, const std::vector<unsigned char>& data) {
    put_be32(out, static_cast<std::uint32_t>(data.size()));
    const std::size_t type_pos = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    const auto crc = crc32(0L, out.data() + type_pos, static_cast<uInt>(4 + data.size()));
    put_be32(out, static_cast<std::uint32_t>(crc));
}

void write_bytes(const std::filesystem::path& path, const std::vector<unsigned char>& bytes) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path.string());
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw IoError("write failed: " + path.string());
}

}  // namespace

Waveform SynthesisSource::resolve(const Scene& scene, std::size_t index) const {
    const auto& s = scene.sounds.at(index);
    return synthesize_sound(s.attributes.instrument, s.attributes.note, s.attributes.brightness,
                            s.attributes.loudness, s.duration_s, sound_seed(scene, index))
        .waveform;
}

Waveform BankSource::resolve(const Scene& scene, std::size_t index) const {
    const auto& s = scene.sounds.at(index);
    const auto* sound = bank_->by_id(s.sound_id);
    if (sound == nullptr) {
        throw MissingSound("scene " + std::to_string(scene.scene_id) + " sound " + std::to_string(index) +
                           ": no bank sound with id '" + s.sound_id + "'");
    }
    return sound->waveform;
}

std::uint64_t reverb_seed(const Scene& scene) { return derive_seed(scene.seed, 0x7265766572620000ULL); }

Waveform render_scene(const Scene& scene, const SoundSource& source, const RenderOptions& options) {
    std::vector<double> mix(static_cast<std::size_t>(kSceneSamples), 0.0);
    for (std::size_t i = 0; i < scene.sounds.size(); ++i) {
        const auto wave = source.resolve(scene, i);
        const auto onset = scene.sounds[i].onset_sample();
        for (std::size_t t = 0; t < wave.size(); ++t) {
            const auto pos = onset + static_cast<std::int64_t>(t);
            if (pos < 0 || pos >= kSceneSamples) continue;
            mix[static_cast<std::size_t>(pos)] += wave[t];
        }
    }

    if (options.reverb) {
        const auto ir = reverb_impulse_response(scene.reverb_time_ms, reverb_seed(scene));
        auto wet = dsp::convolve(mix, ir);
        wet.resize(mix.size());
        mix = std::move(wet);
    }

    double pk = 0.0;
    for (double v : mix) pk = std::max(pk, std::abs(v));
    const double gain = pk > 0.0 ? dsp::db_to_linear(kOutputPeakDbfs) / pk : 0.0;
    Waveform out(mix.size());
    for (std::size_t i = 0; i < mix.size(); ++i) out[i] = static_cast<float>(mix[i] * gain);
    return out;
}

std::vector<double> reverb_impulse_response(double rt60_ms, std::uint64_t seed) {
    if (!(rt60_ms >= kMinReverbMs && rt60_ms <= kMaxReverbMs)) {
        throw InvalidArgument("rt60 out of range [50, 400] ms: " + std::to_string(rt60_ms));
    }
    const double rt60_samples = rt60_ms * 1e-3 * kSampleRate;
    const auto length = static_cast<std::size_t>(std::llround(1.5 * rt60_samples));
    std::vector<double> ir(length, 0.0);
    Rng rng(seed);
    double tail_energy = 0.0;
    for (std::size_t n = 1; n < length; ++n) {
        const double envelope = std::exp(-0.5 * kSixtyDbLog * static_cast<double>(n) / rt60_samples);
        ir[n] = rng.uniform(-1.0, 1.0) * envelope;
        tail_energy += ir[n] * ir[n];
    }
    const double wet = tail_energy > 0.0 ? std::sqrt(kWetEnergy / tail_energy) : 0.0;
    for (std::size_t n = 1; n < length; ++n) ir[n] *= wet;
    ir[0] = 1.0;
    return ir;
}

Waveform apply_reverb(std::span<const float> waveform, double rt60_ms, std::uint64_t seed) {
    const auto ir = reverb_impulse_response(rt60_ms, seed);
    const std::vector<double> dry(waveform.begin(), waveform.end());
    const auto wet = dsp::convolve(dry, ir);
    Waveform out(waveform.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<float>(wet[i]);
    return out;
}

Stft compute_stft(std::span<const float> waveform) {
    if (waveform.size() < static_cast<std::size_t>(kStftWindow)) {
        throw InvalidArgument("waveform shorter than one STFT window");
    }
    const auto window = dsp::hann(kStftWindow);
    double window_sum = 0.0;
    for (double w : window) window_sum += w;
    const double scale = 2.0 / window_sum;

    Stft out;
    out.frames = 1 + (waveform.size() - kStftWindow) / kStftHop;
    out.magnitude.resize(out.frames * kStftBins);
    std::vector<std::complex<double>> buf(kStftWindow);
    for (std::size_t f = 0; f < out.frames; ++f) {
        const std::size_t start = f * kStftHop;
        for (std::size_t i = 0; i < static_cast<std::size_t>(kStftWindow); ++i) {
            buf[i] = static_cast<double>(waveform[start + i]) * window[i];
        }
        dsp::fft(buf);
        for (std::size_t k = 0; k < static_cast<std::size_t>(kStftBins); ++k) {
            out.magnitude[f * kStftBins + k] = static_cast<float>(std::abs(buf[k]) * scale);
        }
    }
    return out;
}

SpectrogramImage spectrogram(std::span<const float> waveform) {
    const auto stft = compute_stft(waveform);
    constexpr auto W = static_cast<std::size_t>(SpectrogramImage::width);
    constexpr auto H = static_cast<std::size_t>(SpectrogramImage::height);

    // dB -> [0, 1], then collapse the frequency axis per frame.
    const auto freq_w = area_weights(kStftBins, H);
    std::vector<double> per_frame(stft.frames * H, 0.0);
    std::vector<double> normalized(kStftBins);
    for (std::size_t f = 0; f < stft.frames; ++f) {
        for (std::size_t k = 0; k < static_cast<std::size_t>(kStftBins); ++k) {
            const double mag = stft.at(f, k);
            const double db = mag > 0.0 ? std::clamp(20.0 * std::log10(mag), kDbFloor, 0.0) : kDbFloor;
            normalized[k] = (db - kDbFloor) / -kDbFloor;
        }
        for (std::size_t r = 0; r < H; ++r) {
            double acc = 0.0;
            for (const auto& w : freq_w[r]) acc += normalized[w.src] * w.weight;
            per_frame[f * H + r] = acc;
        }
    }

    const auto time_w = area_weights(stft.frames, W);
    SpectrogramImage image;
    for (std::size_t c = 0; c < W; ++c) {
        for (std::size_t r = 0; r < H; ++r) {
            double acc = 0.0;
            for (const auto& w : time_w[c]) acc += per_frame[w.src * H + r] * w.weight;
            image.at(static_cast<int>(H - 1 - r), static_cast<int>(c)) =
                static_cast<float>(std::clamp(acc, 0.0, 1.0));
        }
    }
    return image;
}

void write_png(const std::filesystem::path& path, const SpectrogramImage& image) {
    constexpr int W = SpectrogramImage::width;
    constexpr int H = SpectrogramImage::height;
    std::vector<unsigned char> raw;
    raw.reserve(static_cast<std::size_t>(H) * (W + 1));
    for (int r = 0; r < H; ++r) {
        raw.push_back(0);  // filter: none
        for (int c = 0; c < W; ++c) {
            const double v = std::clamp(static_cast<double>(image.at(r, c)), 0.0, 1.0);
            raw.push_back(static_cast<unsigned char>(std::lround(v * 255.0)));
        }
    }
    uLongf packed_len = compressBound(static_cast<uLong>(raw.size()));
    std::vector<unsigned char> packed(packed_len);
    if (compress2(packed.data(), &packed_len, raw.data(), static_cast<uLong>(raw.size()), 9) != Z_OK) {
        throw IoError("zlib compression failed for " + path.string());
    }
    packed.resize(packed_len);

    std::vector<unsigned char> png = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
    std::vector<unsigned char> ihdr;
    put_be32(ihdr, W);
    put_be32(ihdr, H);
    ihdr.insert(ihdr.end(), {8, 0, 0, 0, 0});  // 8-bit grayscale, no interlace
    put_chunk(png, "IHDR", ihdr);
    put_chunk(png, "IDAT", packed);
    put_chunk(png, "IEND", {});
    write_bytes(path, png);
}

void write_raw(const std::filesystem::path& path, const SpectrogramImage& image) {
    std::vector<unsigned char> out(16 + image.values.size() * 4);
    std::memcpy(out.data(), "CLRSPEC1", 8);
    const std::array<std::uint32_t, 2> dims = {static_cast<std::uint32_t>(SpectrogramImage::height),
                                               static_cast<std::uint32_t>(SpectrogramImage::width)};
    for (std::size_t d = 0; d < dims.size(); ++d) {
        for (int i = 0; i < 4; ++i) out[8 + 4 * d + i] = static_cast<unsigned char>((dims[d] >> (8 * i)) & 0xFF);
    }
    for (std::size_t i = 0; i < image.values.size(); ++i) {
        std::uint32_t u;
        std::memcpy(&u, &image.values[i], 4);
        for (int b = 0; b < 4; ++b) out[16 + 4 * i + b] = static_cast<unsigned char>((u >> (8 * b)) & 0xFF);
    }
    write_bytes(path, out);
}

SpectrogramImage read_raw(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path.string());
    const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    auto u32 = [&](std::size_t off) {
        return static_cast<std::uint32_t>(bytes[off]) | (static_cast<std::uint32_t>(bytes[off + 1]) << 8) |
               (static_cast<std::uint32_t>(bytes[off + 2]) << 16) | (static_cast<std::uint32_t>(bytes[off + 3]) << 24);
    };
    if (bytes.size() < 16 || std::memcmp(bytes.data(), "CLRSPEC1", 8) != 0) {
        throw IoError("not a CLRSPEC1 file: " + path.string());
    }
    if (u32(8) != SpectrogramImage::height || u32(12) != SpectrogramImage::width) {
        throw IoError("unexpected spectrogram dimensions in " + path.string());
    }
    SpectrogramImage image;
    if (bytes.size() != 16 + image.values.size() * 4) throw IoError("truncated spectrogram: " + path.string());
    for (std::size_t i = 0; i < image.values.size(); ++i) {
        const std::uint32_t u = u32(16 + 4 * i);
        std::memcpy(&image.values[i], &u, 4);
    }
    return image;
}

}  // namespace clear
