#include "clear/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "clear/errors.hpp"

namespace clear::wav {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t le16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t le32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put16(std::vector<unsigned char>& out, std::uint16_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xFF));
    out.push_back(static_cast<unsigned char>(v >> 8));
}

void put32(std::vector<unsigned char>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
}

void put_tag(std::vector<unsigned char>& out, const char* tag) {
    out.insert(out.end(), tag, tag + 4);
}

void write_file(const std::filesystem::path& path, const std::vector<unsigned char>& bytes) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path.string());
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw IoError("write failed: " + path.string());
}

std::vector<unsigned char> header(std::uint16_t format, std::uint16_t bits, int sample_rate,
                                  std::size_t n_samples) {
    const std::uint32_t block_align = bits / 8;
    const auto data_bytes = static_cast<std::uint32_t>(n_samples * block_align);
    std::vector<unsigned char> out;
    out.reserve(44 + data_bytes);
    put_tag(out, "RIFF");
    put32(out, 36 + data_bytes);
    put_tag(out, "WAVE");
    put_tag(out, "fmt ");
    put32(out, 16);
    put16(out, format);
    put16(out, 1);
    put32(out, static_cast<std::uint32_t>(sample_rate));
    put32(out, static_cast<std::uint32_t>(sample_rate) * block_align);
    put16(out, static_cast<std::uint16_t>(block_align));
    put16(out, bits);
    put_tag(out, "data");
    put32(out, data_bytes);
    return out;
}

}  // namespace

Audio read(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path.string());
    const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
        throw IoError("not a RIFF/WAVE file: " + path.string());
    }

    std::uint16_t format = 0;
    std::uint16_t channels = 0;
    std::uint16_t bits = 0;
    std::uint32_t rate = 0;
    const unsigned char* data = nullptr;
    std::size_t data_size = 0;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const unsigned char* chunk = bytes.data() + pos;
        const std::size_t size = le32(chunk + 4);
        const std::size_t body = pos + 8;
        const std::size_t avail = std::min(size, bytes.size() - body);
        if (std::memcmp(chunk, "fmt ", 4) == 0) {
            if (avail < 16) throw IoError("truncated fmt chunk: " + path.string());
            format = le16(chunk + 8);
            channels = le16(chunk + 10);
            rate = le32(chunk + 12);
            bits = le16(chunk + 22);
            if (format == kFormatExtensible && avail >= 26) format = le16(chunk + 8 + 24);
        } else if (std::memcmp(chunk, "data", 4) == 0) {
            data = chunk + 8;
            data_size = avail;
        }
        pos = body + size + (size & 1);
    }

    if (format == 0 || data == nullptr) throw IoError("missing fmt or data chunk: " + path.string());
    if (channels == 0 || rate == 0) throw IoError("invalid fmt chunk: " + path.string());
    const bool pcm16 = format == kFormatPcm && bits == 16;
    const bool f32 = format == kFormatFloat && bits == 32;
    if (!pcm16 && !f32) {
        throw IoError("unsupported sample format (need 16-bit PCM or 32-bit float): " + path.string());
    }

    const std::size_t frame_bytes = static_cast<std::size_t>(channels) * (bits / 8);
    const std::size_t frames = data_size / frame_bytes;
    Audio audio;
    audio.sample_rate = static_cast<int>(rate);
    audio.samples.resize(frames);
    for (std::size_t i = 0; i < frames; ++i) {
        double acc = 0.0;
        for (std::size_t c = 0; c < channels; ++c) {
            const unsigned char* p = data + i * frame_bytes + c * (bits / 8);
            if (pcm16) {
                acc += static_cast<std::int16_t>(le16(p)) / 32768.0;
            } else {
                const std::uint32_t u = le32(p);
                float v;
                std::memcpy(&v, &u, sizeof v);
                acc += v;
            }
        }
        audio.samples[i] = static_cast<float>(acc / channels);
    }
    return audio;
}

Waveform read_48k(const std::filesystem::path& path) {
    auto audio = read(path);
    if (audio.sample_rate == kSampleRate) return std::move(audio.samples);
    return dsp::resample(audio.samples, audio.sample_rate, kSampleRate);
}

void write_pcm16(const std::filesystem::path& path, std::span<const float> samples, int sample_rate) {
    auto out = header(kFormatPcm, 16, sample_rate, samples.size());
    for (float s : samples) {
        const auto q = std::clamp(std::lround(static_cast<double>(s) * 32768.0), -32768L, 32767L);
        const auto v = static_cast<std::int16_t>(q);
        put16(out, static_cast<std::uint16_t>(v));
    }
    write_file(path, out);
}

void write_float32(const std::filesystem::path& path, std::span<const float> samples, int sample_rate) {
    auto out = header(kFormatFloat, 32, sample_rate, samples.size());
    for (float s : samples) {
        std::uint32_t u;
        std::memcpy(&u, &s, sizeof u);
        put32(out, u);
    }
    write_file(path, out);
}

}  // namespace clear::wav
