#pragma once

#include <filesystem>
#include <span>

#include "clear/dsp.hpp"

namespace clear::wav {

struct Audio {
    int sample_rate = kSampleRate;
    Waveform samples;  // mono, nominal range [-1, 1]
};

/// Reads RIFF/WAVE with 16-bit PCM or 32-bit IEEE float samples (plain or
/// WAVE_FORMAT_EXTENSIBLE). Multi-channel input is averaged down to mono.
/// Throws IoError on unreadable or unsupported files.
Audio read(const std::filesystem::path& path);

/// Reads and converts to 48 kHz mono.
Waveform read_48k(const std::filesystem::path& path);

/// Writes mono 16-bit PCM. Samples are clamped to [-1, 1].
void write_pcm16(const std::filesystem::path& path, std::span<const float> samples,
                 int sample_rate = kSampleRate);

/// Writes mono 32-bit float (format tag 3).
void write_float32(const std::filesystem::path& path, std::span<const float> samples,
                   int sample_rate = kSampleRate);

}  // namespace clear::wav
