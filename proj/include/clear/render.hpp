#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "clear/scene.hpp"
#include "clear/soundbank.hpp"

namespace clear {

/// Resolves a scene sound to its waveform.
class SoundSource {
public:
    virtual ~SoundSource() = default;
    /// Throws MissingSound when the sound cannot be resolved.
    virtual Waveform resolve(const Scene& scene, std::size_t index) const = 0;
};

/// Synthesizes each sound from its attributes, duration and sound_seed().
class SynthesisSource final : public SoundSource {
public:
    Waveform resolve(const Scene& scene, std::size_t index) const override;
};

/// Looks sounds up by SceneSound::sound_id.
class BankSource final : public SoundSource {
public:
    explicit BankSource(const SoundBank& bank) : bank_(&bank) {}
    Waveform resolve(const Scene& scene, std::size_t index) const override;

private:
    const SoundBank* bank_;
};

struct RenderOptions {
    bool reverb = true;  // false is a test hook for dry renders
};

/// Mixes the scene to exactly 2 400 000 samples, applies reverb with the
/// scene's RT60, then peak-normalizes to -1 dBFS.
Waveform render_scene(const Scene& scene, const SoundSource& source, const RenderOptions& options = {});

/// Exponentially decaying white-noise tail (60 dB energy drop at rt60), length
/// round(1.5 * rt60 * 48 kHz), with a unit direct-path impulse at t = 0.
/// Throws InvalidArgument for rt60 outside [50, 400] ms.
std::vector<double> reverb_impulse_response(double rt60_ms, std::uint64_t seed);

/// Convolves with reverb_impulse_response(rt60_ms, seed). The output keeps the
/// input's length; the tail past the end is dropped.
Waveform apply_reverb(std::span<const float> waveform, double rt60_ms, std::uint64_t seed);

/// Seed of the scene's reverb impulse response.
std::uint64_t reverb_seed(const Scene& scene);

inline constexpr int kStftWindow = 1024;
inline constexpr int kStftHop = 512;
inline constexpr int kStftBins = kStftWindow / 2 + 1;
inline constexpr double kDbFloor = -80.0;

/// Magnitude STFT, frame-major (frames x 513). Magnitudes are scaled so a
/// full-scale sine centred on a bin reads 1.0 (0 dB).
struct Stft {
    std::size_t frames = 0;
    std::vector<float> magnitude;
    float at(std::size_t frame, std::size_t bin) const { return magnitude[frame * kStftBins + bin]; }
};

/// Hann window 1024, hop 512, no padding. Throws InvalidArgument if the
/// waveform is shorter than one window.
Stft compute_stft(std::span<const float> waveform);

/// 480 x 320 image, values in [0, 1]. Stored row-major with row 0 at the top
/// (highest frequency); the lowest frequency is the bottom row.
struct SpectrogramImage {
    static constexpr int width = 480;
    static constexpr int height = 320;
    std::vector<float> values = std::vector<float>(static_cast<std::size_t>(width) * height, 0.0f);

    float at(int row, int col) const { return values[static_cast<std::size_t>(row) * width + col]; }
    float& at(int row, int col) { return values[static_cast<std::size_t>(row) * width + col]; }
    /// Row counted from the bottom (0 = lowest frequency band).
    float from_bottom(int freq_row, int col) const { return at(height - 1 - freq_row, col); }
};

/// Frequency span of one image row: 24 kHz / 320 = 75 Hz.
inline constexpr double kRowHz = kSampleRate / 2.0 / SpectrogramImage::height;

/// STFT -> dB (floor -80) -> [0, 1] -> area-average resample to 480 x 320.
SpectrogramImage spectrogram(std::span<const float> waveform);

/// 8-bit grayscale PNG, pixel = round(value * 255).
void write_png(const std::filesystem::path& path, const SpectrogramImage& image);

/// Little-endian: "CLRSPEC1", u32 height, u32 width, then height*width f32
/// row-major in image orientation.
void write_raw(const std::filesystem::path& path, const SpectrogramImage& image);
SpectrogramImage read_raw(const std::filesystem::path& path);

}  // namespace clear
