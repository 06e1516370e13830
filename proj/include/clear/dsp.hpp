#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace clear {

inline constexpr int kSampleRate = 48000;

using Waveform = std::vector<float>;

namespace dsp {

bool is_power_of_two(std::size_t n) noexcept;
std::size_t next_power_of_two(std::size_t n) noexcept;

/// In-place iterative radix-2 FFT. Size must be a power of two.
/// inverse=true computes the unscaled inverse transform.
void fft(std::span<std::complex<double>> data, bool inverse = false);

/// Periodic Hann window (denominator = length), the usual STFT analysis form.
std::vector<double> hann(std::size_t length);

/// Linear convolution via FFT overlap-add; output length = signal + kernel - 1.
std::vector<double> convolve(std::span<const double> signal, std::span<const double> kernel);

/// Magnitude-weighted mean frequency of the Hann-windowed short-time
/// spectrum accumulated over the whole signal (2048-sample frames, hop 1024).
/// Returns a negative value for a silent signal.
double spectral_centroid(std::span<const float> signal, int sample_rate = kSampleRate);

double rms(std::span<const float> signal);
double peak(std::span<const float> signal);

inline double db_to_linear(double db) { return std::pow(10.0, db / 20.0); }

/// Windowed-sinc sample-rate conversion (Blackman window, 32 zero crossings).
std::vector<float> resample(std::span<const float> in, int from_rate, int to_rate);

}  // namespace dsp
}  // namespace clear
