#include "clear/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "clear/errors.hpp"

namespace clear::dsp {

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) noexcept {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

void fft(std::span<std::complex<double>> data, bool inverse) {
    const std::size_t n = data.size();
    if (!is_power_of_two(n)) throw InvalidArgument("fft size must be a power of two");

    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }

    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        const double theta = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
        // Twiddles computed directly per index; recurrences drift for large n.
        std::vector<std::complex<double>> tw(half);
        for (std::size_t k = 0; k < half; ++k) {
            tw[k] = std::polar(1.0, theta * static_cast<double>(k));
        }
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < half; ++k) {
                const auto u = data[i + k];
                const auto v = data[i + k + half] * tw[k];
                data[i + k] = u + v;
                data[i + k + half] = u - v;
            }
        }
    }
}

std::vector<double> hann(std::size_t length) {
    std::vector<double> w(length);
    for (std::size_t i = 0; i < length; ++i) {
        w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                    static_cast<double>(length));
    }
    return w;
}

std::vector<double> convolve(std::span<const double> signal, std::span<const double> kernel) {
    if (signal.empty() || kernel.empty()) return {};
    const std::size_t out_len = signal.size() + kernel.size() - 1;
    std::vector<double> out(out_len, 0.0);

    if (kernel.size() <= 64) {
        for (std::size_t i = 0; i < signal.size(); ++i) {
            for (std::size_t k = 0; k < kernel.size(); ++k) out[i + k] += signal[i] * kernel[k];
        }
        return out;
    }

    const std::size_t fft_size = next_power_of_two(std::max<std::size_t>(4 * kernel.size(), 4096));
    const std::size_t block = fft_size - kernel.size() + 1;

    std::vector<std::complex<double>> kspec(fft_size);
    std::copy(kernel.begin(), kernel.end(), kspec.begin());
    fft(kspec);

    std::vector<std::complex<double>> buf(fft_size);
    const double scale = 1.0 / static_cast<double>(fft_size);
    for (std::size_t start = 0; start < signal.size(); start += block) {
        const std::size_t len = std::min(block, signal.size() - start);
        std::fill(buf.begin(), buf.end(), std::complex<double>{});
        std::copy_n(signal.begin() + static_cast<std::ptrdiff_t>(start), len, buf.begin());
        fft(buf);
        for (std::size_t i = 0; i < fft_size; ++i) buf[i] *= kspec[i];
        fft(buf, true);
        const std::size_t valid = std::min(fft_size, out_len - start);
        for (std::size_t i = 0; i < valid; ++i) out[start + i] += buf[i].real() * scale;
    }
    return out;
}

double spectral_centroid(std::span<const float> signal, int sample_rate) {
    constexpr std::size_t frame = 2048;
    constexpr std::size_t hop = 1024;
    const auto window = hann(frame);
    std::vector<double> accum(frame / 2 + 1, 0.0);
    std::vector<std::complex<double>> buf(frame);

    std::size_t start = 0;
    do {
        for (std::size_t i = 0; i < frame; ++i) {
            const std::size_t idx = start + i;
            const double x = idx < signal.size() ? static_cast<double>(signal[idx]) : 0.0;
            buf[i] = x * window[i];
        }
        fft(buf);
        for (std::size_t k = 0; k < accum.size(); ++k) accum[k] += std::abs(buf[k]);
        start += hop;
    } while (start + frame <= signal.size());

    double weighted = 0.0;
    double total = 0.0;
    const double bin_hz = static_cast<double>(sample_rate) / static_cast<double>(frame);
    for (std::size_t k = 0; k < accum.size(); ++k) {
        weighted += static_cast<double>(k) * bin_hz * accum[k];
        total += accum[k];
    }
    if (total <= 0.0) return -1.0;
    return weighted / total;
}

double rms(std::span<const float> signal) {
    if (signal.empty()) return 0.0;
    double acc = 0.0;
    for (float s : signal) acc += static_cast<double>(s) * static_cast<double>(s);
    return std::sqrt(acc / static_cast<double>(signal.size()));
}

double peak(std::span<const float> signal) {
    double p = 0.0;
    for (float s : signal) p = std::max(p, std::abs(static_cast<double>(s)));
    return p;
}

std::vector<float> resample(std::span<const float> in, int from_rate, int to_rate) {
    if (from_rate <= 0 || to_rate <= 0) throw InvalidArgument("sample rates must be positive");
    if (from_rate == to_rate) return {in.begin(), in.end()};

    constexpr double kZeroCrossings = 32.0;
    const double ratio = static_cast<double>(to_rate) / static_cast<double>(from_rate);
    const double cutoff = std::min(1.0, ratio);
    const double half_width = kZeroCrossings / cutoff;
    const auto out_len = static_cast<std::size_t>(std::llround(static_cast<double>(in.size()) * ratio));

    std::vector<float> out(out_len);
    const auto n_in = static_cast<std::ptrdiff_t>(in.size());
    for (std::size_t i = 0; i < out_len; ++i) {
        const double t = static_cast<double>(i) / ratio;
        const auto lo = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(std::ceil(t - half_width)));
        const auto hi = std::min<std::ptrdiff_t>(n_in - 1, static_cast<std::ptrdiff_t>(std::floor(t + half_width)));
        double acc = 0.0;
        for (std::ptrdiff_t j = lo; j <= hi; ++j) {
            const double d = t - static_cast<double>(j);
            const double x = cutoff * d;
            const double sinc = x == 0.0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
            const double u = d / half_width;  // in [-1, 1]
            const double blackman = 0.42 + 0.5 * std::cos(std::numbers::pi * u) +
                                    0.08 * std::cos(2.0 * std::numbers::pi * u);
            acc += static_cast<double>(in[static_cast<std::size_t>(j)]) * cutoff * sinc * blackman;
        }
        out[i] = static_cast<float>(acc);
    }
    return out;
}

}  // namespace clear::dsp
