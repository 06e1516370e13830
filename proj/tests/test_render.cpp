#include <doctest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

#include <zlib.h>

#include "clear/errors.hpp"
#include "clear/render.hpp"
#include "support.hpp"

using namespace clear;
using clear::testing::TempDir;

namespace {

std::vector<float> sine(double freq, double amp, std::size_t n) {
    std::vector<float> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = static_cast<float>(amp * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(i) / kSampleRate));
    }
    return out;
}

// Schroeder backward integration; returns the decay curve in dB relative to
// the total energy.
std::vector<double> edc_db(std::span<const double> h) {
    std::vector<double> e(h.size());
    double acc = 0;
    for (std::size_t i = h.size(); i-- > 0;) {
        acc += h[i] * h[i];
        e[i] = acc;
    }
    std::vector<double> db(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) db[i] = 10.0 * std::log10(std::max(e[i], 1e-300) / e[0]);
    return db;
}

// T30-style estimate: least-squares slope of the decay curve between -5 and
// -35 dB, extrapolated to 60 dB.
double t60_from_edc(const std::vector<double>& db) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < db.size(); ++i) {
        if (db[i] > -5.0 || db[i] < -35.0) continue;
        double x = static_cast<double>(i) / kSampleRate;
        sx += x;
        sy += db[i];
        sxx += x * x;
        sxy += x * db[i];
        ++n;
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return -60.0 / slope * 1000.0;
}

std::uint32_t be32(const unsigned char* p) {
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) | (std::uint32_t(p[2]) << 8) | p[3];
}

}  // namespace

TEST_CASE("impulse response shape") {
    auto h = reverb_impulse_response(200.0, 5);
    CHECK(h.size() == static_cast<std::size_t>(std::lround(1.5 * 0.2 * kSampleRate)));
    CHECK(h[0] == 1.0);
    CHECK(reverb_impulse_response(200.0, 5) == h);
    CHECK(reverb_impulse_response(200.0, 6) != h);
    CHECK_THROWS_AS(reverb_impulse_response(49.0, 1), InvalidArgument);
    CHECK_THROWS_AS(reverb_impulse_response(401.0, 1), InvalidArgument);
}

TEST_CASE("schroeder decay reaches -60 dB at rt60") {
    for (double rt60 : {50.0, 120.0, 200.0, 400.0}) {
        CAPTURE(rt60);
        auto h = reverb_impulse_response(rt60, 77);
        auto db = edc_db(h);
        CHECK(t60_from_edc(db) == doctest::Approx(rt60).epsilon(0.10));
        // Reverberant tail alone: first crossing of -60 dB.
        auto tail = edc_db(std::span(h).subspan(1));
        std::size_t cross = 0;
        while (cross < tail.size() && tail[cross] > -60.0) ++cross;
        CHECK(1000.0 * static_cast<double>(cross + 1) / kSampleRate == doctest::Approx(rt60).epsilon(0.10));
    }
}

TEST_CASE("reverb keeps the input length and starts with the dry signal") {
    std::vector<float> x(10000, 0.0f);
    x[0] = 1.0f;
    auto y = apply_reverb(x, 100.0, 9);
    REQUIRE(y.size() == x.size());
    auto h = reverb_impulse_response(100.0, 9);
    for (std::size_t i = 0; i < 5000 && i < h.size(); i += 13) CHECK(y[i] == doctest::Approx(h[i]).epsilon(1e-5));
}

TEST_CASE("rendered scenes are exactly 50 s at 48 kHz and peak at -1 dBFS") {
    Scene s = compose_scene({}, 3, 11);
    SynthesisSource src;
    auto w = render_scene(s, src);
    CHECK(w.size() == 2'400'000u);
    CHECK(dsp::peak(w) == doctest::Approx(dsp::db_to_linear(-1.0)).epsilon(1e-5));
    CHECK(render_scene(s, src) == w);
    auto dry = render_scene(s, src, RenderOptions{false});
    CHECK(dry.size() == w.size());
    // Dry silence before the first onset stays silent.
    CHECK(dsp::peak(std::span(dry).first(static_cast<std::size_t>(s.sounds[0].onset_sample()))) == 0.0);
}

TEST_CASE("bank source resolves sounds by id") {
    SoundBank bank;
    bank.add(synthesize_sound(Instrument::flute, Note::A, Brightness::bright, Loudness::loud, 2.0, 1));
    Scene s = compose_scene({&bank}, 0, 1);
    BankSource src(bank);
    CHECK(render_scene(s, src).size() == 2'400'000u);
    s.sounds[4].sound_id = "nowhere";
    CHECK_THROWS_AS(render_scene(s, src), MissingSound);
}

TEST_CASE("stft frame count and sine calibration") {
    const std::size_t n = 48000;
    // Bin 20 exactly: 20 * 48000 / 1024 Hz, full scale.
    auto s = sine(20.0 * kSampleRate / kStftWindow, 1.0, n);
    Stft st = compute_stft(s);
    CHECK(st.frames == 1 + (n - kStftWindow) / kStftHop);
    CHECK(st.at(10, 20) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(st.at(10, 100) < 1e-3);
    CHECK_THROWS_AS(compute_stft(std::vector<float>(1000)), InvalidArgument);
}

TEST_CASE("spectrogram geometry and tone placement") {
    for (double f : {440.0, 1000.0, 3000.0, 10000.0}) {
        CAPTURE(f);
        auto s = sine(f, 0.5, 5 * kSampleRate);
        auto img = spectrogram(s);
        REQUIRE(img.values.size() == 480u * 320u);
        int best_row = 0;
        double best = -1;
        for (int r = 0; r < SpectrogramImage::height; ++r) {
            double sum = 0;
            for (int c = 0; c < SpectrogramImage::width; ++c) sum += img.from_bottom(r, c);
            if (sum > best) {
                best = sum;
                best_row = r;
            }
        }
        double centre = (best_row + 0.5) * kRowHz;
        CHECK(std::abs(centre - f) <= kRowHz);
    }
    CHECK(kRowHz == 75.0);
    // 440 Hz: row 5 from the bottom covers 375..450 Hz.
    auto img = spectrogram(sine(440.0, 0.5, 2 * kSampleRate));
    double r5 = 0, r0 = 0;
    for (int c = 0; c < SpectrogramImage::width; ++c) {
        r5 += img.from_bottom(5, c);
        r0 += img.at(0, c);
    }
    CHECK(r5 > r0);
    for (float v : img.values) {
        CHECK(v >= 0.0f);
        CHECK(v <= 1.0f);
    }
}

TEST_CASE("silence maps to zero and full scale to one") {
    auto silent = spectrogram(std::vector<float>(48000, 0.0f));
    for (float v : silent.values) REQUIRE(v == 0.0f);
}

TEST_CASE("png output decodes to the image") {
    TempDir dir("png");
    auto img = spectrogram(sine(1000.0, 0.5, 3 * kSampleRate));
    write_png(dir.path() / "s.png", img);
    std::ifstream f(dir.path() / "s.png", std::ios::binary);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    const unsigned char sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
    REQUIRE(bytes.size() > 33);
    CHECK(std::memcmp(bytes.data(), sig, 8) == 0);
    CHECK(std::memcmp(bytes.data() + 12, "IHDR", 4) == 0);
    CHECK(be32(bytes.data() + 16) == 480);
    CHECK(be32(bytes.data() + 20) == 320);
    CHECK(bytes[24] == 8);
    CHECK(bytes[25] == 0);

    std::vector<unsigned char> idat;
    std::size_t pos = 8;
    while (pos + 8 <= bytes.size()) {
        std::uint32_t len = be32(bytes.data() + pos);
        const char* type = reinterpret_cast<const char*>(bytes.data() + pos + 4);
        if (std::memcmp(type, "IDAT", 4) == 0) idat.insert(idat.end(), bytes.begin() + pos + 8, bytes.begin() + pos + 8 + len);
        std::uint32_t crc = crc32(0, bytes.data() + pos + 4, len + 4);
        CHECK(crc == be32(bytes.data() + pos + 8 + len));
        pos += 12 + len;
    }
    std::vector<unsigned char> raw(320 * (480 + 1));
    uLongf raw_len = raw.size();
    REQUIRE(uncompress(raw.data(), &raw_len, idat.data(), idat.size()) == Z_OK);
    REQUIRE(raw_len == raw.size());
    for (int r = 0; r < 320; r += 7) {
        REQUIRE(raw[r * 481] == 0);  // filter type none
        for (int c = 0; c < 480; c += 11) {
            CHECK(raw[r * 481 + 1 + c] == static_cast<unsigned char>(std::lround(img.at(r, c) * 255.0f)));
        }
    }
}

TEST_CASE("raw spectrogram round trip") {
    TempDir dir("raw");
    auto img = spectrogram(sine(700.0, 0.3, kSampleRate));
    write_raw(dir.path() / "s.bin", img);
    auto back = read_raw(dir.path() / "s.bin");
    CHECK(back.values == img.values);
    CHECK_THROWS_AS(read_raw(dir.path() / "none.bin"), IoError);
}
