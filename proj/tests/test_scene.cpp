#include <doctest.h>

#include <map>

#include "clear/errors.hpp"
#include "clear/scene.hpp"
#include "support.hpp"

using namespace clear;
using clear::testing::make_scene;
using clear::testing::SoundSpec;

TEST_CASE("composed scenes satisfy the layout invariants") {
    for (std::int64_t id = 0; id < 300; ++id) {
        Scene s = compose_scene({}, id, 1234);
        CAPTURE(id);
        REQUIRE(s.sounds.size() == 10);
        CHECK(s.duration_s == 50.0);
        CHECK(s.reverb_time_ms >= 50.0);
        CHECK(s.reverb_time_ms <= 400.0);
        CHECK(s.sounds.front().onset_sample() >= 0);
        CHECK(s.sounds.back().onset_sample() + s.sounds.back().length_samples() <= kSceneSamples);
        for (std::size_t i = 0; i < s.sounds.size(); ++i) {
            const auto& snd = s.sounds[i];
            CHECK(snd.duration_s >= 2.0 - 1e-9);
            CHECK(snd.duration_s <= 3.0 + 1e-9);
            CHECK(snd.absolute_position == static_cast<int>(i) + 1);
            if (i + 1 < s.sounds.size()) {
                // No overlap: each sound ends before the next begins.
                CHECK(snd.onset_sample() + snd.length_samples() <= s.sounds[i + 1].onset_sample());
            }
        }
    }
}

TEST_CASE("positions agree with an independent recount") {
    for (std::int64_t id = 0; id < 200; ++id) {
        Scene s = compose_scene({}, id, 99);
        std::map<Instrument, int> seen;
        for (const auto& snd : s.sounds) {
            int rank = 1;
            for (const auto& other : s.sounds) {
                if (other.onset_s < snd.onset_s) ++rank;
            }
            CHECK(snd.absolute_position == rank);
            CHECK(snd.relative_position == ++seen[snd.attributes.instrument]);
            const double third = 50.0 / 3.0;
            GlobalPosition gp = snd.onset_s < third ? GlobalPosition::beginning
                                : snd.onset_s < 2 * third ? GlobalPosition::middle
                                                          : GlobalPosition::end;
            CHECK(snd.global_position == gp);
        }
    }
}

TEST_CASE("composition is deterministic per (master seed, scene id)") {
    CHECK(compose_scene({}, 5, 42) == compose_scene({}, 5, 42));
    CHECK_FALSE(compose_scene({}, 5, 42) == compose_scene({}, 6, 42));
    CHECK_FALSE(compose_scene({}, 5, 42) == compose_scene({}, 5, 43));
    // Scene k does not depend on earlier scenes being generated.
    CHECK(compose_scene({}, 1000, 42).seed == scene_seed(42, 1000));
}

TEST_CASE("reverb times spread over the allowed range") {
    double lo = 1e9, hi = 0;
    for (std::int64_t id = 0; id < 2000; ++id) {
        double r = compose_scene({}, id, 3).reverb_time_ms;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    CHECK(lo < 60.0);
    CHECK(hi > 390.0);
}

TEST_CASE("hand-placed positions") {
    Scene s = make_scene({
        {Instrument::violin, Note::A, Brightness::bright, Loudness::loud, 1.0},
        {Instrument::cello, Note::B, Brightness::dark, Loudness::quiet, 10.0},
        {Instrument::violin, Note::C, Brightness::dark, Loudness::loud, 20.0},
        {Instrument::violin, Note::D, Brightness::bright, Loudness::quiet, 40.0},
    });
    CHECK(s.sounds[0].relative_position == 1);
    CHECK(s.sounds[1].relative_position == 1);
    CHECK(s.sounds[2].relative_position == 2);
    CHECK(s.sounds[3].relative_position == 3);
    CHECK(s.sounds[0].global_position == GlobalPosition::beginning);
    CHECK(s.sounds[2].global_position == GlobalPosition::middle);
    CHECK(s.sounds[3].global_position == GlobalPosition::end);
    CHECK(s.sounds[3].absolute_position == 4);

    std::vector<SceneSound> bad(2);
    bad[0].onset_s = 5.0;
    bad[1].onset_s = 5.0;
    CHECK_THROWS_AS(derive_positions(bad), InvalidArgument);
}

TEST_CASE("bank composition uses bank tuples and lengths") {
    SoundBank bank;
    auto a = synthesize_sound(Instrument::trumpet, Note::G, Brightness::bright, Loudness::loud, 1.5, 1);
    auto b = synthesize_sound(Instrument::cello, Note::D, Brightness::dark, Loudness::quiet, 4.0, 2);
    bank.add(a);
    bank.add(b);
    for (std::int64_t id = 0; id < 20; ++id) {
        Scene s = compose_scene({&bank}, id, 7);
        for (const auto& snd : s.sounds) {
            const auto* src = bank.by_id(snd.sound_id);
            REQUIRE(src != nullptr);
            CHECK(snd.attributes == src->attributes);
            CHECK(snd.length_samples() == static_cast<std::int64_t>(src->waveform.size()));
        }
    }
}

TEST_CASE("scene json round trip") {
    Scene s = compose_scene({}, 17, 5);
    auto j = to_json(s);
    CHECK(scene_from_json(j) == s);
    auto broken = j;
    broken["sounds"][0].erase("instrument");
    CHECK_THROWS_AS(scene_from_json(broken), ValidationError);
    auto unknown = j;
    unknown["sounds"][0]["instrument"] = "piano";
    CHECK_THROWS_AS(scene_from_json(unknown), ValidationError);
}
