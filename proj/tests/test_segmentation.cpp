#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>

#include <gemkit/errors.hpp>
#include <gemkit/segmentation.hpp>

using namespace gemkit;
using seg::Annotation;
using seg::Frame;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    auto p = std::filesystem::temp_directory_path() / name;
    std::ofstream f(p, std::ios::binary);
    f << content;
    return p.string();
}

}  // namespace

TEST_CASE("frame placement around the reference times") {
    Annotation ann{0, 1500, 2400, 3700};
    auto fs = seg::reference_frames(ann, 4000);

    // Centre frames: start = floor(centre) - 128.
    CHECK(fs[Frame::V1_CENTRE].start == 622);  // centre (0+1500)/2 = 750
    CHECK(fs[Frame::C_CENTRE].start == 1822);  // centre (1500+2400)/2 = 1950
    CHECK(fs[Frame::V2_CENTRE].start == 2922); // centre (2400+3700)/2 = 3050
    CHECK(fs[Frame::V1_TO_C_TRANSITION].start == 1500 - 128);

    // Onset frames sit at [t, t+256); offset frames at [t-256, t).
    CHECK(fs[Frame::C_ONSET].start == 1500);
    CHECK(fs[Frame::V2_ONSET].start == 2400);
    CHECK(fs[Frame::V1_OFFSET].start == 1500 - 256);
    CHECK(fs[Frame::C_OFFSET].start == 2400 - 256);

    for (Frame f : seg::all_frames) {
        CHECK(fs[f].length == 256);
        CHECK(fs[f].end() == fs[f].start + 256);
    }
}

TEST_CASE("frames that fall outside the signal are reported by name") {
    // V1 only 100 samples long: its offset frame would start at -156.
    Annotation ann{0, 100, 2400, 3700};
    try {
        seg::reference_frames(ann, 4000);
        FAIL("expected FrameOutOfBounds");
    } catch (const FrameOutOfBounds& e) {
        REQUIRE_FALSE(e.frames.empty());
        CHECK(std::find(e.frames.begin(), e.frames.end(), "V1_OFFSET") != e.frames.end());
    }
}

TEST_CASE("minimal annotation where every frame exactly fits") {
    Annotation ann{0, 256, 512, 768};
    auto fs = seg::reference_frames(ann, 768);
    for (Frame f : seg::all_frames) {
        CHECK(fs[f].start >= 0);
        CHECK(fs[f].end() <= 768);
    }
    // The three segments tile [0,768) and each segment is one frame wide, so
    // onset/offset/centre frames coincide with the segments themselves.
    CHECK(fs[Frame::V1_CENTRE].start == 0);
    CHECK(fs[Frame::C_ONSET].start == 256);
    CHECK(fs[Frame::C_CENTRE].start == 256);
    CHECK(fs[Frame::C_OFFSET].start == 256);
    CHECK(fs[Frame::V2_CENTRE].start == 512);
    CHECK(ann.segments_at_least());
}

TEST_CASE("time parameters are exact sample counts converted to ms") {
    Annotation ann{0, 1579, 2446, 3505};
    auto t = seg::time_params(ann, 10000.0);
    CHECK(t.v1d == Catch::Approx(157.9).margin(1e-12));
    CHECK(t.cd == Catch::Approx(86.7).margin(1e-12));
    CHECK(t.v2d == Catch::Approx(105.9).margin(1e-12));
    CHECK(t.utd == Catch::Approx(350.5).margin(1e-12));
    CHECK(t.v1_samples + t.c_samples + t.v2_samples == t.ut_samples);
    CHECK(t.v1d + t.cd + t.v2d == Catch::Approx(t.utd).margin(1e-9));

    Annotation even{0, 1000, 2000, 3000};
    auto u = seg::time_params(even, 10000.0);
    CHECK(u.v1d == 100.0);
    CHECK(u.cd == 100.0);
    CHECK(u.v2d == 100.0);
    CHECK(u.utd == 300.0);
    CHECK(u.cd_over_v1d == 1.0);
}

TEST_CASE("annotation ordering invariant is enforced") {
    CHECK_THROWS_AS((Annotation{0, 2000, 1500, 3700}.validate()), InvariantViolation);
    CHECK_THROWS_AS((Annotation{-5, 100, 200, 300}.validate()), InvariantViolation);
    CHECK_THROWS_AS((Annotation{0, 0, 200, 300}.validate()), InvariantViolation);
    CHECK_THROWS_AS((Annotation{0, 100, 200, 300}.validate(250)), InvariantViolation);
    CHECK_NOTHROW(Annotation{0, 100, 200, 300}.validate(300));
}

TEST_CASE("annotation CSV round-trips through save and load") {
    seg::AnnotationMap m;
    m["AMA1FS1.wav"] = {120, 1699, 2566, 3625};
    m["ANNA2MS3.wav"] = {0, 1500, 3600, 4700};
    auto path = write_temp("gemkit_ann_roundtrip.csv", "");
    seg::save_annotations(m, path);
    auto back = seg::load_annotations(path);
    CHECK(back == m);
}

TEST_CASE("annotation CSV accepts the documented row format") {
    auto path = write_temp("gemkit_ann_basic.csv",
                           std::string(seg::kAnnotationHeader) +
                               "\nAMA1FS1.wav,120,1699,2566,3625\n");
    auto m = seg::load_annotations(path);
    REQUIRE(m.size() == 1);
    CHECK(m.at("AMA1FS1.wav") == Annotation{120, 1699, 2566, 3625});
}

TEST_CASE("annotation CSV failure modes") {
    SECTION("duplicate file rows") {
        auto path = write_temp("gemkit_ann_dup.csv",
                               "AMA1FS1.wav,120,1699,2566,3625\n"
                               "AMA1FS1.wav,130,1700,2500,3600\n");
        CHECK_THROWS_AS(seg::load_annotations(path), DuplicateEntry);
    }
    SECTION("reference times out of order") {
        auto path = write_temp("gemkit_ann_order.csv",
                               "AMA1FS1.wav,120,2566,1699,3625\n");
        CHECK_THROWS_AS(seg::load_annotations(path), InvariantViolation);
    }
    SECTION("malformed rows report the line number") {
        auto path = write_temp("gemkit_ann_bad.csv",
                               "AMA1FS1.wav,120,1699,2566,3625\n"
                               "ANNA1FS1.wav,120,xyz,2566,3625\n");
        try {
            seg::load_annotations(path);
            FAIL("expected MalformedRow");
        } catch (const MalformedRow& e) {
            CHECK(e.line == 2);
        }
        auto missing = write_temp("gemkit_ann_short.csv", "AMA1FS1.wav,120,1699\n");
        CHECK_THROWS_AS(seg::load_annotations(missing), MalformedRow);
        auto extra = write_temp("gemkit_ann_long.csv", "AMA1FS1.wav,1,2,3,4,5\n");
        CHECK_THROWS_AS(seg::load_annotations(extra), MalformedRow);
    }
    SECTION("missing file") {
        CHECK_THROWS_AS(seg::load_annotations("/no/such/annotations.csv"), Error);
    }
}

TEST_CASE("segments_at_least mirrors the frame-fitting soft invariant") {
    CHECK(Annotation{0, 256, 512, 768}.segments_at_least());
    CHECK_FALSE(Annotation{0, 255, 512, 768}.segments_at_least());
    CHECK_FALSE(Annotation{0, 256, 511, 768}.segments_at_least());
    CHECK_FALSE(Annotation{0, 300, 600, 855}.segments_at_least());
}
