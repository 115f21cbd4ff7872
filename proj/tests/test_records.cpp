#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gemkit/corpus.hpp>
#include <gemkit/errors.hpp>
#include <gemkit/records.hpp>
#include <gemkit/synth.hpp>

using namespace gemkit;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

// A rendered nasal token with everything measurable.
records::ParameterRecord measured_nasal() {
    synth::SynthSpec spec;
    spec.f0 = 120.0;
    auto [buf, ann] = synth::synth_token_waveform(spec);
    TokenMeta meta = make_meta(Consonant::m, Vowel::a, Form::singleton, Speaker::FS1, 1);
    auto rec = records::measure_token(buf, ann, meta);
    rec.file = corpus::format_token_name(meta);
    return rec;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path tmp(const std::string& name) { return fs::temp_directory_path() / name; }

}  // namespace

TEST_CASE("measure_token fills time, energy and the spectral schedule") {
    auto rec = measured_nasal();
    CHECK(rec.source == records::Source::measured);
    CHECK(rec.frames_available);
    CHECK(rec.time.v1d == Approx(150.0));
    CHECK(rec.time.cd == Approx(90.0));
    CHECK(rec.time.v2d == Approx(130.0));
    CHECK(rec.time.utd == Approx(370.0));

    // Voiced synthetic token: every frame carries F0 near the source value.
    for (seg::Frame f : seg::all_frames) {
        const auto& cell = rec.spectral[std::size_t(f)];
        REQUIRE(cell.f0.has_value());
        CHECK(*cell.f0 == Approx(120.0).margin(2.0));
    }

    // Nasal schedule: consonant frames carry no formants.
    for (seg::Frame f : {seg::Frame::C_ONSET, seg::Frame::C_CENTRE, seg::Frame::C_OFFSET}) {
        const auto& cell = rec.spectral[std::size_t(f)];
        CHECK_FALSE(cell.f1.has_value());
        CHECK_FALSE(cell.f2.has_value());
        CHECK_FALSE(cell.f3.has_value());
    }
    // Vowel frames do (the render uses well-separated formants).
    CHECK(rec.spectral[std::size_t(seg::Frame::V1_CENTRE)].f1.has_value());
    CHECK(rec.spectral[std::size_t(seg::Frame::V2_CENTRE)].f1.has_value());

    CHECK(rec.energy.e_tot_v1.has_value());
    CHECK(rec.energy.e_tot_c.has_value());
    CHECK(rec.energy.e_i_ccent.has_value());
}

TEST_CASE("liquid consonant frames are scheduled for formants") {
    for (seg::Frame f : seg::all_frames) {
        bool expect = !(f == seg::Frame::C_ONSET || f == seg::Frame::C_CENTRE ||
                        f == seg::Frame::C_OFFSET);
        CHECK(records::formants_scheduled(f, Family::nasals) == expect);
        CHECK(records::formants_scheduled(f, Family::liquids) == true);
    }
}

TEST_CASE("tokens too short for frames keep segment measures only") {
    SignalBuffer buf;
    buf.sample_rate = 10000.0;
    buf.samples.assign(700, 0.1);
    seg::Annotation ann{0, 200, 450, 700};  // v1 and v2 under one frame
    TokenMeta meta = make_meta(Consonant::n, Vowel::i, Form::singleton, Speaker::MS2, 2);
    auto rec = records::measure_token(buf, ann, meta);
    CHECK_FALSE(rec.frames_available);
    CHECK(rec.time.cd == Approx(25.0));
    CHECK(rec.energy.e_tot_v1.has_value());
    CHECK(rec.energy.e_tot_c.has_value());
    CHECK_FALSE(rec.energy.e_i_v1cent.has_value());
    for (seg::Frame f : seg::all_frames) {
        CHECK_FALSE(rec.spectral[std::size_t(f)].f0.has_value());
        CHECK_FALSE(rec.spectral[std::size_t(f)].f1.has_value());
    }
}

TEST_CASE("records CSV round-trips and is stable on a second pass") {
    auto rec = measured_nasal();
    auto rec2 = rec;
    rec2.file = "AMMA2FS2.wav";
    rec2.meta = make_meta(Consonant::m, Vowel::a, Form::geminate, Speaker::FS2, 2);
    rec2.source = records::Source::synthetic;
    rec2.spectral[0].f3.reset();         // exercise an NA cell
    rec2.energy.e_i_coff.reset();        // exercise a silent cell

    auto p1 = tmp("gemkit_records_1.csv").string();
    auto p2 = tmp("gemkit_records_2.csv").string();
    records::write_records_csv({rec, rec2}, p1);

    auto text = slurp(p1);
    CHECK(text.rfind(records::kSchemaLine, 0) == 0);  // schema comment first
    CHECK(text.find(",NA") != std::string::npos);
    CHECK(text.find(",silent") != std::string::npos);

    auto back = records::read_records_csv(p1);
    REQUIRE(back.size() == 2);
    CHECK(back[0].file == rec.file);
    CHECK(back[0].meta == rec.meta);
    CHECK(back[0].frames_available == rec.frames_available);
    CHECK(back[1].source == records::Source::synthetic);
    CHECK_FALSE(back[1].spectral[0].f3.has_value());
    CHECK_FALSE(back[1].energy.e_i_coff.has_value());

    // Second generation: writing the parsed records reproduces the bytes.
    records::write_records_csv(back, p2);
    CHECK(slurp(p2) == text);
}

TEST_CASE("records CSV enforces schema, header and row shape") {
    auto path = tmp("gemkit_records_bad.csv").string();
    auto write = [&](const std::string& text) {
        std::ofstream f(path, std::ios::binary);
        f << text;
    };
    write("file,word\nX,ama\n");
    CHECK_THROWS_WITH(records::read_records_csv(path),
                      Catch::Matchers::ContainsSubstring("schema"));
    write(std::string(records::kSchemaLine) + "\nfile,word\n");
    CHECK_THROWS_WITH(records::read_records_csv(path),
                      Catch::Matchers::ContainsSubstring("header"));

    // Truncated data row.
    write(std::string(records::kSchemaLine) + "\n" + records::records_csv_header() +
          "\nAMA1FS1.wav,ama,m\n");
    CHECK_THROWS_AS(records::read_records_csv(path), MalformedRow);

    // Right shape, wrong field content.
    auto rec = measured_nasal();
    auto good = tmp("gemkit_records_good.csv").string();
    records::write_records_csv({rec}, good);
    auto text = slurp(good);
    auto mangled = text;
    auto pos = mangled.find("singleton");
    REQUIRE(pos != std::string::npos);
    mangled.replace(pos, 9, "sungleton");
    write(mangled);
    CHECK_THROWS_AS(records::read_records_csv(path), MalformedRow);

    CHECK_THROWS_AS(records::read_records_csv("/no/such/records.csv"), Error);
}

TEST_CASE("JSON mirror uses null for absent cells") {
    auto rec = measured_nasal();
    rec.spectral[std::size_t(seg::Frame::C_CENTRE)].f0.reset();
    rec.energy.e_tot_c.reset();
    auto path = tmp("gemkit_records.json").string();
    records::write_records_json({rec}, path);

    auto j = nlohmann::json::parse(slurp(path));
    REQUIRE(j.is_array());
    REQUIRE(j.size() == 1);
    const auto& r = j[0];
    CHECK(r["file"] == "AMA1FS1.wav");
    CHECK(r["word"] == "ama");
    CHECK(r["form"] == "singleton");
    CHECK(r["time"]["cd"].get<double>() == Approx(90.0));
    CHECK(r["spectral"]["c_centre"]["f0"].is_null());
    CHECK(r["energy"]["e_tot_c"].is_null());
    CHECK(r["spectral"]["v1_centre"]["f0"].is_number());
}

TEST_CASE("feature lookup by name") {
    auto rec = measured_nasal();
    CHECK(records::feature_value(rec, "v1d") == rec.time.v1d);
    CHECK(records::feature_value(rec, "cd") == rec.time.cd);
    CHECK(records::feature_value(rec, "v2d") == rec.time.v2d);
    CHECK(records::feature_value(rec, "utd") == rec.time.utd);
    CHECK(records::feature_value(rec, "cd_over_v1d") == rec.time.cd_over_v1d);
    CHECK_THROWS_AS(records::feature_value(rec, "f1"), MissingFeature);
}

TEST_CASE("CSV header names every column exactly once") {
    auto cols = records::split_csv_line(records::records_csv_header());
    CHECK(cols.size() == 16 + 32 + 8);
    std::set<std::string> uniq(cols.begin(), cols.end());
    CHECK(uniq.size() == cols.size());
    CHECK(cols[0] == "file");
    CHECK(cols[16] == "v1_centre_f0");
    CHECK(cols.back() == "e_i_coff");
}
